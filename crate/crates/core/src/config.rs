//! Run configuration: a flat TOML key/value document mapped onto the
//! validated parameter groups.
//!
//! | key | unit | default |
//! |-----|------|---------|
//! | `lambda_so_eV` | eV | required |
//! | `v_fermi_m_per_s` | m/s | required |
//! | `L_inv_eV` | eV^-1 | 2.0 |
//! | `d1_inv_eV`, `d2_inv_eV` | eV^-1 | 0.9, 1.1 |
//! | `sigma1_re_eV`, `sigma2_re_eV` | eV | 4.2e-3 |
//! | `sigma1_im_eV`, `sigma2_im_eV` | eV | 1e-6 |
//! | `p1_eV`, `p2_eV` | eV | 0.13, 0.12 |
//! | `phi1_rad`, `phi2_rad` | rad | 0, 0 |
//! | `n_max` | - | 50 |
//! | `n_phi` | - | 1024 |
//! | `coupling` | - | 0.0917 |
//! | `epsilon_reg` | eV^2 | 1e-9 |
//! | `degeneracy_tol` | - | 1e-10 |
//! | `q_cutoff_eV` | eV | 0.2 |
//! | `angular_scheme` | `split` \| `plain` | `split` |
//! | `lambda_so2_eV`, `v_fermi2_m_per_s` | | layer-1 values |
//! | `weights` | `equal` \| `ee_doubled` \| `random_phase` | `equal` |
//! | `weight_seed` | - | 0 |
//! | `log_base` | `natural` \| `base2` | `natural` |
//! | `vertex` | `matrix` \| `closed_form` | `matrix` |
//! | `layer2_operator` | `direct` \| `transposed` | `direct` |

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bse::{Layer2Operator, WeightPreset};
use crate::entanglement::LogBase;
use crate::error::{Error, Result};
use crate::spinors::VertexForm;
use crate::units::{
    AngularScheme, CavityParams, Kinematics, LayerParams, PhysicalConstants, QuadratureParams,
};

pub const DEFAULT_LENGTH: f64 = 2.0;
pub const DEFAULT_COUPLING: f64 = 0.0917;
pub const DEFAULT_EPSILON_REG: f64 = 1e-9;
pub const DEFAULT_N_MAX: usize = 50;
pub const DEFAULT_Q_CUTOFF: f64 = 0.2;

/// Silicene-like reference document; every other key takes its default.
pub const BASELINE_DOCUMENT: &str = "lambda_so_eV = 3.9e-3\nv_fermi_m_per_s = 5.5e5\n";

/// Every field of the on-disk document, defaults already applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct ConfigDocument {
    pub lambda_so_eV: f64,
    pub v_fermi_m_per_s: f64,
    #[serde(default)]
    pub lambda_so2_eV: Option<f64>,
    #[serde(default)]
    pub v_fermi2_m_per_s: Option<f64>,
    #[serde(default = "defaults::length")]
    pub L_inv_eV: f64,
    #[serde(default = "defaults::d1")]
    pub d1_inv_eV: f64,
    #[serde(default = "defaults::d2")]
    pub d2_inv_eV: f64,
    #[serde(default = "defaults::sigma_re")]
    pub sigma1_re_eV: f64,
    #[serde(default = "defaults::sigma_im")]
    pub sigma1_im_eV: f64,
    #[serde(default = "defaults::sigma_re")]
    pub sigma2_re_eV: f64,
    #[serde(default = "defaults::sigma_im")]
    pub sigma2_im_eV: f64,
    #[serde(default = "defaults::p1")]
    pub p1_eV: f64,
    #[serde(default = "defaults::p2")]
    pub p2_eV: f64,
    #[serde(default)]
    pub phi1_rad: f64,
    #[serde(default)]
    pub phi2_rad: f64,
    #[serde(default = "defaults::n_max")]
    pub n_max: usize,
    #[serde(default = "defaults::n_phi")]
    pub n_phi: usize,
    #[serde(default = "defaults::coupling")]
    pub coupling: f64,
    #[serde(default = "defaults::epsilon_reg")]
    pub epsilon_reg: f64,
    #[serde(default = "defaults::degeneracy_tol")]
    pub degeneracy_tol: f64,
    #[serde(default = "defaults::q_cutoff")]
    pub q_cutoff_eV: f64,
    #[serde(default)]
    pub angular_scheme: AngularScheme,
    #[serde(default)]
    pub weights: WeightPreset,
    #[serde(default)]
    pub weight_seed: u64,
    #[serde(default)]
    pub log_base: LogBase,
    #[serde(default)]
    pub vertex: VertexForm,
    #[serde(default)]
    pub layer2_operator: Layer2Operator,
}

mod defaults {
    pub fn length() -> f64 {
        super::DEFAULT_LENGTH
    }
    pub fn d1() -> f64 {
        0.9
    }
    pub fn d2() -> f64 {
        1.1
    }
    pub fn sigma_re() -> f64 {
        4.2e-3
    }
    pub fn sigma_im() -> f64 {
        1e-6
    }
    pub fn p1() -> f64 {
        0.13
    }
    pub fn p2() -> f64 {
        0.12
    }
    pub fn n_max() -> usize {
        super::DEFAULT_N_MAX
    }
    pub fn n_phi() -> usize {
        1024
    }
    pub fn coupling() -> f64 {
        super::DEFAULT_COUPLING
    }
    pub fn epsilon_reg() -> f64 {
        super::DEFAULT_EPSILON_REG
    }
    pub fn degeneracy_tol() -> f64 {
        1e-10
    }
    pub fn q_cutoff() -> f64 {
        super::DEFAULT_Q_CUTOFF
    }
}

/// Validated, immutable configuration of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub constants: PhysicalConstants,
    pub layers: [LayerParams; 2],
    pub cavity: CavityParams,
    pub kinematics: Kinematics,
    pub quadrature: QuadratureParams,
    pub weights: WeightPreset,
    pub weight_seed: u64,
    pub log_base: LogBase,
    pub vertex: VertexForm,
    pub layer2_operator: Layer2Operator,
}

impl RunConfig {
    /// Silicene-like reference point with every default filled in.
    pub fn baseline() -> Self {
        let doc: ConfigDocument =
            toml::from_str(BASELINE_DOCUMENT).expect("baseline document parses");
        Self::from_document(&doc).expect("baseline document is valid")
    }

    pub fn from_document(doc: &ConfigDocument) -> Result<Self> {
        let constants = PhysicalConstants::default();
        let layers = [
            LayerParams {
                lambda_so: doc.lambda_so_eV,
                v_fermi: doc.v_fermi_m_per_s,
                d: doc.d1_inv_eV,
                sigma: Complex64::new(doc.sigma1_re_eV, doc.sigma1_im_eV),
            },
            LayerParams {
                lambda_so: doc.lambda_so2_eV.unwrap_or(doc.lambda_so_eV),
                v_fermi: doc.v_fermi2_m_per_s.unwrap_or(doc.v_fermi_m_per_s),
                d: doc.d2_inv_eV,
                sigma: Complex64::new(doc.sigma2_re_eV, doc.sigma2_im_eV),
            },
        ];
        let cfg = RunConfig {
            constants,
            layers,
            cavity: CavityParams {
                length: doc.L_inv_eV,
                n_max: doc.n_max,
                coupling: doc.coupling,
                epsilon_reg: doc.epsilon_reg,
                q_cutoff: doc.q_cutoff_eV,
            },
            kinematics: Kinematics::new(doc.p1_eV, doc.p2_eV, doc.phi1_rad, doc.phi2_rad),
            quadrature: QuadratureParams {
                n_phi: doc.n_phi,
                degeneracy_tol: doc.degeneracy_tol,
                scheme: doc.angular_scheme,
            },
            weights: doc.weights,
            weight_seed: doc.weight_seed,
            log_base: doc.log_base,
            vertex: doc.vertex,
            layer2_operator: doc.layer2_operator,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.cavity.validate()?;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.validate(i + 1, &self.constants)?;
            if layer.d > self.cavity.length {
                return Err(Error::invalid(
                    format!("d{}_inv_eV", i + 1),
                    format!(
                        "{} exceeds cavity length L = {}",
                        layer.d, self.cavity.length
                    ),
                ));
            }
        }
        self.kinematics.validate()?;
        self.quadrature.validate()
    }

    /// Document form with every key explicit.
    pub fn to_document(&self) -> ConfigDocument {
        let [l1, l2] = &self.layers;
        ConfigDocument {
            lambda_so_eV: l1.lambda_so,
            v_fermi_m_per_s: l1.v_fermi,
            lambda_so2_eV: (l2.lambda_so != l1.lambda_so).then_some(l2.lambda_so),
            v_fermi2_m_per_s: (l2.v_fermi != l1.v_fermi).then_some(l2.v_fermi),
            L_inv_eV: self.cavity.length,
            d1_inv_eV: l1.d,
            d2_inv_eV: l2.d,
            sigma1_re_eV: l1.sigma.re,
            sigma1_im_eV: l1.sigma.im,
            sigma2_re_eV: l2.sigma.re,
            sigma2_im_eV: l2.sigma.im,
            p1_eV: self.kinematics.p1,
            p2_eV: self.kinematics.p2,
            phi1_rad: self.kinematics.phi1,
            phi2_rad: self.kinematics.phi2,
            n_max: self.cavity.n_max,
            n_phi: self.quadrature.n_phi,
            coupling: self.cavity.coupling,
            epsilon_reg: self.cavity.epsilon_reg,
            degeneracy_tol: self.quadrature.degeneracy_tol,
            q_cutoff_eV: self.cavity.q_cutoff,
            angular_scheme: self.quadrature.scheme,
            weights: self.weights,
            weight_seed: self.weight_seed,
            log_base: self.log_base,
            vertex: self.vertex,
            layer2_operator: self.layer2_operator,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_document()).expect("config document serializes")
    }

    /// `(key, value)` pairs of the full document in key order.
    pub fn key_values(&self) -> Vec<(String, String)> {
        let table = toml::Table::try_from(self.to_document()).expect("config document serializes");
        let mut pairs: Vec<_> = table.into_iter().map(|(k, v)| (k, v.to_string())).collect();
        pairs.sort();
        pairs
    }

    /// Copy with one document key replaced.
    pub fn with_value(&self, key: &str, value: f64) -> Result<Self> {
        self.with_values(&[(key, value)])
    }

    /// Copy with several numeric document keys replaced, validated once.
    pub fn with_values(&self, values: &[(&str, f64)]) -> Result<Self> {
        let mut table =
            toml::Table::try_from(self.to_document()).map_err(|e| Error::Parse(e.to_string()))?;
        for &(key, value) in values {
            if !is_numeric_key(key) {
                return Err(Error::invalid(key, "not a numeric configuration key"));
            }
            let v = if INTEGER_KEYS.contains(&key) {
                if value.fract() != 0.0 || value < 0.0 {
                    return Err(Error::invalid(key, "must be a non-negative integer"));
                }
                toml::Value::Integer(value as i64)
            } else {
                toml::Value::Float(value)
            };
            set_key(&mut table, key, v)?;
        }
        Self::from_table(table)
    }

    /// Current value of a numeric document key.
    pub fn numeric_value(&self, key: &str) -> Result<f64> {
        if !is_numeric_key(key) {
            return Err(Error::invalid(key, "not a numeric configuration key"));
        }
        let table =
            toml::Table::try_from(self.to_document()).map_err(|e| Error::Parse(e.to_string()))?;
        match table.get(key) {
            Some(toml::Value::Float(f)) => Ok(*f),
            Some(toml::Value::Integer(i)) => Ok(*i as f64),
            _ => match key {
                "lambda_so2_eV" => Ok(self.layers[1].lambda_so),
                "v_fermi2_m_per_s" => Ok(self.layers[1].v_fermi),
                _ => Err(Error::invalid(key, "has no numeric value")),
            },
        }
    }

    fn from_table(table: toml::Table) -> Result<Self> {
        let doc: ConfigDocument = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
        Self::from_document(&doc)
    }
}

const INTEGER_KEYS: [&str; 3] = ["n_max", "n_phi", "weight_seed"];

fn known_key(key: &str) -> bool {
    const KEYS: [&str; 27] = [
        "lambda_so_eV",
        "v_fermi_m_per_s",
        "lambda_so2_eV",
        "v_fermi2_m_per_s",
        "L_inv_eV",
        "d1_inv_eV",
        "d2_inv_eV",
        "sigma1_re_eV",
        "sigma1_im_eV",
        "sigma2_re_eV",
        "sigma2_im_eV",
        "p1_eV",
        "p2_eV",
        "phi1_rad",
        "phi2_rad",
        "n_max",
        "n_phi",
        "coupling",
        "epsilon_reg",
        "degeneracy_tol",
        "q_cutoff_eV",
        "angular_scheme",
        "weights",
        "weight_seed",
        "log_base",
        "vertex",
        "layer2_operator",
    ];
    KEYS.contains(&key)
}

/// True when `key` is a numeric document key that a sweep axis may drive.
pub fn is_numeric_key(key: &str) -> bool {
    known_key(key)
        && !matches!(
            key,
            "weights" | "log_base" | "vertex" | "angular_scheme" | "layer2_operator"
        )
}

fn set_key(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    if !known_key(key) {
        return Err(Error::invalid(key, "unknown configuration key"));
    }
    // integers are accepted for float keys
    let value = match value {
        toml::Value::Integer(i) if !INTEGER_KEYS.contains(&key) => toml::Value::Float(i as f64),
        v => v,
    };
    table.insert(key.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&wrapped) {
        Ok(mut t) => t
            .remove("v")
            .unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Parses a document and applies `key=value` overrides on top of it.
pub fn load_config_with_overrides(
    source: &str,
    overrides: &[(String, String)],
) -> Result<RunConfig> {
    let parsed: toml::Table = toml::from_str(source).map_err(|e| Error::Parse(e.to_string()))?;
    let mut table = toml::Table::new();
    for (k, v) in parsed {
        set_key(&mut table, &k, v)?;
    }
    for (k, raw) in overrides {
        set_key(&mut table, k, parse_value(raw))?;
    }
    RunConfig::from_table(table)
}

pub fn load_config(source: &str) -> Result<RunConfig> {
    load_config_with_overrides(source, &[])
}

/// Splits `key=value`.
pub fn parse_override(arg: &str) -> Result<(String, String)> {
    let (k, v) = arg
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("expected key=value, got `{arg}`")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}
