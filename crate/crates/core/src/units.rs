//! Natural-unit conventions (hbar = c = 1, eV / eV^-1) and the validated
//! parameter groups that make up a run.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed conversion constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// hbar * c in eV nm.
    pub hbar_c: f64,
    /// Speed of light in m/s.
    pub c_si: f64,
}

impl PhysicalConstants {
    pub const HBAR_C_EV_NM: f64 = 197.326_980_4;
    pub const C_SI: f64 = 299_792_458.0;
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar_c: Self::HBAR_C_EV_NM,
            c_si: Self::C_SI,
        }
    }
}

/// Physical constants of one layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerParams {
    /// Spin-orbit gap in eV.
    pub lambda_so: f64,
    /// Fermi velocity in m/s.
    pub v_fermi: f64,
    /// Position inside the cavity in eV^-1.
    pub d: f64,
    /// Phenomenological self-energy; the imaginary part is the decay rate.
    pub sigma: Complex64,
}

impl LayerParams {
    pub fn validate(&self, index: usize, constants: &PhysicalConstants) -> Result<()> {
        let name = |field: &str| format!("layer{index}.{field}");
        if !(self.lambda_so.is_finite() && self.lambda_so > 0.0) {
            return Err(Error::invalid(name("lambda_so"), "must be positive"));
        }
        if !(self.v_fermi.is_finite() && self.v_fermi > 0.0 && self.v_fermi < constants.c_si) {
            return Err(Error::invalid(
                name("v_fermi"),
                "must lie strictly between 0 and c",
            ));
        }
        if !(self.d.is_finite() && self.d >= 0.0) {
            return Err(Error::invalid(name("d"), "must be non-negative"));
        }
        if !(self.sigma.re.is_finite() && self.sigma.im.is_finite()) {
            return Err(Error::invalid(name("sigma"), "must be finite"));
        }
        if self.sigma.im < 0.0 {
            return Err(Error::invalid(name("sigma_im"), "decay rate must be >= 0"));
        }
        Ok(())
    }

    /// Coherence time 1 / Im(sigma) in eV^-1.
    pub fn coherence_time(&self) -> f64 {
        1.0 / self.sigma.im
    }
}

/// Effective Dirac mass `lambda_so / (v_F / c)` in eV.
pub fn derived_mass(layer: &LayerParams, constants: &PhysicalConstants) -> Result<f64> {
    if !(layer.v_fermi > 0.0) {
        return Err(Error::invalid("v_fermi", "must be positive"));
    }
    Ok(layer.lambda_so * constants.c_si / layer.v_fermi)
}

/// Planar cavity geometry and coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Cavity length in eV^-1.
    pub length: f64,
    /// Highest standing-wave mode kept in the sum.
    pub n_max: usize,
    /// Overall interaction strength (absorbs e^2 and zeta^2).
    pub coupling: f64,
    /// i*epsilon regulator of the photon denominator, eV^2.
    pub epsilon_reg: f64,
    /// Largest exchanged in-plane photon momentum, eV.
    pub q_cutoff: f64,
}

impl CavityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::invalid("L_inv_eV", "must be positive"));
        }
        if self.n_max < 1 {
            return Err(Error::invalid("n_max", "must be at least 1"));
        }
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(Error::invalid("coupling", "must be non-negative"));
        }
        if !(self.epsilon_reg.is_finite() && self.epsilon_reg > 0.0) {
            return Err(Error::invalid("epsilon_reg", "must be positive"));
        }
        if !(self.q_cutoff > 0.0) {
            return Err(Error::invalid("q_cutoff_eV", "must be positive"));
        }
        Ok(())
    }
}

/// Momentum configuration at which the conditional state is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kinematics {
    pub p1: f64,
    pub p2: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl Kinematics {
    /// Builds a configuration with angles wrapped into (-pi, pi].
    pub fn new(p1: f64, p2: f64, phi1: f64, phi2: f64) -> Self {
        Self {
            p1,
            p2,
            phi1: wrap_angle(phi1),
            phi2: wrap_angle(phi2),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p1.is_finite() && self.p1 >= 0.0) {
            return Err(Error::invalid("p1_eV", "must be non-negative"));
        }
        if !(self.p2.is_finite() && self.p2 >= 0.0) {
            return Err(Error::invalid("p2_eV", "must be non-negative"));
        }
        if !(self.phi1.is_finite() && self.phi2.is_finite()) {
            return Err(Error::invalid("phi", "angles must be finite"));
        }
        Ok(())
    }
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(phi: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut a = phi.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    a
}

/// How the angular integral over [0, 2 pi] is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngularScheme {
    /// Composite rule with panel ends at the angles where the radial root
    /// appears, disappears or crosses the momentum cutoff.
    #[default]
    Split,
    /// One rule over the whole circle, `phi_i = pi (x_i + 1)`.
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureParams {
    /// Gauss-Legendre node count for the angular integral.
    pub n_phi: usize,
    /// Below this magnitude a root denominator or |F'| counts as singular.
    pub degeneracy_tol: f64,
    pub scheme: AngularScheme,
}

impl QuadratureParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_phi < 2 {
            return Err(Error::invalid("n_phi", "must be at least 2"));
        }
        if !(self.degeneracy_tol.is_finite() && self.degeneracy_tol > 0.0) {
            return Err(Error::invalid("degeneracy_tol", "must be positive"));
        }
        Ok(())
    }
}

impl Default for QuadratureParams {
    fn default() -> Self {
        Self {
            n_phi: 1024,
            degeneracy_tol: 1e-10,
            scheme: AngularScheme::Split,
        }
    }
}
