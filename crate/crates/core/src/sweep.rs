//! Declarative one- and two-axis parameter sweeps, parallel evaluation and
//! CSV output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::config::{is_numeric_key, RunConfig};
use crate::entanglement::{entropy_at, PointResult};
use crate::error::{Error, Result};

/// Grid spacing of one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl Spacing {
    pub fn label(self) -> &'static str {
        match self {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub key: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn new(key: &str, min: f64, max: f64, count: usize, spacing: Spacing) -> Self {
        Self {
            key: key.to_string(),
            min,
            max,
            count,
            spacing,
        }
    }

    /// Grid values; endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == self.count - 1 {
                    return self.max;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + t * (self.max - self.min),
                    Spacing::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

/// `target = offset + scale * source`, applied after the axis values.
#[derive(Debug, Clone, PartialEq)]
pub struct Tie {
    pub target: String,
    pub source: String,
    pub scale: f64,
    pub offset: f64,
}

impl Tie {
    pub fn equal(target: &str, source: &str) -> Self {
        Self::linear(target, source, 1.0, 0.0)
    }

    pub fn linear(target: &str, source: &str, scale: f64, offset: f64) -> Self {
        Self {
            target: target.to_string(),
            source: source.to_string(),
            scale,
            offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub axes: Vec<Axis>,
    pub ties: Vec<Tie>,
    pub base: RunConfig,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::invalid("axes", "a sweep has one or two axes"));
        }
        for axis in &self.axes {
            if !is_numeric_key(&axis.key) {
                return Err(Error::invalid(&axis.key, "not a numeric configuration key"));
            }
            if axis.count == 0 {
                return Err(Error::invalid(&axis.key, "axis needs at least one point"));
            }
            if !(axis.min.is_finite() && axis.max.is_finite()) {
                return Err(Error::invalid(&axis.key, "axis range must be finite"));
            }
            if axis.spacing == Spacing::Log && !(axis.min > 0.0 && axis.max > 0.0) {
                return Err(Error::invalid(
                    &axis.key,
                    "log spacing needs a positive range",
                ));
            }
        }
        if self.axes.len() == 2 && self.axes[0].key == self.axes[1].key {
            return Err(Error::invalid(&self.axes[0].key, "axes must be distinct"));
        }
        for tie in &self.ties {
            if !is_numeric_key(&tie.target) || !is_numeric_key(&tie.source) {
                return Err(Error::invalid(
                    &tie.target,
                    "tie keys must be numeric configuration keys",
                ));
            }
            if self.axes.iter().any(|a| a.key == tie.target) {
                return Err(Error::invalid(
                    &tie.target,
                    "a tie cannot drive an axis key",
                ));
            }
        }
        Ok(())
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis values of every grid point, row-major (last axis fastest).
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let values: Vec<Vec<f64>> = self.axes.iter().map(Axis::values).collect();
        match values.as_slice() {
            [a] => a.iter().map(|&x| vec![x]).collect(),
            [a, b] => a
                .iter()
                .flat_map(|&x| b.iter().map(move |&y| vec![x, y]))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Full configuration of one grid point.
    pub fn point_config(&self, coords: &[f64]) -> Result<RunConfig> {
        let mut assigned: Vec<(&str, f64)> = self
            .axes
            .iter()
            .map(|a| a.key.as_str())
            .zip(coords.iter().copied())
            .collect();
        for tie in &self.ties {
            let source = match assigned.iter().find(|(k, _)| *k == tie.source) {
                Some(&(_, v)) => v,
                None => self.base.numeric_value(&tie.source)?,
            };
            assigned.push((tie.target.as_str(), tie.offset + tie.scale * source));
        }
        self.base.with_values(&assigned)
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub coords: Vec<f64>,
    /// Coherence time `1 / Im Sigma_1` of the point, NaN if the point is invalid.
    pub tau_coh: f64,
    /// Point result, or the negative diagnostic code of the failure.
    pub outcome: std::result::Result<PointResult, i64>,
}

impl SweepRow {
    pub fn entropy(&self) -> f64 {
        self.outcome.as_ref().map_or(f64::NAN, |r| r.entropy)
    }

    pub fn born_ratio(&self) -> f64 {
        self.outcome.as_ref().map_or(f64::NAN, |r| r.born_ratio)
    }

    /// Skipped quadrature nodes, or the negative failure code.
    pub fn skipped_nodes(&self) -> i64 {
        match &self.outcome {
            Ok(r) => r.diagnostics.kernel.skipped_nodes as i64,
            Err(code) => *code,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    pub wall_time: Duration,
}

impl SweepResult {
    /// Constant metadata written above the CSV header row.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let base = &self.spec.base;
        let mut meta = vec![
            ("sweep".to_string(), self.spec.name.clone()),
            (
                "code_version".to_string(),
                env!("CARGO_PKG_VERSION").to_string(),
            ),
            (
                "axes".to_string(),
                self.spec
                    .axes
                    .iter()
                    .map(|a| {
                        format!(
                            "{}:{}:{}:{}:{}",
                            a.key,
                            a.min,
                            a.max,
                            a.count,
                            a.spacing.label()
                        )
                    })
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
            (
                "ties".to_string(),
                self.spec
                    .ties
                    .iter()
                    .map(|t| format!("{}={}+{}*{}", t.target, t.offset, t.scale, t.source))
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
            ("t_light".to_string(), format!("{}", t_light(base))),
            (
                "entropy_log_base".to_string(),
                base.log_base.label().to_string(),
            ),
        ];
        meta.extend(base.key_values());
        meta
    }

    /// CSV text: `# key=value` metadata, header row, one row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.metadata() {
            let _ = writeln!(out, "# {k}={v}");
        }
        let mut header: Vec<&str> = self.spec.axes.iter().map(|a| a.key.as_str()).collect();
        header.extend(["S", "born_ratio", "tau_coh", "skipped_nodes"]);
        let _ = writeln!(out, "{}", header.join(","));
        for row in &self.rows {
            let mut fields: Vec<String> = row.coords.iter().map(|&v| format_float(v)).collect();
            fields.push(format_float(row.entropy()));
            fields.push(format_float(row.born_ratio()));
            fields.push(format_float(row.tau_coh));
            fields.push(row.skipped_nodes().to_string());
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Row-major grid of one column for two-axis sweeps.
    pub fn grid_of(&self, value: impl Fn(&SweepRow) -> f64) -> Vec<Vec<f64>> {
        let ny = self.spec.axes.get(1).map_or(1, |a| a.count);
        self.rows
            .chunks(ny)
            .map(|chunk| chunk.iter().map(&value).collect())
            .collect()
    }
}

/// 17 significant digits in scientific notation; `nan` for NaN.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Photon travel time `|d1 - d2|` between the layers (c = 1).
pub fn t_light(config: &RunConfig) -> f64 {
    (config.layers[0].d - config.layers[1].d).abs()
}

/// Coherence time `1 / Im Sigma`.
pub fn tau_coh(sigma_im: f64) -> f64 {
    1.0 / sigma_im
}

fn evaluate(spec: &SweepSpec, coords: Vec<f64>) -> SweepRow {
    match spec.point_config(&coords) {
        Ok(cfg) => SweepRow {
            coords,
            tau_coh: tau_coh(cfg.layers[0].sigma.im),
            outcome: entropy_at(&cfg).map_err(|e| e.diagnostic_code()),
        },
        Err(e) => SweepRow {
            coords,
            tau_coh: f64::NAN,
            outcome: Err(e.diagnostic_code()),
        },
    }
}

/// Evaluates every grid point on a pool of `workers` threads. Rows come back
/// in grid order whatever the worker count.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepResult> {
    spec.validate()?;
    if workers == 0 {
        return Err(Error::invalid("workers", "must be at least 1"));
    }
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    let grid = spec.grid();
    let rows = pool.install(|| {
        grid.into_par_iter()
            .map(|coords| evaluate(spec, coords))
            .collect()
    });
    Ok(SweepResult {
        spec: spec.clone(),
        rows,
        wall_time: start.elapsed(),
    })
}

/// Parsed sweep CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub metadata: BTreeMap<String, String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// Reads the format written by [`SweepResult::to_csv`].
pub fn parse_csv(text: &str) -> Result<CsvTable> {
    let mut metadata = BTreeMap::new();
    let mut header = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(meta) = line.strip_prefix("# ") {
            let (k, v) = meta
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("metadata line without `=`: {line}")))?;
            metadata.insert(k.to_string(), v.to_string());
        } else if header.is_none() {
            header = Some(line.split(',').map(str::to_string).collect::<Vec<_>>());
        } else if !line.is_empty() {
            let row = line
                .split(',')
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad number `{f}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
    }
    let header = header.ok_or_else(|| Error::Parse("missing header row".into()))?;
    if let Some(bad) = rows.iter().find(|r| r.len() != header.len()) {
        return Err(Error::Parse(format!(
            "row has {} fields, header has {}",
            bad.len(),
            header.len()
        )));
    }
    Ok(CsvTable {
        metadata,
        header,
        rows,
    })
}

/// Straight segment of a level set in axis coordinates.
pub type Segment = [(f64, f64); 2];

/// Marching-squares level set `value = level` over a row-major grid
/// `values[i][j]` at coordinates `(xs[i], ys[j])`. Interpolation happens in
/// the coordinates given, so pass logarithms for log axes. Cells touching a
/// NaN are skipped; the saddle cases use the cell-centre average.
pub fn level_set(xs: &[f64], ys: &[f64], values: &[Vec<f64>], level: f64) -> Vec<Segment> {
    let mut segments = Vec::new();
    if xs.len() < 2 || ys.len() < 2 {
        return segments;
    }
    for i in 0..xs.len() - 1 {
        for j in 0..ys.len() - 1 {
            // corners counter-clockwise: (i,j), (i+1,j), (i+1,j+1), (i,j+1)
            let corners = [
                (xs[i], ys[j], values[i][j]),
                (xs[i + 1], ys[j], values[i + 1][j]),
                (xs[i + 1], ys[j + 1], values[i + 1][j + 1]),
                (xs[i], ys[j + 1], values[i][j + 1]),
            ];
            if corners.iter().any(|c| c.2.is_nan()) {
                continue;
            }
            let above: Vec<bool> = corners.iter().map(|c| c.2 >= level).collect();
            let crossing = |a: usize, b: usize| {
                let (xa, ya, va) = corners[a];
                let (xb, yb, vb) = corners[b];
                let t = if vb == va {
                    0.5
                } else {
                    (level - va) / (vb - va)
                };
                (xa + t * (xb - xa), ya + t * (yb - ya))
            };
            let edges: Vec<usize> = (0..4).filter(|&e| above[e] != above[(e + 1) % 4]).collect();
            match edges.len() {
                2 => segments.push([
                    crossing(edges[0], (edges[0] + 1) % 4),
                    crossing(edges[1], (edges[1] + 1) % 4),
                ]),
                4 => {
                    let centre = corners.iter().map(|c| c.2).sum::<f64>() / 4.0;
                    let e = |k: usize| crossing(k, (k + 1) % 4);
                    // pair edges so that the centre value's side stays connected
                    if (centre >= level) == above[0] {
                        segments.push([e(0), e(1)]);
                        segments.push([e(2), e(3)]);
                    } else {
                        segments.push([e(3), e(0)]);
                        segments.push([e(1), e(2)]);
                    }
                }
                _ => {}
            }
        }
    }
    segments
}

/// Born-validity boundary `born_ratio = 1` of a two-axis sweep, in axis
/// units (log axes are interpolated logarithmically).
pub fn born_contour(result: &SweepResult) -> Vec<Segment> {
    let axes = &result.spec.axes;
    if axes.len() != 2 {
        return Vec::new();
    }
    let to_plot = |a: &Axis| -> Vec<f64> {
        let v = a.values();
        match a.spacing {
            Spacing::Linear => v,
            Spacing::Log => v.iter().map(|x| x.ln()).collect(),
        }
    };
    let back = |a: &Axis, x: f64| match a.spacing {
        Spacing::Linear => x,
        Spacing::Log => x.exp(),
    };
    let grid = result.grid_of(SweepRow::born_ratio);
    level_set(&to_plot(&axes[0]), &to_plot(&axes[1]), &grid, 1.0)
        .into_iter()
        .map(|[a, b]| {
            [
                (back(&axes[0], a.0), back(&axes[1], a.1)),
                (back(&axes[0], b.0), back(&axes[1], b.1)),
            ]
        })
        .collect()
}

/// Named sweeps mirroring the figure families.
pub const PRESETS: [(&str, &str); 12] = [
    (
        "dplane",
        "S over (d1, d2) in [0.05 L, 0.95 L]^2, 64x64, n_max = 50",
    ),
    ("dplane_n5", "dplane with n_max = 5"),
    ("dplane_n10", "dplane with n_max = 10"),
    ("dplane_n20", "dplane with n_max = 20"),
    ("dplane_n50", "dplane with n_max = 50"),
    ("dcut", "symmetric cut d2 = L - d1, 256 points"),
    (
        "sigmaplane",
        "S over (Re Sigma_1, Re Sigma_2) log-spaced in [1e-5, 1e-1] eV, 64x64",
    ),
    (
        "sigmadiag",
        "Re Sigma_1 = Re Sigma_2 log-spaced in [1e-5, 1e-1] eV, 256 points",
    ),
    (
        "tauscan",
        "Im Sigma_1 = Im Sigma_2 log-spaced so that tau_coh spans [0.01, 100] t_light, 256 points",
    ),
    ("pplane", "S over (p1, p2) in [0.01, 0.19] eV, 64x64"),
    (
        "pcut1",
        "p1 = 0.10 eV fixed, p2 in [0.01, 0.19] eV, 256 points",
    ),
    (
        "pcut2",
        "p2 = 0.10 eV fixed, p1 in [0.01, 0.19] eV, 256 points",
    ),
];

/// Midpoint of the scanned momentum range.
pub const P_MID: f64 = 0.10;

/// Builds preset `name` on top of `base`.
pub fn preset(name: &str, base: &RunConfig) -> Result<SweepSpec> {
    let length = base.cavity.length;
    let d_axis =
        |key: &str, count| Axis::new(key, 0.05 * length, 0.95 * length, count, Spacing::Linear);
    let sigma_axis = |key: &str, count| Axis::new(key, 1e-5, 1e-1, count, Spacing::Log);
    let p_axis = |key: &str| Axis::new(key, 0.01, 0.19, 256, Spacing::Linear);
    let spec = |axes: Vec<Axis>, ties: Vec<Tie>, base: RunConfig| SweepSpec {
        name: name.to_string(),
        axes,
        ties,
        base,
    };
    let dplane = |n_max: f64| -> Result<SweepSpec> {
        Ok(spec(
            vec![d_axis("d1_inv_eV", 64), d_axis("d2_inv_eV", 64)],
            vec![],
            base.with_value("n_max", n_max)?,
        ))
    };
    let s = match name {
        "dplane" | "dplane_n50" => dplane(50.0)?,
        "dplane_n5" => dplane(5.0)?,
        "dplane_n10" => dplane(10.0)?,
        "dplane_n20" => dplane(20.0)?,
        "dcut" => spec(
            vec![d_axis("d1_inv_eV", 256)],
            vec![Tie::linear("d2_inv_eV", "d1_inv_eV", -1.0, length)],
            *base,
        ),
        "sigmaplane" => spec(
            vec![
                sigma_axis("sigma1_re_eV", 64),
                sigma_axis("sigma2_re_eV", 64),
            ],
            vec![],
            *base,
        ),
        "sigmadiag" => spec(
            vec![sigma_axis("sigma1_re_eV", 256)],
            vec![Tie::equal("sigma2_re_eV", "sigma1_re_eV")],
            *base,
        ),
        "tauscan" => {
            let tl = t_light(base);
            if !(tl > 0.0) {
                return Err(Error::invalid(
                    "tauscan",
                    "needs d1 != d2 for a finite light time",
                ));
            }
            spec(
                vec![Axis::new(
                    "sigma1_im_eV",
                    1.0 / (100.0 * tl),
                    1.0 / (0.01 * tl),
                    256,
                    Spacing::Log,
                )],
                vec![Tie::equal("sigma2_im_eV", "sigma1_im_eV")],
                *base,
            )
        }
        "pplane" => spec(
            vec![
                Axis::new("p1_eV", 0.01, 0.19, 64, Spacing::Linear),
                Axis::new("p2_eV", 0.01, 0.19, 64, Spacing::Linear),
            ],
            vec![],
            *base,
        ),
        "pcut1" => spec(
            vec![p_axis("p2_eV")],
            vec![],
            base.with_value("p1_eV", P_MID)?,
        ),
        "pcut2" => spec(
            vec![p_axis("p1_eV")],
            vec![],
            base.with_value("p2_eV", P_MID)?,
        ),
        other => {
            return Err(Error::invalid(
                "preset",
                format!("unknown preset `{other}`"),
            ))
        }
    };
    s.validate()?;
    Ok(s)
}

/// Parses an axis description `key:min:max:count[:log|:linear]`.
pub fn parse_axis(text: &str) -> Result<Axis> {
    let parts: Vec<&str> = text.split(':').collect();
    if !(4..=5).contains(&parts.len()) {
        return Err(Error::Parse(format!(
            "axis `{text}` is not key:min:max:count[:spacing]"
        )));
    }
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad number `{s}` in axis `{text}`")))
    };
    let count = parts[3]
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::Parse(format!("bad count `{}` in axis `{text}`", parts[3])))?;
    let spacing = match parts.get(4).map(|s| s.trim()) {
        None | Some("linear") => Spacing::Linear,
        Some("log") => Spacing::Log,
        Some(other) => return Err(Error::Parse(format!("unknown spacing `{other}`"))),
    };
    Ok(Axis::new(
        parts[0].trim(),
        num(parts[1])?,
        num(parts[2])?,
        count,
        spacing,
    ))
}

/// Parses a tie `target=source` or `target=offset+scale*source`.
pub fn parse_tie(text: &str) -> Result<Tie> {
    let (target, rhs) = text
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("tie `{text}` lacks `=`")))?;
    let target = target.trim();
    let rhs = rhs.trim();
    let bad = || {
        Error::Parse(format!(
            "tie `{text}` is not target=source or target=offset+scale*source"
        ))
    };
    if let Some((offset, rest)) = rhs.split_once('+') {
        let (scale, source) = rest.split_once('*').ok_or_else(bad)?;
        let offset: f64 = offset.trim().parse().map_err(|_| bad())?;
        let scale: f64 = scale.trim().parse().map_err(|_| bad())?;
        Ok(Tie::linear(target, source.trim(), scale, offset))
    } else {
        Ok(Tie::equal(target, rhs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cheap_base() -> RunConfig {
        let mut cfg = RunConfig::baseline();
        cfg.quadrature.n_phi = 64;
        cfg.cavity.n_max = 8;
        cfg
    }

    #[test]
    fn axis_values() {
        let a = Axis::new("p1_eV", 0.0, 1.0, 5, Spacing::Linear);
        assert_eq!(a.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let l = Axis::new("sigma1_re_eV", 1e-5, 1e-1, 5, Spacing::Log).values();
        assert_eq!(l[0], 1e-5);
        assert_eq!(l[4], 1e-1);
        assert!((l[2] - 1e-3).abs() < 1e-15);
        assert_eq!(
            Axis::new("p1_eV", 0.3, 0.3, 1, Spacing::Linear).values(),
            vec![0.3]
        );
    }

    #[test]
    fn spec_validation() {
        let base = cheap_base();
        let good = SweepSpec {
            name: "t".into(),
            axes: vec![Axis::new("p1_eV", 0.01, 0.2, 3, Spacing::Linear)],
            ties: vec![],
            base,
        };
        assert!(good.validate().is_ok());
        let mut bad = good.clone();
        bad.axes[0].key = "weights".into();
        assert!(bad.validate().is_err());
        let mut bad = good.clone();
        bad.axes[0] = Axis::new("sigma1_re_eV", 0.0, 1.0, 3, Spacing::Log);
        assert!(bad.validate().is_err());
        let mut bad = good.clone();
        bad.ties.push(Tie::equal("p1_eV", "p2_eV"));
        assert!(bad.validate().is_err());
    }

    #[test]
    fn grid_is_row_major() {
        let spec = SweepSpec {
            name: "t".into(),
            axes: vec![
                Axis::new("p1_eV", 0.1, 0.2, 2, Spacing::Linear),
                Axis::new("p2_eV", 0.1, 0.3, 3, Spacing::Linear),
            ],
            ties: vec![],
            base: cheap_base(),
        };
        let g = spec.grid();
        assert_eq!(g.len(), 6);
        assert_eq!(g[0], vec![0.1, 0.1]);
        assert_eq!(g[1], vec![0.1, 0.2]);
        assert_eq!(g[3], vec![0.2, 0.1]);
    }

    #[test]
    fn ties_are_applied() {
        let base = cheap_base();
        let spec = preset("dcut", &base).unwrap();
        let cfg = spec.point_config(&[0.5]).unwrap();
        assert_eq!(cfg.layers[0].d, 0.5);
        assert!((cfg.layers[1].d - 1.5).abs() < 1e-15);
    }

    #[test]
    fn single_point_sweep_matches_entropy_at() {
        let base = cheap_base();
        let spec = SweepSpec {
            name: "one".into(),
            axes: vec![Axis::new("p1_eV", 0.13, 0.13, 1, Spacing::Linear)],
            ties: vec![],
            base,
        };
        let res = run_sweep(&spec, 1).unwrap();
        let direct = entropy_at(&base).unwrap();
        assert_eq!(res.rows.len(), 1);
        assert_eq!(res.rows[0].entropy(), direct.entropy);
        assert_eq!(res.rows[0].born_ratio(), direct.born_ratio);
    }

    #[test]
    fn failures_become_nan_rows() {
        let base = cheap_base();
        let spec = SweepSpec {
            name: "bad".into(),
            axes: vec![Axis::new("d1_inv_eV", 1.0, 3.0, 2, Spacing::Linear)],
            ties: vec![],
            base,
        };
        let res = run_sweep(&spec, 2).unwrap();
        assert!(res.rows[0].entropy().is_finite());
        assert!(res.rows[1].entropy().is_nan());
        assert_eq!(res.rows[1].skipped_nodes(), -3);
        let csv = res.to_csv();
        let last = csv.lines().last().unwrap();
        assert!(last.contains(",nan,nan,"), "{last}");
    }

    #[test]
    fn csv_round_trip() {
        let base = cheap_base();
        let spec = SweepSpec {
            name: "rt".into(),
            axes: vec![
                Axis::new("p1_eV", 0.05, 0.15, 3, Spacing::Linear),
                Axis::new("sigma1_re_eV", 1e-3, 1e-2, 2, Spacing::Log),
            ],
            ties: vec![],
            base,
        };
        let res = run_sweep(&spec, 2).unwrap();
        let text = res.to_csv();
        let table = parse_csv(&text).unwrap();
        assert_eq!(
            table.header,
            vec![
                "p1_eV",
                "sigma1_re_eV",
                "S",
                "born_ratio",
                "tau_coh",
                "skipped_nodes"
            ]
        );
        assert_eq!(table.rows.len(), 6);
        assert_eq!(table.metadata["sweep"], "rt");
        assert_eq!(table.metadata["t_light"], "0.20000000000000007");
        let s = table.column("S").unwrap();
        for (row, v) in res.rows.iter().zip(s) {
            assert_eq!(row.entropy(), v);
        }
        assert_eq!(table.column("tau_coh").unwrap()[0], 1e6);
    }

    #[test]
    fn float_format() {
        assert_eq!(format_float(f64::NAN), "nan");
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(-2.5), "-2.5000000000000000e0");
        for v in [0.1, 1.0 / 3.0, 1e-300, 6.02214076e23] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn tau_axis_values() {
        assert_eq!(tau_coh(1e-6), 1e6);
        let base = RunConfig::baseline();
        assert!((t_light(&base) - 0.2).abs() < 1e-15);
        let spec = preset("tauscan", &base).unwrap();
        let a = &spec.axes[0];
        assert!((tau_coh(a.max) - 0.01 * 0.2).abs() < 1e-12);
        assert!((tau_coh(a.min) - 100.0 * 0.2).abs() < 1e-9);
    }

    #[test]
    fn level_set_examples() {
        let xs = [0.0, 0.5, 1.5, 2.0];
        let ys = [0.0, 1.0, 2.0];
        let flat = vec![vec![0.5; 3]; 4];
        assert!(level_set(&xs, &ys, &flat, 1.0).is_empty());
        let ramp: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x; 3]).collect();
        let segs = level_set(&xs, &ys, &ramp, 1.0);
        assert_eq!(segs.len(), 2);
        for [a, b] in segs {
            assert!((a.0 - 1.0).abs() < 1e-15 && (b.0 - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn every_preset_builds() {
        let base = RunConfig::baseline();
        for (name, _) in PRESETS {
            let spec = preset(name, &base).unwrap();
            assert!(spec.len() >= 256, "{name}");
        }
        assert!(preset("nope", &base).is_err());
        assert_eq!(preset("sigmaplane", &base).unwrap().len(), 64 * 64);
    }

    #[test]
    fn axis_and_tie_parsing() {
        let a = parse_axis("sigma1_re_eV:1e-5:1e-1:16:log").unwrap();
        assert_eq!(a.spacing, Spacing::Log);
        assert_eq!(a.count, 16);
        assert!(parse_axis("p1_eV:0:1").is_err());
        let t = parse_tie("d2_inv_eV=2+-1*d1_inv_eV").unwrap();
        assert_eq!((t.offset, t.scale), (2.0, -1.0));
        assert_eq!(parse_tie("sigma2_re_eV=sigma1_re_eV").unwrap().scale, 1.0);
    }
}
