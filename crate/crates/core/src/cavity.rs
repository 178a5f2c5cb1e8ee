//! Effective cavity photon propagator: standing-wave mode weights and the
//! truncated mode sum.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `sin(n pi d1 / L) sin(n pi d2 / L)` for `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeWeightTable {
    weights: Vec<f64>,
    length: f64,
}

impl ModeWeightTable {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_max(&self) -> usize {
        self.weights.len()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|w| *w == 0.0)
    }
}

/// Mode weights of two layers at depths `d1`, `d2` in a cavity of length `length`.
///
/// The `n = 0` term vanishes identically and is not stored.
pub fn mode_weights(d1: f64, d2: f64, length: f64, n_max: usize) -> Result<ModeWeightTable> {
    if !(length > 0.0) {
        return Err(Error::invalid("L_inv_eV", "must be positive"));
    }
    if n_max < 1 {
        return Err(Error::invalid("n_max", "must be at least 1"));
    }
    for (name, d) in [("d1_inv_eV", d1), ("d2_inv_eV", d2)] {
        if !(0.0..=length).contains(&d) {
            return Err(Error::invalid(
                name,
                format!("{d} outside [0, L = {length}]"),
            ));
        }
    }
    let weights = (1..=n_max)
        .map(|n| exact_sin_pi(n as f64 * d1 / length) * exact_sin_pi(n as f64 * d2 / length))
        .collect();
    Ok(ModeWeightTable { weights, length })
}

/// `sin(pi x)`, returning exact zeros at integer `x`.
fn exact_sin_pi(x: f64) -> f64 {
    let r = x - x.round();
    if r == 0.0 {
        return 0.0;
    }
    // sin(pi x) = (-1)^round(x) sin(pi r)
    let s = (PI * r).sin();
    if (x.round() as i64).rem_euclid(2) == 0 {
        s
    } else {
        -s
    }
}

/// Truncated mode sum `sum_n w_n / (q0^2 - |q|^2 - (n pi / L)^2 + i eps)`.
///
/// The overall `-e^2 zeta^2` strength is applied by the kernel.
pub fn propagator_d(q0: f64, q_spatial: f64, table: &ModeWeightTable, eps: f64) -> Complex64 {
    let q_sq = q0 * q0 - q_spatial * q_spatial;
    let k = PI / table.length;
    let mut acc = Complex64::new(0.0, 0.0);
    for (idx, &w) in table.weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let n = (idx + 1) as f64;
        let denom = Complex64::new(q_sq - (n * k) * (n * k), eps);
        acc += w / denom;
    }
    acc
}
