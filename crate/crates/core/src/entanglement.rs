//! Reduced pseudospin density matrix of layer 1 and its von Neumann entropy,
//! plus the end-to-end evaluation of one parameter point.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bse::{
    free_state, inverse_propagator, solve_correction, total_state, ChannelState, TotalState,
};
use crate::cavity::mode_weights;
use crate::config::RunConfig;
use crate::error::Result;
use crate::kernel::{
    channel_integrals, ChannelIntegrals, KernelDiagnostics, KernelInputs, KinematicConstraint,
};
use crate::linalg::Vec4;
use crate::spinors::Channel;
use crate::units::derived_mass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    /// Maximum entropy ln 2.
    #[default]
    Natural,
    /// Maximum entropy 1.
    Base2,
}

impl LogBase {
    pub fn label(self) -> &'static str {
        match self {
            LogBase::Natural => "natural",
            LogBase::Base2 => "base2",
        }
    }
}

/// 2x2 Hermitian, unit-trace pseudospin density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedDensityMatrix {
    pub m: [[Complex64; 2]; 2],
}

impl ReducedDensityMatrix {
    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                err = err.max((self.m[i][j] - self.m[j][i].conj()).norm());
            }
        }
        err
    }

    /// Closed-form eigenvalues `1/2 +- sqrt((r00 - r11)^2 / 4 + |r01|^2)` (about
    /// the actual half-trace), unclamped, ascending.
    pub fn raw_eigenvalues(&self) -> [f64; 2] {
        let half_tr = 0.5 * (self.m[0][0].re + self.m[1][1].re);
        let diff = 0.5 * (self.m[0][0].re - self.m[1][1].re);
        let r = (diff * diff + self.m[0][1].norm_sqr()).sqrt();
        [half_tr - r, half_tr + r]
    }

    /// Eigenvalues clamped to [0, 1] and renormalized by their sum.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let raw = self.raw_eigenvalues().map(|v| v.clamp(0.0, 1.0));
        let sum: f64 = raw.iter().sum();
        if sum > 0.0 {
            raw.map(|v| v / sum)
        } else {
            raw
        }
    }
}

fn symmetrized(m: [[Complex64; 2]; 2]) -> ReducedDensityMatrix {
    let off = 0.5 * (m[0][1] + m[1][0].conj());
    ReducedDensityMatrix {
        m: [
            [Complex64::new(m[0][0].re, 0.0), off],
            [off.conj(), Complex64::new(m[1][1].re, 0.0)],
        ],
    }
}

/// Partial trace over layer 2 of a normalized state in (AA, AB, BA, BB) order.
pub fn reduce(state: &Vec4) -> ReducedDensityMatrix {
    let [aa, ab, ba, bb] = *state;
    let r00 = aa.norm_sqr() + ab.norm_sqr();
    let r11 = ba.norm_sqr() + bb.norm_sqr();
    let r01 = aa * ba.conj() + ab * bb.conj();
    let r10 = ba * aa.conj() + bb * ab.conj();
    symmetrized([[r00.into(), r01], [r10, r11.into()]])
}

/// Partial trace over layer 1.
pub fn reduce_layer2(state: &Vec4) -> ReducedDensityMatrix {
    let [aa, ab, ba, bb] = *state;
    let r00 = aa.norm_sqr() + ba.norm_sqr();
    let r11 = ab.norm_sqr() + bb.norm_sqr();
    let r01 = aa * ab.conj() + ba * bb.conj();
    let r10 = ab * aa.conj() + bb * ba.conj();
    symmetrized([[r00.into(), r01], [r10, r11.into()]])
}

/// `-sum nu log nu`, with `0 log 0 = 0`.
pub fn entropy_from_probabilities(nu: [f64; 2], base: LogBase) -> f64 {
    let s: f64 = nu.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln()).sum();
    let s = s.max(0.0);
    match base {
        LogBase::Natural => s,
        LogBase::Base2 => s / std::f64::consts::LN_2,
    }
}

pub fn entropy(rho: &ReducedDensityMatrix, base: LogBase) -> f64 {
    entropy_from_probabilities(rho.eigenvalues(), base)
}

/// Smallest Schmidt weight below which a state counts as a product: the
/// rounding level of `|ad - bc|^2` for a unit vector.
pub const SCHMIDT_FLOOR: f64 = f64::EPSILON * f64::EPSILON;

/// Schmidt weights `[nu_min, 1 - nu_min]` of a normalized two-qubit state.
///
/// `nu_min (1 - nu_min) = det rho_1 = |ad - bc|^2`, taken from the amplitudes
/// directly so that product states do not inherit the cancellation in
/// `r00 r11 - |r01|^2`.
pub fn schmidt_weights(state: &Vec4) -> [f64; 2] {
    let [a, b, c, d] = *state;
    let det = (a * d - b * c).norm_sqr().min(0.25);
    let small = 2.0 * det / (1.0 + (1.0 - 4.0 * det).max(0.0).sqrt());
    if small < SCHMIDT_FLOOR {
        [0.0, 1.0]
    } else {
        [small, 1.0 - small]
    }
}

/// Diagnostics of one evaluated point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PointDiagnostics {
    pub kernel: KernelDiagnostics,
    /// Largest change any eigenvalue of rho_1 underwent during clamping.
    pub clamp_shift: f64,
    /// Entropy from the eigenvalues of the layer-2 reduced matrix (equals
    /// `entropy` for a pure state).
    pub entropy_layer2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResult {
    pub entropy: f64,
    pub born_ratio: f64,
    pub state: TotalState,
    pub rho: ReducedDensityMatrix,
    pub diagnostics: PointDiagnostics,
}

/// Per-channel intermediate results of one point.
#[derive(Debug, Clone, Copy)]
pub struct ChannelBreakdown {
    pub integrals: [ChannelIntegrals; 4],
    pub free: [ChannelState; 4],
    pub correction: [ChannelState; 4],
    pub diagnostics: KernelDiagnostics,
}

/// Channel integrals, free states and first-order corrections for `config`.
pub fn channel_breakdown(config: &RunConfig) -> Result<ChannelBreakdown> {
    let [l1, l2] = &config.layers;
    let m1 = derived_mass(l1, &config.constants)?;
    let m2 = derived_mass(l2, &config.constants)?;
    let table = mode_weights(l1.d, l2.d, config.cavity.length, config.cavity.n_max)?;
    let inputs = KernelInputs {
        weights: &table,
        epsilon_reg: config.cavity.epsilon_reg,
        coupling: config.cavity.coupling,
        vertex: config.vertex,
        degeneracy_tol: config.quadrature.degeneracy_tol,
        q_cutoff: config.cavity.q_cutoff,
    };
    let kin = &config.kinematics;
    let mut diagnostics = KernelDiagnostics::default();
    let mut integrals = [ChannelIntegrals {
        components: [Complex64::new(0.0, 0.0); 4],
    }; 4];
    let mut free = [ChannelState::zero(); 4];
    let mut correction = [ChannelState::zero(); 4];
    for (idx, channel) in Channel::ALL.into_iter().enumerate() {
        let kc = KinematicConstraint::new(channel, kin, m1, m2);
        let (ints, d) = channel_integrals(&kc, &inputs, &config.quadrature);
        diagnostics += d;
        let s1 = inverse_propagator(kin.p1, kin.phi1, m1, l1.sigma, channel.s1);
        let s2 = inverse_propagator(kin.p2, kin.phi2, m2, l2.sigma, channel.s2);
        correction[idx] = solve_correction(&ints, &s1, &s2, config.layer2_operator)?;
        free[idx] = free_state(channel, kin, m1, m2);
        integrals[idx] = ints;
    }
    Ok(ChannelBreakdown {
        integrals,
        free,
        correction,
        diagnostics,
    })
}

/// Entropy, Born ratio and diagnostics of the conditional state at one point.
pub fn entropy_at(config: &RunConfig) -> Result<PointResult> {
    let parts = channel_breakdown(config)?;
    let weights = config.weights.weights(config.weight_seed);
    let state = total_state(&parts.free, &parts.correction, &weights)?;
    let rho = reduce(&state.vec);
    let raw = rho.raw_eigenvalues();
    let clean = rho.eigenvalues();
    let clamp_shift = raw
        .iter()
        .zip(clean)
        .map(|(r, c)| (r - c).abs())
        .fold(0.0, f64::max);
    let entropy_value = entropy_from_probabilities(schmidt_weights(&state.vec), config.log_base);
    let entropy_layer2 = entropy(&reduce_layer2(&state.vec), config.log_base);
    Ok(PointResult {
        entropy: entropy_value,
        born_ratio: state.born_ratio,
        state,
        rho,
        diagnostics: PointDiagnostics {
            kernel: parts.diagnostics,
            clamp_shift,
            entropy_layer2,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn product_state_is_pure() {
        let rho = reduce(&[c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert_eq!(rho.m[0][0], c(1.0));
        assert_eq!(rho.m[1][1], c(0.0));
        assert_eq!(entropy(&rho, LogBase::Natural), 0.0);
    }

    #[test]
    fn bell_state_is_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rho = reduce(&[c(h), c(0.0), c(0.0), c(h)]);
        assert!((rho.m[0][0].re - 0.5).abs() < 1e-15);
        assert!(rho.m[0][1].norm() < 1e-15);
        assert!((entropy(&rho, LogBase::Natural) - LN_2).abs() < 1e-12);
        assert!((entropy(&rho, LogBase::Base2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_state_is_rank_one() {
        let rho = reduce(&[c(0.5); 4]);
        for i in 0..2 {
            for j in 0..2 {
                assert!((rho.m[i][j] - c(0.5)).norm() < 1e-15);
            }
        }
        assert!(entropy(&rho, LogBase::Natural) < 1e-7);
    }

    #[test]
    fn three_quarter_mixture() {
        let rho = ReducedDensityMatrix {
            m: [[c(0.75), c(0.0)], [c(0.0), c(0.25)]],
        };
        let expect = -0.75 * 0.75f64.ln() - 0.25 * 0.25f64.ln();
        assert!((entropy(&rho, LogBase::Natural) - expect).abs() < 1e-12);
        assert!((expect - 0.562_335).abs() < 1e-6);
    }

    #[test]
    fn layer_traces_agree_for_pure_states() {
        let v = [
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.5),
            Complex64::new(0.4, -0.3),
            Complex64::new(0.1, 0.2),
        ];
        let n = crate::linalg::norm4(&v);
        let v = v.map(|z| z / n);
        let a = entropy(&reduce(&v), LogBase::Natural);
        let b = entropy(&reduce_layer2(&v), LogBase::Natural);
        assert!((a - b).abs() < 1e-12);
        assert!(a > 0.0 && a <= LN_2);
    }

    #[test]
    fn schmidt_weights_match_eigenvalues() {
        let v = [
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.5),
            Complex64::new(0.4, -0.3),
            Complex64::new(0.1, 0.2),
        ];
        let n = crate::linalg::norm4(&v);
        let v = v.map(|z| z / n);
        let nu = schmidt_weights(&v);
        let ev = reduce(&v).eigenvalues();
        assert!((nu[0] - ev[0]).abs() < 1e-14 && (nu[1] - ev[1]).abs() < 1e-14);
        let x = [Complex64::new(0.6, 0.1), Complex64::new(0.2, -0.7)];
        let y = [Complex64::new(-0.3, 0.4), Complex64::new(0.8, 0.0)];
        let product = [x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1]];
        let n = crate::linalg::norm4(&product);
        assert_eq!(schmidt_weights(&product.map(|z| z / n)), [0.0, 1.0]);
    }

    #[test]
    fn coupling_off_is_separable() {
        let mut cfg = RunConfig::baseline();
        cfg.cavity.coupling = 0.0;
        let r = entropy_at(&cfg).unwrap();
        assert_eq!(r.born_ratio, 0.0);
        assert!(r.entropy < 1e-12);
    }
}
