//! Born-level two-body state: free product spinors, the dressed-propagator
//! linear system for the first-order correction, and the coherent sum over
//! the four band channels.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::kernel::ChannelIntegrals;
use crate::linalg::{
    flatten, inv2, kron2, mul2, norm4, reshape, solve_dense4, transpose2, Mat2, Vec4,
};
use crate::spinors::{energy, spinor, BandSign, Channel};
use crate::units::Kinematics;

/// Determinant magnitude below which a 2x2 inverse propagator is singular.
pub const DET_GUARD: f64 = 1e-30;

/// Norm below which the summed state counts as vanishing.
pub const ZERO_STATE_GUARD: f64 = 1e-30;

/// Amplitudes in the basis (A1A2, A1B2, B1A2, B1B2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelState {
    pub vec: Vec4,
}

impl ChannelState {
    pub fn zero() -> Self {
        Self {
            vec: [Complex64::new(0.0, 0.0); 4],
        }
    }

    pub fn norm(&self) -> f64 {
        norm4(&self.vec)
    }
}

/// `u1 (x) u2` with the channel's band spinors.
pub fn free_state(channel: Channel, kin: &Kinematics, m1: f64, m2: f64) -> ChannelState {
    let a = spinor(kin.p1, kin.phi1, m1, channel.s1);
    let b = spinor(kin.p2, kin.phi2, m2, channel.s2);
    ChannelState { vec: a.kron(&b) }
}

/// Dressed single-layer inverse propagator
/// `[[p0 - m - S, -p e^{-i phi}], [p e^{i phi}, -p0 - m - S]]` with on-shell `p0 = +-E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversePropagator2(pub Mat2);

impl InversePropagator2 {
    pub fn det(&self) -> Complex64 {
        crate::linalg::det2(&self.0)
    }
}

pub fn inverse_propagator(
    p: f64,
    phi: f64,
    m: f64,
    sigma: Complex64,
    band: BandSign,
) -> InversePropagator2 {
    let p0 = band.sign() * energy(p, m);
    let e = Complex64::from_polar(1.0, phi);
    InversePropagator2([[p0 - m - sigma, -p * e.conj()], [p * e, -p0 - m - sigma]])
}

/// How the layer-2 inverse propagator enters the 4x4 two-body operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer2Operator {
    /// `S1^-1 (x) S2^-1`, covariant under global rotations and layer swap.
    #[default]
    Direct,
    /// `S1^-1 (x) (S2^-1)^T`.
    Transposed,
}

impl Layer2Operator {
    fn layer2(self, m: &Mat2) -> Mat2 {
        match self {
            Layer2Operator::Direct => *m,
            Layer2Operator::Transposed => transpose2(m),
        }
    }
}

/// Solves `(S1^-1 (x) B) psi = I`, with `B` the layer-2 operator, as
/// `psi = S1 I B^-T` on the 2x2 reshape of `I`.
pub fn solve_correction(
    integrals: &ChannelIntegrals,
    layer1: &InversePropagator2,
    layer2: &InversePropagator2,
    op: Layer2Operator,
) -> Result<ChannelState> {
    let a = inv2(&layer1.0, DET_GUARD).ok_or(Error::SingularPropagator {
        det: layer1.det().norm(),
    })?;
    let b = inv2(&layer2.0, DET_GUARD).ok_or(Error::SingularPropagator {
        det: layer2.det().norm(),
    })?;
    // row-major vec: (A (x) B) vec(X) = vec(A X B^T)
    let x = mul2(
        &mul2(&a, &reshape(&integrals.components)),
        &transpose2(&op.layer2(&b)),
    );
    Ok(ChannelState { vec: flatten(&x) })
}

/// Same system assembled as a dense 4x4 matrix and solved by elimination.
pub fn solve_correction_dense(
    integrals: &ChannelIntegrals,
    layer1: &InversePropagator2,
    layer2: &InversePropagator2,
    op: Layer2Operator,
) -> Option<ChannelState> {
    let g = kron2(&layer1.0, &op.layer2(&layer2.0));
    solve_dense4(&g, &integrals.components).map(|vec| ChannelState { vec })
}

/// Relative channel weights, ordered (ee, eh, he, hh).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightPreset {
    #[default]
    Equal,
    /// ee sector weighted twice as heavily as the others.
    EeDoubled,
    /// Unit magnitudes with seeded random relative phases.
    RandomPhase,
}

impl WeightPreset {
    pub fn weights(self, seed: u64) -> [Complex64; 4] {
        let one = Complex64::new(1.0, 0.0);
        match self {
            WeightPreset::Equal => [one; 4],
            WeightPreset::EeDoubled => [2.0 * one, one, one, one],
            WeightPreset::RandomPhase => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut w = [one; 4];
                for slot in w.iter_mut().skip(1) {
                    *slot = Complex64::from_polar(1.0, rng.gen_range(0.0..TAU));
                }
                w
            }
        }
    }
}

/// Normalized coherent sum over channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalState {
    pub vec: Vec4,
    /// `|sum w psi1| / |sum w psi0|`, measured before normalization.
    pub born_ratio: f64,
}

pub fn total_state(
    free: &[ChannelState; 4],
    correction: &[ChannelState; 4],
    weights: &[Complex64; 4],
) -> Result<TotalState> {
    let mut psi0 = [Complex64::new(0.0, 0.0); 4];
    let mut psi1 = [Complex64::new(0.0, 0.0); 4];
    for c in 0..4 {
        for k in 0..4 {
            psi0[k] += weights[c] * free[c].vec[k];
            psi1[k] += weights[c] * correction[c].vec[k];
        }
    }
    let total: Vec4 = std::array::from_fn(|k| psi0[k] + psi1[k]);
    let norm = norm4(&total);
    if !(norm >= ZERO_STATE_GUARD) || !norm.is_finite() {
        return Err(Error::ZeroState { norm });
    }
    let n0 = norm4(&psi0);
    let born_ratio = if n0 > 0.0 {
        norm4(&psi1) / n0
    } else {
        f64::INFINITY
    };
    Ok(TotalState {
        vec: total.map(|c| c / norm),
        born_ratio,
    })
}

/// Channel order used by every per-channel array.
pub fn channel_index(channel: Channel) -> usize {
    Channel::ALL.iter().position(|c| *c == channel).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const M: f64 = 2.127;

    #[test]
    fn free_states_at_rest() {
        let kin = Kinematics::new(0.0, 0.0, 0.3, -0.4);
        let ee = free_state(Channel::EE, &kin, M, M);
        assert_eq!(ee.vec, [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let hh = free_state(Channel::HH, &kin, M, M);
        assert!(hh.vec[..3].iter().all(|z| z.norm() == 0.0));
        // (-e^{i phi1}) (-e^{i phi2})
        assert!((hh.vec[3] - Complex64::from_polar(1.0, -0.1)).norm() < 1e-15);
    }

    #[test]
    fn inverse_propagator_at_rest() {
        let s = c(4.2e-3, 1e-6);
        let e = inverse_propagator(0.0, 0.0, M, s, BandSign::Electron).0;
        assert_eq!(e[0][0], -s);
        assert_eq!(e[1][1], -2.0 * M - s);
        assert_eq!(e[0][1].norm(), 0.0);
        let h = inverse_propagator(0.0, 0.0, M, s, BandSign::Hole).0;
        assert_eq!(h[0][0], -2.0 * M - s);
        assert_eq!(h[1][1], -s);
    }

    #[test]
    fn on_shell_determinant() {
        // det = -(p0 - m - S)(p0 + m + S) + p^2 = S (2m + S) on shell
        for band in [BandSign::Electron, BandSign::Hole] {
            for p in [0.0, 0.05, 0.13, 1.7] {
                let s = c(4.2e-3, 1e-6);
                let det = inverse_propagator(p, 0.9, M, s, band).det();
                let expect = s * (2.0 * M + s);
                assert!(
                    (det - expect).norm() < 1e-12 * (1.0 + p * p),
                    "{det} vs {expect}"
                );
                let bare = inverse_propagator(p, 0.9, M, c(0.0, 0.0), band).det();
                assert!(bare.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn bare_on_shell_propagator_is_singular() {
        let ints = ChannelIntegrals {
            components: [c(1.0, 0.0); 4],
        };
        let s = inverse_propagator(0.0, 0.0, M, c(0.0, 0.0), BandSign::Electron);
        assert!(matches!(
            solve_correction(&ints, &s, &s, Layer2Operator::Direct),
            Err(Error::SingularPropagator { .. })
        ));
    }

    #[test]
    fn trivial_solves() {
        let id = InversePropagator2([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
        let ints = ChannelIntegrals {
            components: [c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0), c(7.0, 0.0)],
        };
        assert_eq!(
            solve_correction(&ints, &id, &id, Layer2Operator::Direct)
                .unwrap()
                .vec,
            ints.components
        );
        let zero = ChannelIntegrals {
            components: [c(0.0, 0.0); 4],
        };
        let s = inverse_propagator(0.1, 0.2, M, c(1e-3, 1e-6), BandSign::Hole);
        assert!(solve_correction(&zero, &s, &s, Layer2Operator::Transposed)
            .unwrap()
            .vec
            .iter()
            .all(|z| z.norm() == 0.0));
    }

    #[test]
    fn kronecker_solve_matches_dense_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rc = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        for _ in 0..1000 {
            let a = InversePropagator2([[rc(), rc()], [rc(), rc()]]);
            let b = InversePropagator2([[rc(), rc()], [rc(), rc()]]);
            let ints = ChannelIntegrals {
                components: [rc(), rc(), rc(), rc()],
            };
            for op in [Layer2Operator::Direct, Layer2Operator::Transposed] {
                let fast = solve_correction(&ints, &a, &b, op).unwrap();
                let dense = solve_correction_dense(&ints, &a, &b, op).unwrap();
                let scale = dense.norm();
                for k in 0..4 {
                    assert!((fast.vec[k] - dense.vec[k]).norm() <= 1e-10 * scale);
                }
            }
        }
    }

    #[test]
    fn zero_correction_gives_normalized_free_sum() {
        let kin = Kinematics::new(0.13, 0.12, 0.0, 0.5);
        let free = Channel::ALL.map(|ch| free_state(ch, &kin, M, M));
        let st = total_state(
            &free,
            &[ChannelState::zero(); 4],
            &WeightPreset::Equal.weights(0),
        )
        .unwrap();
        assert_eq!(st.born_ratio, 0.0);
        assert!((norm4(&st.vec) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_weight_free_sum_factorizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let kin = Kinematics::new(
                rng.gen_range(0.0..1.0),
                rng.gen_range(0.0..1.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            );
            let (m1, m2) = (rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0));
            let free = Channel::ALL.map(|ch| free_state(ch, &kin, m1, m2));
            let st = total_state(
                &free,
                &[ChannelState::zero(); 4],
                &WeightPreset::Equal.weights(0),
            )
            .unwrap();
            // rank one <=> vanishing determinant of the 2x2 reshape
            let det = st.vec[0] * st.vec[3] - st.vec[1] * st.vec[2];
            assert!(det.norm() < 1e-12);
        }
    }

    #[test]
    fn vanishing_sum_is_an_error() {
        let z = [ChannelState::zero(); 4];
        assert!(matches!(
            total_state(&z, &z, &WeightPreset::Equal.weights(0)),
            Err(Error::ZeroState { .. })
        ));
    }

    #[test]
    fn weight_presets() {
        assert_eq!(WeightPreset::EeDoubled.weights(0)[0], c(2.0, 0.0));
        let a = WeightPreset::RandomPhase.weights(9);
        let b = WeightPreset::RandomPhase.weights(9);
        assert_eq!(a, b);
        assert!(a.iter().all(|w| (w.norm() - 1.0).abs() < 1e-15));
    }
}
