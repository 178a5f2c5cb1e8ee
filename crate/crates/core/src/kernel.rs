//! Delta-reduced single-photon exchange kernel.
//!
//! Energy conservation `F(q) = 0` fixes the radial magnitude of the exchanged
//! momentum for every direction `phi_q`; what remains is a one-dimensional
//! angular integral, evaluated by Gauss-Legendre quadrature, for each of the
//! four components of the two-layer spinor product.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::cavity::{propagator_d, ModeWeightTable};
use crate::quadrature::{cached_rule, GaussLegendre};
use crate::spinors::{energy, vertex_product, BandSign, Channel, SpinorArgs, VertexForm};
use crate::units::{AngularScheme, Kinematics, QuadratureParams};

/// Kinematic constraint of one channel; the on-shell energies are cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicConstraint {
    pub s1: BandSign,
    pub s2: BandSign,
    pub p1: f64,
    pub p2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub m1: f64,
    pub m2: f64,
    e1: f64,
    e2: f64,
}

impl KinematicConstraint {
    pub fn new(channel: Channel, kin: &Kinematics, m1: f64, m2: f64) -> Self {
        Self {
            s1: channel.s1,
            s2: channel.s2,
            p1: kin.p1,
            p2: kin.p2,
            phi1: kin.phi1,
            phi2: kin.phi2,
            m1,
            m2,
            e1: energy(kin.p1, m1),
            e2: energy(kin.p2, m2),
        }
    }

    pub fn channel(&self) -> Channel {
        Channel::new(self.s1, self.s2)
    }

    pub fn e1(&self) -> f64 {
        self.e1
    }

    pub fn e2(&self) -> f64 {
        self.e2
    }

    fn cosines(&self, phi_q: f64) -> (f64, f64) {
        ((self.phi1 - phi_q).cos(), (self.phi2 - phi_q).cos())
    }

    /// `E(p1 - q)` and `E(p2 + q)` for `q = q * (cos phi_q, sin phi_q)`.
    pub fn shifted_energies(&self, q: f64, phi_q: f64) -> (f64, f64) {
        let (c1, c2) = self.cosines(phi_q);
        let a = (self.p1 * self.p1 + q * q - 2.0 * self.p1 * q * c1).max(0.0);
        let b = (self.p2 * self.p2 + q * q + 2.0 * self.p2 * q * c2).max(0.0);
        (
            (a + self.m1 * self.m1).sqrt(),
            (b + self.m2 * self.m2).sqrt(),
        )
    }

    /// Cartesian shifted momenta `p1 - q` and `p2 + q`.
    pub fn shifted_momenta(&self, q: f64, phi_q: f64) -> ([f64; 2], [f64; 2]) {
        let (qx, qy) = (q * phi_q.cos(), q * phi_q.sin());
        (
            [
                self.p1 * self.phi1.cos() - qx,
                self.p1 * self.phi1.sin() - qy,
            ],
            [
                self.p2 * self.phi2.cos() + qx,
                self.p2 * self.phi2.sin() + qy,
            ],
        )
    }
}

/// `s1 E1 + s2 E2 - s1 E(p1 - q) - s2 E(p2 + q)`.
pub fn constraint_f(kc: &KinematicConstraint, q: f64, phi_q: f64) -> f64 {
    let (s1, s2) = (kc.s1.sign(), kc.s2.sign());
    let (e1q, e2q) = kc.shifted_energies(q, phi_q);
    s1 * (kc.e1 - e1q) + s2 * (kc.e2 - e2q)
}

/// Radial derivative `dF/dq` at fixed direction.
pub fn constraint_f_prime(kc: &KinematicConstraint, q: f64, phi_q: f64) -> f64 {
    let (s1, s2) = (kc.s1.sign(), kc.s2.sign());
    let (c1, c2) = kc.cosines(phi_q);
    let (e1q, e2q) = kc.shifted_energies(q, phi_q);
    -s1 * (q - kc.p1 * c1) / e1q - s2 * (q + kc.p2 * c2) / e2q
}

/// Why a direction contributes nothing to the angular integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoContribution {
    /// Only the trivial root, or a non-positive radial magnitude.
    NonPositive,
    /// Root denominator or |F'| below the degeneracy tolerance.
    Singular,
    /// Solution of the squared equation that does not satisfy `F = 0`.
    Spurious,
}

/// Non-trivial radial root of `F` in direction `phi_q`.
///
/// Same-band channels use `q0 = 2W (E2 p1 c1 - E1 p2 c2) / (W^2 - P^2)` with
/// `W = E1 + E2`; opposite-band channels use
/// `q0 = 2W (E2 p1 c1 + E1 p2 c2) / (P^2 - W^2)` with `W = E1 - E2`, where
/// `P = p1 c1 + p2 c2`. Both come from squaring `F = 0` twice, so the
/// positivity of the intermediate `E(p2 + q)` is checked to discard spurious
/// solutions.
pub fn q0_root(
    kc: &KinematicConstraint,
    phi_q: f64,
    degeneracy_tol: f64,
) -> Result<f64, NoContribution> {
    let (c1, c2) = kc.cosines(phi_q);
    let (e1, e2) = (kc.e1, kc.e2);
    let big_p = kc.p1 * c1 + kc.p2 * c2;
    let (w, numer, denom) = if kc.channel().same_band() {
        let w = e1 + e2;
        (
            w,
            2.0 * w * (e2 * kc.p1 * c1 - e1 * kc.p2 * c2),
            w * w - big_p * big_p,
        )
    } else {
        let w = e1 - e2;
        (
            w,
            2.0 * w * (e2 * kc.p1 * c1 + e1 * kc.p2 * c2),
            big_p * big_p - w * w,
        )
    };
    if denom.abs() < degeneracy_tol {
        return Err(NoContribution::Singular);
    }
    let q = numer / denom;
    if !(q > 0.0) || !q.is_finite() {
        return Err(NoContribution::NonPositive);
    }
    // E(p2 + q) from the linear relation before the second squaring.
    let e2q_lin = if kc.channel().same_band() {
        e2 + big_p * q / w
    } else {
        e2 - big_p * q / w
    };
    let e1q_lin = if kc.channel().same_band() {
        w - e2q_lin
    } else {
        w + e2q_lin
    };
    if e2q_lin <= 0.0 || e1q_lin <= 0.0 {
        return Err(NoContribution::Spurious);
    }
    Ok(q)
}

/// Per-evaluation diagnostic counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KernelDiagnostics {
    /// Nodes dropped because a denominator fell below the degeneracy tolerance.
    pub skipped_nodes: u64,
    /// Nodes without a physical non-trivial root.
    pub rejected_roots: u64,
    /// Nodes whose root lies beyond the exchanged-momentum cutoff.
    pub beyond_cutoff: u64,
}

impl std::ops::AddAssign for KernelDiagnostics {
    fn add_assign(&mut self, rhs: Self) {
        self.skipped_nodes += rhs.skipped_nodes;
        self.rejected_roots += rhs.rejected_roots;
        self.beyond_cutoff += rhs.beyond_cutoff;
    }
}

/// Everything the angular integrand needs besides the kinematics.
#[derive(Debug, Clone, Copy)]
pub struct KernelInputs<'a> {
    pub weights: &'a ModeWeightTable,
    pub epsilon_reg: f64,
    pub coupling: f64,
    pub vertex: VertexForm,
    pub degeneracy_tol: f64,
    /// Largest exchanged in-plane momentum |q| kept in the integral.
    pub q_cutoff: f64,
}

/// Four-component integrand at direction `phi_q`, including the radial
/// Jacobian `q0` and the prefactor `-kappa / (2 pi)^2`.
pub fn angular_integrand(
    kc: &KinematicConstraint,
    phi_q: f64,
    inputs: &KernelInputs<'_>,
    diag: &mut KernelDiagnostics,
) -> [Complex64; 4] {
    let zero = [Complex64::new(0.0, 0.0); 4];
    if inputs.coupling == 0.0 || inputs.weights.is_zero() {
        return zero;
    }
    let q0 = match q0_root(kc, phi_q, inputs.degeneracy_tol) {
        Ok(q) => q,
        Err(NoContribution::Singular) => {
            diag.skipped_nodes += 1;
            return zero;
        }
        Err(_) => {
            diag.rejected_roots += 1;
            return zero;
        }
    };
    if q0 > inputs.q_cutoff {
        diag.beyond_cutoff += 1;
        return zero;
    }
    let f_prime = constraint_f_prime(kc, q0, phi_q);
    if f_prime.abs() < inputs.degeneracy_tol {
        diag.skipped_nodes += 1;
        return zero;
    }

    let (e1q, e2q) = kc.shifted_energies(q0, phi_q);
    let photon_energy = kc.s1.sign() * (kc.e1 - e1q);
    debug_assert!(
        (photon_energy + kc.s2.sign() * (kc.e2 - e2q)).abs() <= 1e-6 * (kc.e1 + kc.e2),
        "energy transfer mismatch on the root"
    );
    let d = propagator_d(photon_energy, q0, inputs.weights, inputs.epsilon_reg);

    let (k1, k2) = kc.shifted_momenta(q0, phi_q);
    let layer1 = SpinorArgs {
        p: k1[0].hypot(k1[1]),
        phi: k1[1].atan2(k1[0]),
        m: kc.m1,
        band: kc.s1,
    };
    let layer2 = SpinorArgs {
        p: k2[0].hypot(k2[1]),
        phi: k2[1].atan2(k2[0]),
        m: kc.m2,
        band: kc.s2,
    };
    let vertex = vertex_product(inputs.vertex, &layer1, &layer2);

    let scale = -inputs.coupling / (4.0 * PI * PI) * q0 / f_prime.abs() * d;
    vertex.map(|v| scale * v)
}

/// The four angular integrals `(I_AA, I_AB, I_BA, I_BB)` of one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelIntegrals {
    pub components: [Complex64; 4],
}

impl ChannelIntegrals {
    pub fn i_aa(&self) -> Complex64 {
        self.components[0]
    }
    pub fn i_ab(&self) -> Complex64 {
        self.components[1]
    }
    pub fn i_ba(&self) -> Complex64 {
        self.components[2]
    }
    pub fn i_bb(&self) -> Complex64 {
        self.components[3]
    }
}

/// Angular integrals of one channel with the scheme selected in `quad`.
pub fn channel_integrals(
    kc: &KinematicConstraint,
    inputs: &KernelInputs<'_>,
    quad: &QuadratureParams,
) -> (ChannelIntegrals, KernelDiagnostics) {
    match quad.scheme {
        AngularScheme::Plain => channel_integrals_with_rule(kc, inputs, &cached_rule(quad.n_phi)),
        AngularScheme::Split => {
            let panels = angular_panels(kc, inputs.q_cutoff, quad.n_phi);
            let mut diag = KernelDiagnostics::default();
            let mut acc = [Complex64::new(0.0, 0.0); 4];
            for panel in &panels {
                let rule = cached_rule(panel.nodes);
                for (phi, w) in rule.mapped(panel.start, panel.end) {
                    let f = angular_integrand(kc, phi, inputs, &mut diag);
                    for (a, v) in acc.iter_mut().zip(f) {
                        *a += w * v;
                    }
                }
            }
            (ChannelIntegrals { components: acc }, diag)
        }
    }
}

/// Gauss-Legendre sum over `phi_q in [0, 2 pi]` with `phi_i = pi (x_i + 1)`,
/// `w_i -> pi w_i`.
pub fn channel_integrals_with_rule(
    kc: &KinematicConstraint,
    inputs: &KernelInputs<'_>,
    rule: &GaussLegendre,
) -> (ChannelIntegrals, KernelDiagnostics) {
    let mut diag = KernelDiagnostics::default();
    let mut acc = [Complex64::new(0.0, 0.0); 4];
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let phi = PI * (x + 1.0);
        let f = angular_integrand(kc, phi, inputs, &mut diag);
        for (a, v) in acc.iter_mut().zip(f) {
            *a += PI * w * v;
        }
    }
    (ChannelIntegrals { components: acc }, diag)
}

/// `a cos(phi) + b sin(phi)` coefficients of the root numerator and of
/// `P(phi) = p1 c1 + p2 c2`, plus the channel energy `W`.
struct RootShape {
    numer: (f64, f64),
    momentum: (f64, f64),
    w: f64,
}

impl RootShape {
    fn new(kc: &KinematicConstraint) -> Self {
        let (e1, e2) = (kc.e1, kc.e2);
        let (u1, u2) = (
            (kc.p1 * kc.phi1.cos(), kc.p1 * kc.phi1.sin()),
            (kc.p2 * kc.phi2.cos(), kc.p2 * kc.phi2.sin()),
        );
        let (sign, w) = if kc.channel().same_band() {
            (-1.0, e1 + e2)
        } else {
            (1.0, e1 - e2)
        };
        Self {
            numer: (e2 * u1.0 + sign * e1 * u2.0, e2 * u1.1 + sign * e1 * u2.1),
            momentum: (u1.0 + u2.0, u1.1 + u2.1),
            w,
        }
    }

    /// `numerator - cutoff * denominator` of the root formula (up to a
    /// channel-independent positive factor); zero where `q0 = cutoff`.
    fn cutoff_gap(&self, same_band: bool, phi: f64, cutoff: f64) -> f64 {
        let (c, s) = (phi.cos(), phi.sin());
        let n = 2.0 * self.w * (self.numer.0 * c + self.numer.1 * s);
        let p = self.momentum.0 * c + self.momentum.1 * s;
        let d = if same_band {
            self.w * self.w - p * p
        } else {
            p * p - self.w * self.w
        };
        n - cutoff * d
    }
}

/// One panel of the composite angular rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub start: f64,
    pub end: f64,
    pub nodes: usize,
}

/// Fewest nodes any panel receives.
const MIN_PANEL_NODES: usize = 8;

/// Angles in [0, 2 pi) where the accepted radial root starts, stops or
/// crosses `q_cutoff`. Between consecutive breakpoints the integrand is
/// smooth.
pub fn angular_breakpoints(kc: &KinematicConstraint, q_cutoff: f64) -> Vec<f64> {
    let shape = RootShape::new(kc);
    let mut points = Vec::new();
    let (na, nb) = shape.numer;
    if na.hypot(nb) > 0.0 {
        let base = nb.atan2(na);
        points.extend([base + 0.5 * PI, base - 0.5 * PI]);
    }
    let (pa, pb) = shape.momentum;
    let r = pa.hypot(pb);
    if r > shape.w.abs() {
        let theta = pb.atan2(pa);
        for target in [shape.w.abs() / r, -shape.w.abs() / r] {
            let off = target.acos();
            points.extend([theta + off, theta - off]);
        }
    }
    if q_cutoff.is_finite() {
        let same = kc.channel().same_band();
        let g = |phi: f64| shape.cutoff_gap(same, phi, q_cutoff);
        const SAMPLES: usize = 4096;
        let step = 2.0 * PI / SAMPLES as f64;
        let mut prev = g(0.0);
        for i in 1..=SAMPLES {
            let (a, b) = ((i - 1) as f64 * step, i as f64 * step);
            let cur = g(b);
            if prev == 0.0 {
                points.push(a);
            } else if prev.signum() != cur.signum() && cur != 0.0 {
                let (mut lo, mut hi, mut glo) = (a, b, prev);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let gm = g(mid);
                    if gm.signum() == glo.signum() {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                points.push(0.5 * (lo + hi));
            }
            prev = cur;
        }
    }
    let mut points: Vec<f64> = points.into_iter().map(|p| p.rem_euclid(2.0 * PI)).collect();
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    points
}

/// Panels covering [0, 2 pi) between consecutive breakpoints (wrapping
/// around), with roughly `n_phi` nodes in total distributed by length.
pub fn angular_panels(kc: &KinematicConstraint, q_cutoff: f64, n_phi: usize) -> Vec<Panel> {
    let points = angular_breakpoints(kc, q_cutoff);
    let tau = 2.0 * PI;
    let mut edges: Vec<(f64, f64)> = Vec::new();
    if points.is_empty() {
        edges.push((0.0, tau));
    } else {
        for (i, &a) in points.iter().enumerate() {
            let b = if i + 1 < points.len() {
                points[i + 1]
            } else {
                points[0] + tau
            };
            if b > a {
                edges.push((a, b));
            }
        }
    }
    edges
        .into_iter()
        .map(|(start, end)| {
            let share = (n_phi as f64 * (end - start) / tau).round() as usize;
            Panel {
                start,
                end,
                nodes: share.max(MIN_PANEL_NODES),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::mode_weights;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const M: f64 = 2.127;

    fn kc(
        ch: Channel,
        p1: f64,
        p2: f64,
        f1: f64,
        f2: f64,
        m1: f64,
        m2: f64,
    ) -> KinematicConstraint {
        KinematicConstraint::new(ch, &Kinematics::new(p1, p2, f1, f2), m1, m2)
    }

    fn random_kc(rng: &mut ChaCha8Rng) -> KinematicConstraint {
        let ch = Channel::ALL[rng.gen_range(0..4)];
        let m1 = rng.gen_range(0.2..3.0);
        let m2 = if rng.gen_bool(0.5) {
            m1
        } else {
            rng.gen_range(0.2..3.0)
        };
        kc(
            ch,
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(-PI..PI),
            rng.gen_range(-PI..PI),
            m1,
            m2,
        )
    }

    #[test]
    fn constraint_vanishes_at_origin() {
        for ch in Channel::ALL {
            let k = kc(ch, 0.13, 0.12, 0.3, -0.2, M, M);
            assert_eq!(constraint_f(&k, 0.0, 1.0), 0.0);
        }
    }

    #[test]
    fn constraint_asymptotics() {
        let k = kc(Channel::EE, 0.13, 0.12, 0.0, 0.0, M, M);
        let q = 1e4;
        let f = constraint_f(&k, q, 0.4);
        assert!(f < 0.0);
        assert!((f / q + 2.0).abs() < 1e-3);
        let k = kc(Channel::HH, 0.13, 0.12, 0.0, 0.0, M, M);
        assert!(constraint_f(&k, q, 0.4) > 0.0);
    }

    #[test]
    fn derivative_at_origin() {
        let k = kc(Channel::EE, 0.13, 0.12, 0.2, -0.5, M, 1.9);
        let phi_q = 0.7;
        let expect =
            0.13 * (0.2f64 - phi_q).cos() / k.e1() - 0.12 * (-0.5f64 - phi_q).cos() / k.e2();
        assert!((constraint_f_prime(&k, 0.0, phi_q) - expect).abs() < 1e-15);
    }

    #[test]
    fn derivative_at_rest() {
        for ch in Channel::ALL {
            let k = kc(ch, 0.0, 0.0, 0.0, 0.0, M, 1.3);
            let q = 0.37;
            let expect = -ch.s1.sign() * q / q.hypot(M) - ch.s2.sign() * q / q.hypot(1.3);
            assert!((constraint_f_prime(&k, q, 2.0) - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let k = random_kc(&mut rng);
            let q: f64 = rng.gen_range(0.0..2.0);
            let phi = rng.gen_range(0.0..2.0 * PI);
            let h = 1e-6 * q.max(k.m1);
            let fd = (constraint_f(&k, q + h, phi) - constraint_f(&k, q - h, phi)) / (2.0 * h);
            let an = constraint_f_prime(&k, q, phi);
            if an.abs() > 1e-6 && q > h {
                assert!((fd - an).abs() <= 1e-5 * an.abs(), "fd {fd} analytic {an}");
            }
        }
    }

    #[test]
    fn accepted_roots_zero_the_constraint() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut accepted = 0;
        for _ in 0..10_000 {
            let k = random_kc(&mut rng);
            let phi = rng.gen_range(0.0..2.0 * PI);
            if let Ok(q) = q0_root(&k, phi, 1e-10) {
                accepted += 1;
                let f = constraint_f(&k, q, phi);
                assert!(
                    f.abs() < 1e-9 * (k.e1() + k.e2()),
                    "F(q0) = {f} at q0 = {q} for {k:?}"
                );
            }
        }
        assert!(accepted > 2000, "only {accepted} roots accepted");
    }

    #[test]
    fn collinear_equal_momenta_have_no_root() {
        let k = kc(Channel::EE, 0.1, 0.1, 0.0, 0.0, M, M);
        for i in 0..64 {
            let phi = 2.0 * PI * i as f64 / 64.0;
            assert!(q0_root(&k, phi, 1e-10).is_err());
        }
        let k = kc(Channel::EH, 0.1, 0.1, 0.4, 1.0, M, M);
        for i in 0..64 {
            let phi = 2.0 * PI * i as f64 / 64.0;
            assert!(q0_root(&k, phi, 1e-10).is_err());
        }
    }

    #[test]
    fn zero_coupling_or_weights_give_zero_integrals() {
        let table = mode_weights(0.9, 1.1, 2.0, 20).unwrap();
        let empty = mode_weights(0.0, 1.1, 2.0, 20).unwrap();
        let k = kc(Channel::EE, 0.13, 0.12, 0.0, 0.0, M, M);
        let quad = QuadratureParams {
            n_phi: 64,
            ..Default::default()
        };
        for (t, coupling) in [(&table, 0.0), (&empty, 0.09)] {
            let inputs = KernelInputs {
                weights: t,
                epsilon_reg: 1e-9,
                coupling,
                vertex: VertexForm::ClosedForm,
                degeneracy_tol: 1e-10,
                q_cutoff: f64::INFINITY,
            };
            let (ints, _) = channel_integrals(&k, &inputs, &quad);
            assert!(ints.components.iter().all(|c| c.norm() == 0.0));
        }
    }

    #[test]
    fn diagonal_configuration_integrates_to_zero() {
        let table = mode_weights(0.9, 1.1, 2.0, 20).unwrap();
        let inputs = KernelInputs {
            weights: &table,
            epsilon_reg: 1e-9,
            coupling: 0.0917,
            vertex: VertexForm::ClosedForm,
            degeneracy_tol: 1e-10,
            q_cutoff: f64::INFINITY,
        };
        let quad = QuadratureParams {
            n_phi: 256,
            ..Default::default()
        };
        for ch in [Channel::EE, Channel::HH] {
            let k = kc(ch, 0.15, 0.15, 0.8, 0.8, M, M);
            let (ints, _) = channel_integrals(&k, &inputs, &quad);
            assert!(ints.components.iter().all(|c| c.norm() == 0.0));
        }
    }

    #[test]
    fn integral_magnitudes_are_rotation_invariant() {
        let table = mode_weights(0.9, 1.1, 2.0, 20).unwrap();
        let inputs = KernelInputs {
            weights: &table,
            epsilon_reg: 1e-9,
            coupling: 0.0917,
            vertex: VertexForm::ClosedForm,
            degeneracy_tol: 1e-10,
            q_cutoff: f64::INFINITY,
        };
        // the rotated integrand is a shifted copy of a periodic function, so
        // compare on an equispaced (trapezoid) grid where the shift is exact
        let n = 720;
        let integrate = |k: &KinematicConstraint, offset: f64| {
            let mut acc = [Complex64::new(0.0, 0.0); 4];
            let mut d = KernelDiagnostics::default();
            for i in 0..n {
                let phi = offset + 2.0 * PI * i as f64 / n as f64;
                let f = angular_integrand(k, phi, &inputs, &mut d);
                for (a, v) in acc.iter_mut().zip(f) {
                    *a += v;
                }
            }
            acc
        };
        let base = kc(Channel::EE, 0.13, 0.09, 0.2, 1.4, M, M);
        let i0 = integrate(&base, 0.0);
        for delta in [PI / 7.0, PI / 3.0, 2.1] {
            let rot = kc(Channel::EE, 0.13, 0.09, 0.2 + delta, 1.4 + delta, M, M);
            let i1 = integrate(&rot, delta);
            for c in 0..4 {
                assert!((i0[c].norm() - i1[c].norm()).abs() <= 1e-10 * (1.0 + i0[c].norm()));
            }
        }
    }
}
