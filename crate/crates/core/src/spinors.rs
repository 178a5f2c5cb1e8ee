//! Two-component Dirac spinors of a gapped honeycomb layer and the action of
//! the interlayer photon vertex on their tensor product.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Band index: electron (`u` spinor, p0 = +E) or hole (`v` spinor, p0 = -E).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BandSign {
    Electron,
    Hole,
}

impl BandSign {
    pub fn sign(self) -> f64 {
        match self {
            BandSign::Electron => 1.0,
            BandSign::Hole => -1.0,
        }
    }
}

/// Band assignment of the two layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Channel {
    pub s1: BandSign,
    pub s2: BandSign,
}

impl Channel {
    pub const EE: Channel = Channel::new(BandSign::Electron, BandSign::Electron);
    pub const EH: Channel = Channel::new(BandSign::Electron, BandSign::Hole);
    pub const HE: Channel = Channel::new(BandSign::Hole, BandSign::Electron);
    pub const HH: Channel = Channel::new(BandSign::Hole, BandSign::Hole);
    pub const ALL: [Channel; 4] = [Self::EE, Self::EH, Self::HE, Self::HH];

    pub const fn new(s1: BandSign, s2: BandSign) -> Self {
        Self { s1, s2 }
    }

    /// True for ee and hh, whose kinematic root uses the `+` branch.
    pub fn same_band(self) -> bool {
        self.s1 == self.s2
    }

    pub fn label(self) -> &'static str {
        match (self.s1, self.s2) {
            (BandSign::Electron, BandSign::Electron) => "ee",
            (BandSign::Electron, BandSign::Hole) => "eh",
            (BandSign::Hole, BandSign::Electron) => "he",
            (BandSign::Hole, BandSign::Hole) => "hh",
        }
    }
}

/// Sublattice amplitudes `(A, B)` of one layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor2 {
    pub a: Complex64,
    pub b: Complex64,
}

impl Spinor2 {
    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Spinor2) -> Complex64 {
        self.a.conj() * other.a + self.b.conj() * other.b
    }

    /// Tensor product in the order (A1A2, A1B2, B1A2, B1B2).
    pub fn kron(&self, other: &Spinor2) -> [Complex64; 4] {
        [
            self.a * other.a,
            self.a * other.b,
            self.b * other.a,
            self.b * other.b,
        ]
    }
}

/// How the effective vertex acts on the two-layer spinor product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexForm {
    /// Explicit `g_{mu nu} gamma^mu (x) gamma^nu` with `gamma = sigma_z (1, sigma_x, sigma_y)`.
    #[default]
    Matrix,
    /// Tabulated closed form `(i/N)(-chi1 chi2 e^{i(phi1+phi2)}, i chi1 e^{i phi1},
    /// i chi2 e^{i phi2}, 1)` with the channel's chi values.
    ClosedForm,
}

/// Single-particle energy `sqrt(p^2 + m^2)`.
#[inline]
pub fn energy(p: f64, m: f64) -> f64 {
    p.hypot(m)
}

/// Lower-to-upper component ratio of the spinor of band `band`.
///
/// Electrons use `p / (E + m)`; holes use `(-E - m) / p`, which is the same
/// number without the cancellation in `-E + m`. At `p = 0` the hole value is
/// `-inf`, whose spinor limit is `(0, -e^{i phi})`.
pub fn chi(p: f64, m: f64, band: BandSign) -> f64 {
    let e = energy(p, m);
    match band {
        BandSign::Electron => p / (e + m),
        BandSign::Hole if p > 0.0 => -(e + m) / p,
        BandSign::Hole => f64::NEG_INFINITY,
    }
}

/// Unit spinor `(1, chi e^{i phi}) / sqrt(1 + chi^2)`.
pub fn spinor(p: f64, phi: f64, m: f64, band: BandSign) -> Spinor2 {
    spinor_from_chi(chi(p, m, band), phi)
}

pub(crate) fn spinor_from_chi(chi: f64, phi: f64) -> Spinor2 {
    let phase = Complex64::from_polar(1.0, phi);
    if chi.is_infinite() {
        return Spinor2 {
            a: Complex64::new(0.0, 0.0),
            b: phase * chi.signum(),
        };
    }
    if chi.abs() <= 1.0 {
        let n = (1.0 + chi * chi).sqrt();
        Spinor2 {
            a: Complex64::new(1.0 / n, 0.0),
            b: phase * (chi / n),
        }
    } else {
        let t = 1.0 / chi;
        let n = (1.0 + t * t).sqrt();
        Spinor2 {
            a: Complex64::new(t.abs() / n, 0.0),
            b: phase * (chi.signum() / n),
        }
    }
}

/// Arguments of one layer's spinor inside the vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorArgs {
    pub p: f64,
    pub phi: f64,
    pub m: f64,
    pub band: BandSign,
}

impl SpinorArgs {
    pub fn spinor(&self) -> Spinor2 {
        spinor(self.p, self.phi, self.m, self.band)
    }
}

/// Vertex applied to `spinor(layer1) (x) spinor(layer2)`, basis (AA, AB, BA, BB).
pub fn vertex_product(
    form: VertexForm,
    layer1: &SpinorArgs,
    layer2: &SpinorArgs,
) -> [Complex64; 4] {
    let psi = layer1.spinor().kron(&layer2.spinor());
    match form {
        VertexForm::ClosedForm => {
            // (i/N)(-chi1 chi2 e.., i chi1 e.., i chi2 e.., 1) written through the
            // normalised product components so that chi = +-inf stays finite.
            let i = Complex64::i();
            [-i * psi[3], -psi[2], -psi[1], i * psi[0]]
        }
        // gamma0 gamma0 - gamma1 gamma1 - gamma2 gamma2 = sx sx + sy sy + sz sz = 2 SWAP - 1
        VertexForm::Matrix => [psi[0], 2.0 * psi[2] - psi[1], 2.0 * psi[1] - psi[2], psi[3]],
    }
}
