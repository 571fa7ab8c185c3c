//! Jones calculus for fully polarized light.
//!
//! A state of polarization (SOP) is stored by its components along |H⟩ and
//! |V⟩, in that order. Jones matrices act on these components, and the Pauli
//! matrices are the standard ones in the same basis.
//!
//! The Poincaré map sends |V⟩, |H⟩, |D⟩, |A⟩, |R⟩, |L⟩ to ẑ, −ẑ, x̂, −x̂, −ŷ,
//! ŷ. In the (H, V) basis this is (⟨σx⟩, ⟨σy⟩, −⟨σz⟩), a mirror image of the
//! Bloch vector of the σ algebra. Consequently `rotation(û, φ)` turns Poincaré
//! vectors by −φ about the mirrored axis [`mirror_axis`]`(û)`.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use nalgebra::{Matrix2, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::C64;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SopLabel {
    V,
    H,
    D,
    A,
    R,
    L,
}

impl SopLabel {
    pub const ALL: [SopLabel; 6] = [SopLabel::V, SopLabel::H, SopLabel::D, SopLabel::A, SopLabel::R, SopLabel::L];
}

impl FromStr for SopLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "V" | "v" => Ok(SopLabel::V),
            "H" | "h" => Ok(SopLabel::H),
            "D" | "d" => Ok(SopLabel::D),
            "A" | "a" => Ok(SopLabel::A),
            "R" | "r" => Ok(SopLabel::R),
            "L" | "l" => Ok(SopLabel::L),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

impl fmt::Display for SopLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SopLabel::V => "V",
            SopLabel::H => "H",
            SopLabel::D => "D",
            SopLabel::A => "A",
            SopLabel::R => "R",
            SopLabel::L => "L",
        };
        f.write_str(s)
    }
}

/// Normalized two-component polarization state, components (H, V).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SopVector(Vector2<C64>);

impl SopVector {
    /// Builds and normalizes a state from its H and V components.
    pub fn new(h: C64, v: C64) -> Result<Self> {
        let raw = Vector2::new(h, v);
        let norm = raw.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::ZeroNorm);
        }
        Ok(Self(raw / C64::from(norm)))
    }

    pub fn h(&self) -> C64 {
        self.0[0]
    }

    pub fn v(&self) -> C64 {
        self.0[1]
    }

    pub fn as_vector(&self) -> &Vector2<C64> {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// The state multiplied by e^{iθ}.
    pub fn with_phase(&self, theta: f64) -> Self {
        Self(self.0 * C64::from_polar(1.0, theta))
    }
}

/// The six textbook polarization states, with the exact superpositions
/// |D⟩ = (|H⟩+|V⟩)/√2, |A⟩ = (|H⟩−|V⟩)/√2, |R⟩ = (|H⟩−i|V⟩)/√2,
/// |L⟩ = (|H⟩+i|V⟩)/√2.
pub fn standard_sop(label: SopLabel) -> SopVector {
    let s = FRAC_1_SQRT_2;
    let (h, v) = match label {
        SopLabel::H => (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        SopLabel::V => (C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
        SopLabel::D => (C64::new(s, 0.0), C64::new(s, 0.0)),
        SopLabel::A => (C64::new(s, 0.0), C64::new(-s, 0.0)),
        SopLabel::R => (C64::new(s, 0.0), C64::new(0.0, -s)),
        SopLabel::L => (C64::new(s, 0.0), C64::new(0.0, s)),
    };
    SopVector(Vector2::new(h, v))
}

/// Parses a label such as `"R"` into its standard state.
pub fn sop_from_label(label: &str) -> Result<SopVector> {
    Ok(standard_sop(label.parse()?))
}

/// 2×2 complex transfer matrix acting on (H, V) components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix(Matrix2<C64>);

impl JonesMatrix {
    pub fn from_matrix(m: Matrix2<C64>) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    pub fn sigma_x() -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self(Matrix2::new(o, l, l, o))
    }

    pub fn sigma_y() -> Self {
        let o = C64::new(0.0, 0.0);
        Self(Matrix2::new(o, C64::new(0.0, -1.0), C64::new(0.0, 1.0), o))
    }

    pub fn sigma_z() -> Self {
        let o = C64::new(0.0, 0.0);
        Self(Matrix2::new(C64::new(1.0, 0.0), o, o, C64::new(-1.0, 0.0)))
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn determinant(&self) -> C64 {
        self.0.determinant()
    }

    pub fn apply(&self, s: &SopVector) -> SopVector {
        SopVector(self.0 * s.0)
    }

    /// max |(J†J − 1)_ij|
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.0.adjoint() * self.0 - Matrix2::identity();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |(A − B)_ij|
    pub fn max_abs_diff(&self, other: &JonesMatrix) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Mul for JonesMatrix {
    type Output = JonesMatrix;

    fn mul(self, rhs: JonesMatrix) -> JonesMatrix {
        JonesMatrix(self.0 * rhs.0)
    }
}

impl Mul<SopVector> for JonesMatrix {
    type Output = SopVector;

    fn mul(self, rhs: SopVector) -> SopVector {
        self.apply(&rhs)
    }
}

/// A real 3-vector in Poincaré space. Unit length for pure states and
/// rotation axes; also used for unnormalized birefringence directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareVector(pub Vector3<f64>);

impl PoincareVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vector3::new(x, y, z))
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }

    pub fn y(&self) -> f64 {
        self.0.y
    }

    pub fn z(&self) -> f64 {
        self.0.z
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn dot(&self, other: &PoincareVector) -> f64 {
        self.0.dot(&other.0)
    }
}

/// σ·û for a 3-vector û.
pub fn pauli_dot(u: &Vector3<f64>) -> Matrix2<C64> {
    JonesMatrix::sigma_x().0 * C64::from(u.x) + JonesMatrix::sigma_y().0 * C64::from(u.y) + JonesMatrix::sigma_z().0 * C64::from(u.z)
}

/// B(û, φ) = cos(φ/2) − i(σ·û) sin(φ/2).
pub fn rotation(axis: &PoincareVector, phi: f64) -> Result<JonesMatrix> {
    let n = axis.norm();
    if (n - 1.0).abs().is_nan() || (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::NonUnitAxis(n));
    }
    Ok(rotation_unchecked(&axis.0, phi))
}

pub(crate) fn rotation_unchecked(u: &Vector3<f64>, phi: f64) -> JonesMatrix {
    let (s, c) = (phi / 2.0).sin_cos();
    JonesMatrix(Matrix2::identity() * C64::from(c) - pauli_dot(u) * C64::new(0.0, s))
}

/// ⟨a|b⟩
pub fn sop_overlap(a: &SopVector, b: &SopVector) -> C64 {
    a.0.dotc(&b.0)
}

/// Poincaré-sphere point of a normalized SOP, (⟨σx⟩, ⟨σy⟩, −⟨σz⟩).
pub fn poincare_map(s: &SopVector) -> PoincareVector {
    let (h, v) = (s.0[0], s.0[1]);
    let hv = h.conj() * v;
    PoincareVector::new(2.0 * hv.re, 2.0 * hv.im, v.norm_sqr() - h.norm_sqr())
}

/// The Poincaré axis about which `rotation(û, φ)` turns Poincaré vectors by
/// −φ: the image of û under the same mirror as [`poincare_map`].
pub fn mirror_axis(u: &PoincareVector) -> PoincareVector {
    PoincareVector::new(u.x(), u.y(), -u.z())
}

/// Reflection of the SOP by a pass through the loop, σ_z·s.
pub fn mirror_sop(s: &SopVector) -> SopVector {
    SopVector(Vector2::new(s.0[0], -s.0[1]))
}

/// |⟨a|b⟩|, the phase-insensitive comparison used for transformed states.
pub fn fidelity_amplitude(a: &SopVector, b: &SopVector) -> f64 {
    sop_overlap(a, b).norm()
}
