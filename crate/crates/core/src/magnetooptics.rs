//! Magneto-optic response of the sphere.
//!
//! The permittivity of a magnetized medium is n₀²(1 + iQ M_C) in the frame
//! where the magnetization points along ẑ. Rotating it into the frame whose
//! ẑ is the propagation direction and eliminating the longitudinal field
//! component leaves a 2×2 transverse matrix M_T = k₀σ₀ + k_B·σ. The
//! birefringence vector k_B = k_CB + k_LB splits into a first-order circular
//! part (Faraday) along ŷ and a second-order linear part (Voigt) in the xz
//! plane of Poincaré space.

use std::f64::consts::FRAC_PI_4;

use nalgebra::{Matrix2, Matrix3, Rotation3, Unit, Vector3};

use crate::error::{Error, Result};
use crate::jones::{pauli_dot, rotation_unchecked, JonesMatrix, SopVector};
use crate::params::{MaterialParams, SphereParams};
use crate::C64;

/// Complex 3×3 tensor in Cartesian coordinates.
pub type Tensor3 = Matrix3<C64>;

/// Above this magnetization tilt the first-order birefringence is flagged.
pub const TILT_WARNING: f64 = 0.3;

const AXIS_TOL: f64 = 1e-12;

/// Propagation direction q̂ = (θ, φ) and magnetization direction m̂ = (θ_m, φ_m),
/// polar angles in radians measured from ẑ ∥ H_dc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    pub theta: f64,
    pub phi: f64,
    pub theta_m: f64,
    pub phi_m: f64,
}

impl Orientation {
    pub fn new(theta: f64, phi: f64, theta_m: f64, phi_m: f64) -> Result<Self> {
        let polar = |x: f64, field: &str| {
            if x.is_finite() && (0.0..=std::f64::consts::PI).contains(&x) {
                Ok(())
            } else {
                Err(Error::invalid(field, format!("polar angle must lie in [0, π], got {x}")))
            }
        };
        polar(theta, "orientation.theta")?;
        polar(theta_m, "orientation.theta_m")?;
        if !(phi.is_finite() && phi_m.is_finite()) {
            return Err(Error::invalid("orientation.phi", "azimuths must be finite"));
        }
        Ok(Self { theta, phi, theta_m, phi_m })
    }

    /// Light along ẑ, magnetization tilted by (θ_m, φ_m).
    pub fn along_field(theta_m: f64, phi_m: f64) -> Result<Self> {
        Self::new(0.0, 0.0, theta_m, phi_m)
    }

    pub fn q_hat(&self) -> Vector3<f64> {
        polar_unit(self.theta, self.phi)
    }

    pub fn m_hat(&self) -> Vector3<f64> {
        polar_unit(self.theta_m, self.phi_m)
    }
}

fn polar_unit(theta: f64, phi: f64) -> Vector3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vector3::new(st * cp, st * sp, ct)
}

fn complexify(m: &Matrix3<f64>) -> Tensor3 {
    m.map(C64::from)
}

/// The antisymmetric gyration matrix M_C = C_ẑ.
pub fn mc_matrix() -> Matrix3<f64> {
    Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
}

/// ε_m = n₀²(1 + iQ M_C) for magnetization along ẑ.
pub fn permittivity(q: f64, n_0: f64) -> Tensor3 {
    (Tensor3::identity() + complexify(&mc_matrix()) * C64::new(0.0, q)) * C64::from(n_0 * n_0)
}

/// Cross-product matrix, `cross_matrix(u) * v == u × v`.
pub fn cross_matrix(u: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -u.z, u.y, u.z, 0.0, -u.x, -u.y, u.x, 0.0)
}

/// First-order magnetization tilt correction M_⊥ with C_m̂ = M_C + M_⊥ + O(θ_m²).
pub fn tilt_matrix(theta_m: f64, phi_m: f64) -> Matrix3<f64> {
    let (s, c) = phi_m.sin_cos();
    Matrix3::new(0.0, 0.0, s, 0.0, 0.0, -c, -s, c, 0.0) * theta_m
}

/// Projector u uᵀ.
pub fn projector(u: &Vector3<f64>) -> Matrix3<f64> {
    u * u.transpose()
}

/// Proper rotation R_u with R_u·u = ẑ: the turn about u × ẑ by arccos(u·ẑ).
/// ẑ maps to the identity, −ẑ to a half turn about x̂.
pub fn rotation_to_z(u: &Vector3<f64>) -> Matrix3<f64> {
    let z = Vector3::z();
    let u = u.normalize();
    let cos = u.dot(&z);
    if (cos - 1.0).abs() <= AXIS_TOL {
        return Matrix3::identity();
    }
    if (cos + 1.0).abs() <= AXIS_TOL {
        return Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0));
    }
    let axis = Unit::new_normalize(u.cross(&z));
    Rotation3::from_axis_angle(&axis, cos.clamp(-1.0, 1.0).acos()).into_inner()
}

/// M′_ε = (R_q̂ R_m̂⁻¹ ε_m R_m̂ R_q̂⁻¹ + n² P_ẑ)/n₀² − 1, the dielectric matrix
/// in the frame where light propagates along ẑ.
pub fn transformed_dielectric(o: &Orientation, m: &MaterialParams, n: f64) -> Tensor3 {
    transformed_dielectric_with(o, m, n, rotation_to_z)
}

/// [`transformed_dielectric`] with a caller-supplied choice of R_u.
pub fn transformed_dielectric_with(
    o: &Orientation,
    m: &MaterialParams,
    n: f64,
    rot: impl Fn(&Vector3<f64>) -> Matrix3<f64>,
) -> Tensor3 {
    let rq = complexify(&rot(&o.q_hat()));
    let rm = complexify(&rot(&o.m_hat()));
    let eps = permittivity(m.q_s, m.n_0);
    let n0_sq = C64::from(m.n_0 * m.n_0);
    let p_z = complexify(&projector(&Vector3::z()));
    let rotated = rq * rm.transpose() * eps * rm * rq.transpose();
    (rotated + p_z * C64::from(n * n)) / n0_sq - Tensor3::identity()
}

/// Effective transverse 2×2 matrix: the Schur complement A − b c / d of the
/// longitudinal (third) row and column of `m_prime`.
pub fn transverse_reduction(m_prime: &Tensor3) -> Matrix2<C64> {
    let a = m_prime.fixed_view::<2, 2>(0, 0).into_owned();
    let b = m_prime.fixed_view::<2, 1>(0, 2).into_owned();
    let c = m_prime.fixed_view::<1, 2>(2, 0).into_owned();
    let d = m_prime[(2, 2)];
    a - (b * c) / d
}

/// Decomposition M_T = k₀σ₀ + (k_CB + k_LB)·σ of the transverse response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BirefringenceVector {
    pub k_0: f64,
    pub k_cb: Vector3<f64>,
    pub k_lb: Vector3<f64>,
}

impl BirefringenceVector {
    pub fn zero() -> Self {
        Self {
            k_0: 0.0,
            k_cb: Vector3::zeros(),
            k_lb: Vector3::zeros(),
        }
    }

    pub fn k_b(&self) -> Vector3<f64> {
        self.k_cb + self.k_lb
    }

    /// k₀σ₀ + k_B·σ
    pub fn transverse_matrix(&self) -> Matrix2<C64> {
        Matrix2::identity() * C64::from(self.k_0) + pauli_dot(&self.k_b())
    }
}

/// S(ϱ) = [e^{i(ϱ−π/4)}𝒬² + c.c.]/4.
fn squeeze(rho: f64, script_q: C64) -> f64 {
    let q2 = script_q * script_q;
    let phase = C64::from_polar(1.0, rho - FRAC_PI_4);
    ((phase * q2 + phase.conj() * q2.conj()) / 4.0).re
}

/// Birefringence vector of the sphere for the given geometry.
///
/// k_CB = Q_s(0, q̂·m̂, 0) and k_LB = Q_s²(S(−π/4), 0, S(π/4)) with
/// 𝒬 = (Q_x + iQ_y)/Q_s, (Q_x, Q_y, Q_z) = Q_s q̂; k₀ = −(Q_x² + Q_y²)/2.
/// The linear part ignores the O(θ_m Q_s²) tilt correction.
pub fn birefringence(o: &Orientation, m: &MaterialParams) -> BirefringenceVector {
    if o.theta_m > TILT_WARNING {
        log::warn!("magnetization tilt theta_m = {:.3} exceeds {TILT_WARNING}; first-order birefringence is inaccurate", o.theta_m);
    }
    let q_s = m.q_s;
    let q = o.q_hat();
    let script_q = C64::new(q.x, q.y);
    let (qx, qy) = (q_s * q.x, q_s * q.y);
    BirefringenceVector {
        k_0: -(qx * qx + qy * qy) / 2.0,
        k_cb: Vector3::new(0.0, q_s * q.dot(&o.m_hat()), 0.0),
        k_lb: Vector3::new(squeeze(-FRAC_PI_4, script_q), 0.0, squeeze(FRAC_PI_4, script_q)) * (q_s * q_s),
    }
}

/// Jones matrix of one pass through the sphere,
/// B(k_B/|k_B|, (l_e/l_P)|k_B|/Q_s); the identity when k_B = 0.
pub fn sphere_jones(b: &BirefringenceVector, s: &SphereParams, m: &MaterialParams) -> JonesMatrix {
    let k = b.k_b();
    let norm = k.norm();
    if norm == 0.0 {
        return JonesMatrix::identity();
    }
    let angle = s.optical_length() / m.beat_length() * norm / m.q_s;
    rotation_unchecked(&(k / norm), angle)
}

/// χ_P = ⟨p_i| J₁† J₂ |p_i⟩, the overlap of the polarization branches.
pub fn chi_p(p_i: &SopVector, j1: &JonesMatrix, j2: &JonesMatrix) -> C64 {
    let v = p_i.as_vector();
    v.dotc(&(j1.matrix().adjoint() * j2.matrix() * v))
}

/// 1 − Re χ_P evaluated as ‖J₂p_i − J₁p_i‖²/2, which stays accurate when
/// χ_P is within rounding of 1.
pub fn chi_p_deficit(p_i: &SopVector, j1: &JonesMatrix, j2: &JonesMatrix) -> f64 {
    let v = p_i.as_vector();
    (j2.matrix() * v - j1.matrix() * v).norm_squared() / 2.0
}
