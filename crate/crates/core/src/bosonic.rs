//! Truncated Fock-space description of the Kittel magnon mode.
//!
//! For small tilt angles the transverse magnetization behaves as a single
//! bosonic mode. A pulse hitting the sphere displaces it, D(±α_i), and between
//! the two hits it precesses freely, u(t) = exp(−iω_m t a†a). These operators
//! are built here as explicit N×N matrices so that every closed-form result
//! in [`crate::interferometer`] can be cross-checked by brute force.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::params::FieldParams;
use crate::C64;

/// Amplitude vector over Fock states |0⟩ … |N−1⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState(DVector<C64>);

impl FockState {
    pub fn from_vector(v: DVector<C64>) -> Self {
        Self(v)
    }

    /// |n⟩ in an N-dimensional truncation.
    pub fn number(n: usize, dim: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[n] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub fn vacuum(dim: usize) -> Self {
        Self::number(0, dim)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::ZeroNorm);
        }
        Ok(Self(&self.0 / C64::from(n)))
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &FockState) -> C64 {
        self.0.dotc(&other.0)
    }

    /// |⟨self|other⟩|²
    pub fn fidelity(&self, other: &FockState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// ⟨a†a⟩ for a normalized state.
    pub fn mean_number(&self) -> f64 {
        self.0.iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum()
    }

    /// Fraction of the norm carried by |n⟩ with n ≥ `cutoff`.
    pub fn tail_weight(&self, cutoff: usize) -> f64 {
        self.0.iter().skip(cutoff).map(|c| c.norm_sqr()).sum()
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self(&self.0 * c)
    }

    pub fn add(&self, other: &FockState) -> Self {
        Self(&self.0 + &other.0)
    }
}

/// N×N operator on the truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator(DMatrix<C64>);

impl FockOperator {
    pub fn from_matrix(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn apply(&self, s: &FockState) -> FockState {
        FockState(&self.0 * &s.0)
    }

    pub fn compose(&self, rhs: &FockOperator) -> FockOperator {
        FockOperator(&self.0 * &rhs.0)
    }

    pub fn adjoint(&self) -> FockOperator {
        FockOperator(self.0.adjoint())
    }

    /// max |(A − B)_ij| over the leading `block`×`block` corner.
    pub fn corner_diff(&self, other: &FockOperator, block: usize) -> f64 {
        let d = &self.0 - &other.0;
        d.view((0, 0), (block, block)).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Truncation dimension for amplitudes up to `max_abs`: the larger of 32,
/// ⌈|α|² + 8|α| + 20⌉ and the smallest N that passes the |α|² < N/4 guard.
pub fn default_dimension(max_abs: f64) -> usize {
    let a = max_abs.abs();
    let tail = (a * a + 8.0 * a + 20.0).ceil() as usize;
    let guard = (4.0 * a * a).floor() as usize + 1;
    32.max(tail).max(guard)
}

/// Enforces |α|² < N/4.
pub fn check_truncation(alpha: C64, dim: usize) -> Result<()> {
    let alpha_sq = alpha.norm_sqr();
    if alpha_sq.is_finite() && alpha_sq < dim as f64 / 4.0 {
        Ok(())
    } else {
        Err(Error::TruncationGuard {
            alpha_sq,
            dim,
            required: default_dimension(alpha.norm()),
        })
    }
}

/// Annihilation operator a with a|n⟩ = √n |n−1⟩.
pub fn annihilation(dim: usize) -> FockOperator {
    let mut m = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = C64::from((n as f64).sqrt());
    }
    FockOperator(m)
}

/// Coherent state with amplitudes e^{−|α|²/2} αⁿ/√(n!), n < N.
pub fn coherent_state(alpha: C64, dim: usize) -> Result<FockState> {
    check_truncation(alpha, dim)?;
    let mut v = DVector::zeros(dim);
    let mut c = C64::from((-alpha.norm_sqr() / 2.0).exp());
    for n in 0..dim {
        if n > 0 {
            c = c * alpha / (n as f64).sqrt();
        }
        v[n] = c;
    }
    Ok(FockState(v))
}

/// D(α) = exp(α a† − α* a) by dense matrix exponential of the truncated generator.
pub fn displacement(alpha: C64, dim: usize) -> Result<FockOperator> {
    check_truncation(alpha, dim)?;
    let a = annihilation(dim).0;
    let generator = a.adjoint() * alpha - &a * alpha.conj();
    Ok(FockOperator(generator.exp()))
}

/// u(t) = exp(−iω_m t a†a), diagonal in the number basis.
pub fn free_evolution(f: &FieldParams, t: f64, dim: usize) -> FockOperator {
    let phase = f.omega_m * t;
    let diag = DVector::from_iterator(dim, (0..dim).map(|n| C64::from_polar(1.0, -phase * n as f64)));
    FockOperator(DMatrix::from_diagonal(&diag))
}

/// ⟨α|β⟩ = exp(−|α|²/2 − |β|²/2 + α*β).
pub fn overlap_analytic(alpha: C64, beta: C64) -> C64 {
    (alpha.conj() * beta - (alpha.norm_sqr() + beta.norm_sqr()) / 2.0).exp()
}

/// Coherent amplitudes of the two magnon branches after both pulse hits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchAmplitudes {
    /// Clockwise: kicked by D(α_i) at t₁, then precessed.
    pub plus: C64,
    /// Counter-clockwise: precessed, then kicked by D(−α_i) at t₂.
    pub minus: C64,
}

impl BranchAmplitudes {
    pub fn separation_sq(&self) -> f64 {
        (self.plus - self.minus).norm_sqr()
    }

    pub fn max_abs(&self) -> f64 {
        self.plus.norm().max(self.minus.norm())
    }
}

/// α₊ = (α + α_i)e^{−iω_mΔt}, α₋ = αe^{−iω_mΔt} − α_i.
pub fn branch_amplitudes(alpha: C64, alpha_i: C64, f: &FieldParams, delta_t: f64) -> BranchAmplitudes {
    let rot = C64::from_polar(1.0, -f.omega_m * delta_t);
    BranchAmplitudes {
        plus: (alpha + alpha_i) * rot,
        minus: alpha * rot - alpha_i,
    }
}

/// The two branch states built step by step from |α⟩ with explicit operators:
/// u(Δt)D(α_i)|α⟩ and D(−α_i)u(Δt)|α⟩.
pub fn evolve_branches(alpha: C64, alpha_i: C64, f: &FieldParams, delta_t: f64, dim: usize) -> Result<(FockState, FockState)> {
    let initial = coherent_state(alpha, dim)?;
    let u = free_evolution(f, delta_t, dim);
    let plus = u.apply(&displacement(alpha_i, dim)?.apply(&initial));
    let minus = displacement(-alpha_i, dim)?.apply(&u.apply(&initial));
    Ok((plus, minus))
}
