//! The loop mirror as a whole: coupler scattering, branch overlaps, the
//! transmission and reflection probabilities, and the entanglement between
//! the output port and the sphere/polarization degrees of freedom.
//!
//! Conventions: `t` is real positive up to an optional global phase,
//! t′ = t and r′ = r = i·t·|r/t|. The clockwise sub-pulse carries amplitude t
//! and hits the sphere at t₁; the counter-clockwise one carries r and hits at
//! t₂. The final state is
//!
//! ```text
//! |ψ_f⟩ = t r′ |a1, +⟩ + r t′ |a1, −⟩ + t t′ |a2, +⟩ + r r′ |a2, −⟩
//! ```
//!
//! where |±⟩ are the branch states of the polarization and magnon.

use nalgebra::{DMatrix, DVector, Matrix4, Vector2};

use crate::bosonic::{self, BranchAmplitudes, FockState};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::jones::{sop_overlap, JonesMatrix, SopLabel, SopVector};
use crate::magnetooptics::{birefringence, chi_p, sphere_jones, Orientation};
use crate::params::{FieldParams, PhysicalParams};
use crate::C64;

const COUPLER_TOL: f64 = 1e-12;
/// Below this ν₊ the |m₁⟩ normalization is treated as degenerate.
pub const NU_PLUS_FLOOR: f64 = 1e-14;

/// Optical coupler with |t|² + |r|² = 1. The power split is stored
/// alongside the magnitudes so that a 3 dB coupler has |t|² = 1/2 exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerParams {
    t_mag: f64,
    r_mag: f64,
    t_sq: f64,
    r_sq: f64,
    phase: f64,
}

impl CouplerParams {
    pub fn new(t_mag: f64, r_mag: f64) -> Result<Self> {
        if !(t_mag.is_finite() && t_mag > 0.0 && t_mag <= 1.0) {
            return Err(Error::invalid("coupler.t_mag", format!("must lie in (0, 1], got {t_mag}")));
        }
        if !(r_mag.is_finite() && r_mag >= 0.0) {
            return Err(Error::invalid("coupler.r_mag", format!("must be >= 0, got {r_mag}")));
        }
        let total = t_mag * t_mag + r_mag * r_mag;
        if (total - 1.0).abs() > COUPLER_TOL {
            return Err(Error::invalid("coupler", format!("|t|^2 + |r|^2 must equal 1, got {total}")));
        }
        Ok(Self {
            t_mag,
            r_mag,
            t_sq: t_mag * t_mag,
            r_sq: r_mag * r_mag,
            phase: 0.0,
        })
    }

    /// Coupler with the given |t| and |r| = √(1 − |t|²).
    pub fn from_transmission(t_mag: f64) -> Result<Self> {
        if !(t_mag.is_finite() && t_mag > 0.0 && t_mag <= 1.0) {
            return Err(Error::invalid("coupler.t_mag", format!("must lie in (0, 1], got {t_mag}")));
        }
        Self::new(t_mag, (1.0 - t_mag * t_mag).max(0.0).sqrt())
    }

    /// Coupler with power transmission |t|² = `t_sq`.
    pub fn from_power(t_sq: f64) -> Result<Self> {
        if !(t_sq.is_finite() && t_sq > 0.0 && t_sq <= 1.0) {
            return Err(Error::invalid("coupler.t_sq", format!("must lie in (0, 1], got {t_sq}")));
        }
        let r_sq = 1.0 - t_sq;
        Ok(Self {
            t_mag: t_sq.sqrt(),
            r_mag: r_sq.sqrt(),
            t_sq,
            r_sq,
            phase: 0.0,
        })
    }

    /// Symmetric 3 dB coupler, |t|² = |r|² = 1/2.
    pub fn three_db() -> Self {
        Self::from_power(0.5).expect("valid split")
    }

    /// The same coupler with every amplitude multiplied by e^{iθ}.
    pub fn with_global_phase(self, theta: f64) -> Self {
        Self { phase: theta, ..self }
    }

    pub fn t_mag(&self) -> f64 {
        self.t_mag
    }

    pub fn r_mag(&self) -> f64 {
        self.r_mag
    }

    /// |t|²
    pub fn t_sq(&self) -> f64 {
        self.t_sq
    }

    /// |r|²
    pub fn r_sq(&self) -> f64 {
        self.r_sq
    }

    pub fn t(&self) -> C64 {
        C64::from_polar(self.t_mag, self.phase)
    }

    /// r = i·t·|r/t|
    pub fn r(&self) -> C64 {
        C64::new(0.0, 1.0) * self.t() * (self.r_mag / self.t_mag)
    }

    pub fn t_prime(&self) -> C64 {
        self.t()
    }

    pub fn r_prime(&self) -> C64 {
        self.r()
    }

    /// υ = |r/t|²
    pub fn upsilon(&self) -> f64 {
        self.r_sq / self.t_sq
    }
}

/// 4×4 port scattering matrix over (a1, a2, b1, b2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringMatrix(pub Matrix4<C64>);

impl ScatteringMatrix {
    /// max |(S†S − 1)_ij|
    pub fn unitarity_defect(&self) -> f64 {
        (self.0.adjoint() * self.0 - Matrix4::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |(Sᵀ − S)_ij|
    pub fn symmetry_defect(&self) -> f64 {
        (self.0.transpose() - self.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn scattering_matrix(c: &CouplerParams) -> ScatteringMatrix {
    let z = C64::new(0.0, 0.0);
    let (t, r, tp, rp) = (c.t(), c.r(), c.t_prime(), c.r_prime());
    ScatteringMatrix(Matrix4::new(
        z, z, tp, rp, //
        z, z, rp, tp, //
        t, r, z, z, //
        r, t, z, z,
    ))
}

/// Effective loss of interference, (1 − d·Re(χ_P χ_M))/2. `retention` = 1
/// is the unitary case; every η in the crate goes through here.
pub fn eta_with_retention(chi_p: C64, chi_m: C64, retention: f64) -> f64 {
    (1.0 - retention * (chi_p * chi_m).re) / 2.0
}

/// η = (1 − Re(χ_P χ_M))/2.
pub fn eta(chi_p: C64, chi_m: C64) -> f64 {
    eta_with_retention(chi_p, chi_m, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probabilities {
    pub p_t: f64,
    pub p_r: f64,
}

impl Probabilities {
    pub fn total(&self) -> f64 {
        self.p_t + self.p_r
    }
}

/// p_T = (|t|² − |r|²)² + 4|tr|²η, p_R = 4|tr|²(1 − η).
pub fn transmission_reflection(c: &CouplerParams, eta: f64) -> Probabilities {
    let (t2, r2) = (c.t_sq, c.r_sq);
    let mix = 4.0 * t2 * r2;
    Probabilities {
        p_t: (t2 - r2).powi(2) + mix * eta,
        p_r: mix * (1.0 - eta),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchOverlaps {
    pub chi_p: C64,
    pub chi_m: C64,
    pub eta: f64,
}

impl BranchOverlaps {
    pub fn new(chi_p: C64, chi_m: C64) -> Self {
        Self {
            chi_p,
            chi_m,
            eta: eta(chi_p, chi_m),
        }
    }

    pub fn product(&self) -> C64 {
        self.chi_p * self.chi_m
    }
}

/// Prefactors of |ψ_f⟩ together with the resulting probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinalState {
    /// (t r′, r t′, t t′, r r′): (a1,+), (a1,−), (a2,+), (a2,−).
    pub amplitudes: [C64; 4],
    pub overlaps: BranchOverlaps,
    pub probabilities: Probabilities,
}

pub fn final_state_symbolic(c: &CouplerParams, chi_p: C64, chi_m: C64) -> FinalState {
    let (t, r, tp, rp) = (c.t(), c.r(), c.t_prime(), c.r_prime());
    let overlaps = BranchOverlaps::new(chi_p, chi_m);
    FinalState {
        amplitudes: [t * rp, r * tp, t * tp, r * rp],
        overlaps,
        probabilities: transmission_reflection(c, overlaps.eta),
    }
}

/// Decoherence of the branch superposition between the two hits.
/// `d` = 1 keeps full coherence, `d` = 0 is a complete collapse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseModel {
    d: f64,
}

impl CollapseModel {
    pub fn new(d: f64) -> Result<Self> {
        if d.is_finite() && (0.0..=1.0).contains(&d) {
            Ok(Self { d })
        } else {
            Err(Error::invalid("collapse_d", format!("must lie in [0, 1], got {d}")))
        }
    }

    pub fn unitary() -> Self {
        Self { d: 1.0 }
    }

    pub fn full_collapse() -> Self {
        Self { d: 0.0 }
    }

    pub fn retention(&self) -> f64 {
        self.d
    }
}

impl Default for CollapseModel {
    fn default() -> Self {
        Self::unitary()
    }
}

pub fn collapsed_transmission(c: &CouplerParams, chi_p: C64, chi_m: C64, cm: &CollapseModel) -> Probabilities {
    transmission_reflection(c, eta_with_retention(chi_p, chi_m, cm.retention()))
}

/// Purity of the reduced branch state, 1 − 2|tr|²(1 − |μ|²), for branch
/// overlap μ = ⟨+|−⟩. Equal to the Schmidt expression below but free of the
/// 0/0 that the latter hits when either Schmidt weight vanishes.
pub fn purity_from_overlap(c: &CouplerParams, mu: C64) -> f64 {
    1.0 - 2.0 * c.t_sq * c.r_sq * (1.0 - mu.norm_sqr())
}

/// Schmidt coefficients of |ψ_f⟩ = v₁|a1⟩|m₁⟩ + v₂|a2⟩|m₂⟩ as functions of
/// the branch overlap μ = ⟨+|−⟩ alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmidtCoefficients {
    pub v1: C64,
    pub v2: C64,
    pub mu: C64,
    pub nu_plus: f64,
    pub nu_minus: f64,
    /// ⟨m₁|m₂⟩
    pub m_overlap: C64,
    pub purity: f64,
}

impl SchmidtCoefficients {
    /// 1 − 2|v₁v₂|²(1 − |⟨m₁|m₂⟩|²)
    pub fn schmidt_purity(&self) -> f64 {
        1.0 - 2.0 * (self.v1 * self.v2).norm_sqr() * (1.0 - self.m_overlap.norm_sqr())
    }
}

/// v₁ = i t² √(υν₊), v₂ = t² √((1−υ)² + υν₋), ν± = 2(1 ± μ′),
/// ⟨m₁|m₂⟩ = (1 + μ* − υμ − υ)/√(ν₊((1−υ)² + υν₋)).
pub fn schmidt_coefficients(c: &CouplerParams, mu: C64) -> SchmidtCoefficients {
    let ups = c.upsilon();
    let t2 = c.t() * c.t();
    let zero = C64::new(0.0, 0.0);
    let nu_plus = 2.0 * (1.0 + mu.re);
    let nu_minus = 2.0 * (1.0 - mu.re);
    let d2 = (1.0 - ups).powi(2) + ups * nu_minus;
    let v1 = if nu_plus < NU_PLUS_FLOOR { zero } else { C64::new(0.0, 1.0) * t2 * (ups * nu_plus).sqrt() };
    let v2 = if d2 < NU_PLUS_FLOOR { zero } else { t2 * d2.sqrt() };
    // with either weight zero the state is a product and ⟨m₁|m₂⟩ drops out
    let m_overlap = if v1 == zero || v2 == zero {
        zero
    } else {
        (C64::new(1.0, 0.0) + mu.conj() - mu * ups - ups) / (nu_plus * d2).sqrt()
    };
    SchmidtCoefficients {
        v1,
        v2,
        mu,
        nu_plus,
        nu_minus,
        m_overlap,
        purity: purity_from_overlap(c, mu),
    }
}

/// Schmidt data for the perpendicular configuration, with |m₁⟩, |m₂⟩ as
/// explicit Fock vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtData {
    pub coefficients: SchmidtCoefficients,
    pub m1: FockState,
    pub m2: FockState,
}

impl SchmidtData {
    pub fn purity(&self) -> f64 {
        self.coefficients.purity
    }

    pub fn v1(&self) -> C64 {
        self.coefficients.v1
    }

    pub fn v2(&self) -> C64 {
        self.coefficients.v2
    }
}

/// First number state with a usable component orthogonal to `v`, normalized.
fn orthogonal_to(v: &FockState) -> Result<FockState> {
    for n in 0..v.dim() {
        let e = FockState::number(n, v.dim());
        let rest = e.add(&v.scaled(-v.inner(&e)));
        if rest.norm() > 0.5 {
            return rest.normalized();
        }
    }
    Err(Error::ZeroNorm)
}

pub fn schmidt_decompose(c: &CouplerParams, alpha_plus: C64, alpha_minus: C64, dim: usize) -> Result<SchmidtData> {
    let ket_p = bosonic::coherent_state(alpha_plus, dim)?;
    let ket_m = bosonic::coherent_state(alpha_minus, dim)?;
    let mut coefficients = schmidt_coefficients(c, bosonic::overlap_analytic(alpha_plus, alpha_minus));
    let ups = c.upsilon();
    let zero = C64::new(0.0, 0.0);
    let sum = ket_p.add(&ket_m);
    let diff = ket_p.add(&ket_m.scaled(C64::from(-ups)));
    let (m1, m2) = match (coefficients.v1 == zero, coefficients.v2 == zero) {
        (false, false) => (sum.scaled(C64::from(1.0 / coefficients.nu_plus.sqrt())), diff.normalized()?),
        (true, _) => {
            // Gram route: weight from the Fock norm, direction from whatever survives
            let weight = sum.norm();
            coefficients.v1 = C64::new(0.0, 1.0) * c.t() * c.t() * (ups.sqrt() * weight);
            let m2 = diff.normalized()?;
            let m1 = if weight > 0.0 {
                sum.scaled(C64::from(1.0 / weight))
            } else {
                orthogonal_to(&m2)?
            };
            coefficients.m_overlap = m1.inner(&m2);
            (m1, m2)
        }
        (false, true) => {
            let m1 = sum.scaled(C64::from(1.0 / coefficients.nu_plus.sqrt()));
            let m2 = orthogonal_to(&m1)?;
            (m1, m2)
        }
    };
    Ok(SchmidtData { coefficients, m1, m2 })
}

/// Purity at a 3 dB coupler, [1 + exp(−4|α_i|² cos²(ω_mΔt/2))]/2,
/// independent of the initial amplitude.
pub fn purity_symmetric(alpha_i: C64, f: &FieldParams, delta_t: f64) -> f64 {
    let c = (f.omega_m * delta_t / 2.0).cos();
    (1.0 + (-4.0 * alpha_i.norm_sqr() * c * c).exp()) / 2.0
}

/// Result of tracing out the port from an explicitly assembled |ψ_f⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOracle {
    /// Tr ρ² of the reduced state of the branch degree of freedom.
    pub purity: f64,
    pub probabilities: Probabilities,
}

/// Builds |ψ_f⟩ from explicit branch vectors and computes the purity of the
/// reduced density matrix ρ = Σ_port ⟨port|ψ_f⟩⟨ψ_f|port⟩ by direct matrix
/// arithmetic.
pub fn partial_trace_oracle(c: &CouplerParams, plus: &DVector<C64>, minus: &DVector<C64>) -> TraceOracle {
    let (t, r, tp, rp) = (c.t(), c.r(), c.t_prime(), c.r_prime());
    let port_a1: DVector<C64> = plus * (t * rp) + minus * (r * tp);
    let port_a2: DVector<C64> = plus * (t * tp) + minus * (r * rp);
    let rho: DMatrix<C64> = &port_a1 * port_a1.adjoint() + &port_a2 * port_a2.adjoint();
    let purity = (&rho * &rho).trace().re;
    TraceOracle {
        purity,
        probabilities: Probabilities {
            p_t: port_a2.norm_squared(),
            p_r: port_a1.norm_squared(),
        },
    }
}

/// Fock-space oracle for the perpendicular configuration: the branches are
/// u(Δt)D(α_i)|α⟩ and D(−α_i)u(Δt)|α⟩ as explicit N-vectors.
pub fn magnon_trace_oracle(c: &CouplerParams, alpha: C64, alpha_i: C64, f: &FieldParams, delta_t: f64, dim: usize) -> Result<TraceOracle> {
    let (plus, minus) = bosonic::evolve_branches(alpha, alpha_i, f, delta_t, dim)?;
    Ok(partial_trace_oracle(c, plus.amplitudes(), minus.amplitudes()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Configuration {
    /// q̂ ∥ H_dc: Faraday rotation of the polarization, magnon change ignored.
    Parallel,
    /// q̂ ⊥ H_dc: inverse-Faraday kicks of the magnon, polarization change ignored.
    Perpendicular,
}

impl std::str::FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "parallel" => Ok(Configuration::Parallel),
            "perpendicular" => Ok(Configuration::Perpendicular),
            other => Err(Error::invalid("configuration", format!("expected `parallel` or `perpendicular`, got `{other}`"))),
        }
    }
}

impl std::fmt::Display for Configuration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Configuration::Parallel => "parallel",
            Configuration::Perpendicular => "perpendicular",
        })
    }
}

/// Polarization input and sphere geometry at the two hits, used by the
/// parallel configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParallelGeometry {
    pub input_sop: SopVector,
    pub first: Orientation,
    pub second: Orientation,
}

impl Default for ParallelGeometry {
    /// |L⟩ input, light along the field, magnetization saturated along ẑ at both hits.
    fn default() -> Self {
        let aligned = Orientation {
            theta: 0.0,
            phi: 0.0,
            theta_m: 0.0,
            phi_m: 0.0,
        };
        Self {
            input_sop: crate::jones::standard_sop(SopLabel::L),
            first: aligned,
            second: aligned,
        }
    }
}

/// Complete input for one evaluation of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub configuration: Configuration,
    pub params: PhysicalParams,
    pub coupler: CouplerParams,
    /// Initial coherent amplitude of the magnon.
    pub alpha: C64,
    /// Overrides |α_i| = θ_IFE/θ_m0 when set.
    pub alpha_i_magnitude: Option<f64>,
    pub alpha_i_phase: f64,
    pub geometry: ParallelGeometry,
    pub collapse: CollapseModel,
    /// Run the explicit partial-trace oracle as well.
    pub oracle: bool,
    pub fock_dim: Option<usize>,
}

impl Scenario {
    pub fn new(configuration: Configuration) -> Self {
        Self {
            configuration,
            params: PhysicalParams::default(),
            coupler: CouplerParams::three_db(),
            alpha: C64::new(0.0, 0.0),
            alpha_i_magnitude: None,
            alpha_i_phase: 0.0,
            geometry: ParallelGeometry::default(),
            collapse: CollapseModel::unitary(),
            oracle: false,
            fock_dim: None,
        }
    }

    pub fn alpha_i(&self) -> C64 {
        let mag = self.alpha_i_magnitude.unwrap_or_else(|| self.params.alpha_i_magnitude());
        C64::from_polar(mag, self.alpha_i_phase)
    }

    /// Truncation used by the Fock oracle.
    pub fn fock_dimension(&self) -> usize {
        self.fock_dim
            .unwrap_or_else(|| bosonic::default_dimension(self.alpha.norm() + self.alpha_i().norm()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub overlaps: BranchOverlaps,
    pub unitary: Probabilities,
    pub collapsed: Probabilities,
    pub schmidt: SchmidtCoefficients,
    pub purity_closed_form: f64,
    pub purity_oracle: Option<f64>,
    /// Purity between the hits, with only the clockwise sub-pulse having interacted.
    pub intermediate_purity: f64,
    /// Fock-space Schmidt vectors (perpendicular configuration with oracle).
    pub schmidt_vectors: Option<SchmidtData>,
    pub alpha_i: C64,
    pub branches: Option<BranchAmplitudes>,
    pub fiber_length: f64,
    pub theta_mz: f64,
    pub theta_ife: f64,
    pub pulse_shortness: f64,
}

/// Evaluates one scenario.
///
/// Parallel: χ_M = 1, χ_P = ⟨p_i|J_S(t₁)†J_S(t₂)|p_i⟩. Perpendicular: χ_P = 1,
/// χ_M = ⟨α₊|α₋⟩. The intermediate overlap compares the clockwise branch after
/// its hit with the untouched counter-clockwise branch; for the magnon this is
/// ⟨(α+α_i)e^{−iω_mτ}|αe^{−iω_mτ}⟩, which does not depend on τ.
pub fn run_configuration(s: &Scenario) -> Result<ScenarioResult> {
    s.params.validate()?;
    let p = &s.params;
    let alpha_i = s.alpha_i();
    let (chi_p_val, chi_m_val, intermediate_mu, branches, oracle, vectors) = match s.configuration {
        Configuration::Parallel => {
            let g = &s.geometry;
            let j1 = sphere_jones(&birefringence(&g.first, &p.material), &p.sphere, &p.material);
            let j2 = sphere_jones(&birefringence(&g.second, &p.material), &p.sphere, &p.material);
            let chi = chi_p(&g.input_sop, &j1, &j2);
            let mid = sop_overlap(&j1.apply(&g.input_sop), &g.input_sop);
            let oracle = s.oracle.then(|| {
                let (plus, minus) = polarization_branches(&g.input_sop, &j1, &j2);
                let to_dyn = |v: Vector2<C64>| DVector::from_iterator(2, v.iter().copied());
                partial_trace_oracle(&s.coupler, &to_dyn(plus), &to_dyn(minus))
            });
            (chi, C64::new(1.0, 0.0), mid, None, oracle, None)
        }
        Configuration::Perpendicular => {
            let b = bosonic::branch_amplitudes(s.alpha, alpha_i, &p.field, p.timing.delta_t());
            let mu = bosonic::overlap_analytic(b.plus, b.minus);
            let mid = bosonic::overlap_analytic(s.alpha + alpha_i, s.alpha);
            let (oracle, vectors) = if s.oracle {
                let dim = s.fock_dimension();
                let o = magnon_trace_oracle(&s.coupler, s.alpha, alpha_i, &p.field, p.timing.delta_t(), dim)?;
                (Some(o), Some(schmidt_decompose(&s.coupler, b.plus, b.minus, dim)?))
            } else {
                (None, None)
            };
            (C64::new(1.0, 0.0), mu, mid, Some(b), oracle, vectors)
        }
    };
    let overlaps = BranchOverlaps::new(chi_p_val, chi_m_val);
    let schmidt = schmidt_coefficients(&s.coupler, overlaps.product());
    Ok(ScenarioResult {
        overlaps,
        unitary: transmission_reflection(&s.coupler, overlaps.eta),
        collapsed: collapsed_transmission(&s.coupler, chi_p_val, chi_m_val, &s.collapse),
        purity_closed_form: schmidt.purity,
        schmidt,
        purity_oracle: oracle.map(|o| o.purity),
        intermediate_purity: schmidt_coefficients(&s.coupler, intermediate_mu).purity,
        schmidt_vectors: vectors,
        alpha_i,
        branches,
        fiber_length: p.fiber_length(),
        theta_mz: p.theta_mz(),
        theta_ife: p.theta_ife(),
        pulse_shortness: p.pulse_shortness(),
    })
}

/// Evaluates independent scenarios; results keep the input order.
pub fn run_batch(scenarios: &[Scenario], execution: Execution) -> Vec<Result<ScenarioResult>> {
    exec::map_slice(execution, scenarios, run_configuration)
}

/// Polarization branch states |p±⟩ = σ_z J_S(t_k)|p_i⟩ for explicit Jones matrices.
pub fn polarization_branches(p_i: &SopVector, j1: &JonesMatrix, j2: &JonesMatrix) -> (Vector2<C64>, Vector2<C64>) {
    let sz = JonesMatrix::sigma_z();
    (*(sz * *j1).apply(p_i).as_vector(), *(sz * *j2).apply(p_i).as_vector())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_coupler(rng: &mut ChaCha8Rng) -> CouplerParams {
        CouplerParams::from_transmission(rng.random_range(0.05..1.0)).unwrap()
    }

    #[test]
    fn coupler_invariants() {
        let cp = CouplerParams::from_transmission(0.6).unwrap();
        assert_relative_eq!(cp.t().norm_sqr() + cp.r().norm_sqr(), 1.0, epsilon = 1e-12);
        assert!((cp.r().conj() * cp.t()).re.abs() < 1e-15);
        assert_relative_eq!(cp.upsilon(), 0.64 / 0.36, epsilon = 1e-12);
        assert!(matches!(
            CouplerParams::new(0.8, 0.8),
            Err(Error::InvalidParameter { ref field, .. }) if field == "coupler"
        ));
        assert!(CouplerParams::new(0.0, 1.0).is_err());
    }

    #[test]
    fn scattering_matrix_properties() {
        let s = scattering_matrix(&CouplerParams::three_db());
        assert!(s.unitarity_defect() < 1e-12 && s.symmetry_defect() < 1e-12);
        // pure transmission: a1 → b1, a2 → b2 and back
        let pure = scattering_matrix(&CouplerParams::new(1.0, 0.0).unwrap());
        for (i, j) in [(0, 2), (1, 3), (2, 0), (3, 1)] {
            assert_relative_eq!(pure.0[(i, j)].norm(), 1.0, epsilon = 1e-15);
        }
        assert_relative_eq!(pure.0.iter().map(|z| z.norm_sqr()).sum::<f64>(), 4.0, epsilon = 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let cp = random_coupler(&mut rng).with_global_phase(rng.random_range(0.0..2.0 * PI));
            let s = scattering_matrix(&cp);
            assert!(s.unitarity_defect() < 1e-12 && s.symmetry_defect() < 1e-12);
            let e_out = s.0 * Matrix4::identity().column(0);
            assert_relative_eq!(e_out[2].norm_sqr() + e_out[3].norm_sqr(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn eta_endpoints() {
        assert_eq!(eta(c(1.0, 0.0), c(1.0, 0.0)), 0.0);
        assert_eq!(eta(c(0.0, 0.0), c(1.0, 0.0)), 0.5);
        assert_eq!(eta(c(-1.0, 0.0), c(1.0, 0.0)), 1.0);
    }

    #[test]
    fn transmission_examples() {
        let db3 = CouplerParams::three_db();
        for e in [0.0, 0.2, 0.5, 1.0] {
            let p = transmission_reflection(&db3, e);
            assert_relative_eq!(p.p_t, e, epsilon = 1e-15);
            assert_relative_eq!(p.p_r, 1.0 - e, epsilon = 1e-15);
        }
        assert!(transmission_reflection(&db3, 0.0).p_t.abs() < 1e-15);
        let pure = CouplerParams::new(1.0, 0.0).unwrap();
        for e in [0.0, 0.3, 1.0] {
            assert_eq!(transmission_reflection(&pure, e), Probabilities { p_t: 1.0, p_r: 0.0 });
        }
    }

    #[test]
    fn final_state_matches_gram_evaluation() {
        let db3 = CouplerParams::three_db();
        let f = final_state_symbolic(&db3, c(1.0, 0.0), c(1.0, 0.0));
        assert!(f.probabilities.p_t.abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..100 {
            let cp = random_coupler(&mut rng);
            let chi_p = C64::from_polar(rng.random_range(0.0..1.0), rng.random_range(0.0..2.0 * PI));
            let chi_m = C64::from_polar(rng.random_range(0.0..1.0), rng.random_range(0.0..2.0 * PI));
            let fs = final_state_symbolic(&cp, chi_p, chi_m);
            let a = fs.amplitudes;
            assert_relative_eq!(a.iter().map(|z| z.norm_sqr()).sum::<f64>(), 1.0, epsilon = 1e-12);
            // ⟨ψ_f|Π_a2|ψ_f⟩ with Gram entries ⟨+|+⟩ = ⟨−|−⟩ = 1, ⟨+|−⟩ = χ_Pχ_M
            let g = chi_p * chi_m;
            let p_t = a[2].norm_sqr() + a[3].norm_sqr() + 2.0 * (a[2].conj() * a[3] * g).re;
            let p_r = a[0].norm_sqr() + a[1].norm_sqr() + 2.0 * (a[0].conj() * a[1] * g).re;
            assert!((p_t - fs.probabilities.p_t).abs() < 1e-12);
            assert!((p_r - fs.probabilities.p_r).abs() < 1e-12);
            assert_eq!(fs.probabilities, transmission_reflection(&cp, eta(chi_p, chi_m)));
        }
    }

    #[test]
    fn collapse_model() {
        let db3 = CouplerParams::three_db();
        let one = c(1.0, 0.0);
        assert_eq!(collapsed_transmission(&db3, one, one, &CollapseModel::full_collapse()).p_t, 0.5);
        assert_relative_eq!(collapsed_transmission(&db3, one, one, &CollapseModel::new(0.5).unwrap()).p_t, 0.25, epsilon = 1e-15);
        assert_eq!(eta_with_retention(one, one, 0.5), 0.25);
        assert!(CollapseModel::new(1.5).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let cp = random_coupler(&mut rng);
            let chi = C64::from_polar(rng.random_range(0.0..1.0), rng.random_range(0.0..2.0 * PI));
            let unitary = transmission_reflection(&cp, eta(chi, one));
            let d1 = collapsed_transmission(&cp, chi, one, &CollapseModel::unitary());
            assert_eq!(unitary.p_t.to_bits(), d1.p_t.to_bits());
            assert_eq!(unitary.p_r.to_bits(), d1.p_r.to_bits());
        }
    }

    #[test]
    fn schmidt_product_state() {
        let a = c(0.4, -0.3);
        let sd = schmidt_decompose(&CouplerParams::from_transmission(0.8).unwrap(), a, a, 64).unwrap();
        assert_relative_eq!(sd.coefficients.mu.re, 1.0, epsilon = 1e-15);
        assert!(sd.m1.fidelity(&bosonic::coherent_state(a, 64).unwrap()) > 1.0 - 1e-12);
        assert_relative_eq!(sd.purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn schmidt_three_db_closed_form() {
        let db3 = CouplerParams::three_db();
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..50 {
            let ap = C64::from_polar(rng.random_range(0.0..2.0), rng.random_range(0.0..2.0 * PI));
            let am = C64::from_polar(rng.random_range(0.0..2.0), rng.random_range(0.0..2.0 * PI));
            let sd = schmidt_decompose(&db3, ap, am, 64).unwrap();
            let expected = (1.0 + (-(ap - am).norm_sqr()).exp()) / 2.0;
            assert_relative_eq!(sd.purity(), expected, epsilon = 1e-12);
        }
        // |α₊ − α₋| = 2
        let sd = schmidt_decompose(&db3, c(1.0, 0.0), c(-1.0, 0.0), 64).unwrap();
        assert_relative_eq!(sd.purity(), (1.0 + (-4.0_f64).exp()) / 2.0, epsilon = 1e-12);
        let plus = bosonic::coherent_state(c(1.0, 0.0), 64).unwrap();
        let minus = bosonic::coherent_state(c(-1.0, 0.0), 64).unwrap();
        let o = partial_trace_oracle(&db3, plus.amplitudes(), minus.amplitudes());
        assert_relative_eq!(o.purity, 0.509_157_819_444_367_1, epsilon = 1e-8);
    }

    #[test]
    fn schmidt_vectors_normalized_and_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..30 {
            let cp = CouplerParams::from_transmission(rng.random_range(0.45..0.9)).unwrap();
            let ap = C64::from_polar(rng.random_range(0.0..2.0), rng.random_range(0.0..2.0 * PI));
            let am = C64::from_polar(rng.random_range(0.0..2.0), rng.random_range(0.0..2.0 * PI));
            let sd = schmidt_decompose(&cp, ap, am, 64).unwrap();
            let k = &sd.coefficients;
            assert_relative_eq!(k.v1.norm_sqr() + k.v2.norm_sqr(), 1.0, epsilon = 1e-10);
            assert!((sd.m1.norm() - 1.0).abs() < 1e-10 && (sd.m2.norm() - 1.0).abs() < 1e-10);
            assert!((sd.m1.inner(&sd.m2) - k.m_overlap).norm() < 1e-10);
            assert!(k.purity >= 0.5 - 1e-10 && k.purity <= 1.0 + 1e-10);
            assert_relative_eq!(k.schmidt_purity(), k.purity, epsilon = 1e-12);
        }
    }

    #[test]
    fn degenerate_nu_plus() {
        let k = schmidt_coefficients(&CouplerParams::three_db(), c(-1.0, 0.0));
        assert_eq!(k.v1, c(0.0, 0.0));
        assert_relative_eq!(k.v2.norm_sqr(), 1.0, epsilon = 1e-15);
        assert_eq!(k.purity, 1.0);
    }

    #[test]
    fn symmetric_purity_cases() {
        let f = FieldParams::default();
        assert_eq!(purity_symmetric(c(0.0, 0.0), &f, 1e-10), 1.0);
        let half = f.period() / 2.0;
        for mag in [0.5, 1.0, 3.0, 10.0] {
            assert_relative_eq!(purity_symmetric(c(mag, 0.0), &f, half), 1.0, epsilon = 1e-12);
        }
        assert_relative_eq!(purity_symmetric(c(0.0, 1.0), &f, 0.0), (1.0 + (-4.0_f64).exp()) / 2.0, epsilon = 1e-15);
        let o = magnon_trace_oracle(&CouplerParams::three_db(), c(0.3, 0.2), c(0.0, 1.0), &f, 0.0, 64).unwrap();
        assert_relative_eq!(o.purity, (1.0 + (-4.0_f64).exp()) / 2.0, epsilon = 1e-8);
    }

    #[test]
    fn run_perpendicular_cases() {
        let mut s = Scenario::new(Configuration::Perpendicular);
        s.alpha_i_magnitude = Some(0.0);
        let r = run_configuration(&s).unwrap();
        assert!(r.unitary.p_t.abs() < 1e-15);

        let mut s = Scenario::new(Configuration::Perpendicular);
        s.params.timing.t2 = s.params.field.period() / 2.0;
        s.alpha = c(0.7, -0.4);
        s.alpha_i_magnitude = Some(1.5);
        s.oracle = true;
        let r = run_configuration(&s).unwrap();
        assert!(r.unitary.p_t.abs() < 1e-10);
        assert!((r.purity_closed_form - 1.0).abs() < 1e-10);
        assert!((r.purity_oracle.unwrap() - 1.0).abs() < 1e-8);

        let mut s = Scenario::new(Configuration::Perpendicular);
        s.params.timing.t2 = 0.0;
        s.alpha_i_magnitude = Some(3.0);
        s.oracle = true;
        s.collapse = CollapseModel::full_collapse();
        let r = run_configuration(&s).unwrap();
        let b = r.branches.unwrap();
        let mu = bosonic::overlap_analytic(b.plus, b.minus);
        assert_relative_eq!(r.unitary.p_t, (1.0 - mu.re) / 2.0, epsilon = 1e-15);
        assert_eq!(r.collapsed.p_t, 0.5);
        assert!((r.intermediate_purity - 0.5).abs() < 1e-3);
        assert!((r.purity_oracle.unwrap() - r.purity_closed_form).abs() < 1e-8);
    }

    #[test]
    fn run_parallel_recycling() {
        let mut s = Scenario::new(Configuration::Parallel);
        s.oracle = true;
        let r = run_configuration(&s).unwrap();
        assert_eq!(r.overlaps.chi_m, c(1.0, 0.0));
        assert!((r.overlaps.chi_p - c(1.0, 0.0)).norm() < 1e-15);
        assert!(r.unitary.p_t.abs() < 1e-15);
        // |L⟩ is a Faraday eigenstate: only a phase between the branches
        assert!((r.intermediate_purity - 1.0).abs() < 1e-12);
        assert!((r.purity_oracle.unwrap() - r.purity_closed_form).abs() < 1e-12);
        s.geometry.input_sop = crate::jones::standard_sop(SopLabel::H);
        let r = run_configuration(&s).unwrap();
        assert!(r.intermediate_purity < 1.0 - 1e-6);
        assert!(r.unitary.p_t.abs() < 1e-15);
    }

    #[test]
    fn phase_invariance_of_observables() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for _ in 0..20 {
            let mut s = Scenario::new(Configuration::Perpendicular);
            s.coupler = random_coupler(&mut rng);
            s.alpha = C64::from_polar(rng.random_range(0.0..1.5), rng.random_range(0.0..2.0 * PI));
            s.alpha_i_magnitude = Some(rng.random_range(0.0..1.5));
            s.params.timing.t2 = rng.random_range(0.0..1e-9);
            s.oracle = true;
            let a = run_configuration(&s).unwrap();
            s.coupler = s.coupler.with_global_phase(rng.random_range(0.0..2.0 * PI));
            let b = run_configuration(&s).unwrap();
            assert!((a.unitary.p_t - b.unitary.p_t).abs() < 1e-12);
            assert!((a.purity_closed_form - b.purity_closed_form).abs() < 1e-12);
            assert!((a.purity_oracle.unwrap() - b.purity_oracle.unwrap()).abs() < 1e-12);
        }
    }
}
