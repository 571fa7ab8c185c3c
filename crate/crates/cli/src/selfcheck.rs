//! Named invariant and regression checks run by `folm check`.
//!
//! Random checks draw from a ChaCha stream seeded by [`CheckContext::seed`],
//! so a given seed always exercises the same inputs.

use std::f64::consts::PI;
use std::io::Write;

use folm::bosonic::{self, branch_amplitudes, overlap_analytic};
use folm::interferometer::{
    eta, eta_with_retention, magnon_trace_oracle, purity_from_overlap, purity_symmetric, run_configuration, scattering_matrix,
    transmission_reflection, CollapseModel, Configuration, CouplerParams, Scenario,
};
use folm::jones::{mirror_axis, poincare_map, rotation, standard_sop, PoincareVector, SopLabel, SopVector};
use folm::magnetooptics::{birefringence, chi_p_deficit, sphere_jones, transformed_dielectric, transverse_reduction, Orientation};
use folm::params::{PhysicalParams, SphereParams};
use folm::{Execution, C64};
use nalgebra::{Rotation3, Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::CliError;

pub const DEFAULT_SEED: u64 = 0x5eed;

/// Multiplies one default parameter, to confirm that checks can fail.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub parameter: String,
    pub factor: f64,
}

pub const PERTURBABLE: &[&str] = &["q_s", "n_0", "lambda_0", "r_s", "m_s", "omega_m", "gamma_e", "n_f"];

impl std::str::FromStr for Perturbation {
    type Err = CliError;

    /// `name=factor`, e.g. `n_f=1.1`.
    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = |reason: String| CliError::Validation {
            field: "perturb".into(),
            reason,
        };
        let (name, factor) = s.split_once('=').ok_or_else(|| bad(format!("expected name=factor, got `{s}`")))?;
        let name = name.trim();
        if !PERTURBABLE.contains(&name) {
            return Err(bad(format!("unknown parameter `{name}`; one of {}", PERTURBABLE.join(", "))));
        }
        let factor: f64 = factor.trim().parse().map_err(|_| bad(format!("bad factor `{factor}`")))?;
        if !(factor.is_finite() && factor > 0.0) {
            return Err(bad(format!("factor must be finite and > 0, got {factor}")));
        }
        Ok(Self {
            parameter: name.to_string(),
            factor,
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct CheckContext {
    pub seed: u64,
    pub perturbation: Option<Perturbation>,
}

impl CheckContext {
    pub fn new(seed: u64) -> Self {
        Self { seed, perturbation: None }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    /// Defaults, adjusted by `setup`, then perturbed.
    fn params_with(&self, setup: impl FnOnce(&mut PhysicalParams)) -> PhysicalParams {
        let mut p = PhysicalParams::default();
        setup(&mut p);
        if let Some(pert) = &self.perturbation {
            let f = pert.factor;
            match pert.parameter.as_str() {
                "q_s" => p.material.q_s *= f,
                "n_0" => p.material.n_0 *= f,
                "lambda_0" => p.material.lambda_0 *= f,
                "r_s" => p.sphere.r_s *= f,
                "m_s" => p.sphere.m_s *= f,
                "omega_m" => p.field.omega_m *= f,
                "gamma_e" => p.field.gamma_e *= f,
                "n_f" => p.timing.n_f *= f,
                _ => {}
            }
        }
        p
    }

    fn params(&self) -> PhysicalParams {
        self.params_with(|_| {})
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub expected: String,
    pub actual: String,
}

fn outcome(name: &'static str, passed: bool, expected: impl Into<String>, actual: impl Into<String>) -> CheckOutcome {
    CheckOutcome {
        name,
        passed,
        expected: expected.into(),
        actual: actual.into(),
    }
}

/// Worst value of `f` over `n` draws, with a bound check.
fn worst_of(n: usize, mut f: impl FnMut() -> f64) -> f64 {
    (0..n).map(|_| f()).fold(0.0, f64::max)
}

fn bounded(name: &'static str, worst: f64, bound: f64) -> CheckOutcome {
    outcome(name, worst < bound, format!("< {bound:e}"), format!("{worst:e}"))
}

/// |actual − printed| within `slack` units of the second significant digit.
pub fn matches_printed(actual: f64, printed: f64, slack: f64) -> bool {
    let unit = 10f64.powf(printed.abs().log10().floor() - 1.0);
    (actual - printed).abs() <= slack * unit
}

fn regression(name: &'static str, actual: f64, printed: f64, slack: f64, unit: &str, scale: f64) -> CheckOutcome {
    outcome(
        name,
        matches_printed(actual, printed, slack),
        format!("{} {unit}", printed * scale),
        format!("{:.4} {unit}", actual * scale),
    )
}

fn random_orientation(rng: &mut ChaCha8Rng, max_tilt: f64) -> Orientation {
    let tilt = if max_tilt > 0.0 { rng.random_range(0.0..max_tilt) } else { 0.0 };
    Orientation::new(rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI), tilt, rng.random_range(0.0..2.0 * PI)).unwrap()
}

fn random_complex(rng: &mut ChaCha8Rng, max: f64) -> C64 {
    C64::from_polar(rng.random_range(0.0..max), rng.random_range(0.0..2.0 * PI))
}

fn random_sop(rng: &mut ChaCha8Rng) -> SopVector {
    let a: f64 = rng.random_range(0.0..PI);
    SopVector::new(C64::from((a / 2.0).cos()), C64::from_polar((a / 2.0).sin(), rng.random_range(0.0..2.0 * PI))).unwrap()
}

fn coupler_unitarity(ctx: &CheckContext) -> CheckOutcome {
    let mut rng = ctx.rng(1);
    let worst = worst_of(100, || {
        let c = CouplerParams::from_transmission(rng.random_range(0.01..1.0)).unwrap().with_global_phase(rng.random_range(0.0..2.0 * PI));
        let s = scattering_matrix(&c);
        s.unitarity_defect().max(s.symmetry_defect())
    });
    bounded("coupler S is unitary and symmetric", worst, 1e-12)
}

fn sphere_unitarity(ctx: &CheckContext) -> CheckOutcome {
    let mut rng = ctx.rng(2);
    let m = ctx.params().material;
    let worst = worst_of(100, || {
        let s = SphereParams::new_convenient(rng.random_range(20.0..2000.0), 140e3).unwrap();
        sphere_jones(&birefringence(&random_orientation(&mut rng, 0.3), &m), &s, &m).unitarity_defect()
    });
    bounded("sphere Jones matrix is unitary", worst, 1e-12)
}

fn probability_sum(ctx: &CheckContext) -> CheckOutcome {
    let mut rng = ctx.rng(3);
    let worst = worst_of(1000, || {
        let c = CouplerParams::from_transmission(rng.random_range(0.01..1.0)).unwrap();
        let (cp, cm) = (random_complex(&mut rng, 1.0), random_complex(&mut rng, 1.0));
        let d = rng.random_range(0.0..=1.0);
        let a = transmission_reflection(&c, eta(cp, cm)).total();
        let b = transmission_reflection(&c, eta_with_retention(cp, cm, d)).total();
        (a - 1.0).abs().max((b - 1.0).abs())
    });
    bounded("p_T + p_R = 1", worst, 1e-12)
}

fn poincare_table(_: &CheckContext) -> CheckOutcome {
    let table = [
        (SopLabel::V, [0.0, 0.0, 1.0]),
        (SopLabel::H, [0.0, 0.0, -1.0]),
        (SopLabel::D, [1.0, 0.0, 0.0]),
        (SopLabel::A, [-1.0, 0.0, 0.0]),
        (SopLabel::R, [0.0, -1.0, 0.0]),
        (SopLabel::L, [0.0, 1.0, 0.0]),
    ];
    let worst = table
        .iter()
        .map(|(l, p)| (poincare_map(&standard_sop(*l)).0 - Vector3::from(*p)).norm())
        .fold(0.0, f64::max);
    bounded("Poincaré map of the six standard states", worst, 1e-15)
}

fn jones_rotation(ctx: &CheckContext) -> CheckOutcome {
    let mut rng = ctx.rng(5);
    let worst = worst_of(100, || {
        let axis = PoincareVector(Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)).normalize());
        let phi = rng.random_range(-2.0 * PI..2.0 * PI);
        let s = random_sop(&mut rng);
        let image = poincare_map(&rotation(&axis, phi).unwrap().apply(&s)).0;
        let expected = Rotation3::from_axis_angle(&Unit::new_normalize(mirror_axis(&axis).0), -phi) * poincare_map(&s).0;
        (image - expected).norm()
    });
    bounded("B(u, phi) rotates the Poincaré sphere", worst, 1e-12)
}

fn dark_port(ctx: &CheckContext) -> CheckOutcome {
    let mut s = Scenario::new(Configuration::Parallel);
    s.params = ctx.params();
    s.alpha_i_magnitude = Some(0.0);
    let p_par = run_configuration(&s).map(|r| r.unitary.p_t);
    s.configuration = Configuration::Perpendicular;
    let p_perp = run_configuration(&s).map(|r| r.unitary.p_t);
    match (p_par, p_perp) {
        (Ok(a), Ok(b)) => bounded("dark port at 3 dB without coupling", a.abs().max(b.abs()), 1e-12),
        (Err(e), _) | (_, Err(e)) => outcome("dark port at 3 dB without coupling", false, "p_T = 0", e.to_string()),
    }
}

fn collapse_endpoints(ctx: &CheckContext) -> CheckOutcome {
    let mut rng = ctx.rng(7);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mut s = Scenario::new(Configuration::Perpendicular);
        s.params = ctx.params();
        s.alpha = random_complex(&mut rng, 2.0);
        s.alpha_i_magnitude = Some(rng.random_range(0.0..2.0));
        s.params.timing.t2 = rng.random_range(0.0..1e-9);
        s.collapse = CollapseModel::full_collapse();
        let full = run_configuration(&s).unwrap();
        s.collapse = CollapseModel::unitary();
        let unitary = run_configuration(&s).unwrap();
        worst = worst.max((full.collapsed.p_t - 0.5).abs());
        if unitary.collapsed.p_t.to_bits() != unitary.unitary.p_t.to_bits() {
            worst = f64::INFINITY;
        }
    }
    bounded("collapse endpoints d = 0 and d = 1", worst, 1e-15)
}

fn recycling_undo(ctx: &CheckContext) -> CheckOutcome {
    let mut rng = ctx.rng(8);
    let mut worst: f64 = 0.0;
    for k in 0..40 {
        let mut s = Scenario::new(Configuration::Perpendicular);
        s.params = ctx.params();
        s.params.timing.t2 = s.params.field.period() * (k % 4) as f64 + s.params.field.period() / 2.0;
        s.alpha = random_complex(&mut rng, 2.0);
        s.alpha_i_magnitude = Some(rng.random_range(0.0..2.0));
        let r = run_configuration(&s).unwrap();
        worst = worst.max((r.purity_closed_form - 1.0).abs()).max(r.unitary.p_t.abs());
    }
    bounded("recycling at cos(w_m dt / 2) = 0 undoes the kick", worst, 1e-10)
}

fn alpha_independence(ctx: &CheckContext) -> CheckOutcome {
    let mut s = Scenario::new(Configuration::Perpendicular);
    s.params = ctx.params();
    s.alpha_i_magnitude = Some(0.9);
    s.params.timing.t2 = 0.07e-9;
    let values: Vec<f64> = (0..20)
        .map(|k| {
            s.alpha = C64::from_polar(0.2 * k as f64, 1.1 * k as f64);
            run_configuration(&s).unwrap().purity_closed_form
        })
        .collect();
    let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - values.iter().cloned().fold(f64::INFINITY, f64::min);
    bounded("purity does not depend on the initial amplitude", spread, 1e-9)
}

fn purity_oracle(ctx: &CheckContext) -> CheckOutcome {
    let mut rng = ctx.rng(10);
    let f = ctx.params().field;
    let worst = worst_of(12, || {
        let c = CouplerParams::from_transmission(rng.random_range(0.3..1.0)).unwrap();
        let (a, ai) = (random_complex(&mut rng, 2.0), random_complex(&mut rng, 2.0));
        let dt = rng.random_range(0.0..f.period());
        let b = branch_amplitudes(a, ai, &f, dt);
        let closed = purity_from_overlap(&c, overlap_analytic(b.plus, b.minus));
        let oracle = magnon_trace_oracle(&c, a, ai, &f, dt, 64).map(|o| o.purity).unwrap_or(f64::NAN);
        let d = (closed - oracle).abs();
        if d.is_nan() { f64::INFINITY } else { d }
    });
    bounded("closed-form purity matches Fock partial trace", worst, 1e-8)
}

fn symmetric_purity(ctx: &CheckContext) -> CheckOutcome {
    let mut rng = ctx.rng(11);
    let f = ctx.params().field;
    let c = CouplerParams::three_db();
    let worst = worst_of(50, || {
        let (a, ai) = (random_complex(&mut rng, 2.0), random_complex(&mut rng, 2.0));
        let dt = rng.random_range(0.0..f.period());
        let b = branch_amplitudes(a, ai, &f, dt);
        (purity_from_overlap(&c, overlap_analytic(b.plus, b.minus)) - purity_symmetric(ai, &f, dt)).abs()
    });
    bounded("3 dB purity equals [1 + exp(-4|a_i|^2 cos^2)]/2", worst, 1e-12)
}

fn untilted_reduction(ctx: &CheckContext) -> CheckOutcome {
    let mut rng = ctx.rng(12);
    let m = ctx.params().material;
    let worst = worst_of(50, || {
        let o = random_orientation(&mut rng, 0.0);
        let exact = transverse_reduction(&transformed_dielectric(&o, &m, m.n_0));
        let closed = birefringence(&o, &m).transverse_matrix();
        (exact - closed).iter().map(|z| z.norm()).fold(0.0, f64::max)
    });
    bounded("closed-form M_T matches exact reduction at theta_m = 0", worst, m.q_s.powi(3))
}

fn circular_first_order(ctx: &CheckContext) -> CheckOutcome {
    let mut rng = ctx.rng(13);
    let m = ctx.params().material;
    let worst = worst_of(200, || {
        let o = random_orientation(&mut rng, 0.1);
        let first = o.theta.cos() + o.theta_m * (o.phi - o.phi_m).cos() * o.theta.sin();
        let err = (birefringence(&o, &m).k_cb.norm() - m.q_s * first.abs()).abs();
        err / (10.0 * o.theta_m.powi(2) * m.q_s).max(f64::MIN_POSITIVE)
    });
    bounded("|k_CB| follows the first-order tilt formula", worst, 1.0)
}

fn single_magnon_chi_p(ctx: &CheckContext) -> CheckOutcome {
    let p = ctx.params();
    let b = birefringence(&Orientation::new(0.0, 0.0, 0.0, 0.0).unwrap(), &p.material);
    let j1 = sphere_jones(&b, &p.sphere, &p.material);
    let axis = PoincareVector(b.k_b().normalize());
    let phi1 = p.length_ratio() * b.k_b().norm() / p.material.q_s;
    let j2 = rotation(&axis, phi1 + p.length_ratio() * p.theta_m0()).unwrap();
    let deficit = chi_p_deficit(&standard_sop(SopLabel::H), &j1, &j2);
    bounded("1 - Re chi_P at single-magnon tilt", deficit, 1e-16)
}

fn beat_length(ctx: &CheckContext) -> CheckOutcome {
    regression("l_P = 7.0 mm", ctx.params().beat_length(), 7.0e-3, 1.0, "mm", 1e3)
}

fn fiber_length(ctx: &CheckContext) -> CheckOutcome {
    regression("L_F = 68 mm", ctx.params().fiber_length(), 68e-3, 0.5, "mm", 1e3)
}

fn theta_mz_125(ctx: &CheckContext) -> CheckOutcome {
    let p = ctx.params_with(|p| p.sphere.r_s = 125e-6);
    regression("theta_mz = 3.2e-17 at R_s = 125 um", p.theta_mz(), 3.2e-17, 0.5, "x 1e-17", 1e17)
}

fn theta_ife_ratio(ctx: &CheckContext) -> CheckOutcome {
    let p = ctx.params();
    regression("theta_IFE = 0.18 theta_mz", p.theta_ife() / p.theta_mz(), 0.18, 0.5, "", 1.0)
}

fn theta_m0_scale(ctx: &CheckContext) -> CheckOutcome {
    let t = ctx.params().theta_m0();
    outcome("theta_m0 within 10x of 1e-9", (1e-10..=1e-8).contains(&t), "1e-10 ..= 1e-8", format!("{t:e}"))
}

fn branch_operators(ctx: &CheckContext) -> CheckOutcome {
    let mut rng = ctx.rng(20);
    let f = ctx.params().field;
    let worst = worst_of(4, || {
        let (a, ai) = (random_complex(&mut rng, 1.5), random_complex(&mut rng, 1.5));
        let dt = rng.random_range(0.0..f.period());
        let b = branch_amplitudes(a, ai, &f, dt);
        match bosonic::evolve_branches(a, ai, &f, dt, 64) {
            Ok((plus, minus)) => {
                let ep = bosonic::coherent_state(b.plus, 64).unwrap();
                let em = bosonic::coherent_state(b.minus, 64).unwrap();
                (1.0 - plus.fidelity(&ep)).abs().max((1.0 - minus.fidelity(&em)).abs())
            }
            Err(_) => f64::INFINITY,
        }
    });
    bounded("operator-evolved branches are the predicted coherent states", worst, 1e-10)
}

type Check = fn(&CheckContext) -> CheckOutcome;

pub const CHECKS: &[Check] = &[
    coupler_unitarity,
    sphere_unitarity,
    probability_sum,
    poincare_table,
    jones_rotation,
    dark_port,
    collapse_endpoints,
    recycling_undo,
    alpha_independence,
    purity_oracle,
    symmetric_purity,
    untilted_reduction,
    circular_first_order,
    single_magnon_chi_p,
    beat_length,
    fiber_length,
    theta_mz_125,
    theta_ife_ratio,
    theta_m0_scale,
    branch_operators,
];

/// Runs every check; outcomes keep the order of [`CHECKS`].
pub fn run_checks(ctx: &CheckContext, execution: Execution) -> Vec<CheckOutcome> {
    folm::exec::map_slice(execution, CHECKS, |check| check(ctx))
}

/// Prints one line per check and returns the number of failures.
/// Expected and actual values are shown for failures, and for every check
/// when `verbose` is set.
pub fn report<W: Write>(out: &mut W, outcomes: &[CheckOutcome], verbose: bool) -> std::io::Result<usize> {
    let mut failed = 0;
    for o in outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        if o.passed && !verbose {
            writeln!(out, "{tag}  {}", o.name)?;
        } else {
            writeln!(out, "{tag}  {}  (expected {}, actual {})", o.name, o.expected, o.actual)?;
        }
        failed += usize::from(!o.passed);
    }
    writeln!(out, "{} of {} checks passed", outcomes.len() - failed, outcomes.len())?;
    Ok(failed)
}
