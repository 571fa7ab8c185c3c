//! Physical constants, parameter groups and the derived scalar quantities of
//! the setup.
//!
//! All values are SI. The `*_convenient` constructors take wavelengths in nm,
//! radii in µm and frequencies in GHz and convert at the boundary.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Reduced Planck constant (J·s), CODATA 2018.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Vacuum permeability (T·m/A), CODATA 2018.
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Electron gyromagnetic ratio used by default, 2π × 28 GHz/T.
pub const GAMMA_E_DEFAULT: f64 = 2.0 * PI * 28.0e9;

/// Above this value of ω_m·t_p the instantaneous-kick idealization is flagged.
pub const PULSE_SHORTNESS_LIMIT: f64 = 0.1;

fn require(ok: bool, field: &str, reason: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(field, reason))
    }
}

fn finite_positive(x: f64, field: &str) -> Result<()> {
    require(x.is_finite() && x > 0.0, field, format!("must be finite and > 0, got {x}"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// Magneto-optic coefficient at saturation.
    pub q_s: f64,
    /// Refractive index.
    pub n_0: f64,
    /// Free-space wavelength (m).
    pub lambda_0: f64,
    /// Absorption length (m). Reported only.
    pub l_a: f64,
}

impl MaterialParams {
    pub fn new(q_s: f64, n_0: f64, lambda_0: f64, l_a: f64) -> Result<Self> {
        finite_positive(q_s, "material.q_s")?;
        require(q_s < 0.01, "material.q_s", format!("must be << 1 (< 0.01), got {q_s}"))?;
        require(n_0.is_finite() && n_0 >= 1.0, "material.n_0", format!("must be >= 1, got {n_0}"))?;
        finite_positive(lambda_0, "material.lambda_0")?;
        finite_positive(l_a, "material.l_a")?;
        Ok(Self { q_s, n_0, lambda_0, l_a })
    }

    /// Wavelength in nm, absorption length in m.
    pub fn new_convenient(q_s: f64, n_0: f64, lambda_0_nm: f64, l_a: f64) -> Result<Self> {
        Self::new(q_s, n_0, lambda_0_nm * 1e-9, l_a)
    }

    /// YIG in the telecom band.
    pub fn yig() -> Self {
        Self {
            q_s: 1e-4,
            n_0: 2.19,
            lambda_0: 1550e-9,
            l_a: 0.5,
        }
    }

    /// Polarization beat length l_P = λ₀ / (n₀ Q_s).
    pub fn beat_length(&self) -> f64 {
        beat_length(self)
    }
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self::yig()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereParams {
    /// Radius (m).
    pub r_s: f64,
    /// Saturation magnetization (A/m).
    pub m_s: f64,
}

impl SphereParams {
    pub fn new(r_s: f64, m_s: f64) -> Result<Self> {
        finite_positive(r_s, "sphere.r_s")?;
        finite_positive(m_s, "sphere.m_s")?;
        Ok(Self { r_s, m_s })
    }

    /// Radius in µm, magnetization in A/m.
    pub fn new_convenient(r_s_um: f64, m_s: f64) -> Result<Self> {
        Self::new(r_s_um * 1e-6, m_s)
    }

    /// A YIG sphere of 100 µm radius at room temperature.
    pub fn yig() -> Self {
        Self {
            r_s: 100e-6,
            m_s: 140e3,
        }
    }

    pub fn volume(&self) -> f64 {
        4.0 * PI * self.r_s.powi(3) / 3.0
    }

    /// Effective optical travel length inside the sphere, l_e = 2 R_s.
    pub fn optical_length(&self) -> f64 {
        2.0 * self.r_s
    }
}

impl Default for SphereParams {
    fn default() -> Self {
        Self::yig()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    /// Kittel-mode angular frequency (rad/s).
    pub omega_m: f64,
    /// Gyromagnetic ratio (rad/(s·T)).
    pub gamma_e: f64,
    /// Vacuum permeability (T·m/A).
    pub mu_0: f64,
}

impl FieldParams {
    pub fn new(omega_m: f64, gamma_e: f64) -> Result<Self> {
        finite_positive(omega_m, "field.omega_m")?;
        finite_positive(gamma_e, "field.gamma_e")?;
        Ok(Self {
            omega_m,
            gamma_e,
            mu_0: MU_0,
        })
    }

    /// Kittel frequency ω_m/2π in GHz with the default gyromagnetic ratio.
    pub fn from_frequency_ghz(f_ghz: f64) -> Result<Self> {
        Self::new(2.0 * PI * f_ghz * 1e9, GAMMA_E_DEFAULT)
    }

    /// Static field H_dc = ω_m / (μ₀ γ_e) in A/m.
    pub fn h_dc(&self) -> f64 {
        self.omega_m / (self.mu_0 * self.gamma_e)
    }

    /// Kittel period 2π/ω_m (s).
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega_m
    }
}

impl Default for FieldParams {
    fn default() -> Self {
        Self {
            omega_m: 2.0 * PI * 3.0e9,
            gamma_e: GAMMA_E_DEFAULT,
            mu_0: MU_0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingParams {
    /// Time of the clockwise interaction (s).
    pub t1: f64,
    /// Time of the counter-clockwise interaction (s).
    pub t2: f64,
    /// Fiber effective refractive index.
    pub n_f: f64,
    /// Pulse duration (s).
    pub t_p: f64,
}

impl TimingParams {
    pub fn new(t1: f64, t2: f64, n_f: f64, t_p: f64) -> Result<Self> {
        require(t1.is_finite(), "timing.t1", "must be finite")?;
        require(t2.is_finite() && t2 >= t1, "timing.t2", format!("must satisfy t2 >= t1, got t1 = {t1}, t2 = {t2}"))?;
        require(n_f.is_finite() && n_f >= 1.0, "timing.n_f", format!("must be >= 1, got {n_f}"))?;
        require(t_p.is_finite() && t_p >= 0.0, "timing.t_p", format!("must be >= 0, got {t_p}"))?;
        Ok(Self { t1, t2, n_f, t_p })
    }

    pub fn delta_t(&self) -> f64 {
        self.t2 - self.t1
    }
}

impl Default for TimingParams {
    /// One Kittel period at 3 GHz between the two interactions, 100 fs pulses.
    fn default() -> Self {
        Self {
            t1: 0.0,
            t2: 1.0 / 3.0e9,
            n_f: 1.47,
            t_p: 100e-15,
        }
    }
}

/// Polarization beat length l_P = λ₀ / (n₀ Q_s).
pub fn beat_length(m: &MaterialParams) -> f64 {
    m.lambda_0 / (m.n_0 * m.q_s)
}

/// Magnetization angle scale θ_mz = 2ħγ_e / (V_s M_s).
pub fn theta_mz(s: &SphereParams, f: &FieldParams) -> f64 {
    2.0 * HBAR * f.gamma_e / (s.volume() * s.m_s)
}

/// Stoner–Wohlfarth energy E_M = −2ħω_m cos θ_m / θ_mz (anisotropy ignored).
pub fn stoner_wohlfarth_energy(theta_m: f64, f: &FieldParams, theta_mz: f64) -> f64 {
    -2.0 * HBAR * f.omega_m * theta_m.cos() / theta_mz
}

/// Tilt angle of a single magnon excitation, √θ_mz.
///
/// Small-angle solution of E_M(θ) − E_M(0) = ħω_m; exact to machine precision
/// for the θ_mz ~ 1e-17 of mesoscopic spheres.
pub fn magnon_angle_quantum(theta_mz: f64) -> f64 {
    theta_mz.sqrt()
}

/// Fiber length giving a delay of `cycles` Kittel periods: cycles · c / (n_F f_m).
pub fn fiber_length_for_delay(f: &FieldParams, n_f: f64, cycles: f64) -> f64 {
    cycles * SPEED_OF_LIGHT / n_f / (f.omega_m / (2.0 * PI))
}

/// Semiclassical inverse-Faraday field H_IFE = 2ħω_e Q_s / (μ₀ V_s M_s).
pub fn ife_field(omega_e: f64, m: &MaterialParams, s: &SphereParams, f: &FieldParams) -> f64 {
    2.0 * HBAR * omega_e * m.q_s / (f.mu_0 * s.volume() * s.m_s)
}

/// The same field written through θ_mz: ω_e Q_s θ_mz / (μ₀ γ_e).
pub fn ife_field_from_theta_mz(omega_e: f64, m: &MaterialParams, theta_mz: f64, f: &FieldParams) -> f64 {
    omega_e * m.q_s * theta_mz / (f.mu_0 * f.gamma_e)
}

/// Magnetization rotation produced by a single photon of wavelength `lambda`
/// during its transit time 2n₀R_s/c through the sphere.
pub fn theta_ife(m: &MaterialParams, s: &SphereParams, f: &FieldParams, lambda: f64) -> f64 {
    let omega_e = 2.0 * PI * SPEED_OF_LIGHT / lambda;
    let transit = 2.0 * m.n_0 * s.r_s / SPEED_OF_LIGHT;
    f.mu_0 * f.gamma_e * ife_field(omega_e, m, s, f) * transit
}

/// Closed form 4π n₀ Q_s R_s θ_mz / λ of [`theta_ife`].
pub fn theta_ife_closed_form(m: &MaterialParams, s: &SphereParams, f: &FieldParams, lambda: f64) -> f64 {
    4.0 * PI * m.n_0 * m.q_s * s.r_s * theta_mz(s, f) / lambda
}

/// Every parameter group of the setup together with the IFE enhancement
/// factor, a multiplier on the semiclassical H_IFE (1 = as derived).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub material: MaterialParams,
    pub sphere: SphereParams,
    pub field: FieldParams,
    pub timing: TimingParams,
    pub ife_enhancement: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            material: MaterialParams::default(),
            sphere: SphereParams::default(),
            field: FieldParams::default(),
            timing: TimingParams::default(),
            ife_enhancement: 1.0,
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let m = &self.material;
        MaterialParams::new(m.q_s, m.n_0, m.lambda_0, m.l_a)?;
        SphereParams::new(self.sphere.r_s, self.sphere.m_s)?;
        FieldParams::new(self.field.omega_m, self.field.gamma_e)?;
        finite_positive(self.field.mu_0, "field.mu_0")?;
        let t = &self.timing;
        TimingParams::new(t.t1, t.t2, t.n_f, t.t_p)?;
        finite_positive(self.ife_enhancement, "ife_enhancement")?;
        Ok(())
    }

    pub fn beat_length(&self) -> f64 {
        beat_length(&self.material)
    }

    /// l_e / l_P, the Faraday rotation angle per unit of |k_B|/Q_s.
    pub fn length_ratio(&self) -> f64 {
        self.sphere.optical_length() / self.beat_length()
    }

    pub fn theta_mz(&self) -> f64 {
        theta_mz(&self.sphere, &self.field)
    }

    pub fn theta_m0(&self) -> f64 {
        magnon_angle_quantum(self.theta_mz())
    }

    /// θ_IFE at the material wavelength, including the enhancement factor.
    pub fn theta_ife(&self) -> f64 {
        self.ife_enhancement * theta_ife(&self.material, &self.sphere, &self.field, self.material.lambda_0)
    }

    /// |α_i| = θ_IFE / θ_m0.
    pub fn alpha_i_magnitude(&self) -> f64 {
        self.theta_ife() / self.theta_m0()
    }

    /// Fiber length for a single Kittel period of delay.
    pub fn fiber_length(&self) -> f64 {
        fiber_length_for_delay(&self.field, self.timing.n_f, 1.0)
    }

    /// ω_m t_p; the kick idealization needs this ≪ 1.
    pub fn pulse_shortness(&self) -> f64 {
        let r = self.field.omega_m * self.timing.t_p;
        if r >= PULSE_SHORTNESS_LIMIT {
            log::warn!("omega_m * t_p = {r:.3e} is not << 1; instantaneous-kick model is questionable");
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn yig_125() -> SphereParams {
        SphereParams::new_convenient(125.0, 140e3).unwrap()
    }

    #[test]
    fn beat_length_values() {
        let m = MaterialParams::yig();
        // 1550 nm / (2.19 · 1e-4), printed as ≃ 7.0 mm
        assert_relative_eq!(beat_length(&m), 7.077_625_570_776_255e-3, max_relative = 1e-12);
        let unit = MaterialParams { q_s: 1.0, n_0: 1.0, lambda_0: 1550e-9, l_a: 1.0 };
        assert_relative_eq!(beat_length(&unit), 1550e-9, max_relative = 1e-15);
        let doubled = MaterialParams { q_s: 2e-4, ..m };
        assert_relative_eq!(beat_length(&doubled), beat_length(&m) / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn theta_mz_values() {
        let f = FieldParams::default();
        let t125 = theta_mz(&yig_125(), &f);
        assert_relative_eq!(t125, 3.2e-17, max_relative = 0.02);
        let t100 = theta_mz(&SphereParams::yig(), &f);
        assert_relative_eq!(t100 / t125, 1.953_125, max_relative = 1e-12);
        assert_relative_eq!(t100, 6.25e-17, max_relative = 0.02);
        let heavy = SphereParams { m_s: 280e3, ..yig_125() };
        assert_relative_eq!(theta_mz(&heavy, &f), t125 / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn stoner_wohlfarth_endpoints() {
        let f = FieldParams::default();
        let tmz = 3.2e-17;
        assert!(stoner_wohlfarth_energy(PI / 2.0, &f, tmz).abs() < 1e-12 * 2.0 * HBAR * f.omega_m / tmz);
        assert_relative_eq!(
            stoner_wohlfarth_energy(0.0, &f, tmz),
            -2.0 * HBAR * f.omega_m / tmz,
            max_relative = 1e-15
        );
    }

    /// Bisection on ΔE(θ) = E_M(θ) − E_M(0) − ħω_m, written as
    /// 4ħω_m sin²(θ/2)/θ_mz − ħω_m to avoid cancellation.
    fn single_magnon_root(theta_mz: f64) -> f64 {
        let g = |x: f64| 4.0 * (x / 2.0).sin().powi(2) / theta_mz - 1.0;
        let (mut lo, mut hi) = (0.0, 1e-3_f64.max(10.0 * theta_mz.sqrt()));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn magnon_angle_matches_root_find() {
        for tmz in [3.2e-17, 6.327e-17, 1e-18, 1e-10] {
            let root = single_magnon_root(tmz);
            assert_relative_eq!(magnon_angle_quantum(tmz), root, max_relative = 1e-6);
        }
        assert_relative_eq!(magnon_angle_quantum(1e-18), 1e-9, max_relative = 1e-15);
        let t0 = magnon_angle_quantum(3.2e-17);
        assert!(t0 > 1e-10 && t0 < 1e-8, "order of 1e-9, got {t0}");
    }

    #[test]
    fn fiber_length_values() {
        let f = FieldParams::from_frequency_ghz(3.0).unwrap();
        assert_relative_eq!(fiber_length_for_delay(&f, 1.47, 1.0), 0.068, max_relative = 0.01);
        assert_relative_eq!(
            fiber_length_for_delay(&f, 1.47, 2.0),
            2.0 * fiber_length_for_delay(&f, 1.47, 1.0),
            max_relative = 1e-15
        );
        let unit = FieldParams::new(2.0 * PI * SPEED_OF_LIGHT, GAMMA_E_DEFAULT).unwrap();
        assert_relative_eq!(fiber_length_for_delay(&unit, 1.0, 1.0), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn ife_field_defaults() {
        let (m, s, f) = (MaterialParams::yig(), SphereParams::yig(), FieldParams::default());
        let omega_e = 2.0 * PI * SPEED_OF_LIGHT / 1550e-9;
        // independent arithmetic
        let expected = 3.478_151_703_713_022e-11;
        assert_relative_eq!(ife_field(omega_e, &m, &s, &f), expected, max_relative = 1e-10);
        assert_relative_eq!(
            ife_field(2.0 * omega_e, &m, &s, &f),
            2.0 * ife_field(omega_e, &m, &s, &f),
            max_relative = 1e-15
        );
    }

    #[test]
    fn theta_ife_values() {
        let (m, s, f) = (MaterialParams::yig(), SphereParams::yig(), FieldParams::default());
        let ratio = theta_ife(&m, &s, &f, 1550e-9) / theta_mz(&s, &f);
        assert_relative_eq!(ratio, 0.18, max_relative = 0.02);
        assert_relative_eq!(ratio, 0.177_550_655_777_074_8, max_relative = 1e-10);
        assert_relative_eq!(
            theta_ife(&m, &s, &f, 1550e-9),
            theta_ife_closed_form(&m, &s, &f, 1550e-9),
            max_relative = 1e-12
        );
        let p = PhysicalParams::default();
        // 0.17755 · θ_mz / √θ_mz by hand
        assert_relative_eq!(p.alpha_i_magnitude(), 1.412_329_356e-9, max_relative = 1e-8);
    }

    #[test]
    fn theta_ife_linear_in_radius_at_fixed_theta_mz() {
        let (m, f) = (MaterialParams::yig(), FieldParams::default());
        let s1 = SphereParams::yig();
        // doubling R_s while scaling M_s by 1/8 keeps V_s M_s and thus θ_mz fixed
        let s2 = SphereParams { r_s: 2.0 * s1.r_s, m_s: s1.m_s / 8.0 };
        assert_relative_eq!(theta_mz(&s1, &f), theta_mz(&s2, &f), max_relative = 1e-14);
        assert_relative_eq!(
            theta_ife(&m, &s2, &f, 1550e-9),
            2.0 * theta_ife(&m, &s1, &f, 1550e-9),
            max_relative = 1e-13
        );
    }

    #[test]
    fn length_ratio_order_of_magnitude() {
        for r_um in [100.0, 150.0, 200.0, 300.0, 400.0] {
            let p = PhysicalParams {
                sphere: SphereParams::new_convenient(r_um, 140e3).unwrap(),
                ..Default::default()
            };
            let ratio = p.length_ratio();
            assert!(ratio > 0.1 / 5.0 && ratio < 0.1 * 5.0, "R_s = {r_um} µm: {ratio}");
        }
    }

    #[test]
    fn derived_quantities() {
        let s = SphereParams::yig();
        assert_eq!(s.optical_length(), 2.0 * s.r_s);
        let f = FieldParams::default();
        assert_relative_eq!(f.h_dc() * f.mu_0 * f.gamma_e, f.omega_m, max_relative = 1e-15);
        let t = TimingParams::default();
        assert_relative_eq!(t.delta_t(), f.period(), max_relative = 1e-12);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            MaterialParams::new(0.02, 2.19, 1550e-9, 0.5),
            Err(Error::InvalidParameter { ref field, .. }) if field == "material.q_s"
        ));
        assert!(MaterialParams::new(1e-4, 0.9, 1550e-9, 0.5).is_err());
        assert!(MaterialParams::new(-1e-4, 2.19, 1550e-9, 0.5).is_err());
        assert!(SphereParams::new(0.0, 1.0).is_err());
        assert!(FieldParams::new(f64::NAN, 1.0).is_err());
        assert!(matches!(
            TimingParams::new(1.0, 0.5, 1.47, 0.0),
            Err(Error::InvalidParameter { ref field, .. }) if field == "timing.t2"
        ));
        assert!(PhysicalParams::default().validate().is_ok());
    }

    #[test]
    fn pulse_shortness_default() {
        let p = PhysicalParams::default();
        let r = p.pulse_shortness();
        assert_relative_eq!(r, 2.0 * PI * 3e9 * 100e-15, max_relative = 1e-14);
        assert!(r < PULSE_SHORTNESS_LIMIT);
    }
}
