//! Experiment configuration files (TOML).
//!
//! Every physical quantity accepts either its SI key or a convenience key
//! (`lambda_0_nm`, `r_s_um`, `f_m_ghz`, `gamma_e_ghz_per_t`, `t_p_fs`); giving
//! both is an error. Missing keys take the defaults of [`PhysicalParams`].

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use folm::interferometer::{CollapseModel, Configuration, CouplerParams, ParallelGeometry, Scenario};
use folm::jones::{standard_sop, SopLabel};
use folm::magnetooptics::Orientation;
use folm::params::{FieldParams, MaterialParams, PhysicalParams, SphereParams, TimingParams};
use folm::C64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfigKind {
    Parallel,
    Perpendicular,
}

impl From<ConfigKind> for Configuration {
    fn from(k: ConfigKind) -> Self {
        match k {
            ConfigKind::Parallel => Configuration::Parallel,
            ConfigKind::Perpendicular => Configuration::Perpendicular,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    pub q_s: Option<f64>,
    pub n_0: Option<f64>,
    pub lambda_0: Option<f64>,
    pub lambda_0_nm: Option<f64>,
    pub l_a: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereSection {
    pub r_s: Option<f64>,
    pub r_s_um: Option<f64>,
    pub m_s: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    pub omega_m: Option<f64>,
    pub f_m_ghz: Option<f64>,
    pub gamma_e: Option<f64>,
    pub gamma_e_ghz_per_t: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingSection {
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    /// t2 − t1; alternative to `t2`.
    pub delta_t: Option<f64>,
    pub n_f: Option<f64>,
    pub t_p: Option<f64>,
    pub t_p_fs: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplerSection {
    pub t_mag: Option<f64>,
    /// Derived from `t_mag` when absent.
    pub r_mag: Option<f64>,
    /// Power transmission |t|²; alternative to `t_mag`.
    pub t_sq: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    pub alpha_re: Option<f64>,
    pub alpha_im: Option<f64>,
    /// Overrides θ_IFE/θ_m0 when set.
    pub alpha_i_mag: Option<f64>,
    pub alpha_i_phase: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrientationSection {
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub theta_m: Option<f64>,
    pub phi_m: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarizationSection {
    /// One of V, H, D, A, R, L.
    pub input: Option<String>,
    pub first: Option<OrientationSection>,
    pub second: Option<OrientationSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub path: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub scale: Scale,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<String>,
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub configuration: ConfigKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collapse_d: Option<f64>,
    #[serde(default)]
    pub oracle: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fock_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ife_enhancement: Option<f64>,
    #[serde(default)]
    pub material: MaterialSection,
    #[serde(default)]
    pub sphere: SphereSection,
    #[serde(default)]
    pub field: FieldSection,
    #[serde(default)]
    pub timing: TimingSection,
    #[serde(default)]
    pub coupler: CouplerSection,
    #[serde(default)]
    pub state: StateSection,
    #[serde(default)]
    pub polarization: PolarizationSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepAxis>,
    #[serde(default)]
    pub output: OutputSection,
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> CliError {
    CliError::Validation {
        field: field.into(),
        reason: reason.into(),
    }
}

/// SI value from either the SI key or the convenience key times `factor`.
fn pick(field: &str, si: Option<f64>, alt_name: &str, alt: Option<f64>, factor: f64, default: f64) -> Result<f64, CliError> {
    match (si, alt) {
        (Some(_), Some(_)) => Err(invalid(field, format!("give either `{field}` or `{alt_name}`, not both"))),
        (Some(v), None) => Ok(v),
        (None, Some(v)) => Ok(v * factor),
        (None, None) => Ok(default),
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let de = toml::Deserializer::new(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { "config".to_string() } else { path };
            invalid(field, e.inner().message().trim().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// The defaults written out in full, in convenience units where available.
    pub fn defaults(kind: ConfigKind) -> Self {
        let p = PhysicalParams::default();
        let angles = OrientationSection {
            theta: Some(0.0),
            phi: Some(0.0),
            theta_m: Some(0.0),
            phi_m: Some(0.0),
        };
        Self {
            configuration: kind,
            collapse_d: Some(1.0),
            oracle: false,
            fock_dim: None,
            ife_enhancement: Some(p.ife_enhancement),
            material: MaterialSection {
                q_s: Some(p.material.q_s),
                n_0: Some(p.material.n_0),
                lambda_0: None,
                lambda_0_nm: Some(p.material.lambda_0 * 1e9),
                l_a: Some(p.material.l_a),
            },
            sphere: SphereSection {
                r_s: None,
                r_s_um: Some(p.sphere.r_s * 1e6),
                m_s: Some(p.sphere.m_s),
            },
            field: FieldSection {
                omega_m: None,
                f_m_ghz: Some(p.field.omega_m / (2.0 * PI) / 1e9),
                gamma_e: None,
                gamma_e_ghz_per_t: Some(p.field.gamma_e / (2.0 * PI) / 1e9),
            },
            timing: TimingSection {
                t1: Some(p.timing.t1),
                t2: Some(p.timing.t2),
                delta_t: None,
                n_f: Some(p.timing.n_f),
                t_p: None,
                t_p_fs: Some(p.timing.t_p * 1e15),
            },
            coupler: CouplerSection {
                t_mag: None,
                r_mag: None,
                t_sq: Some(0.5),
            },
            state: StateSection {
                alpha_re: Some(0.0),
                alpha_im: Some(0.0),
                alpha_i_mag: None,
                alpha_i_phase: Some(0.0),
            },
            polarization: PolarizationSection {
                input: Some("L".into()),
                first: Some(angles),
                second: Some(angles),
            },
            sweep: Vec::new(),
            output: OutputSection {
                path: None,
                format: Some(OutputFormat::Csv),
            },
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Checks everything that does not depend on a sweep point, then builds
    /// the base point to surface parameter errors early.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.sweep.len() > 2 {
            return Err(invalid("sweep", format!("at most 2 sweep axes, got {}", self.sweep.len())));
        }
        for (k, axis) in self.sweep.iter().enumerate() {
            let field = format!("sweep[{k}]");
            if axis.count < 2 {
                return Err(invalid(format!("{field}.count"), format!("must be >= 2, got {}", axis.count)));
            }
            if !(axis.start.is_finite() && axis.stop.is_finite()) {
                return Err(invalid(field, "start and stop must be finite"));
            }
            if axis.scale == Scale::Log && !(axis.start > 0.0 && axis.stop > 0.0) {
                return Err(invalid(format!("{field}.scale"), "log sweeps need start > 0 and stop > 0"));
            }
            if Inputs::resolve_path(&axis.path).is_none() {
                return Err(invalid(format!("{field}.path"), format!("unknown parameter path `{}`", axis.path)));
            }
        }
        if self.sweep.len() == 2 && Inputs::resolve_path(&self.sweep[0].path).map(|p| p.0) == Inputs::resolve_path(&self.sweep[1].path).map(|p| p.0) {
            return Err(invalid("sweep[1].path", "both axes sweep the same parameter"));
        }
        if let Some(0) = self.fock_dim {
            return Err(invalid("fock_dim", "must be > 0"));
        }
        self.inputs()?.scenario()?;
        Ok(())
    }

    /// Resolves the file into SI values for the base (unswept) point.
    pub fn inputs(&self) -> Result<Inputs, CliError> {
        let d = PhysicalParams::default();
        let m = &self.material;
        let s = &self.sphere;
        let f = &self.field;
        let t = &self.timing;
        let t1 = t.t1.unwrap_or(d.timing.t1);
        if self.coupler.t_sq.is_some() && (self.coupler.t_mag.is_some() || self.coupler.r_mag.is_some()) {
            return Err(invalid("coupler.t_sq", "give either `t_sq` or `t_mag`/`r_mag`, not both"));
        }
        let t2 = match (t.t2, t.delta_t) {
            (Some(_), Some(_)) => return Err(invalid("timing.t2", "give either `t2` or `delta_t`, not both")),
            (Some(v), None) => v,
            (None, Some(dt)) => t1 + dt,
            (None, None) => d.timing.t2,
        };
        let orientation = |o: Option<OrientationSection>| {
            let o = o.unwrap_or_default();
            [
                o.theta.unwrap_or(0.0),
                o.phi.unwrap_or(0.0),
                o.theta_m.unwrap_or(0.0),
                o.phi_m.unwrap_or(0.0),
            ]
        };
        let input_sop = match &self.polarization.input {
            Some(label) => label
                .parse::<SopLabel>()
                .map_err(|e| invalid("polarization.input", e.to_string()))?,
            None => SopLabel::L,
        };
        Ok(Inputs {
            configuration: self.configuration.into(),
            q_s: m.q_s.unwrap_or(d.material.q_s),
            n_0: m.n_0.unwrap_or(d.material.n_0),
            lambda_0: pick("material.lambda_0", m.lambda_0, "lambda_0_nm", m.lambda_0_nm, 1e-9, d.material.lambda_0)?,
            l_a: m.l_a.unwrap_or(d.material.l_a),
            r_s: pick("sphere.r_s", s.r_s, "r_s_um", s.r_s_um, 1e-6, d.sphere.r_s)?,
            m_s: s.m_s.unwrap_or(d.sphere.m_s),
            omega_m: pick("field.omega_m", f.omega_m, "f_m_ghz", f.f_m_ghz, 2.0 * PI * 1e9, d.field.omega_m)?,
            gamma_e: pick("field.gamma_e", f.gamma_e, "gamma_e_ghz_per_t", f.gamma_e_ghz_per_t, 2.0 * PI * 1e9, d.field.gamma_e)?,
            t1,
            t2,
            n_f: t.n_f.unwrap_or(d.timing.n_f),
            t_p: pick("timing.t_p", t.t_p, "t_p_fs", t.t_p_fs, 1e-15, d.timing.t_p)?,
            t_mag: self.coupler.t_mag,
            r_mag: self.coupler.r_mag,
            t_sq: self.coupler.t_sq,
            alpha_re: self.state.alpha_re.unwrap_or(0.0),
            alpha_im: self.state.alpha_im.unwrap_or(0.0),
            alpha_i_mag: self.state.alpha_i_mag,
            alpha_i_phase: self.state.alpha_i_phase.unwrap_or(0.0),
            ife_enhancement: self.ife_enhancement.unwrap_or(d.ife_enhancement),
            input_sop,
            first: orientation(self.polarization.first),
            second: orientation(self.polarization.second),
            collapse_d: self.collapse_d.unwrap_or(1.0),
            oracle: self.oracle,
            fock_dim: self.fock_dim,
        })
    }

    /// Sweep points in row-major order (the last axis varies fastest), each
    /// with its axis values.
    pub fn points(&self) -> Result<Vec<(Inputs, Vec<f64>)>, CliError> {
        let base = self.inputs()?;
        let grids: Vec<Vec<f64>> = self.sweep.iter().map(axis_values).collect();
        let total: usize = grids.iter().map(Vec::len).product();
        let mut out = Vec::with_capacity(total);
        for flat in 0..total {
            let mut point = base.clone();
            let mut values = Vec::with_capacity(grids.len());
            let mut rem = flat;
            let mut idx = vec![0; grids.len()];
            for k in (0..grids.len()).rev() {
                idx[k] = rem % grids[k].len();
                rem /= grids[k].len();
            }
            for (k, axis) in self.sweep.iter().enumerate() {
                let v = grids[k][idx[k]];
                point.set(&axis.path, v)?;
                values.push(v);
            }
            out.push((point, values));
        }
        Ok(out)
    }
}

/// Values along one axis; endpoints are exact.
pub fn axis_values(a: &SweepAxis) -> Vec<f64> {
    let n = a.count;
    (0..n)
        .map(|k| {
            if k == 0 {
                return a.start;
            }
            if k == n - 1 {
                return a.stop;
            }
            let u = k as f64 / (n - 1) as f64;
            match a.scale {
                Scale::Linear => a.start + (a.stop - a.start) * u,
                Scale::Log => (a.start.ln() + (a.stop.ln() - a.start.ln()) * u).exp(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    QS,
    N0,
    Lambda0,
    LA,
    RS,
    MS,
    OmegaM,
    GammaE,
    T1,
    T2,
    DeltaT,
    NF,
    TP,
    TMag,
    TSq,
    AlphaRe,
    AlphaIm,
    AlphaIMag,
    AlphaIPhase,
    IfeEnhancement,
    CollapseD,
    Angle(bool, usize),
}

const ANGLE_KEYS: [&str; 4] = ["theta", "phi", "theta_m", "phi_m"];

/// One fully resolved point in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct Inputs {
    pub configuration: Configuration,
    pub q_s: f64,
    pub n_0: f64,
    pub lambda_0: f64,
    pub l_a: f64,
    pub r_s: f64,
    pub m_s: f64,
    pub omega_m: f64,
    pub gamma_e: f64,
    pub t1: f64,
    pub t2: f64,
    pub n_f: f64,
    pub t_p: f64,
    /// Coupler: `t_sq`, else `t_mag` (with `r_mag` if given), else 3 dB.
    pub t_mag: Option<f64>,
    pub r_mag: Option<f64>,
    pub t_sq: Option<f64>,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub alpha_i_mag: Option<f64>,
    pub alpha_i_phase: f64,
    pub ife_enhancement: f64,
    pub input_sop: SopLabel,
    /// (θ, φ, θ_m, φ_m) at the first and second interaction.
    pub first: [f64; 4],
    pub second: [f64; 4],
    pub collapse_d: f64,
    pub oracle: bool,
    pub fock_dim: Option<usize>,
}

impl Inputs {
    /// Sweepable paths with their scale to SI.
    fn resolve_path(path: &str) -> Option<(Target, f64)> {
        use Target::*;
        let two_pi_giga = 2.0 * PI * 1e9;
        let t = match path {
            "material.q_s" => (QS, 1.0),
            "material.n_0" => (N0, 1.0),
            "material.lambda_0" => (Lambda0, 1.0),
            "material.lambda_0_nm" => (Lambda0, 1e-9),
            "material.l_a" => (LA, 1.0),
            "sphere.r_s" => (RS, 1.0),
            "sphere.r_s_um" => (RS, 1e-6),
            "sphere.m_s" => (MS, 1.0),
            "field.omega_m" => (OmegaM, 1.0),
            "field.f_m_ghz" => (OmegaM, two_pi_giga),
            "field.gamma_e" => (GammaE, 1.0),
            "field.gamma_e_ghz_per_t" => (GammaE, two_pi_giga),
            "timing.t1" => (T1, 1.0),
            "timing.t2" => (T2, 1.0),
            "timing.delta_t" => (DeltaT, 1.0),
            "timing.n_f" => (NF, 1.0),
            "timing.t_p" => (TP, 1.0),
            "timing.t_p_fs" => (TP, 1e-15),
            "coupler.t_mag" => (TMag, 1.0),
            "coupler.t_sq" => (TSq, 1.0),
            "state.alpha_re" => (AlphaRe, 1.0),
            "state.alpha_im" => (AlphaIm, 1.0),
            "state.alpha_i_mag" => (AlphaIMag, 1.0),
            "state.alpha_i_phase" => (AlphaIPhase, 1.0),
            "ife_enhancement" => (IfeEnhancement, 1.0),
            "collapse_d" => (CollapseD, 1.0),
            other => {
                let rest = other.strip_prefix("polarization.")?;
                let (which, key) = rest.split_once('.')?;
                let second = match which {
                    "first" => false,
                    "second" => true,
                    _ => return None,
                };
                let k = ANGLE_KEYS.iter().position(|&a| a == key)?;
                (Angle(second, k), 1.0)
            }
        };
        Some(t)
    }

    /// Sets one parameter by path. `timing.delta_t` moves t2, keeping t1.
    pub fn set(&mut self, path: &str, value: f64) -> Result<(), CliError> {
        use Target::*;
        let (target, factor) = Self::resolve_path(path).ok_or_else(|| invalid("sweep.path", format!("unknown parameter path `{path}`")))?;
        let v = value * factor;
        match target {
            QS => self.q_s = v,
            N0 => self.n_0 = v,
            Lambda0 => self.lambda_0 = v,
            LA => self.l_a = v,
            RS => self.r_s = v,
            MS => self.m_s = v,
            OmegaM => self.omega_m = v,
            GammaE => self.gamma_e = v,
            T1 => self.t1 = v,
            T2 => self.t2 = v,
            DeltaT => self.t2 = self.t1 + v,
            NF => self.n_f = v,
            TP => self.t_p = v,
            TMag => {
                self.t_mag = Some(v);
                self.r_mag = None;
                self.t_sq = None;
            }
            TSq => {
                self.t_sq = Some(v);
                self.t_mag = None;
                self.r_mag = None;
            }
            AlphaRe => self.alpha_re = v,
            AlphaIm => self.alpha_im = v,
            AlphaIMag => self.alpha_i_mag = Some(v),
            AlphaIPhase => self.alpha_i_phase = v,
            IfeEnhancement => self.ife_enhancement = v,
            CollapseD => self.collapse_d = v,
            Angle(second, k) => {
                if second {
                    self.second[k] = v
                } else {
                    self.first[k] = v
                }
            }
        }
        Ok(())
    }

    pub fn delta_t(&self) -> f64 {
        self.t2 - self.t1
    }

    /// Builds the validated core scenario for this point.
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let params = PhysicalParams {
            material: MaterialParams::new(self.q_s, self.n_0, self.lambda_0, self.l_a)?,
            sphere: SphereParams::new(self.r_s, self.m_s)?,
            field: FieldParams::new(self.omega_m, self.gamma_e)?,
            timing: TimingParams::new(self.t1, self.t2, self.n_f, self.t_p)?,
            ife_enhancement: self.ife_enhancement,
        };
        params.validate()?;
        let coupler = match (self.t_sq, self.t_mag, self.r_mag) {
            (Some(p), _, _) => CouplerParams::from_power(p)?,
            (None, Some(t), Some(r)) => CouplerParams::new(t, r)?,
            (None, Some(t), None) => CouplerParams::from_transmission(t)?,
            (None, None, Some(_)) => return Err(invalid("coupler.r_mag", "needs `t_mag`")),
            (None, None, None) => CouplerParams::three_db(),
        };
        let orient = |a: [f64; 4], name: &str| {
            Orientation::new(a[0], a[1], a[2], a[3]).map_err(|e| match e {
                folm::Error::InvalidParameter { field, reason } => invalid(format!("polarization.{name}.{field}"), reason),
                other => other.into(),
            })
        };
        if let Some(mag) = self.alpha_i_mag {
            if !(mag.is_finite() && mag >= 0.0) {
                return Err(invalid("state.alpha_i_mag", format!("must be finite and >= 0, got {mag}")));
            }
        }
        for (name, v) in [("state.alpha_re", self.alpha_re), ("state.alpha_im", self.alpha_im), ("state.alpha_i_phase", self.alpha_i_phase)] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        Ok(Scenario {
            configuration: self.configuration,
            params,
            coupler,
            alpha: C64::new(self.alpha_re, self.alpha_im),
            alpha_i_magnitude: self.alpha_i_mag,
            alpha_i_phase: self.alpha_i_phase,
            geometry: ParallelGeometry {
                input_sop: standard_sop(self.input_sop),
                first: orient(self.first, "first")?,
                second: orient(self.second, "second")?,
            },
            collapse: CollapseModel::new(self.collapse_d)?,
            oracle: self.oracle,
            fock_dim: self.fock_dim,
        })
    }
}
