//! Evaluates every sweep point of a configuration.

use folm::interferometer::run_configuration;
use folm::{exec, Execution};

use crate::config::ExperimentConfig;
use crate::table::ResultRow;
use crate::CliError;

/// Rows must satisfy p_T + p_R = 1 to this tolerance.
pub const PROBABILITY_TOL: f64 = 1e-12;

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub oracle: bool,
    pub fock_dim: Option<usize>,
}

/// Runs all points; rows are ordered by sweep index whatever the execution mode.
pub fn run(cfg: &ExperimentConfig, ov: Overrides, execution: Execution) -> Result<Vec<ResultRow>, CliError> {
    let mut points = cfg.points()?;
    for (inp, _) in &mut points {
        inp.oracle |= ov.oracle;
        if ov.fock_dim.is_some() {
            inp.fock_dim = ov.fock_dim;
        }
    }
    let results = exec::map_indexed(execution, points.len(), |k| {
        let (inp, values) = &points[k];
        let describe = || {
            let mut parts = vec![format!("sweep index {k}")];
            parts.extend(cfg.sweep.iter().zip(values).map(|(a, v)| format!("{} = {v:e}", a.path)));
            parts.join(", ")
        };
        let scenario = inp.scenario().map_err(|e| e.at_point(&describe()))?;
        let result = run_configuration(&scenario).map_err(|e| CliError::from(e).at_point(&describe()))?;
        Ok::<_, CliError>((scenario, result))
    });
    let mut rows = Vec::with_capacity(results.len());
    for (k, (res, (inp, _))) in results.into_iter().zip(&points).enumerate() {
        let (scenario, result) = res?;
        rows.push(ResultRow::new(k, inp, &scenario, &result));
    }
    Ok(rows)
}

/// First row whose unitary probabilities do not sum to one.
pub fn probability_violation(rows: &[ResultRow]) -> Option<(usize, f64)> {
    rows.iter()
        .enumerate()
        .map(|(k, r)| (k, r.p_t + r.p_r - 1.0))
        .find(|(_, d)| d.is_nan() || d.abs() > PROBABILITY_TOL)
}
