//! Result rows and their CSV/JSON serialization.

use std::io::Write;

use folm::interferometer::{Scenario, ScenarioResult};

use crate::config::{Inputs, OutputFormat};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(usize),
    Float(f64),
    Text(String),
    Missing,
}

impl Cell {
    /// CSV text; floats carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Int(n) => serde_json::Value::from(*n),
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(serde_json::Value::Null, serde_json::Value::Number),
            Cell::Text(s) => serde_json::Value::from(s.as_str()),
            Cell::Missing => serde_json::Value::Null,
        }
    }
}

pub const COLUMNS: &[&str] = &[
    "sweep_index",
    "configuration",
    "q_s",
    "n_0",
    "lambda_0",
    "l_a",
    "r_s",
    "m_s",
    "omega_m",
    "gamma_e",
    "t1",
    "t2",
    "delta_t",
    "n_f",
    "t_p",
    "t_mag",
    "r_mag",
    "alpha_re",
    "alpha_im",
    "alpha_i_re",
    "alpha_i_im",
    "ife_enhancement",
    "input_sop",
    "theta_1",
    "phi_1",
    "theta_m_1",
    "phi_m_1",
    "theta_2",
    "phi_2",
    "theta_m_2",
    "phi_m_2",
    "collapse_d",
    "chi_P_re",
    "chi_P_im",
    "chi_M_re",
    "chi_M_im",
    "eta",
    "p_T_unitary",
    "p_R_unitary",
    "p_T_collapsed",
    "purity_closed_form",
    "purity_oracle",
    "intermediate_purity",
    "L_F",
    "theta_mz",
    "theta_IFE",
    "alpha_i_mag",
    "omega_m_tp_ratio",
];

/// One output row, cells in [`COLUMNS`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub cells: Vec<Cell>,
    pub p_t: f64,
    pub p_r: f64,
}

impl ResultRow {
    pub fn new(index: usize, inp: &Inputs, scenario: &Scenario, r: &ScenarioResult) -> Self {
        use Cell::{Float as F, Text as T};
        let s = &r.overlaps;
        let mut cells = vec![Cell::Int(index), T(inp.configuration.to_string())];
        cells.extend(
            [
                inp.q_s,
                inp.n_0,
                inp.lambda_0,
                inp.l_a,
                inp.r_s,
                inp.m_s,
                inp.omega_m,
                inp.gamma_e,
                inp.t1,
                inp.t2,
                inp.delta_t(),
                inp.n_f,
                inp.t_p,
                scenario.coupler.t_mag(),
                scenario.coupler.r_mag(),
                inp.alpha_re,
                inp.alpha_im,
                r.alpha_i.re,
                r.alpha_i.im,
                inp.ife_enhancement,
            ]
            .map(F),
        );
        cells.push(T(inp.input_sop.to_string()));
        cells.extend(inp.first.iter().chain(&inp.second).map(|&x| F(x)));
        cells.extend(
            [
                inp.collapse_d,
                s.chi_p.re,
                s.chi_p.im,
                s.chi_m.re,
                s.chi_m.im,
                s.eta,
                r.unitary.p_t,
                r.unitary.p_r,
                r.collapsed.p_t,
                r.purity_closed_form,
            ]
            .map(F),
        );
        cells.push(r.purity_oracle.map_or(Cell::Missing, F));
        cells.extend([r.intermediate_purity, r.fiber_length, r.theta_mz, r.theta_ife, r.alpha_i.norm(), r.pulse_shortness].map(F));
        debug_assert_eq!(cells.len(), COLUMNS.len());
        Self {
            cells,
            p_t: r.unitary.p_t,
            p_r: r.unitary.p_r,
        }
    }

    pub fn get(&self, column: &str) -> Option<&Cell> {
        COLUMNS.iter().position(|&c| c == column).map(|k| &self.cells[k])
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[ResultRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        w.write_record(row.cells.iter().map(Cell::to_csv))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(mut out: W, rows: &[ResultRow]) -> Result<(), CliError> {
    let array: Vec<serde_json::Value> = rows
        .iter()
        .map(|row| {
            let obj: serde_json::Map<String, serde_json::Value> =
                COLUMNS.iter().zip(&row.cells).map(|(k, c)| (k.to_string(), c.to_json())).collect();
            serde_json::Value::Object(obj)
        })
        .collect();
    serde_json::to_writer_pretty(&mut out, &array)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_rows<W: Write>(out: W, rows: &[ResultRow], format: OutputFormat) -> Result<(), CliError> {
    match format {
        OutputFormat::Csv => write_csv(out, rows),
        OutputFormat::Json => write_json(out, rows),
    }
}
