use pairent_core::entanglement::{entropy_point, EntropyResult};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, SweepConfig};
use crate::output::{csv_line, json_string, opt, sig15};
use crate::state::state_token;
use crate::{with_workers, CliError, SCHEMA_VERSION};

pub const SWEEP_COLUMNS: &str = "scenario,input_state,n,lambda,S_numeric,S_closed,discrepancy";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<EntropyResult>,
    /// Indices of rows whose discrepancy exceeds the tolerance.
    pub breaches: Vec<usize>,
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome, CliError> {
    let lambdas: Vec<f64> = match cfg.scenario {
        pairent_core::bogolyubov::Scenario::ChargeOnly => cfg.lambda_grid.clone(),
        _ => vec![0.0],
    };
    let points: Vec<(f64, f64)> = cfg
        .n_grid
        .iter()
        .flat_map(|&n| lambdas.iter().map(move |&l| (n, l)))
        .collect();
    let rows = with_workers(cfg.workers, || {
        points
            .par_iter()
            .map(|&(n, l)| entropy_point(cfg.scenario, cfg.input, n, l))
            .collect::<Result<Vec<_>, _>>()
    })??;
    let breaches = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.discrepancy.is_some_and(|d| !(d <= cfg.tolerance)))
        .map(|(i, _)| i)
        .collect();
    Ok(SweepOutcome { rows, breaches })
}

fn row_fields(r: &EntropyResult) -> Vec<String> {
    vec![
        r.scenario.token().to_string(),
        state_token(r.input, r.scenario),
        sig15(r.n),
        sig15(r.lambda),
        sig15(r.s_numeric),
        opt(r.s_closed),
        opt(r.discrepancy),
    ]
}

pub fn render_row(r: &EntropyResult) -> String {
    csv_line(&row_fields(r))
}

#[derive(Serialize)]
struct JsonRow {
    scenario: &'static str,
    input_state: String,
    n: f64,
    lambda: f64,
    s_numeric: f64,
    s_closed: Option<f64>,
    discrepancy: Option<f64>,
}

#[derive(Serialize)]
struct JsonSweep {
    schema_version: u32,
    command: &'static str,
    tolerance: f64,
    passed: bool,
    rows: Vec<JsonRow>,
}

pub fn render_sweep(cfg: &SweepConfig, outcome: &SweepOutcome) -> String {
    match cfg.format {
        Format::Csv => {
            let mut s = format!("{SWEEP_COLUMNS}\n");
            for r in &outcome.rows {
                s.push_str(&render_row(r));
            }
            s
        }
        Format::Json => json_string(&JsonSweep {
            schema_version: SCHEMA_VERSION,
            command: "sweep",
            tolerance: cfg.tolerance,
            passed: outcome.breaches.is_empty(),
            rows: outcome
                .rows
                .iter()
                .map(|r| JsonRow {
                    scenario: r.scenario.token(),
                    input_state: state_token(r.input, r.scenario),
                    n: r.n,
                    lambda: r.lambda,
                    s_numeric: r.s_numeric,
                    s_closed: r.s_closed,
                    discrepancy: r.discrepancy,
                })
                .collect(),
        }),
    }
}
