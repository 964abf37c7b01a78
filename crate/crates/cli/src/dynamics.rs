use pairent_core::dynamics::{solve_mode_point, ModeParameters, ModePoint, TauSpan};
use pairent_core::entanglement::{entropy_numeric, entropy_vacuum_closed_form};
use pairent_core::fock::Occupation;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{DynamicsConfig, Format};
use crate::output::{csv_line, json_string, opt, sig15};
use crate::{with_workers, CliError, SCHEMA_VERSION};

pub const DYNAMICS_COLUMNS: &str = "p_x,p_y,p_z,p,amplitude,abs_beta_uu,abs_beta_ud,abs_beta_du,abs_beta_dd,n,lambda_eff,S_numeric,S_closed,normalization_residual,wronskian_drift,stripped_phase,status";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicsValues {
    pub amplitude: f64,
    /// `|β|` in the order ↑↑, ↑↓, ↓↑, ↓↓.
    pub abs_beta: [f64; 4],
    pub n: f64,
    pub lambda_eff: Option<f64>,
    pub s_numeric: f64,
    pub s_closed: f64,
    pub normalization_residual: f64,
    pub wronskian_drift: f64,
    pub stripped_phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicsRow {
    pub momentum: [f64; 3],
    pub p: f64,
    pub values: Option<DynamicsValues>,
    /// `ok`, or the reason the point failed.
    pub status: String,
}

impl DynamicsRow {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

fn values(point: &ModePoint) -> Result<DynamicsValues, pairent_core::Error> {
    let k = &point.dressed.coefficients;
    let s_numeric = entropy_numeric(k, Occupation::VACUUM)?;
    let s_closed = entropy_vacuum_closed_form(point.density.min(k.scenario.n_max()), k.scenario)?;
    let b = k.beta;
    Ok(DynamicsValues {
        amplitude: k.amplitude,
        abs_beta: [b[0][0].norm(), b[0][1].norm(), b[1][0].norm(), b[1][1].norm()],
        n: point.density,
        lambda_eff: point.lambda_effective,
        s_numeric,
        s_closed,
        normalization_residual: point.dressed.normalization_residual,
        wronskian_drift: point.wronskian_drift,
        stripped_phase: point.dressed.stripped_phase,
    })
}

fn evaluate(cfg: &DynamicsConfig, momentum: [f64; 3]) -> DynamicsRow {
    let p = momentum.iter().map(|x| x * x).sum::<f64>().sqrt();
    let result = ModeParameters::new(momentum, cfg.mass)
        .and_then(|params| solve_mode_point(&params, &cfg.profile, TauSpan::Auto, cfg.tol))
        .and_then(|point| values(&point));
    match result {
        Ok(v) => {
            let gap = (v.s_numeric - v.s_closed).abs();
            let status = if gap <= cfg.entropy_tolerance {
                "ok".to_string()
            } else {
                format!("entropy mismatch {gap:e}")
            };
            DynamicsRow { momentum, p, values: Some(v), status }
        }
        Err(e) => DynamicsRow { momentum, p, values: None, status: e.to_string() },
    }
}

/// One row per momentum, in grid order; failures are recorded per row.
pub fn run_dynamics(cfg: &DynamicsConfig) -> Result<Vec<DynamicsRow>, CliError> {
    with_workers(cfg.workers, || cfg.momenta.par_iter().map(|&m| evaluate(cfg, m)).collect())
}

#[derive(Serialize)]
struct JsonDynamics<'a> {
    schema_version: u32,
    command: &'static str,
    profile: &'a pairent_core::dynamics::ScaleFactorProfile,
    mass: f64,
    tol: f64,
    passed: bool,
    rows: &'a [DynamicsRow],
}

pub fn render_dynamics(cfg: &DynamicsConfig, rows: &[DynamicsRow]) -> String {
    match cfg.format {
        Format::Csv => {
            let mut s = format!("{DYNAMICS_COLUMNS}\n");
            for r in rows {
                let mut fields: Vec<String> = r.momentum.iter().map(|x| sig15(*x)).collect();
                fields.push(sig15(r.p));
                match &r.values {
                    Some(v) => {
                        fields.push(sig15(v.amplitude));
                        fields.extend(v.abs_beta.iter().map(|x| sig15(*x)));
                        fields.push(sig15(v.n));
                        fields.push(opt(v.lambda_eff));
                        fields.push(sig15(v.s_numeric));
                        fields.push(sig15(v.s_closed));
                        fields.push(sig15(v.normalization_residual));
                        fields.push(sig15(v.wronskian_drift));
                        fields.push(sig15(v.stripped_phase));
                    }
                    None => fields.extend(std::iter::repeat_n(String::new(), 12)),
                }
                fields.push(r.status.replace(',', ";"));
                s.push_str(&csv_line(&fields));
            }
            s
        }
        Format::Json => json_string(&JsonDynamics {
            schema_version: SCHEMA_VERSION,
            command: "dynamics",
            profile: &cfg.profile,
            mass: cfg.mass,
            tol: cfg.tol,
            passed: rows.iter().all(DynamicsRow::ok),
            rows,
        }),
    }
}
