use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pairent_core::bogolyubov::Scenario;
use pairent_core::dynamics::{ModeParameters, ScaleFactorProfile};
use pairent_core::fock::Occupation;

use crate::grid::parse_grid;
use crate::state::parse_state;
use crate::CliError;

pub const DEFAULT_SEED: u64 = 1729;

#[derive(Parser, Debug)]
#[command(
    name = "pairent",
    version,
    about = "Particle-antiparticle entanglement from Dirac pair creation",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Numeric and closed-form entropies over an (n, lambda) grid.
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Integrate modes over a momentum grid and report coefficients and entropies.
    #[command(args_override_self = true)]
    Dynamics(DynamicsArgs),
    /// Run the identity and invariant suite and print a pass/fail table.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Report {
    Text,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileFamily {
    Constant,
    Tanh,
}

fn scenario_arg(s: &str) -> Result<Scenario, String> {
    Scenario::from_token(s).ok_or_else(|| format!("unknown scenario {s:?} (expected charge, spin-am or spinless)"))
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Write results here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads; 0 uses the available parallelism.
    #[arg(long, env = "PAIRENT_WORKERS", default_value_t = 0)]
    pub workers: usize,
    /// File of key=value lines using the long flag names; flags given on the
    /// command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long, value_parser = scenario_arg)]
    pub scenario: Scenario,
    #[arg(long, default_value = "vac")]
    pub state: String,
    /// Density grid; defaults to 0:n_max:0.1.
    #[arg(long)]
    pub n: Option<String>,
    /// Spin-flip fraction grid (charge scenario only).
    #[arg(long, default_value = "0:1:0.25")]
    pub lambda: String,
    /// Largest allowed |S_numeric - S_closed|.
    #[arg(long, default_value = "1e-10")]
    pub tolerance: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug, Clone)]
pub struct DynamicsArgs {
    #[arg(long, value_enum, default_value_t = ProfileFamily::Tanh)]
    pub profile: ProfileFamily,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Scale factor of the constant profile.
    #[arg(long, default_value_t = 1.0)]
    pub a0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    /// Momentum magnitudes.
    #[arg(long, default_value = "log:0.1:10:30")]
    pub p: String,
    /// Momentum direction as x,y,z (normalised internally).
    #[arg(long, default_value = "0,0,1")]
    pub direction: String,
    /// Integration tolerance.
    #[arg(long, default_value = "1e-8")]
    pub tol: f64,
    /// Largest allowed |S_numeric - S_closed| at the computed density.
    #[arg(long, default_value = "1e-6")]
    pub entropy_tolerance: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Random generators per scenario in the oracle batch.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = Report::Text)]
    pub report: Report,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub scenario: Scenario,
    pub input: Occupation,
    pub n_grid: Vec<f64>,
    pub lambda_grid: Vec<f64>,
    pub tolerance: f64,
    pub format: Format,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsConfig {
    pub profile: ScaleFactorProfile,
    pub mass: f64,
    pub momenta: Vec<[f64; 3]>,
    pub tol: f64,
    pub entropy_tolerance: f64,
    pub format: Format,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub samples: usize,
    pub report: Report,
    pub workers: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: DEFAULT_SEED, samples: 100, report: Report::Text, workers: 0 }
    }
}

fn positive_tolerance(name: &str, v: f64) -> Result<f64, CliError> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(CliError::Usage(format!("{name} must be positive, got {v}")));
    }
    Ok(v)
}

impl SweepConfig {
    pub fn from_args(a: &SweepArgs) -> Result<Self, CliError> {
        let scenario = a.scenario;
        let n_max = scenario.n_max();
        let n_spec = a.n.clone().unwrap_or_else(|| format!("0:{n_max}:0.1"));
        let n_grid = parse_grid(&n_spec)?;
        if n_grid.is_empty() {
            return Err(CliError::Usage("empty n grid".into()));
        }
        if let Some(n) = n_grid.iter().find(|n| !(0.0..=n_max).contains(*n)) {
            return Err(CliError::Usage(format!("n = {n} outside [0, {n_max}] for scenario {scenario}")));
        }
        let lambda_grid = parse_grid(&a.lambda)?;
        if scenario == Scenario::ChargeOnly && lambda_grid.is_empty() {
            return Err(CliError::Usage("empty lambda grid".into()));
        }
        if let Some(l) = lambda_grid.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(CliError::Usage(format!("lambda = {l} outside [0, 1]")));
        }
        Ok(SweepConfig {
            scenario,
            input: parse_state(&a.state, scenario)?,
            n_grid,
            lambda_grid,
            tolerance: positive_tolerance("tolerance", a.tolerance)?,
            format: a.format,
            workers: a.run.workers,
        })
    }
}

fn parse_direction(s: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("direction {s:?} is not x,y,z")))?;
    let [x, y, z] = parts[..] else {
        return Err(CliError::Usage(format!("direction {s:?} is not x,y,z")));
    };
    let norm = (x * x + y * y + z * z).sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(CliError::Usage("direction must be a nonzero finite vector".into()));
    }
    Ok([x / norm, y / norm, z / norm])
}

impl DynamicsConfig {
    pub fn from_args(a: &DynamicsArgs) -> Result<Self, CliError> {
        let profile = match a.profile {
            ProfileFamily::Constant => ScaleFactorProfile::constant(a.a0),
            ProfileFamily::Tanh => ScaleFactorProfile::tanh(a.epsilon, a.rho),
        }
        .map_err(|e| CliError::Usage(e.to_string()))?;
        let direction = parse_direction(&a.direction)?;
        let magnitudes = parse_grid(&a.p)?;
        if magnitudes.is_empty() {
            return Err(CliError::Usage("empty momentum grid".into()));
        }
        if let Some(p) = magnitudes.iter().find(|p| !(**p >= 0.0)) {
            return Err(CliError::Usage(format!("momentum magnitude {p} is negative")));
        }
        ModeParameters::new(direction, a.mass).map_err(|e| CliError::Usage(e.to_string()))?;
        let tol = positive_tolerance("tol", a.tol)?;
        if !(pairent_core::dynamics::MIN_TOL..=pairent_core::dynamics::MAX_TOL).contains(&tol) {
            return Err(CliError::Usage(format!("tol {tol:e} outside [1e-12, 1e-6]")));
        }
        Ok(DynamicsConfig {
            profile,
            mass: a.mass,
            momenta: magnitudes.iter().map(|p| direction.map(|d| d * p)).collect(),
            tol,
            entropy_tolerance: positive_tolerance("entropy-tolerance", a.entropy_tolerance)?,
            format: a.format,
            workers: a.run.workers,
        })
    }
}

impl VerifyConfig {
    pub fn from_args(a: &VerifyArgs) -> Result<Self, CliError> {
        if a.samples == 0 {
            return Err(CliError::Usage("samples must be at least 1".into()));
        }
        Ok(VerifyConfig { seed: a.seed, samples: a.samples, report: a.report, workers: a.run.workers })
    }
}

/// Turns `key=value` lines into `--key value` arguments. Blank lines and
/// lines starting with `#` are skipped; a `command` key names the
/// subcommand.
pub fn config_file_args(text: &str) -> Result<(Option<String>, Vec<String>), CliError> {
    let mut command = None;
    let mut args = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim().to_string();
        if key == "command" {
            command = Some(value);
        } else if key == "config" {
            return Err(CliError::Usage("config files cannot include other config files".into()));
        } else {
            args.push(format!("--{key}"));
            args.push(value);
        }
    }
    Ok((command, args))
}

const COMMANDS: [&str; 3] = ["sweep", "dynamics", "verify"];

/// Splices config-file arguments into `argv` right after the subcommand so
/// that explicit flags, which come later, override them.
pub fn expand_config(argv: &[String]) -> Result<Vec<String>, CliError> {
    let mut path = None;
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            path = it.next().cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(argv.to_vec());
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
    let (command, extra) = config_file_args(&text)?;
    let mut out = vec![argv.first().cloned().unwrap_or_else(|| "pairent".into())];
    let rest = &argv[1.min(argv.len())..];
    let (sub, tail) = match rest.first() {
        Some(s) if COMMANDS.contains(&s.as_str()) => (s.clone(), &rest[1..]),
        _ => (
            command.ok_or_else(|| CliError::Usage("no subcommand given on the command line or in the config".into()))?,
            rest,
        ),
    };
    out.push(sub);
    out.extend(extra);
    out.extend(tail.iter().cloned());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let (cmd, args) = config_file_args("# comment\ncommand = sweep\nscenario=charge\n\nn_grid = 1\n").unwrap();
        assert_eq!(cmd.as_deref(), Some("sweep"));
        assert_eq!(args, vec!["--scenario", "charge", "--n-grid", "1"]);
        assert!(config_file_args("oops").is_err());
    }

    #[test]
    fn direction_is_normalised() {
        let d = parse_direction("0, 3, 4").unwrap();
        assert_eq!(d, [0.0, 0.6, 0.8]);
        assert!(parse_direction("0,0,0").is_err());
        assert!(parse_direction("1,2").is_err());
    }
}
