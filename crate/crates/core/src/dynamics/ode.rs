use std::f64::consts::PI;

use ode_solvers::dop_shared::IntegrationError;
use ode_solvers::{Dopri5, OutputType, SVector, System};
use serde::{Deserialize, Serialize};

use super::profile::ScaleFactorProfile;
use crate::{Error, Result, C64};

pub const MIN_TOL: f64 = 1e-12;
pub const MAX_TOL: f64 = 1e-6;

/// Step control runs at `tol · SOLVER_TOL_FACTOR`, which keeps the
/// accumulated error over the span near `tol`.
pub const SOLVER_TOL_FACTOR: f64 = 0.1;

/// Momentum and mass of one Dirac mode, in conformal units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeParameters {
    pub momentum: [f64; 3],
    pub mass: f64,
}

/// Asymptotic masses `M = m a` and energies `E = sqrt(p² + M²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeEnergies {
    pub m_in: f64,
    pub m_out: f64,
    pub e_in: f64,
    pub e_out: f64,
}

impl ModeParameters {
    pub fn new(momentum: [f64; 3], mass: f64) -> Result<Self> {
        if !momentum.iter().all(|p| p.is_finite()) || !(mass >= 0.0 && mass.is_finite()) {
            return Err(Error::Argument(format!("invalid mode parameters p = {momentum:?}, m = {mass}")));
        }
        Ok(ModeParameters { momentum, mass })
    }

    /// Momentum `|p|` along the z axis.
    pub fn along_z(p: f64, mass: f64) -> Result<Self> {
        ModeParameters::new([0.0, 0.0, p], mass)
    }

    pub fn p_squared(&self) -> f64 {
        self.momentum.iter().map(|p| p * p).sum()
    }

    pub fn p_norm(&self) -> f64 {
        self.p_squared().sqrt()
    }

    pub fn energies(&self, profile: &ScaleFactorProfile) -> ModeEnergies {
        let p2 = self.p_squared();
        let m_in = self.mass * profile.a_in();
        let m_out = self.mass * profile.a_out();
        ModeEnergies {
            m_in,
            m_out,
            e_in: (p2 + m_in * m_in).sqrt(),
            e_out: (p2 + m_out * m_out).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TauSpan {
    /// Endpoints placed where the profile is within `tol` of its limits,
    /// padded by two oscillation periods.
    Auto,
    Explicit { start: f64, end: f64 },
}

/// Solution of
///
/// ```text
/// f'' + (p² + M² - i M') f = 0,      M(τ) = m a(τ),
/// ```
///
/// started as the positive-frequency wave `f = e^{-i E_in τ}`. The partner
/// `g` starts as `e^{+i E_in τ}` and solves the same equation; their
/// Wronskian `f g' - f' g` is `2 i E_in` for all `τ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSolution {
    pub params: ModeParameters,
    pub profile: ScaleFactorProfile,
    pub energies: ModeEnergies,
    pub tol: f64,
    /// Accepted step points.
    pub tau: Vec<f64>,
    pub f: Vec<C64>,
    pub f_dot: Vec<C64>,
    /// Largest `|W(τ) - W(τ0)| / |W(τ0)|` over the accepted steps.
    pub wronskian_drift: f64,
    /// Largest `|f|²` over the accepted steps.
    pub max_modulus_sq: f64,
    pub accepted_steps: u32,
    pub rejected_steps: u32,
    pub evaluations: u32,
}

impl ModeSolution {
    pub fn tau_end(&self) -> f64 {
        *self.tau.last().expect("solution grid is never empty")
    }
}

type State = SVector<f64, 8>;

/// The solver runs in `s = τ - τ_start`: its dense output assumes a
/// non-negative independent variable.
struct ModeSystem {
    p2: f64,
    mass: f64,
    profile: ScaleFactorProfile,
    tau_start: f64,
}

impl System<f64, State> for ModeSystem {
    fn system(&self, s: f64, y: &State, dy: &mut State) {
        let tau = s + self.tau_start;
        let m = self.mass * self.profile.a(tau);
        let m_dot = self.mass * self.profile.a_dot(tau);
        let k = C64::new(self.p2 + m * m, -m_dot);
        for base in [0, 4] {
            let f = C64::new(y[base], y[base + 1]);
            let acc = -k * f;
            dy[base] = y[base + 2];
            dy[base + 1] = y[base + 3];
            dy[base + 2] = acc.re;
            dy[base + 3] = acc.im;
        }
    }
}

fn pack(f: C64, fd: C64, g: C64, gd: C64) -> State {
    State::from_column_slice(&[f.re, f.im, fd.re, fd.im, g.re, g.im, gd.re, gd.im])
}

fn unpack(y: &State) -> [C64; 4] {
    [
        C64::new(y[0], y[1]),
        C64::new(y[2], y[3]),
        C64::new(y[4], y[5]),
        C64::new(y[6], y[7]),
    ]
}

/// Integration span for `TauSpan::Auto`, or the validated explicit span.
pub fn resolve_span(
    params: &ModeParameters,
    profile: &ScaleFactorProfile,
    span: TauSpan,
    tol: f64,
) -> Result<(f64, f64)> {
    match span {
        TauSpan::Auto => {
            let e = params.energies(profile);
            let e_min = e.e_in.min(e.e_out);
            if e_min <= 0.0 {
                return Err(Error::DegenerateMode("zero asymptotic energy".into()));
            }
            let pad = 2.0 * (2.0 * PI / e_min) + 1.0;
            let t = profile.asymptotic_time(tol);
            Ok((-t - pad, t + pad))
        }
        TauSpan::Explicit { start, end } => {
            if !(start < end) || !start.is_finite() || !end.is_finite() {
                return Err(Error::Configuration(format!("invalid span [{start}, {end}]")));
            }
            for tau in [start, end] {
                let dev = profile.asymptotic_deviation(tau);
                if dev >= tol {
                    return Err(Error::Configuration(format!(
                        "span endpoint {tau} is not asymptotic: deviation {dev:e} >= tol {tol:e}"
                    )));
                }
            }
            Ok((start, end))
        }
    }
}

pub fn integrate_mode(
    params: &ModeParameters,
    profile: &ScaleFactorProfile,
    span: TauSpan,
    tol: f64,
) -> Result<ModeSolution> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(Error::Configuration(format!("tolerance {tol:e} outside [{MIN_TOL:e}, {MAX_TOL:e}]")));
    }
    profile.validate()?;
    let energies = params.energies(profile);
    if energies.e_in <= 0.0 {
        return Err(Error::DegenerateMode("zero in-region energy (p = 0 and m = 0)".into()));
    }
    let (start, end) = resolve_span(params, profile, span, tol)?;

    let e = energies.e_in;
    let f0 = C64::from_polar(1.0, -e * start);
    let g0 = f0.conj();
    let y0 = pack(f0, C64::new(0.0, -e) * f0, g0, C64::new(0.0, e) * g0);

    let system = ModeSystem { p2: params.p_squared(), mass: params.mass, profile: *profile, tau_start: start };
    let mut solver = Dopri5::from_param(
        system,
        0.0,
        end - start,
        0.0,
        y0,
        tol * SOLVER_TOL_FACTOR,
        tol * SOLVER_TOL_FACTOR,
        0.9,
        0.04,
        0.2,
        10.0,
        end - start,
        0.0,
        10_000_000,
        u32::MAX,
        OutputType::Sparse,
    );
    let stats = solver.integrate().map_err(|err| match err {
        IntegrationError::StepSizeUnderflow { x } => Error::Integration(format!("step size underflow at tau = {x}")),
        IntegrationError::MaxNumStepReached { x, n_step } => {
            Error::Integration(format!("step limit {n_step} reached at tau = {x}"))
        }
        IntegrationError::StiffnessDetected { x } => Error::Integration(format!("stiffness detected at tau = {x}")),
    })?;

    let w0 = C64::new(0.0, 2.0 * e);
    let mut tau = Vec::with_capacity(solver.x_out().len());
    let mut f = Vec::with_capacity(tau.capacity());
    let mut f_dot = Vec::with_capacity(tau.capacity());
    let mut wronskian_drift: f64 = 0.0;
    let mut max_modulus_sq: f64 = 0.0;
    for (&s, y) in solver.x_out().iter().zip(solver.y_out()) {
        let x = s + start;
        let [fv, fd, gv, gd] = unpack(y);
        if !(fv.re.is_finite() && fv.im.is_finite()) {
            return Err(Error::Integration(format!("non-finite solution at tau = {x}")));
        }
        wronskian_drift = wronskian_drift.max(((fv * gd - fd * gv) - w0).norm() / w0.norm());
        max_modulus_sq = max_modulus_sq.max(fv.norm_sqr());
        tau.push(x);
        f.push(fv);
        f_dot.push(fd);
    }
    Ok(ModeSolution {
        params: *params,
        profile: *profile,
        energies,
        tol,
        tau,
        f,
        f_dot,
        wronskian_drift,
        max_modulus_sq,
        accepted_steps: stats.accepted_steps,
        rejected_steps: stats.rejected_steps,
        evaluations: stats.num_eval,
    })
}
