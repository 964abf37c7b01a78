//! Particle/antiparticle entanglement of in-region states seen from the out
//! region: the von Neumann entropy (in bits) of the particle modes after the
//! antiparticle modes are traced out.

use serde::Serialize;

use crate::bogolyubov::{BogolyubovCoefficients, DensityParameters, Scenario};
use crate::error::argument;
use crate::fock::{outer_product, partial_trace, von_neumann_entropy, FockState, Occupation};
use crate::squeeze::squeeze_unitary;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyResult {
    pub scenario: Scenario,
    pub input: Occupation,
    pub n: f64,
    pub lambda: f64,
    pub s_numeric: f64,
    pub s_closed: Option<f64>,
    pub discrepancy: Option<f64>,
}

/// `-p log2 p - (1-p) log2(1-p)`, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    h(p) + h(1.0 - p)
}

/// Entropy of the particle half of a pure state.
pub fn particle_entropy(state: &FockState) -> Result<f64> {
    let n = state.n_modes();
    let keep: Vec<_> = (0..n / 2).map(crate::fock::Mode).collect();
    Ok(von_neumann_entropy(&partial_trace(&outer_product(state), &keep)?))
}

/// Entropy of the antiparticle half of a pure state.
pub fn antiparticle_entropy(state: &FockState) -> Result<f64> {
    let n = state.n_modes();
    let keep: Vec<_> = (n / 2..n).map(crate::fock::Mode).collect();
    Ok(von_neumann_entropy(&partial_trace(&outer_product(state), &keep)?))
}

/// The in-region state `U |input>_out`.
pub fn evolved_state(coeffs: &BogolyubovCoefficients, input: Occupation) -> Result<FockState> {
    FockState::basis(coeffs.scenario.n_modes(), input)?.evolve(&squeeze_unitary(coeffs)?)
}

pub fn entropy_numeric(coeffs: &BogolyubovCoefficients, input: Occupation) -> Result<f64> {
    particle_entropy(&evolved_state(coeffs, input)?)
}

fn check_n(n: f64, scenario: Scenario) -> Result<()> {
    if !(0.0..=scenario.n_max()).contains(&n) {
        return argument(format!("n = {n} outside [0, {}] for scenario {scenario}", scenario.n_max()));
    }
    Ok(())
}

/// Vacuum entropy: `2 H(n/4)` for the spinful scenarios, `H(n/2)` without
/// spin, `H` the binary entropy.
pub fn entropy_vacuum_closed_form(n: f64, scenario: Scenario) -> Result<f64> {
    check_n(n, scenario)?;
    Ok(match scenario {
        Scenario::Spinless => binary_entropy(n / 2.0),
        _ => 2.0 * binary_entropy(n / 4.0),
    })
}

/// Entropy of `|↑;↑>` (`κ = 1 - λ`) or `|↓;↑>` (`κ = λ`) under charge-only
/// conservation: `2 H((1 + s)/2)` with `s = sqrt(1 - κ n (4 - n)/4)`.
pub fn mixed_pair_entropy(kappa: f64, n: f64) -> f64 {
    let x = kappa * n * (4.0 - n) / 4.0;
    let s = (1.0 - x).max(0.0).sqrt();
    2.0 * binary_entropy((1.0 + s) / 2.0)
}

/// Closed-form entropy of a spinful or spinless basis input, or `None` when
/// no closed form is catalogued for it.
///
/// Spinful catalogue (indices as occupation masks over `a↑ a↓ b↑ b↓`):
/// the vacuum and the full state give `2 H(n/4)`; the charge ±1 states
/// give `H(n/4)`; `|↑↓;0>` and `|0;↑↓>` give 0; `|↑;↑>`, `|↓;↓>` give
/// 0 with angular momentum conserved and [`mixed_pair_entropy`] at
/// `κ = 1 - λ` otherwise; `|↓;↑>`, `|↑;↓>` give `2 H(n/4)` with angular
/// momentum conserved and [`mixed_pair_entropy`] at `κ = λ` otherwise.
/// Spinless: `|0;0>` and `|1;1>` give `H(n/2)`, the other two give 0.
pub fn entropy_excited_closed_form(
    input: Occupation,
    n: f64,
    lambda: f64,
    scenario: Scenario,
) -> Result<Option<f64>> {
    check_n(n, scenario)?;
    if !(0.0..=1.0).contains(&lambda) {
        return argument(format!("lambda = {lambda} outside [0, 1]"));
    }
    if !input.fits(scenario.n_modes()) {
        return argument(format!("occupation {:#b} does not fit scenario {scenario}", input.0));
    }
    let h = binary_entropy(n / 4.0);
    let value = match (scenario, input.bits()) {
        (Scenario::Spinless, 0 | 3) => binary_entropy(n / 2.0),
        (Scenario::Spinless, _) => 0.0,
        (_, 0 | 15) => 2.0 * h,
        (_, 3 | 12) => 0.0,
        (_, 1 | 2 | 4 | 8 | 7 | 11 | 13 | 14) => h,
        (Scenario::ChargeAndAngularMomentum, 5 | 10) => 0.0,
        (Scenario::ChargeAndAngularMomentum, 6 | 9) => 2.0 * h,
        (Scenario::ChargeOnly, 5 | 10) => mixed_pair_entropy(1.0 - lambda, n),
        (Scenario::ChargeOnly, 6 | 9) => mixed_pair_entropy(lambda, n),
        _ => return Ok(None),
    };
    Ok(Some(value))
}

/// `(S_spin(n), 2 S_spinless(n/2), |difference|)`.
pub fn spin_spinless_relation(n: f64) -> Result<(f64, f64, f64)> {
    let lhs = entropy_vacuum_closed_form(n, Scenario::ChargeOnly)?;
    let rhs = 2.0 * entropy_vacuum_closed_form(n / 2.0, Scenario::Spinless)?;
    Ok((lhs, rhs, (lhs - rhs).abs()))
}

/// The `λ` stored in result records: the given value for charge-only
/// coefficients, 1 with angular momentum conserved, 0 without spin.
pub fn recorded_lambda(scenario: Scenario, lambda: f64) -> f64 {
    match scenario {
        Scenario::ChargeOnly => lambda,
        Scenario::ChargeAndAngularMomentum => 1.0,
        Scenario::Spinless => 0.0,
    }
}

/// Numeric and closed-form entropy at one grid point.
pub fn entropy_point(scenario: Scenario, input: Occupation, n: f64, lambda: f64) -> Result<EntropyResult> {
    let lambda = recorded_lambda(scenario, lambda);
    let coeffs = BogolyubovCoefficients::from_density(DensityParameters::new(n, lambda), scenario)?;
    let s_numeric = entropy_numeric(&coeffs, input)?;
    let s_closed = entropy_excited_closed_form(input, n, lambda, scenario)?;
    Ok(EntropyResult {
        scenario,
        input,
        n,
        lambda,
        s_numeric,
        s_closed,
        discrepancy: s_closed.map(|s| (s - s_numeric).abs()),
    })
}

/// One [`EntropyResult`] per `(n, λ)` pair, `n` varying slowest. The λ grid
/// is only used for charge-only coefficients; other scenarios get a single
/// point per `n`.
pub fn sweep(scenario: Scenario, input: Occupation, n_grid: &[f64], lambda_grid: &[f64]) -> Result<Vec<EntropyResult>> {
    if n_grid.is_empty() {
        return argument("empty n grid");
    }
    let lambdas: &[f64] = match scenario {
        Scenario::ChargeOnly if lambda_grid.is_empty() => return argument("empty lambda grid"),
        Scenario::ChargeOnly => lambda_grid,
        _ => &[0.0],
    };
    let mut out = Vec::with_capacity(n_grid.len() * lambdas.len());
    for &n in n_grid {
        for &lambda in lambdas {
            out.push(entropy_point(scenario, input, n, lambda)?);
        }
    }
    Ok(out)
}
