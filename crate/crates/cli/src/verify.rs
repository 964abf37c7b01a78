//! The identity and invariant suite behind `pairent verify`.

use std::f64::consts::PI;

use pairent_core::bogolyubov::{
    cross_term_identity, determinant_combination, mu_nu_from_theta, mu_nu_residuals, theta_from_coefficients,
    validate, BetaPhases, BogolyubovCoefficients, DensityParameters, Scenario, ThetaMatrix,
};
use pairent_core::dynamics::{solve_mode_point, ModeParameters, ScaleFactorProfile, TauSpan};
use pairent_core::entanglement::{
    antiparticle_entropy, entropy_excited_closed_form, entropy_numeric, entropy_vacuum_closed_form, evolved_state,
    particle_entropy, spin_spinless_relation,
};
use pairent_core::fock::{annihilators, FockState, Occupation};
use pairent_core::linalg::{anticommutator, commutator, max_abs};
use pairent_core::squeeze::{
    angular_momentum_operator, apply_decoupled, charge_operator, closed_form_expansion, conjugate_all_modes,
    in_state_expansion, pair_creation_operator, squeeze_unitary, unitarity_defect,
};
use pairent_core::{Matrix, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Report, VerifyConfig};
use crate::output::json_string;
use crate::{with_workers, CliError, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    /// Passes when the residual is at most the tolerance.
    #[serde(rename = "<=")]
    AtMost,
    /// Passes when the value exceeds the threshold (a witness).
    #[serde(rename = ">")]
    Exceeds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub description: &'static str,
    pub value: Option<f64>,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub seed: u64,
    pub samples: usize,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
}

struct Check {
    id: String,
    description: &'static str,
    threshold: f64,
    comparison: Comparison,
    run: Box<dyn Fn() -> Result<f64> + Send + Sync>,
}

fn check(
    id: impl Into<String>,
    description: &'static str,
    threshold: f64,
    run: impl Fn() -> Result<f64> + Send + Sync + 'static,
) -> Check {
    Check { id: id.into(), description, threshold, comparison: Comparison::AtMost, run: Box::new(run) }
}

fn witness(
    id: impl Into<String>,
    description: &'static str,
    threshold: f64,
    run: impl Fn() -> Result<f64> + Send + Sync + 'static,
) -> Check {
    Check { id: id.into(), description, threshold, comparison: Comparison::Exceeds, run: Box::new(run) }
}

fn evaluate(c: &Check) -> CheckRecord {
    let (value, error) = match (c.run)() {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let passed = match (value, c.comparison) {
        (Some(v), Comparison::AtMost) => v <= c.threshold,
        (Some(v), Comparison::Exceeds) => v > c.threshold,
        (None, _) => false,
    };
    CheckRecord {
        id: c.id.clone(),
        description: c.description,
        value,
        threshold: c.threshold,
        comparison: c.comparison,
        passed,
        error,
    }
}

const SPINFUL: [Scenario; 2] = [Scenario::ChargeOnly, Scenario::ChargeAndAngularMomentum];

/// Fixed phases used for deterministic grid checks.
const GRID_PHASES: BetaPhases = BetaPhases { up_up: 0.3, up_down: 1.1, global: 0.7 };

fn coeffs(sc: Scenario, n: f64, lambda: f64) -> Result<BogolyubovCoefficients> {
    BogolyubovCoefficients::from_density(DensityParameters::new(n, lambda).with_phases(GRID_PHASES), sc)
}

/// `(n, λ)` grid: `n` in steps of 0.25 up to `n_max`, `λ` in steps of 0.1.
fn parameter_grid(sc: Scenario) -> Vec<(f64, f64)> {
    let ns = (0..=(sc.n_max() * 4.0) as usize).map(|i| i as f64 * 0.25);
    let lambdas: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    ns.flat_map(|n| lambdas.iter().map(move |&l| (n, l))).collect()
}

fn n_grid_41(sc: Scenario) -> Vec<f64> {
    (0..=40).map(|i| i as f64 * sc.n_max() / 40.0).collect()
}

fn max_over<I: IntoIterator<Item = Result<f64>>>(it: I) -> Result<f64> {
    let mut m: f64 = 0.0;
    for v in it {
        let v = v?;
        // NaN must fail the check.
        m = if v.is_nan() { f64::NAN } else { m.max(v) };
    }
    Ok(m)
}

/// Seeded coefficient sets, `samples` per scenario, with `n <= 0.95 n_max`.
pub fn random_coefficients(seed: u64, samples: usize, sc: Scenario) -> Vec<BogolyubovCoefficients> {
    let stream = match sc {
        Scenario::ChargeOnly => 1,
        Scenario::ChargeAndAngularMomentum => 2,
        Scenario::Spinless => 3,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..samples).map(|_| BogolyubovCoefficients::random(&mut rng, sc, 0.95)).collect()
}

fn random_theta(rng: &mut ChaCha8Rng, n: usize) -> ThetaMatrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let z = C64::from_polar(rng.random::<f64>() * 1.5, rng.random::<f64>() * 2.0 * PI);
            m[(i, j)] = z;
            m[(j, i)] = -z;
        }
    }
    ThetaMatrix::new(m).expect("constructed antisymmetric")
}

fn decoupled_gap(k: &BogolyubovCoefficients) -> Result<f64> {
    let theta = theta_from_coefficients(k)?;
    let u = squeeze_unitary(k)?;
    let n = k.scenario.n_modes();
    max_over((0..1u32 << n).map(|x| {
        let psi = FockState::basis(n, Occupation(x))?;
        let dec = apply_decoupled(&theta, &psi)?;
        let dense = psi.evolve(&u)?;
        Ok((dec.amplitudes() - dense.amplitudes()).iter().fold(0.0, |m: f64, z| m.max(z.norm())))
    }))
}

fn checks(cfg: &VerifyConfig) -> Vec<Check> {
    let seed = cfg.seed;
    let samples = cfg.samples;
    let mut out = vec![
        check("ladder_anticommutators", "{f_i, f_j†} = δ_ij and {f_i, f_j} = 0 on 1 to 4 modes", 0.0, || {
            max_over((1..=4).map(|n| {
                let f = annihilators(n)?;
                let dim = 1 << n;
                let mut worst: f64 = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let id = if i == j { Matrix::identity(dim, dim) } else { Matrix::zeros(dim, dim) };
                        worst = worst.max(max_abs(&(anticommutator(&f[i], &f[j].adjoint()) - id)));
                        worst = worst.max(max_abs(&anticommutator(&f[i], &f[j])));
                    }
                }
                Ok(worst)
            }))
        }),
    ];

    for sc in Scenario::ALL {
        out.push(check(
            format!("coefficient_constraints[{sc}]"),
            "normalisation, orthogonality and sparsity of density-parameterised coefficients",
            1e-12,
            move || max_over(parameter_grid(sc).into_iter().map(|(n, l)| Ok(validate(&coeffs(sc, n, l)?).max_residual()))),
        ));
    }
    out.push(check("cross_terms", "off-diagonal reduced-state combinations vanish (charge)", 1e-12, || {
        max_over(parameter_grid(Scenario::ChargeOnly).into_iter().map(|(n, l)| {
            let (x, y) = cross_term_identity(&coeffs(Scenario::ChargeOnly, n, l)?)?;
            Ok(x.norm().max(y.norm()))
        }))
    }));
    for sc in SPINFUL {
        out.push(check(
            format!("determinant_modulus[{sc}]"),
            "|β*↓↑ β*↑↓ - β*↓↓ β*↑↑| = |β↑↓|² + |β↑↑|²",
            1e-12,
            move || max_over(parameter_grid(sc).into_iter().map(|(n, l)| Ok(determinant_combination(&coeffs(sc, n, l)?)?.modulus_residual()))),
        ));
    }
    out.push(check("determinant_ratio_form", "determinant combination equals its ratio closed form where defined", 1e-12, || {
        max_over(parameter_grid(Scenario::ChargeOnly).into_iter().map(|(n, l)| {
            Ok(determinant_combination(&coeffs(Scenario::ChargeOnly, n, l)?)?.ratio_residual().unwrap_or(0.0))
        }))
    }));

    for sc in Scenario::ALL {
        out.push(check(
            format!("theta_modulus[{sc}]"),
            "|θ| = arccos(A)·I for the generator built from the coefficients",
            1e-12,
            move || {
                max_over(parameter_grid(sc).into_iter().filter(|(n, _)| *n < sc.n_max()).map(|(n, l)| {
                    let k = coeffs(sc, n, l)?;
                    let th = theta_from_coefficients(&k)?;
                    let r = k.amplitude.acos();
                    Ok(max_abs(&(th.modulus() - Matrix::identity(sc.n_modes(), sc.n_modes()).scale(r))))
                }))
            },
        ));
        out.push(check(
            format!("mu_nu_from_theta[{sc}]"),
            "μ = cos|θ|, ν = -sin|θ| |θ|⁻¹ θ reproduce the coefficient pattern",
            1e-10,
            move || {
                max_over(random_coefficients(seed, samples, sc).iter().map(|k| {
                    let (mu, nu) = mu_nu_from_theta(&theta_from_coefficients(k)?);
                    let (mu0, nu0) = k.mode_matrices();
                    Ok(max_abs(&(mu - mu0)).max(max_abs(&(nu - nu0))))
                }))
            },
        ));
        out.push(check(
            format!("conjugation[{sc}]"),
            "U f_j U† decomposes into the ladder span with the expected (μ, ν)",
            1e-10,
            move || {
                max_over(random_coefficients(seed, samples.min(25), sc).iter().map(|k| {
                    let (mu, nu) = conjugate_all_modes(&squeeze_unitary(k)?, sc.n_modes())?;
                    let (mu0, nu0) = k.mode_matrices();
                    Ok(max_abs(&(mu - mu0)).max(max_abs(&(nu - nu0))))
                }))
            },
        ));
        out.push(check(
            format!("unitarity[{sc}]"),
            "U U† = I for seeded random generators",
            1e-12,
            move || max_over(random_coefficients(seed, samples, sc).iter().map(|k| Ok(unitarity_defect(&squeeze_unitary(k)?)))),
        ));
        out.push(check(
            format!("decoupled_vs_dense[{sc}]"),
            "creation·number·annihilation factorisation equals exp(L) on every basis input",
            1e-10,
            move || max_over(random_coefficients(seed, samples, sc).iter().map(decoupled_gap)),
        ));
        out.push(check(
            format!("in_state_expansions[{sc}]"),
            "closed-form in-state expansions match the dense unitary",
            1e-10,
            move || {
                max_over(random_coefficients(seed, samples.min(25), sc).iter().flat_map(|k| {
                    (0..1u32 << sc.n_modes()).filter_map(move |x| {
                        closed_form_expansion(k, Occupation(x)).map(|cf| Ok(cf?.max_difference(&in_state_expansion(k, Occupation(x))?)))
                    })
                }))
            },
        ));
        out.push(check(
            format!("charge_conservation[{sc}]"),
            "[U, Q] = 0",
            1e-12,
            move || {
                let q = charge_operator(sc)?;
                max_over(random_coefficients(seed, samples, sc).iter().map(|k| Ok(max_abs(&commutator(&squeeze_unitary(k)?, &q)))))
            },
        ));
    }
    out.push(check("mu_nu_canonical", "μμ† + νν† = I and μνᵀ + νμᵀ = 0 for general antisymmetric θ", 1e-12, move || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(4);
        max_over((0..samples).map(|_| {
            let (mu, nu) = mu_nu_from_theta(&random_theta(&mut rng, 4));
            let (a, b) = mu_nu_residuals(&mu, &nu);
            Ok(a.max(b))
        }))
    }));
    out.push(check("pair_creation_nilpotent", "(Σ θ_ij f†_i f†_j)³ = 0", 0.0, move || {
        max_over(random_coefficients(seed, samples, Scenario::ChargeOnly).iter().map(|k| {
            let a = pair_creation_operator(&theta_from_coefficients(k)?)?;
            Ok(max_abs(&(&a * &a * &a)))
        }))
    }));
    out.push(check("pair_creation_square", "(A+)² = 2(ϑ2ϑ4 - ϑ1ϑ3) f†↑ f†↓ f†↑ f†↓ on the vacuum", 1e-14, move || {
        max_over(random_coefficients(seed, samples, Scenario::ChargeOnly).iter().map(|k| {
            let th = theta_from_coefficients(k)?;
            let a = pair_creation_operator(&th)?;
            let t = th.matrix();
            let expected = (t[(0, 3)] * t[(1, 2)] - t[(0, 2)] * t[(1, 3)]) * 2.0;
            let sq = &a * &a;
            let mut rest = sq.clone();
            rest[(15, 0)] = C64::new(0.0, 0.0);
            Ok((sq[(15, 0)] - expected).norm().max(max_abs(&rest)))
        }))
    }));
    out.push(check("angular_momentum_conservation", "[U, J_z] = 0 with angular momentum conserved", 1e-12, move || {
        let jz = angular_momentum_operator(Scenario::ChargeAndAngularMomentum)?;
        max_over(
            random_coefficients(seed, samples, Scenario::ChargeAndAngularMomentum)
                .iter()
                .map(|k| Ok(max_abs(&commutator(&squeeze_unitary(k)?, &jz)))),
        )
    }));
    out.push(witness("angular_momentum_violation", "[U, J_z] ≠ 0 for charge-only creation with |β↑↑| >= 0.3", 1e-3, || {
        let k = coeffs(Scenario::ChargeOnly, 2.0, 0.5)?;
        let jz = angular_momentum_operator(Scenario::ChargeOnly)?;
        Ok(max_abs(&commutator(&squeeze_unitary(&k)?, &jz)))
    }));

    for sc in Scenario::ALL {
        out.push(check(
            format!("vacuum_entropy[{sc}]"),
            "numeric vacuum entropy equals the closed form on a 41-point grid",
            1e-10,
            move || {
                max_over(n_grid_41(sc).into_iter().map(|n| {
                    let num = entropy_numeric(&coeffs(sc, n, 0.5)?, Occupation::VACUUM)?;
                    Ok((num - entropy_vacuum_closed_form(n, sc)?).abs())
                }))
            },
        ));
        out.push(check(
            format!("excited_entropy_catalogue[{sc}]"),
            "numeric entropy of every basis input equals its catalogued closed form",
            1e-10,
            move || {
                let lambdas = if sc == Scenario::ChargeOnly { vec![0.1, 0.5, 0.9] } else { vec![pairent_core::entanglement::recorded_lambda(sc, 0.0)] };
                let points: Vec<(f64, f64)> = [0.25, 0.5, 0.75]
                    .iter()
                    .flat_map(|f| lambdas.iter().map(move |&l| (f * sc.n_max(), l)))
                    .collect();
                max_over(points.into_iter().flat_map(|(n, l)| {
                    (0..1u32 << sc.n_modes()).map(move |x| {
                        let num = entropy_numeric(&coeffs(sc, n, l)?, Occupation(x))?;
                        let closed = entropy_excited_closed_form(Occupation(x), n, l, sc)?
                            .ok_or_else(|| pairent_core::Error::Consistency(format!("state {x} not catalogued")))?;
                        Ok((num - closed).abs())
                    })
                }))
            },
        ));
    }
    out.push(check("spin_spinless_scaling", "S_spin(n) = 2 S_spinless(n/2) on a 41-point grid", 1e-12, || {
        max_over(n_grid_41(Scenario::ChargeOnly).into_iter().map(|n| Ok(spin_spinless_relation(n)?.2)))
    }));
    out.push(check("vacuum_entropy_lambda_independence", "charge-only vacuum entropy does not depend on λ", 1e-10, || {
        max_over(n_grid_41(Scenario::ChargeOnly).into_iter().map(|n| {
            let s: Vec<f64> = [0.0, 0.25, 0.5, 0.75, 1.0]
                .iter()
                .map(|&l| entropy_numeric(&coeffs(Scenario::ChargeOnly, n, l)?, Occupation::VACUUM))
                .collect::<Result<_>>()?;
            let (lo, hi) = s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            Ok(hi - lo)
        }))
    }));
    out.push(witness("mixed_pair_lambda_dependence", "|↑;↑> entropy differs between λ = 0.1 and λ = 0.9 at n = 2", 0.01, || {
        let up_up = Occupation(0b0101);
        let a = entropy_numeric(&coeffs(Scenario::ChargeOnly, 2.0, 0.1)?, up_up)?;
        let b = entropy_numeric(&coeffs(Scenario::ChargeOnly, 2.0, 0.9)?, up_up)?;
        Ok((a - b).abs())
    }));
    out.push(check("reduced_entropy_symmetry", "particle and antiparticle reductions have equal entropy", 1e-10, move || {
        max_over(Scenario::ALL.into_iter().flat_map(|sc| {
            random_coefficients(seed, 10, sc).into_iter().flat_map(move |k| {
                (0..1u32 << sc.n_modes()).map(move |x| {
                    let psi = evolved_state(&k, Occupation(x))?;
                    Ok((particle_entropy(&psi)? - antiparticle_entropy(&psi)?).abs())
                })
            })
        }))
    }));

    let tol = 1e-8;
    out.push(check("dynamics_constant_profile", "no creation without expansion", 1e-8, move || {
        let profile = ScaleFactorProfile::constant(1.0)?;
        max_over([0.1, 1.0, 10.0].into_iter().map(|p| {
            Ok(solve_mode_point(&ModeParameters::along_z(p, 1.0)?, &profile, TauSpan::Auto, tol)?.density)
        }))
    }));
    out.push(check("dynamics_normalization", "A² + Σ|β|² = 1 for tanh expansion (ε = ρ = m = 1)", 10.0 * tol, move || {
        let profile = ScaleFactorProfile::tanh(1.0, 1.0)?;
        max_over([0.1, 0.3, 1.0, 3.0, 10.0].into_iter().map(|p| {
            let params = ModeParameters::new([0.6 * p, 0.0, 0.8 * p], 1.0)?;
            Ok(solve_mode_point(&params, &profile, TauSpan::Auto, tol)?.dressed.normalization_residual)
        }))
    }));
    out.push(check("dynamics_end_to_end_entropy", "dressed vacuum entropy equals the closed form at n(p)", 1e-6, move || {
        let profile = ScaleFactorProfile::tanh(1.0, 1.0)?;
        max_over([0.3, 1.0, 3.0].into_iter().map(|p| {
            let point = solve_mode_point(&ModeParameters::new([0.6 * p, 0.0, 0.8 * p], 1.0)?, &profile, TauSpan::Auto, tol)?;
            let k = &point.dressed.coefficients;
            let num = entropy_numeric(k, Occupation::VACUUM)?;
            Ok((num - entropy_vacuum_closed_form(point.density.min(k.scenario.n_max()), k.scenario)?).abs())
        }))
    }));
    out.push(check("dynamics_wronskian", "Wronskian of the two mode solutions stays 2iE_in", 100.0 * tol, move || {
        let profile = ScaleFactorProfile::tanh(1.0, 1.0)?;
        max_over([0.3, 1.0, 3.0].into_iter().map(|p| {
            Ok(solve_mode_point(&ModeParameters::along_z(p, 1.0)?, &profile, TauSpan::Auto, tol)?.wronskian_drift)
        }))
    }));
    out
}

pub fn run_verify(cfg: &VerifyConfig) -> std::result::Result<VerifyReport, CliError> {
    let list = checks(cfg);
    let records: Vec<CheckRecord> = with_workers(cfg.workers, || list.par_iter().map(evaluate).collect())?;
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        seed: cfg.seed,
        samples: cfg.samples,
        passed: records.iter().all(|r| r.passed),
        checks: records,
    })
}

pub fn render_report(cfg: &VerifyConfig, report: &VerifyReport) -> String {
    match cfg.report {
        Report::Json => json_string(report),
        Report::Text => {
            let width = report.checks.iter().map(|c| c.id.chars().count()).max().unwrap_or(0);
            let mut s = String::new();
            for c in &report.checks {
                let value = match (c.value, &c.error) {
                    (Some(v), _) => format!("{v:.3e}"),
                    (None, Some(e)) => format!("error: {e}"),
                    (None, None) => "-".into(),
                };
                let op = match c.comparison {
                    Comparison::AtMost => "<=",
                    Comparison::Exceeds => ">",
                };
                let pad = width - c.id.chars().count();
                s.push_str(&format!(
                    "{} {}{}  {:>10} {} {:.1e}\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.id,
                    " ".repeat(pad),
                    value,
                    op,
                    c.threshold
                ));
            }
            let passed = report.checks.iter().filter(|c| c.passed).count();
            s.push_str(&format!("{passed}/{} checks passed (seed {})\n", report.checks.len(), report.seed));
            s
        }
    }
}
