//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero if any fail.

use std::time::{Duration, Instant};

use pairent_cli::config::{Report, VerifyConfig};
use pairent_cli::verify::{random_coefficients, render_report, run_verify};
use pairent_core::bogolyubov::{
    cross_term_identity, determinant_combination, theta_from_coefficients, validate, BetaPhases,
    BogolyubovCoefficients, DensityParameters, Scenario, Spin,
};
use pairent_core::dynamics::{self_convergence, solve_mode_point, ModeParameters, ScaleFactorProfile, TauSpan};
use pairent_core::entanglement::entropy_numeric;
use pairent_core::fock::{FockState, Occupation};
use pairent_core::linalg::{commutator, max_abs};
use pairent_core::squeeze::{
    angular_momentum_operator, apply_decoupled, charge_operator, closed_form_expansion, conjugate_all_modes,
    in_state_expansion, squeeze_unitary, unitarity_defect,
};
use pairent_core::{Error, Result};

const SEED: u64 = 1729;
const PHASES: BetaPhases = BetaPhases { up_up: 0.4, up_down: -1.3, global: 2.1 };
const SPINFUL: [Scenario; 2] = [Scenario::ChargeOnly, Scenario::ChargeAndAngularMomentum];

/// Binary entropy in bits, written out independently of the library.
fn h2(p: f64) -> f64 {
    let t = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    t(p) + t(1.0 - p)
}

fn coeffs(sc: Scenario, n: f64, lambda: f64) -> Result<BogolyubovCoefficients> {
    BogolyubovCoefficients::from_density(DensityParameters::new(n, lambda).with_phases(PHASES), sc)
}

fn grid(hi: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| hi * i as f64 / steps as f64).collect()
}

/// Whether the criterion passed, plus a one-line summary.
type Outcome = Result<(bool, String)>;

fn ac1() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut anchors: f64 = 0.0;
    for sc in SPINFUL {
        for n in grid(4.0, 40) {
            let expected = 2.0 * h2((4.0 - n) / 4.0);
            let s = entropy_numeric(&coeffs(sc, n, 0.5)?, Occupation::VACUUM)?;
            worst = worst.max((s - expected).abs());
            for (at, value) in [(0.0, 0.0), (2.0, 2.0), (4.0, 0.0)] {
                if (n - at).abs() < 1e-12 {
                    anchors = anchors.max((s - value).abs());
                }
            }
        }
    }
    Ok((
        worst <= 1e-10 && anchors <= 1e-10,
        format!("max |S - closed| = {worst:.2e}, anchors {anchors:.2e} (tol 1e-10)"),
    ))
}

fn ac2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut at_one = f64::NAN;
    for n in grid(2.0, 40) {
        let s = entropy_numeric(&coeffs(Scenario::Spinless, n, 0.0)?, Occupation::VACUUM)?;
        worst = worst.max((s - h2(n / 2.0)).abs());
        if (n - 1.0).abs() < 1e-12 {
            at_one = (s - 1.0).abs();
        }
    }
    Ok((
        worst <= 1e-10 && at_one <= 1e-10,
        format!("max |S - closed| = {worst:.2e}, |S(1) - 1| = {at_one:.2e} (tol 1e-10)"),
    ))
}

fn ac3() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in grid(4.0, 40) {
        let spin = entropy_numeric(&coeffs(Scenario::ChargeOnly, n, 0.3)?, Occupation::VACUUM)?;
        let spinless = entropy_numeric(&coeffs(Scenario::Spinless, n / 2.0, 0.0)?, Occupation::VACUUM)?;
        worst = worst.max((spin - 2.0 * spinless).abs());
    }
    Ok((worst <= 1e-12, format!("max |S_spin(n) - 2 S_spinless(n/2)| = {worst:.2e} (tol 1e-12)")))
}

fn ac4() -> Outcome {
    let mut spread: f64 = 0.0;
    let mut expansion: f64 = 0.0;
    for n in grid(4.0, 40) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let k = coeffs(Scenario::ChargeOnly, n, lambda)?;
            let s = entropy_numeric(&k, Occupation::VACUUM)?;
            lo = lo.min(s);
            hi = hi.max(s);
            let closed = closed_form_expansion(&k, Occupation::VACUUM).expect("vacuum is catalogued")?;
            expansion = expansion.max(closed.max_difference(&in_state_expansion(&k, Occupation::VACUUM)?));
        }
        spread = spread.max(hi - lo);
    }
    Ok((
        spread <= 1e-10 && expansion <= 1e-10,
        format!("λ spread = {spread:.2e}, vacuum expansion vs dense = {expansion:.2e} (tol 1e-10)"),
    ))
}

fn ac5() -> Outcome {
    let (mut decoupled, mut unitary, mut conj): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut count = 0;
    for sc in Scenario::ALL {
        for k in random_coefficients(SEED, 100, sc) {
            let theta = theta_from_coefficients(&k)?;
            let u = squeeze_unitary(&k)?;
            unitary = unitary.max(unitarity_defect(&u));
            let n = sc.n_modes();
            for x in 0..1u32 << n {
                let psi = FockState::basis(n, Occupation(x))?;
                let diff = apply_decoupled(&theta, &psi)?.amplitudes() - psi.evolve(&u)?.amplitudes();
                decoupled = decoupled.max(diff.iter().fold(0.0, |m: f64, z| m.max(z.norm())));
            }
            let (mu, nu) = conjugate_all_modes(&u, n)?;
            let (mu0, nu0) = k.mode_matrices();
            conj = conj.max(max_abs(&(mu - mu0)).max(max_abs(&(nu - nu0))));
            count += 1;
        }
    }
    Ok((
        decoupled <= 1e-10 && unitary <= 1e-12 && conj <= 1e-10,
        format!("{count} generators: decoupled {decoupled:.2e}, UU† - I {unitary:.2e}, conjugation {conj:.2e}"),
    ))
}

fn ac6() -> Outcome {
    let mut worst: f64 = 0.0;
    for sc in Scenario::ALL {
        for n in grid(sc.n_max(), 40) {
            for lambda in grid(1.0, 20) {
                let k = coeffs(sc, n, lambda)?;
                worst = worst.max(validate(&k).max_residual());
                if sc == Scenario::ChargeOnly {
                    let (x, y) = cross_term_identity(&k)?;
                    worst = worst.max(x.norm()).max(y.norm());
                }
                if sc.is_spinful() {
                    let d = determinant_combination(&k)?;
                    worst = worst.max(d.modulus_residual()).max(d.ratio_residual().unwrap_or(0.0));
                }
            }
        }
    }
    Ok((worst <= 1e-12, format!("max constraint residual = {worst:.2e} (tol 1e-12)")))
}

fn ac7() -> Outcome {
    let charge_one = [0b0001, 0b0010, 0b0100, 0b1000, 0b0111, 0b1011, 0b1101, 0b1110];
    let charge_two = [0b0011, 0b1100];
    let up_up = Occupation(0b0101);
    let down_up = Occupation(0b0110);
    let mut worst: f64 = 0.0;
    for sc in SPINFUL {
        for n in [0.5, 1.0, 2.0, 3.0, 3.5] {
            let k = coeffs(sc, n, 0.5)?;
            for x in charge_two {
                worst = worst.max(entropy_numeric(&k, Occupation(x))?.abs());
            }
            for x in charge_one {
                worst = worst.max((entropy_numeric(&k, Occupation(x))? - h2(n / 4.0)).abs());
            }
            if sc == Scenario::ChargeAndAngularMomentum {
                worst = worst.max(entropy_numeric(&k, up_up)?.abs());
                worst = worst.max((entropy_numeric(&k, down_up)? - 2.0 * h2(n / 4.0)).abs());
            }
        }
    }
    let mut spread = f64::INFINITY;
    for input in [up_up, down_up] {
        let a = entropy_numeric(&coeffs(Scenario::ChargeOnly, 2.0, 0.1)?, input)?;
        let b = entropy_numeric(&coeffs(Scenario::ChargeOnly, 2.0, 0.9)?, input)?;
        spread = spread.min((a - b).abs());
    }
    Ok((
        worst <= 1e-10 && spread > 0.01,
        format!("catalogue max error {worst:.2e} (tol 1e-10), min λ spread {spread:.3} (> 0.01)"),
    ))
}

fn ac8() -> Outcome {
    let mut charge: f64 = 0.0;
    let mut jz: f64 = 0.0;
    for sc in Scenario::ALL {
        let q = charge_operator(sc)?;
        for k in random_coefficients(SEED, 50, sc) {
            let u = squeeze_unitary(&k)?;
            charge = charge.max(max_abs(&commutator(&u, &q)));
            if sc == Scenario::ChargeAndAngularMomentum {
                jz = jz.max(max_abs(&commutator(&u, &angular_momentum_operator(sc)?)));
            }
        }
    }
    let k = coeffs(Scenario::ChargeOnly, 2.0, 0.5)?;
    let beta_up_up = k.beta(Spin::Up, Spin::Up).norm();
    let witness = max_abs(&commutator(&squeeze_unitary(&k)?, &angular_momentum_operator(Scenario::ChargeOnly)?));
    Ok((
        charge <= 1e-12 && jz <= 1e-12 && beta_up_up >= 0.3 && witness > 1e-3,
        format!("[U,Q] {charge:.2e}, [U,Jz] {jz:.2e} (tol 1e-12), charge-only witness {witness:.2e} at |β↑↑| = {beta_up_up:.2} (> 1e-3)"),
    ))
}

fn ac9() -> Outcome {
    let start = Instant::now();
    let tol = 1e-8;
    let constant = ScaleFactorProfile::constant(1.0)?;
    let (mut n_const, mut s_const): (f64, f64) = (0.0, 0.0);
    for p in [0.1, 1.0, 10.0] {
        let point = solve_mode_point(&ModeParameters::along_z(p, 1.0)?, &constant, TauSpan::Auto, tol)?;
        n_const = n_const.max(point.density);
        s_const = s_const.max(entropy_numeric(&point.dressed.coefficients, Occupation::VACUUM)?);
    }
    let tanh = ScaleFactorProfile::tanh(1.0, 1.0)?;
    let (mut norm, mut conv, mut entropy): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..30 {
        let p = (0.1f64.ln() + (10.0f64.ln() - 0.1f64.ln()) * i as f64 / 29.0).exp();
        let angle = 0.37 * i as f64;
        let params = ModeParameters::new([0.6 * p * angle.sin(), 0.6 * p * angle.cos(), 0.8 * p], 1.0)?;
        let point = solve_mode_point(&params, &tanh, TauSpan::Auto, tol)?;
        norm = norm.max(point.dressed.normalization_residual);
        conv = conv.max(self_convergence(&params, &tanh, tol, 2.0)?);
        let s = entropy_numeric(&point.dressed.coefficients, Occupation::VACUUM)?;
        entropy = entropy.max((s - 2.0 * h2(point.density.min(4.0) / 4.0)).abs());
    }
    let elapsed = start.elapsed();
    Ok((
        n_const <= 1e-8
            && s_const <= 1e-6
            && norm <= 1e-6
            && conv <= 10.0 * tol
            && entropy <= 1e-6
            && elapsed <= Duration::from_secs(120),
        format!(
            "constant n {n_const:.1e} S {s_const:.1e}; tanh norm {norm:.1e}, halving {conv:.1e} (<= {:.0e}), entropy {entropy:.1e}; {:.2}s",
            10.0 * tol,
            elapsed.as_secs_f64()
        ),
    ))
}

fn verify_once(cfg: &VerifyConfig) -> Result<String> {
    let report = run_verify(cfg).map_err(|e| Error::Consistency(e.to_string()))?;
    Ok(render_report(cfg, &report))
}

fn ac10() -> Outcome {
    let text = VerifyConfig::default();
    let json = VerifyConfig { report: Report::Json, ..VerifyConfig::default() };
    let (t1, t2) = (verify_once(&text)?, verify_once(&text)?);
    let (j1, j2) = (verify_once(&json)?, verify_once(&json)?);
    Ok((
        t1 == t2 && j1 == j2,
        format!("text report {} bytes, json report {} bytes, byte-identical: {}", t1.len(), j1.len(), t1 == t2 && j1 == j2),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("AC1 vacuum entropy, spinful", ac1),
        ("AC2 vacuum entropy, spinless", ac2),
        ("AC3 spin/spinless scaling", ac3),
        ("AC4 λ-independence and vacuum expansion", ac4),
        ("AC5 decoupled vs dense oracle", ac5),
        ("AC6 coefficient constraints", ac6),
        ("AC7 excited-state catalogue", ac7),
        ("AC8 conservation laws", ac8),
        ("AC9 dynamics pipeline", ac9),
        ("AC10 determinism", ac10),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let (ok, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !ok {
            failed += 1;
        }
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
    println!("{}/{} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
