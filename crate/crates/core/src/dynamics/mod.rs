//! Mode dynamics in an expanding background: integrate the mode function,
//! read off the scalar Bogolyubov pair `(A, B)` in the out region, and
//! dress it with spinor factors into a full coefficient set.
//!
//! Out-region matching uses
//!
//! ```text
//! f(τ) = A e^{-i E_out τ} + B e^{+i E_out τ},
//! ```
//!
//! and the dressed coefficients are
//!
//! ```text
//! A_dressed = sqrt((E_out/E_in) (E_out + M_out)/(E_in + M_in)) A,
//! β_{dd'}   = -i C_{dd'} B / sqrt((E_in/E_out) (E_out + M_out)(E_in + M_in)),
//! C_{dd'}   = v†_{d'} (γ·p) u_d.
//! ```
//!
//! The gamma matrices are `γ⁰ = -i diag(1, 1, -1, -1)` and
//! `γ^k = [[0, σ_k], [σ_k, 0]]`, with `u_d`, `v_d` the unit vectors
//! `e_d` and `e_{2+d}`; hence `C_{dd'} = (σ·p)_{d'd}`.

mod ode;
mod profile;

pub use ode::{integrate_mode, resolve_span, ModeEnergies, ModeParameters, ModeSolution, TauSpan, MAX_TOL, MIN_TOL};
pub use profile::ScaleFactorProfile;

use serde::Serialize;

use crate::bogolyubov::{validate_with_tolerance, BogolyubovCoefficients, Scenario, ValidationReport};
use crate::{Error, Result, C64};

/// Below this out-region energy the matching system is singular.
pub const MIN_ENERGY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarBogolyubov {
    pub a_minus: C64,
    pub b_minus: C64,
}

/// Matches the solution at grid index `index` to out-region plane waves.
pub fn extract_at(sol: &ModeSolution, index: usize) -> Result<ScalarBogolyubov> {
    let e = sol.energies.e_out;
    if e < MIN_ENERGY {
        return Err(Error::DegenerateMode(format!("out-region energy {e:e} too small to match")));
    }
    let tau = *sol
        .tau
        .get(index)
        .ok_or_else(|| Error::Argument(format!("grid index {index} out of range")))?;
    if sol.profile.asymptotic_deviation(tau) >= sol.tol || tau < 0.0 && !matches!(sol.profile, ScaleFactorProfile::Constant { .. }) {
        return Err(Error::Configuration(format!("tau = {tau} is outside the out region")));
    }
    let (f, fd) = (sol.f[index], sol.f_dot[index]);
    let i = C64::new(0.0, 1.0);
    let a_minus = C64::from_polar(1.0, e * tau) * (f * e + i * fd) / (2.0 * e);
    let b_minus = C64::from_polar(1.0, -e * tau) * (f * e - i * fd) / (2.0 * e);
    Ok(ScalarBogolyubov { a_minus, b_minus })
}

/// Matching at the end of the integration span.
pub fn extract_scalar_coefficients(sol: &ModeSolution) -> Result<ScalarBogolyubov> {
    extract_at(sol, sol.tau.len() - 1)
}

/// Largest change of `(A, B)` when the matching point moves back by one
/// out-region oscillation period.
pub fn matching_shift_stability(sol: &ModeSolution) -> Result<f64> {
    let end = extract_scalar_coefficients(sol)?;
    let period = 2.0 * std::f64::consts::PI / sol.energies.e_out;
    let target = sol.tau_end() - period;
    let index = sol.tau.partition_point(|&t| t < target);
    let shifted = extract_at(sol, index)?;
    Ok((end.a_minus - shifted.a_minus).norm().max((end.b_minus - shifted.b_minus).norm()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinorContraction {
    /// `C[d][d']`, spins ordered `(↑, ↓)`.
    pub matrix: [[C64; 2]; 2],
    /// Set for `p = 0`, where there is no creation channel.
    pub degenerate: bool,
}

pub fn spinor_contraction(momentum: [f64; 3]) -> SpinorContraction {
    let [px, py, pz] = momentum;
    // σ·p = [[pz, px - i py], [px + i py, -pz]], transposed.
    let matrix = [
        [C64::new(pz, 0.0), C64::new(px, py)],
        [C64::new(px, -py), C64::new(-pz, 0.0)],
    ];
    SpinorContraction { matrix, degenerate: px == 0.0 && py == 0.0 && pz == 0.0 }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DressedCoefficients {
    pub coefficients: BogolyubovCoefficients,
    /// Phase removed from the dressed `A` to make it real; `β` is rotated by
    /// the same phase so the transformation stays canonical.
    pub stripped_phase: f64,
    /// `max_d |A² + Σ_d' |β_dd'|² - 1|`.
    pub normalization_residual: f64,
    pub validation: ValidationReport,
}

/// Spinor-dressed coefficients; validated against the anticommutation
/// constraints at `tolerance`.
pub fn dress_coefficients(
    scalar: &ScalarBogolyubov,
    energies: &ModeEnergies,
    contraction: &SpinorContraction,
    tolerance: f64,
) -> Result<DressedCoefficients> {
    let ModeEnergies { m_in, m_out, e_in, e_out } = *energies;
    let dressed_a = scalar.a_minus * ((e_out / e_in) * (e_out + m_out) / (e_in + m_in)).sqrt();
    let stripped_phase = if dressed_a.norm() > 0.0 { dressed_a.arg() } else { 0.0 };
    let rotation = C64::from_polar(1.0, stripped_phase);
    let denom = ((e_in / e_out) * (e_out + m_out) * (e_in + m_in)).sqrt();
    let mut beta = [[C64::new(0.0, 0.0); 2]; 2];
    if !contraction.degenerate {
        for d in 0..2 {
            for d2 in 0..2 {
                beta[d][d2] = C64::new(0.0, -1.0) * contraction.matrix[d][d2] * scalar.b_minus / denom * rotation;
            }
        }
    }
    let coefficients = BogolyubovCoefficients {
        scenario: Scenario::ChargeOnly,
        amplitude: dressed_a.norm(),
        beta,
    };
    let validation = validate_with_tolerance(&coefficients, tolerance);
    let normalization_residual = ["row_norm_up", "row_norm_down"]
        .iter()
        .filter_map(|name| validation.residual(name))
        .fold(0.0, f64::max);
    if normalization_residual > tolerance {
        return Err(Error::Physics(format!(
            "dressed coefficients violate normalization by {normalization_residual:e} (tolerance {tolerance:e})"
        )));
    }
    Ok(DressedCoefficients { coefficients, stripped_phase, normalization_residual, validation })
}

/// Total created density: `2 Σ |β_dd'|²` with spin, `2 |β|²` without.
pub fn particle_density(coeffs: &BogolyubovCoefficients) -> f64 {
    match coeffs.scenario {
        Scenario::Spinless => 2.0 * coeffs.spinless_beta().norm_sqr(),
        _ => 2.0 * coeffs.beta.iter().flatten().map(|b| b.norm_sqr()).sum::<f64>(),
    }
}

/// Everything the pipeline reports for one momentum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModePoint {
    pub params: ModeParameters,
    pub scalar: ScalarBogolyubov,
    pub dressed: DressedCoefficients,
    pub density: f64,
    /// `|β↑↓|² / (|β↑↓|² + |β↑↑|²)`; `None` without creation.
    pub lambda_effective: Option<f64>,
    pub wronskian_drift: f64,
}

/// Integrate, match and dress one mode. The constraint check uses `10·tol`.
pub fn solve_mode_point(
    params: &ModeParameters,
    profile: &ScaleFactorProfile,
    span: TauSpan,
    tol: f64,
) -> Result<ModePoint> {
    let sol = integrate_mode(params, profile, span, tol)?;
    let scalar = extract_scalar_coefficients(&sol)?;
    let dressed = dress_coefficients(&scalar, &sol.energies, &spinor_contraction(params.momentum), 10.0 * tol)?;
    let density = particle_density(&dressed.coefficients);
    let lambda_effective = dressed.coefficients.spin_flip_fraction();
    Ok(ModePoint {
        params: *params,
        scalar,
        dressed,
        density,
        lambda_effective,
        wronskian_drift: sol.wronskian_drift,
    })
}

/// Largest change of `(A, B)` between runs at `tol` and `tol / factor`.
pub fn self_convergence(params: &ModeParameters, profile: &ScaleFactorProfile, tol: f64, factor: f64) -> Result<f64> {
    let coarse = extract_scalar_coefficients(&integrate_mode(params, profile, TauSpan::Auto, tol)?)?;
    // Same span for both runs so only the step control differs.
    let (start, end) = resolve_span(params, profile, TauSpan::Auto, tol)?;
    let fine = extract_scalar_coefficients(&integrate_mode(
        params,
        profile,
        TauSpan::Explicit { start, end },
        tol / factor,
    )?)?;
    Ok((coarse.a_minus - fine.a_minus).norm().max((coarse.b_minus - fine.b_minus).norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bogolyubov::{DensityParameters, Spin};

    #[test]
    fn constant_profile_has_no_creation() {
        let params = ModeParameters::new([0.3, -0.4, 1.2], 1.0).unwrap();
        let profile = ScaleFactorProfile::constant(1.0).unwrap();
        let point = solve_mode_point(&params, &profile, TauSpan::Auto, 1e-10).unwrap();
        assert!((point.scalar.a_minus - C64::new(1.0, 0.0)).norm() < 1e-8);
        assert!(point.scalar.b_minus.norm() < 1e-8);
        assert!(point.density < 1e-8);
        assert!((point.dressed.coefficients.amplitude - 1.0).abs() < 1e-8);
    }

    #[test]
    fn contraction_along_z_is_diagonal() {
        let c = spinor_contraction([0.0, 0.0, 2.0]).matrix;
        assert_eq!(c[0][1], C64::new(0.0, 0.0));
        assert_eq!(c[1][0], C64::new(0.0, 0.0));
        assert_eq!(c[0][0].norm(), 2.0);
        assert_eq!(c[1][1].norm(), 2.0);
    }

    #[test]
    fn contraction_rows_and_parity() {
        let p = [0.3, -1.1, 0.7];
        let c = spinor_contraction(p).matrix;
        let p2: f64 = p.iter().map(|x| x * x).sum();
        for row in c {
            assert!((row.iter().map(|z| z.norm_sqr()).sum::<f64>() - p2).abs() < 1e-14);
        }
        let m = spinor_contraction([-0.3, 1.1, -0.7]).matrix;
        for d in 0..2 {
            for d2 in 0..2 {
                assert_eq!(m[d][d2], -c[d][d2]);
            }
        }
        assert!(spinor_contraction([0.0; 3]).degenerate);
    }

    #[test]
    fn tanh_point_is_normalized() {
        let params = ModeParameters::new([0.6, 0.0, 0.8], 1.0).unwrap();
        let profile = ScaleFactorProfile::tanh(1.0, 1.0).unwrap();
        let tol = 1e-9;
        let point = solve_mode_point(&params, &profile, TauSpan::Auto, tol).unwrap();
        assert!(point.dressed.normalization_residual < 10.0 * tol);
        assert!(point.density > 1e-6, "some creation expected, got {}", point.density);
        let lam = point.lambda_effective.unwrap();
        // σ·p with p in the x-z plane: |β↑↓|²/(|β↑↓|²+|β↑↑|²) = px²/p².
        assert!((lam - 0.36).abs() < 1e-9);
    }

    #[test]
    fn shift_stability_of_matching() {
        let params = ModeParameters::along_z(1.0, 1.0).unwrap();
        let profile = ScaleFactorProfile::tanh(1.0, 1.0).unwrap();
        let tol = 1e-9;
        let sol = integrate_mode(&params, &profile, TauSpan::Auto, tol).unwrap();
        assert!(matching_shift_stability(&sol).unwrap() < 10.0 * tol);
    }

    #[test]
    fn density_examples() {
        assert_eq!(particle_density(&BogolyubovCoefficients::identity(Scenario::ChargeOnly)), 0.0);
        let k = BogolyubovCoefficients::from_density(DensityParameters::new(2.0, 0.4), Scenario::ChargeOnly).unwrap();
        assert!((particle_density(&k) - 2.0).abs() < 1e-14);
        let k = BogolyubovCoefficients::from_density(
            DensityParameters::new(2.0, 1.0),
            Scenario::ChargeAndAngularMomentum,
        )
        .unwrap();
        assert!((k.beta(Spin::Up, Spin::Down).norm_sqr() - 0.5).abs() < 1e-15);
        assert!((particle_density(&k) - 2.0).abs() < 1e-14);
        let k = BogolyubovCoefficients::from_density(DensityParameters::new(1.2, 0.0), Scenario::Spinless).unwrap();
        assert!((particle_density(&k) - 1.2).abs() < 1e-14);
    }

    #[test]
    fn broken_normalization_is_a_physics_error() {
        let energies = ModeEnergies { m_in: 1.0, m_out: 1.0, e_in: 2f64.sqrt(), e_out: 2f64.sqrt() };
        let scalar = ScalarBogolyubov { a_minus: C64::new(1.0, 0.0), b_minus: C64::new(0.5, 0.0) };
        let err = dress_coefficients(&scalar, &energies, &spinor_contraction([0.0, 0.0, 1.0]), 1e-8).unwrap_err();
        assert!(matches!(err, Error::Physics(_)));
    }
}
