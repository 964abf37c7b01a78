//! Bogolyubov coefficients connecting in and out ladder operators, and the
//! antisymmetric generator `θ` of the Fock-space squeezing unitary.
//!
//! The in annihilators are written in terms of the out ones as
//!
//! ```text
//! a_in(d)  = A a_out(d) + Σ_d' β*_{dd'} b†_out(d')
//! b_in(d)  = A b_out(d) - Σ_d' β*_{d'd} a†_out(d')
//! ```
//!
//! i.e. `f_in = μ f + ν f†` with `μ = A·I` and `ν` the block pattern returned
//! by [`BogolyubovCoefficients::mode_matrices`].

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::argument;
use crate::linalg::{hermitian_function, max_abs, sinc};
use crate::{Error, Matrix, Result, C64};

/// Tolerance used by [`validate`].
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// Which conservation laws the transformation respects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    /// Spinful, charge conserved; all four `β_{dd'}` may be nonzero.
    ChargeOnly,
    /// Spinful, charge and `J_z` conserved; only spin-flip pairs are created.
    ChargeAndAngularMomentum,
    /// One particle and one antiparticle mode (1+1 dimensions).
    Spinless,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [
        Scenario::ChargeOnly,
        Scenario::ChargeAndAngularMomentum,
        Scenario::Spinless,
    ];

    pub fn n_modes(self) -> usize {
        match self {
            Scenario::Spinless => 2,
            _ => 4,
        }
    }

    /// Largest admissible total pair density `n`.
    pub fn n_max(self) -> f64 {
        self.n_modes() as f64
    }

    pub fn is_spinful(self) -> bool {
        self != Scenario::Spinless
    }

    /// Modes of the particle at `p` (kept by the entropy).
    pub fn particle_modes(self) -> Vec<crate::fock::Mode> {
        (0..self.n_modes() / 2).map(crate::fock::Mode).collect()
    }

    /// Modes of the antiparticle at `-p` (traced out by the entropy).
    pub fn antiparticle_modes(self) -> Vec<crate::fock::Mode> {
        (self.n_modes() / 2..self.n_modes()).map(crate::fock::Mode).collect()
    }

    /// Short name used on the command line and in output files.
    pub fn token(self) -> &'static str {
        match self {
            Scenario::ChargeOnly => "charge",
            Scenario::ChargeAndAngularMomentum => "spin-am",
            Scenario::Spinless => "spinless",
        }
    }

    pub fn from_token(s: &str) -> Option<Scenario> {
        Scenario::ALL.into_iter().find(|sc| sc.token() == s)
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up = 0,
    Down = 1,
}

/// Free phases of a charge-only coefficient set. The phase of `β_{↓↓}` is
/// fixed to `global`, and that of `β_{↓↑}` is solved from the orthogonality
/// constraints.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BetaPhases {
    pub up_up: f64,
    pub up_down: f64,
    pub global: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityParameters {
    /// Total created density, `0 <= n <= n_max`.
    pub n: f64,
    /// Fraction of creation in the spin-flip channel, `0 <= λ <= 1`.
    pub lambda: f64,
    pub phases: BetaPhases,
}

impl DensityParameters {
    pub fn new(n: f64, lambda: f64) -> Self {
        DensityParameters { n, lambda, phases: BetaPhases::default() }
    }

    pub fn with_phases(mut self, phases: BetaPhases) -> Self {
        self.phases = phases;
        self
    }
}

/// `A` (taken real) and the 2x2 matrix `β_{dd'}` indexed by `(↑, ↓)`.
/// Spinless coefficients keep their single `β` in the `(↑, ↓)` slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BogolyubovCoefficients {
    pub scenario: Scenario,
    pub amplitude: f64,
    pub beta: [[C64; 2]; 2],
}

fn polar(modulus: f64, phase: f64) -> C64 {
    C64::from_polar(modulus, phase)
}

impl BogolyubovCoefficients {
    /// No particle creation: `A = 1`, `β = 0`.
    pub fn identity(scenario: Scenario) -> Self {
        BogolyubovCoefficients {
            scenario,
            amplitude: 1.0,
            beta: [[C64::new(0.0, 0.0); 2]; 2],
        }
    }

    pub fn beta(&self, d: Spin, d2: Spin) -> C64 {
        self.beta[d as usize][d2 as usize]
    }

    /// The spinless `β`.
    pub fn spinless_beta(&self) -> C64 {
        self.beta[0][1]
    }

    /// Coefficients parameterised by the created density.
    pub fn from_density(params: DensityParameters, scenario: Scenario) -> Result<Self> {
        let DensityParameters { n, lambda, phases } = params;
        let n_max = scenario.n_max();
        if !(0.0..=n_max).contains(&n) {
            return argument(format!("n = {n} outside [0, {n_max}] for scenario {scenario}"));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return argument(format!("lambda = {lambda} outside [0, 1]"));
        }
        let amplitude = ((n_max - n) / n_max).sqrt();
        let zero = C64::new(0.0, 0.0);
        let g = phases.global;
        let beta = match scenario {
            Scenario::ChargeOnly => {
                let diag = ((1.0 - lambda) * n / 4.0).sqrt();
                let flip = (lambda * n / 4.0).sqrt();
                // Orthogonality fixes arg β↓↑ = arg β↑↑ - arg β↑↓ + arg β↓↓ + π.
                let down_up_phase = if diag > 0.0 && flip > 0.0 {
                    phases.up_up - phases.up_down + PI
                } else {
                    0.0
                };
                [
                    [polar(diag, phases.up_up + g), polar(flip, phases.up_down + g)],
                    [polar(flip, down_up_phase + g), polar(diag, g)],
                ]
            }
            Scenario::ChargeAndAngularMomentum => {
                let flip = (n / 4.0).sqrt();
                [[zero, polar(flip, phases.up_down + g)], [polar(flip, g), zero]]
            }
            Scenario::Spinless => [[zero, polar((n / 2.0).sqrt(), phases.up_down + g)], [zero, zero]],
        };
        Ok(BogolyubovCoefficients { scenario, amplitude, beta })
    }

    /// Uniformly drawn density, `λ` and phases, with `n <= fill * n_max`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, scenario: Scenario, fill: f64) -> Self {
        let n = rng.random::<f64>() * fill * scenario.n_max();
        let lambda = rng.random::<f64>();
        let phases = BetaPhases {
            up_up: rng.random::<f64>() * 2.0 * PI,
            up_down: rng.random::<f64>() * 2.0 * PI,
            global: rng.random::<f64>() * 2.0 * PI,
        };
        BogolyubovCoefficients::from_density(DensityParameters { n, lambda, phases }, scenario)
            .expect("sampled parameters are in range")
    }

    /// Spin-flip fraction `|β↑↓|² / (|β↑↓|² + |β↑↑|²)`, or `None` without
    /// particle creation.
    pub fn spin_flip_fraction(&self) -> Option<f64> {
        let flip = self.beta[0][1].norm_sqr();
        let total = flip + self.beta[0][0].norm_sqr();
        (total > 0.0).then(|| flip / total)
    }

    /// `(μ, ν)` such that `f_in,j = Σ_i μ_ji f_i + ν_ji f†_i`.
    pub fn mode_matrices(&self) -> (Matrix, Matrix) {
        let dim = self.scenario.n_modes();
        let mu = Matrix::identity(dim, dim).scale(self.amplitude);
        let mut nu = Matrix::zeros(dim, dim);
        if self.scenario.is_spinful() {
            for d in 0..2 {
                for d2 in 0..2 {
                    let b = self.beta[d][d2].conj();
                    nu[(d, 2 + d2)] = b;
                    nu[(2 + d2, d)] = -b;
                }
            }
        } else {
            let b = self.spinless_beta().conj();
            nu[(0, 1)] = b;
            nu[(1, 0)] = -b;
        }
        (mu, nu)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintResidual {
    pub name: &'static str,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub tolerance: f64,
    pub residuals: Vec<ConstraintResidual>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|c| c.residual <= self.tolerance)
    }

    pub fn failures(&self) -> Vec<&ConstraintResidual> {
        self.residuals.iter().filter(|c| !(c.residual <= self.tolerance)).collect()
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals.iter().find(|c| c.name == name).map(|c| c.residual)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, c| m.max(c.residual))
    }
}

pub fn validate(coeffs: &BogolyubovCoefficients) -> ValidationReport {
    validate_with_tolerance(coeffs, CONSTRAINT_TOL)
}

/// Residual of every constraint the anticommutation relations impose on the
/// coefficients, plus the scenario's sparsity pattern.
pub fn validate_with_tolerance(coeffs: &BogolyubovCoefficients, tolerance: f64) -> ValidationReport {
    let a2 = coeffs.amplitude * coeffs.amplitude;
    let b = &coeffs.beta;
    let m2 = |z: C64| z.norm_sqr();
    let mut residuals = vec![ConstraintResidual {
        name: "amplitude_range",
        residual: if coeffs.amplitude.is_finite() {
            (-coeffs.amplitude).max(coeffs.amplitude - 1.0).max(0.0)
        } else {
            f64::INFINITY
        },
    }];
    match coeffs.scenario {
        Scenario::ChargeOnly | Scenario::ChargeAndAngularMomentum => {
            residuals.extend([
                ConstraintResidual {
                    name: "column_norm_up",
                    residual: (a2 + m2(b[0][0]) + m2(b[1][0]) - 1.0).abs(),
                },
                ConstraintResidual {
                    name: "column_norm_down",
                    residual: (a2 + m2(b[0][1]) + m2(b[1][1]) - 1.0).abs(),
                },
                ConstraintResidual {
                    name: "row_norm_up",
                    residual: (a2 + m2(b[0][0]) + m2(b[0][1]) - 1.0).abs(),
                },
                ConstraintResidual {
                    name: "row_norm_down",
                    residual: (a2 + m2(b[1][1]) + m2(b[1][0]) - 1.0).abs(),
                },
                ConstraintResidual {
                    name: "column_orthogonality",
                    residual: (b[0][0] * b[0][1].conj() + b[1][0] * b[1][1].conj()).norm(),
                },
                ConstraintResidual {
                    name: "row_orthogonality",
                    residual: (b[0][0] * b[1][0].conj() + b[0][1] * b[1][1].conj()).norm(),
                },
            ]);
            if coeffs.scenario == Scenario::ChargeAndAngularMomentum {
                residuals.push(ConstraintResidual {
                    name: "spin_preserving_zero",
                    residual: b[0][0].norm().max(b[1][1].norm()),
                });
            }
        }
        Scenario::Spinless => {
            residuals.push(ConstraintResidual {
                name: "normalization",
                residual: (a2 + m2(b[0][1]) - 1.0).abs(),
            });
            residuals.push(ConstraintResidual {
                name: "single_entry",
                residual: b[0][0].norm() + b[1][0].norm() + b[1][1].norm(),
            });
        }
    }
    ValidationReport { tolerance, residuals }
}

/// The two off-diagonal combinations of the reduced particle state,
/// `(β*↑↑ β↓↑ + β*↑↓ β↓↓, β*↓↑ β↑↑ + β↑↓ β*↓↓)`; both vanish for valid
/// coefficients.
pub fn cross_term_identity(coeffs: &BogolyubovCoefficients) -> Result<(C64, C64)> {
    if coeffs.scenario != Scenario::ChargeOnly {
        return argument(format!("cross terms are defined for charge-only coefficients, got {}", coeffs.scenario));
    }
    let b = &coeffs.beta;
    Ok((
        b[0][0].conj() * b[1][0] + b[0][1].conj() * b[1][1],
        b[1][0].conj() * b[0][0] + b[0][1] * b[1][1].conj(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeterminantCombination {
    /// `β*↓↑ β*↑↓ - β*↓↓ β*↑↑`.
    pub value: C64,
    /// `|β↑↓|² + |β↑↑|²`, the modulus `value` must have.
    pub expected_modulus: f64,
    /// `expected_modulus · β*↑↓ / β↓↑`, the closed form of `value`;
    /// `None` when `β↓↑ = 0` and the ratio is undefined.
    pub ratio_form: Option<C64>,
}

impl DeterminantCombination {
    pub fn modulus_residual(&self) -> f64 {
        (self.value.norm() - self.expected_modulus).abs()
    }

    pub fn ratio_residual(&self) -> Option<f64> {
        self.ratio_form.map(|r| (r - self.value).norm())
    }

    /// Phase `φ` in `value = expected_modulus · e^{iφ}`; `None` if the value
    /// vanishes.
    pub fn phase(&self) -> Option<f64> {
        (self.value.norm() > 0.0).then(|| self.value.arg())
    }
}

pub fn determinant_combination(coeffs: &BogolyubovCoefficients) -> Result<DeterminantCombination> {
    if !coeffs.scenario.is_spinful() {
        return argument("determinant combination needs spinful coefficients");
    }
    let b = &coeffs.beta;
    let value = b[1][0].conj() * b[0][1].conj() - b[1][1].conj() * b[0][0].conj();
    let expected_modulus = b[0][1].norm_sqr() + b[0][0].norm_sqr();
    let ratio_form = (b[1][0].norm() > 0.0).then(|| b[0][1].conj() / b[1][0] * expected_modulus);
    Ok(DeterminantCombination { value, expected_modulus, ratio_form })
}

/// Antisymmetric generator matrix of the squeezing unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaMatrix {
    matrix: Matrix,
}

/// Tolerance on `θ^T = -θ`.
pub const ANTISYMMETRY_TOL: f64 = 1e-14;

impl ThetaMatrix {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return argument(format!("theta must be square, got {}x{}", matrix.nrows(), matrix.ncols()));
        }
        let defect = max_abs(&(&matrix + matrix.transpose()));
        if defect > ANTISYMMETRY_TOL {
            return argument(format!("theta is not antisymmetric (defect {defect:e})"));
        }
        Ok(ThetaMatrix { matrix })
    }

    pub fn zeros(n_modes: usize) -> Self {
        ThetaMatrix { matrix: Matrix::zeros(n_modes, n_modes) }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows()
    }

    /// `θ θ†`, whose square root is the modulus entering `μ` and `ν`.
    pub fn gram(&self) -> Matrix {
        &self.matrix * self.matrix.adjoint()
    }

    /// `|θ| = (θ θ†)^{1/2}`, negative rounding eigenvalues clipped to zero.
    pub fn modulus(&self) -> Matrix {
        hermitian_function(&self.gram(), |l| C64::new(l.max(0.0).sqrt(), 0.0))
    }

    /// `r` if `|θ| = r·I` within `tol`.
    pub fn scalar_modulus(&self, tol: f64) -> Option<f64> {
        let gram = self.gram();
        let n = self.n_modes();
        let r2 = (0..n).map(|i| gram[(i, i)].re).sum::<f64>() / n as f64;
        let r = r2.max(0.0).sqrt();
        let dev = max_abs(&(self.modulus() - Matrix::identity(n, n).scale(r)));
        (dev <= tol).then_some(r)
    }
}

/// `arccos(A) / sin(arccos(A))`, equal to 1 at `A = 1` and `π/2` at `A = 0`.
pub fn generator_scale(amplitude: f64) -> f64 {
    let r = amplitude.clamp(-1.0, 1.0).acos();
    1.0 / sinc(r)
}

/// Generator in the block pattern
///
/// ```text
///     [  0    0   ϑ1  ϑ2 ]
/// θ = [  0    0   ϑ4  ϑ3 ]      ϑ1 = -s β*↑↑, ϑ2 = -s β*↑↓,
///     [ -ϑ1 -ϑ4   0   0  ]      ϑ3 = -s β*↓↓, ϑ4 = -s β*↓↑,
///     [ -ϑ2 -ϑ3   0   0  ]
/// ```
///
/// with `s = arccos(A)/sin(arccos(A))`; the spinless case is the 2x2 block
/// `[[0, ϑ], [-ϑ, 0]]`, `ϑ = -s β*`. Then `|θ| = arccos(A)·I`.
pub fn theta_from_coefficients(coeffs: &BogolyubovCoefficients) -> Result<ThetaMatrix> {
    let a = coeffs.amplitude;
    if !a.is_finite() || a < 0.0 || a > 1.0 + CONSTRAINT_TOL {
        return Err(Error::Argument(format!("amplitude {a} outside [0, 1]")));
    }
    let s = generator_scale(a.min(1.0));
    let t = |z: C64| -z.conj() * s;
    let n = coeffs.scenario.n_modes();
    let mut m = Matrix::zeros(n, n);
    if coeffs.scenario.is_spinful() {
        let b = &coeffs.beta;
        for d in 0..2 {
            for d2 in 0..2 {
                m[(d, 2 + d2)] = t(b[d][d2]);
                m[(2 + d2, d)] = -t(b[d][d2]);
            }
        }
    } else {
        let v = t(coeffs.spinless_beta());
        m[(0, 1)] = v;
        m[(1, 0)] = -v;
    }
    ThetaMatrix::new(m)
}

/// `μ = cos|θ|`, `ν = -sin|θ| |θ|^{-1} θ`, evaluated on the spectrum of
/// `θ θ†` so that a singular modulus needs no inverse.
pub fn mu_nu_from_theta(theta: &ThetaMatrix) -> (Matrix, Matrix) {
    let gram = theta.gram();
    let mu = hermitian_function(&gram, |l| C64::new(l.max(0.0).sqrt().cos(), 0.0));
    let sinc_mod = hermitian_function(&gram, |l| C64::new(sinc(l.max(0.0).sqrt()), 0.0));
    let nu = -(sinc_mod * theta.matrix());
    (mu, nu)
}

/// Residuals of `μμ† + νν† = I` and `μνᵀ + νμᵀ = 0`.
pub fn mu_nu_residuals(mu: &Matrix, nu: &Matrix) -> (f64, f64) {
    let n = mu.nrows();
    let unit = max_abs(&(mu * mu.adjoint() + nu * nu.adjoint() - Matrix::identity(n, n)));
    let anti = max_abs(&(mu * nu.transpose() + nu * mu.transpose()));
    (unit, anti)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn angular_momentum_half_filling() {
        let k = BogolyubovCoefficients::from_density(
            DensityParameters::new(2.0, 0.3),
            Scenario::ChargeAndAngularMomentum,
        )
        .unwrap();
        assert!((k.amplitude * k.amplitude - 0.5).abs() < 1e-15);
        assert!((k.beta(Spin::Up, Spin::Down).norm_sqr() - 0.5).abs() < 1e-15);
        assert!((k.beta(Spin::Down, Spin::Up).norm_sqr() - 0.5).abs() < 1e-15);
        assert_eq!(k.beta(Spin::Up, Spin::Up), c(0.0, 0.0));
        assert!(validate(&k).passed());
    }

    #[test]
    fn zero_density_is_identity() {
        for sc in Scenario::ALL {
            let k = BogolyubovCoefficients::from_density(DensityParameters::new(0.0, 0.5), sc).unwrap();
            assert_eq!(k.amplitude, 1.0);
            assert!(k.beta.iter().flatten().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn charge_only_constraint_sums() {
        let k = BogolyubovCoefficients::from_density(
            DensityParameters::new(2.0, 0.3).with_phases(BetaPhases { up_up: 0.4, up_down: 2.1, global: -0.9 }),
            Scenario::ChargeOnly,
        )
        .unwrap();
        let sum = k.amplitude.powi(2) + k.beta[0][1].norm_sqr() + k.beta[0][0].norm_sqr();
        assert!((sum - 1.0).abs() < 1e-15);
        assert!(validate(&k).passed(), "{:?}", validate(&k));
    }

    #[test]
    fn out_of_range_parameters() {
        assert!(BogolyubovCoefficients::from_density(DensityParameters::new(4.1, 0.5), Scenario::ChargeOnly).is_err());
        assert!(BogolyubovCoefficients::from_density(DensityParameters::new(2.5, 0.5), Scenario::Spinless).is_err());
        assert!(BogolyubovCoefficients::from_density(DensityParameters::new(1.0, 1.2), Scenario::ChargeOnly).is_err());
        assert!(BogolyubovCoefficients::from_density(DensityParameters::new(-0.1, 0.2), Scenario::ChargeOnly).is_err());
    }

    #[test]
    fn mismatched_moduli_fail_named_constraint() {
        let mut k = BogolyubovCoefficients::from_density(DensityParameters::new(1.0, 0.5), Scenario::ChargeOnly).unwrap();
        k.beta[1][1] *= 1.5;
        let report = validate(&k);
        assert!(!report.passed());
        let names: Vec<_> = report.failures().iter().map(|c| c.name).collect();
        assert!(names.contains(&"column_norm_down"));
        assert!(names.contains(&"row_norm_down"));
    }

    #[test]
    fn orthogonality_residual_reported() {
        // β↑↑ = β↑↓ = β↓↑ = 0.1 real, β↓↓ = 0 gives column orthogonality 0.01;
        // scale to hit 0.1 exactly with β↑↑ = 1, β↑↓ = 0.1.
        let k = BogolyubovCoefficients {
            scenario: Scenario::ChargeOnly,
            amplitude: 0.0,
            beta: [[c(1.0, 0.0), c(0.1, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]],
        };
        let report = validate(&k);
        assert!((report.residual("column_orthogonality").unwrap() - 0.1).abs() < 1e-15);
        assert!(!report.passed());
    }

    #[test]
    fn cross_terms_vanish_for_constructed_sets() {
        let k = BogolyubovCoefficients::from_density(
            DensityParameters::new(1.7, 0.35).with_phases(BetaPhases { up_up: 1.0, up_down: -0.3, global: 0.2 }),
            Scenario::ChargeOnly,
        )
        .unwrap();
        let (x, y) = cross_term_identity(&k).unwrap();
        assert!(x.norm() < 1e-15 && y.norm() < 1e-15);
        let (x, y) = cross_term_identity(&BogolyubovCoefficients::identity(Scenario::ChargeOnly)).unwrap();
        assert_eq!((x, y), (c(0.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn broken_phases_show_up_in_cross_terms() {
        let mut k = BogolyubovCoefficients::from_density(DensityParameters::new(2.0, 0.5), Scenario::ChargeOnly).unwrap();
        k.beta[1][0] *= C64::from_polar(1.0, 0.8);
        let (x, y) = cross_term_identity(&k).unwrap();
        assert!(x.norm() > 1e-3 && y.norm() > 1e-3);
        assert!(cross_term_identity(&BogolyubovCoefficients::identity(Scenario::Spinless)).is_err());
    }

    #[test]
    fn determinant_modulus_examples() {
        let k = BogolyubovCoefficients::from_density(DensityParameters::new(2.0, 0.5), Scenario::ChargeOnly).unwrap();
        let d = determinant_combination(&k).unwrap();
        assert!((d.value.norm() - 0.5).abs() < 1e-15);
        assert!(d.ratio_residual().unwrap() < 1e-15);

        let k = BogolyubovCoefficients::from_density(DensityParameters::new(1.0, 1.0), Scenario::ChargeOnly).unwrap();
        assert!((determinant_combination(&k).unwrap().value.norm() - 0.25).abs() < 1e-15);

        let k = BogolyubovCoefficients::from_density(
            DensityParameters::new(3.0, 0.0),
            Scenario::ChargeAndAngularMomentum,
        )
        .unwrap();
        let d = determinant_combination(&k).unwrap();
        assert!((d.value.norm() - 0.75).abs() < 1e-15);

        // λ = 0 leaves β↓↑ = 0: the ratio form is skipped.
        let k = BogolyubovCoefficients::from_density(DensityParameters::new(1.0, 0.0), Scenario::ChargeOnly).unwrap();
        let d = determinant_combination(&k).unwrap();
        assert!(d.ratio_form.is_none());
        assert!(d.modulus_residual() < 1e-15);
    }

    #[test]
    fn theta_of_identity_is_zero() {
        for sc in Scenario::ALL {
            let th = theta_from_coefficients(&BogolyubovCoefficients::identity(sc)).unwrap();
            assert_eq!(max_abs(th.matrix()), 0.0);
        }
    }

    #[test]
    fn theta_modulus_is_arccos_amplitude() {
        let k = BogolyubovCoefficients::from_density(
            DensityParameters::new(2.0, 1.0),
            Scenario::ChargeAndAngularMomentum,
        )
        .unwrap();
        let th = theta_from_coefficients(&k).unwrap();
        assert!((th.matrix()[(0, 3)].norm() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let r = th.scalar_modulus(1e-12).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_4).abs() < 1e-14);
        let (mu, _) = mu_nu_from_theta(&th);
        assert!(max_abs(&(mu - Matrix::identity(4, 4).scale(std::f64::consts::FRAC_1_SQRT_2))) < 1e-14);
    }

    #[test]
    fn theta_patterns_per_scenario() {
        let k = BogolyubovCoefficients::from_density(
            DensityParameters::new(1.3, 0.2),
            Scenario::ChargeAndAngularMomentum,
        )
        .unwrap();
        let th = theta_from_coefficients(&k).unwrap();
        let nonzero: Vec<(usize, usize)> = (0..4)
            .flat_map(|r| (0..4).map(move |c| (r, c)))
            .filter(|&(r, c)| th.matrix()[(r, c)].norm() > 0.0)
            .collect();
        assert_eq!(nonzero, vec![(0, 3), (1, 2), (2, 1), (3, 0)]);

        let k = BogolyubovCoefficients::from_density(DensityParameters::new(0.7, 0.0), Scenario::Spinless).unwrap();
        let th = theta_from_coefficients(&k).unwrap();
        assert_eq!(th.n_modes(), 2);
        assert_eq!(th.matrix()[(0, 1)], -th.matrix()[(1, 0)]);
    }

    #[test]
    fn full_filling_is_finite() {
        let k = BogolyubovCoefficients::from_density(DensityParameters::new(4.0, 0.4), Scenario::ChargeOnly).unwrap();
        assert_eq!(k.amplitude, 0.0);
        let th = theta_from_coefficients(&k).unwrap();
        let r = th.scalar_modulus(1e-12).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn mu_nu_of_zero() {
        let (mu, nu) = mu_nu_from_theta(&ThetaMatrix::zeros(4));
        assert!(max_abs(&(mu - Matrix::identity(4, 4))) < 1e-15);
        assert_eq!(max_abs(&nu), 0.0);
    }

    #[test]
    fn theta_round_trip_reproduces_mode_matrices() {
        for (sc, n, lam) in [
            (Scenario::ChargeOnly, 1.1, 0.37),
            (Scenario::ChargeOnly, 3.9, 0.81),
            (Scenario::ChargeAndAngularMomentum, 2.4, 1.0),
            (Scenario::Spinless, 1.6, 0.0),
        ] {
            let k = BogolyubovCoefficients::from_density(
                DensityParameters::new(n, lam).with_phases(BetaPhases { up_up: 0.3, up_down: 1.9, global: 4.0 }),
                sc,
            )
            .unwrap();
            let th = theta_from_coefficients(&k).unwrap();
            let (mu, nu) = mu_nu_from_theta(&th);
            let (mu0, nu0) = k.mode_matrices();
            assert!(max_abs(&(mu - &mu0)) < 1e-12, "{sc} mu");
            assert!(max_abs(&(nu - &nu0)) < 1e-12, "{sc} nu");
            let (u, a) = mu_nu_residuals(&mu0, &nu0);
            assert!(u < 1e-12 && a < 1e-12);
        }
    }

    #[test]
    fn non_antisymmetric_theta_rejected() {
        let mut m = Matrix::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        m[(1, 0)] = c(1.0, 0.0);
        assert!(matches!(ThetaMatrix::new(m), Err(Error::Argument(_))));
    }

    #[test]
    fn scenario_tokens_round_trip() {
        for sc in Scenario::ALL {
            assert_eq!(Scenario::from_token(sc.token()), Some(sc));
        }
        assert_eq!(Scenario::from_token("bogus"), None);
    }
}
