//! Fock-space unitary `U = exp(L)` of a Bogolyubov transformation, with
//!
//! ```text
//! L = ½ Σ_ij (θ_ij f†_i f†_j + θ*_ij f_i f_j).
//! ```
//!
//! `U` is available as a dense exponential ([`unitary_dense`]) and, when
//! `|θ| = r·I`, through the factorisation
//!
//! ```text
//! U = exp(t A+) · cos(r)^(M/2 - N) · exp(t A-),    t = tan(r)/r,
//! A+ = ½ Σ θ_ij f†_i f†_j,   A- = ½ Σ θ*_ij f_i f_j,
//! ```
//!
//! where `N` is the total number operator and `M` the mode count. With two
//! or four modes `A±³ = 0`, so each exponential is a quadratic polynomial.
//!
//! The in-region state labelled by an occupation pattern is `U` applied to
//! the out-region basis state with the same pattern.

use crate::bogolyubov::{theta_from_coefficients, BogolyubovCoefficients, Scenario, ThetaMatrix};
use crate::error::argument;
use crate::fock::{annihilators, number_operator, FockState, Mode, Occupation, MAX_MODES};
use crate::linalg::{expm_anti_hermitian, max_abs};
use crate::{Error, Matrix, Result, C64};

/// Tolerance on `L + L† = 0`.
pub const ANTI_HERMITIAN_TOL: f64 = 1e-12;

/// Tolerance on the decomposition of `U f_j U†` in the span of the ladder
/// operators.
pub const DECOMPOSITION_TOL: f64 = 1e-10;

/// Tolerance on `|θ| = r·I` for the factorised form.
pub const SCALAR_MODULUS_TOL: f64 = 1e-10;

/// Below this `cos r` the factorised form loses all precision.
pub const MIN_COS_R: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    n_modes: usize,
    matrix: Matrix,
}

impl Generator {
    pub fn new(n_modes: usize, matrix: Matrix) -> Result<Self> {
        if n_modes == 0 || n_modes > MAX_MODES {
            return argument(format!("mode count {n_modes} outside 1..={MAX_MODES}"));
        }
        let dim = 1usize << n_modes;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return argument(format!("generator must be {dim}x{dim}, got {}x{}", matrix.nrows(), matrix.ncols()));
        }
        let defect = max_abs(&(&matrix + matrix.adjoint()));
        if defect > ANTI_HERMITIAN_TOL {
            return argument(format!("generator is not anti-Hermitian (defect {defect:e})"));
        }
        Ok(Generator { n_modes, matrix })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

fn pair_sum(theta: &Matrix, ops: &[Matrix], create: bool) -> Matrix {
    let n = ops.len();
    let dim = ops[0].nrows();
    let mut out = Matrix::zeros(dim, dim);
    for i in 0..n {
        for j in 0..n {
            let t = theta[(i, j)];
            if t == C64::new(0.0, 0.0) {
                continue;
            }
            if create {
                out += (ops[i].adjoint() * ops[j].adjoint()).scale(0.5) * t;
            } else {
                out += (&ops[i] * &ops[j]).scale(0.5) * t.conj();
            }
        }
    }
    out
}

fn check_theta(theta: &ThetaMatrix) -> Result<()> {
    let n = theta.n_modes();
    if n == 0 || n > MAX_MODES {
        return argument(format!("theta of size {n} outside 1..={MAX_MODES} modes"));
    }
    Ok(())
}

/// `A+ = ½ Σ θ_ij f†_i f†_j`.
pub fn pair_creation_operator(theta: &ThetaMatrix) -> Result<Matrix> {
    check_theta(theta)?;
    Ok(pair_sum(theta.matrix(), &annihilators(theta.n_modes())?, true))
}

/// `A- = ½ Σ θ*_ij f_i f_j`, which equals `-(A+)†` by antisymmetry of `θ`.
pub fn pair_annihilation_operator(theta: &ThetaMatrix) -> Result<Matrix> {
    check_theta(theta)?;
    Ok(pair_sum(theta.matrix(), &annihilators(theta.n_modes())?, false))
}

pub fn build_generator(theta: &ThetaMatrix) -> Result<Generator> {
    check_theta(theta)?;
    let ops = annihilators(theta.n_modes())?;
    let l = pair_sum(theta.matrix(), &ops, true) + pair_sum(theta.matrix(), &ops, false);
    Generator::new(theta.n_modes(), l)
}

pub fn unitary_dense(gen: &Generator) -> Matrix {
    expm_anti_hermitian(gen.matrix())
}

/// Dense `U` for a coefficient set.
pub fn squeeze_unitary(coeffs: &BogolyubovCoefficients) -> Result<Matrix> {
    Ok(unitary_dense(&build_generator(&theta_from_coefficients(coeffs)?)?))
}

/// `max |U U† - I|`.
pub fn unitarity_defect(u: &Matrix) -> f64 {
    max_abs(&(u * u.adjoint() - Matrix::identity(u.nrows(), u.ncols())))
}

/// One row of `(μ, ν)` recovered from `U f_j U† = Σ_i μ_ji f_i + ν_ji f†_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeDecomposition {
    pub mu_row: Vec<C64>,
    pub nu_row: Vec<C64>,
    /// Largest entry of the part of `U f_j U†` outside the ladder span.
    pub residual: f64,
}

/// Projects `U f_j U†` onto `{f_i, f†_i}` with the Hilbert-Schmidt inner
/// product, under which the ladder operators are orthogonal with squared
/// norm `2^(N-1)`.
pub fn conjugate_mode(unitary: &Matrix, mode: Mode, n_modes: usize) -> Result<ModeDecomposition> {
    let ops = annihilators(n_modes)?;
    if mode.0 >= n_modes {
        return argument(format!("mode {} out of range for {n_modes} modes", mode.0));
    }
    let dim = 1usize << n_modes;
    if unitary.nrows() != dim || unitary.ncols() != dim {
        return argument(format!("unitary must be {dim}x{dim}"));
    }
    let x = unitary * &ops[mode.0] * unitary.adjoint();
    let norm = (dim / 2) as f64;
    // Tr(P† X) without forming the product.
    let inner = |p: &Matrix| p.iter().zip(x.iter()).map(|(a, b)| a.conj() * b).sum::<C64>() / norm;
    let mu_row: Vec<C64> = ops.iter().map(inner).collect();
    let nu_row: Vec<C64> = ops.iter().map(|f| inner(&f.adjoint())).collect();
    let mut rest = x;
    for (i, f) in ops.iter().enumerate() {
        rest -= f * mu_row[i] + f.adjoint() * nu_row[i];
    }
    let residual = max_abs(&rest);
    if residual > DECOMPOSITION_TOL {
        return Err(Error::Consistency(format!(
            "U f_{} U† leaves the ladder span (residual {residual:e})",
            mode.0
        )));
    }
    Ok(ModeDecomposition { mu_row, nu_row, residual })
}

/// Stacks [`conjugate_mode`] over every mode into full `(μ, ν)`.
pub fn conjugate_all_modes(unitary: &Matrix, n_modes: usize) -> Result<(Matrix, Matrix)> {
    let mut mu = Matrix::zeros(n_modes, n_modes);
    let mut nu = Matrix::zeros(n_modes, n_modes);
    for j in 0..n_modes {
        let row = conjugate_mode(unitary, Mode(j), n_modes)?;
        for i in 0..n_modes {
            mu[(j, i)] = row.mu_row[i];
            nu[(j, i)] = row.nu_row[i];
        }
    }
    Ok((mu, nu))
}

/// `I + X + X²/2`, exact for `X³ = 0`.
fn quadratic_exp(x: &Matrix) -> Matrix {
    Matrix::identity(x.nrows(), x.ncols()) + x + (x * x).scale(0.5)
}

/// The three factors of the decoupled form, ready to multiply.
#[derive(Debug, Clone)]
pub struct DecoupledFactors {
    pub r: f64,
    pub creation: Matrix,
    pub diagonal: Vec<f64>,
    pub annihilation: Matrix,
}

impl DecoupledFactors {
    pub fn new(theta: &ThetaMatrix) -> Result<Self> {
        check_theta(theta)?;
        let n = theta.n_modes();
        if n > 4 {
            return Err(Error::UnsupportedGenerator(format!(
                "quadratic truncation needs at most four modes, got {n}"
            )));
        }
        let r = theta.scalar_modulus(SCALAR_MODULUS_TOL).ok_or_else(|| {
            Error::UnsupportedGenerator("|theta| is not proportional to the identity".into())
        })?;
        let cos_r = r.cos();
        if cos_r < MIN_COS_R {
            return Err(Error::UnsupportedGenerator(format!(
                "factorised form is singular at cos|theta| = {cos_r:e}"
            )));
        }
        let t = if r > 0.0 { r.tan() / r } else { 1.0 };
        let ops = annihilators(n)?;
        let creation = quadratic_exp(&pair_sum(theta.matrix(), &ops, true).scale(t));
        let annihilation = quadratic_exp(&pair_sum(theta.matrix(), &ops, false).scale(t));
        let diagonal = (0..1usize << n)
            .map(|x| cos_r.powf(n as f64 / 2.0 - x.count_ones() as f64))
            .collect();
        Ok(DecoupledFactors { r, creation, diagonal, annihilation })
    }

    pub fn apply(&self, amplitudes: &nalgebra::DVector<C64>) -> nalgebra::DVector<C64> {
        let mut v = &self.annihilation * amplitudes;
        for (z, d) in v.iter_mut().zip(&self.diagonal) {
            *z *= *d;
        }
        &self.creation * v
    }

    /// Full product matrix.
    pub fn unitary(&self) -> Matrix {
        let mut m = self.annihilation.clone();
        for (r, d) in self.diagonal.iter().enumerate() {
            m.row_mut(r).scale_mut(*d);
        }
        &self.creation * m
    }
}

/// `U |ψ>` through the creation/number/annihilation factorisation.
pub fn apply_decoupled(theta: &ThetaMatrix, input: &FockState) -> Result<FockState> {
    if input.n_modes() != theta.n_modes() {
        return argument(format!("state on {} modes, theta on {}", input.n_modes(), theta.n_modes()));
    }
    let out = DecoupledFactors::new(theta)?.apply(input.amplitudes());
    FockState::new(input.n_modes(), out.iter().copied().collect())
}

/// Total charge `Σ_particles f†f - Σ_antiparticles f†f`.
pub fn charge_operator(scenario: Scenario) -> Result<Matrix> {
    let n = scenario.n_modes();
    let mut q = Matrix::zeros(1 << n, 1 << n);
    for m in scenario.particle_modes() {
        q += number_operator(m, n)?;
    }
    for m in scenario.antiparticle_modes() {
        q -= number_operator(m, n)?;
    }
    Ok(q)
}

/// `J_z = ½ Σ (f†_↑ f_↑ - f†_↓ f_↓)` over particles and antiparticles.
pub fn angular_momentum_operator(scenario: Scenario) -> Result<Matrix> {
    if !scenario.is_spinful() {
        return argument("angular momentum needs a spinful scenario");
    }
    let mut jz = Matrix::zeros(16, 16);
    for m in [Mode::A_UP, Mode::B_UP] {
        jz += number_operator(m, 4)?.scale(0.5);
    }
    for m in [Mode::A_DOWN, Mode::B_DOWN] {
        jz -= number_operator(m, 4)?.scale(0.5);
    }
    Ok(jz)
}

/// An in-region state expanded in out-region basis kets.
#[derive(Debug, Clone, PartialEq)]
pub struct InOutExpansion {
    state: FockState,
}

impl InOutExpansion {
    pub fn from_terms(n_modes: usize, terms: &[(Occupation, C64)]) -> Result<Self> {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n_modes];
        for (occ, z) in terms {
            if !occ.fits(n_modes) {
                return argument(format!("occupation {:#b} does not fit {n_modes} modes", occ.0));
            }
            amps[occ.index()] += z;
        }
        Ok(InOutExpansion { state: FockState::new(n_modes, amps)? })
    }

    pub fn state(&self) -> &FockState {
        &self.state
    }

    pub fn coefficient(&self, occ: Occupation) -> C64 {
        self.state.amplitude(occ)
    }

    /// Terms with modulus above `cutoff`, in basis order.
    pub fn terms(&self, cutoff: f64) -> Vec<(Occupation, C64)> {
        self.state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > cutoff)
            .map(|(i, z)| (Occupation(i as u32), *z))
            .collect()
    }

    pub fn max_difference(&self, other: &InOutExpansion) -> f64 {
        (self.state.amplitudes() - other.state.amplitudes()).iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// `U |occupation>_out`, evaluated with the dense unitary.
pub fn in_state_expansion(coeffs: &BogolyubovCoefficients, occupation: Occupation) -> Result<InOutExpansion> {
    let n = coeffs.scenario.n_modes();
    let state = FockState::basis(n, occupation)?.evolve(&squeeze_unitary(coeffs)?)?;
    Ok(InOutExpansion { state })
}

fn occ(modes: &[Mode]) -> Occupation {
    Occupation::from_modes(modes)
}

/// Closed-form expansion of `U |occupation>_out` in terms of `A` and `β`,
/// for the states worked out by hand: for the spinful scenarios the vacuum,
/// the full state, `|↑↓;0>`, `|↑;0>`, `|0;↑>`, `|↑↓;↑>`, `|↑;↑>` and
/// `|↓;↑>`; for the spinless scenario all four basis states. `None` for
/// anything else.
pub fn closed_form_expansion(
    coeffs: &BogolyubovCoefficients,
    occupation: Occupation,
) -> Option<Result<InOutExpansion>> {
    let a = C64::new(coeffs.amplitude, 0.0);
    let c = |z: C64| z.conj();
    let terms: Vec<(Occupation, C64)> = if coeffs.scenario.is_spinful() {
        let [[uu, ud], [du, dd]] = coeffs.beta;
        let (au, ad, bu, bd) = (Mode::A_UP, Mode::A_DOWN, Mode::B_UP, Mode::B_DOWN);
        let full = occ(&[au, ad, bu, bd]);
        match occupation {
            o if o == Occupation::VACUUM => vec![
                (Occupation::VACUUM, a * a),
                (occ(&[au, bu]), -a * c(uu)),
                (occ(&[au, bd]), -a * c(ud)),
                (occ(&[ad, bu]), -a * c(du)),
                (occ(&[ad, bd]), -a * c(dd)),
                (full, c(du) * c(ud) - c(uu) * c(dd)),
            ],
            o if o == full => vec![
                (Occupation::VACUUM, ud * du - uu * dd),
                (occ(&[au, bd]), a * du),
                (occ(&[ad, bu]), a * ud),
                (occ(&[au, bu]), -a * dd),
                (occ(&[ad, bd]), -a * uu),
                (full, a * a),
            ],
            o if o == occ(&[au, ad]) => vec![(o, C64::new(1.0, 0.0))],
            o if o == occ(&[au]) => vec![(o, a), (occ(&[au, ad, bu]), -c(du)), (occ(&[au, ad, bd]), -c(dd))],
            o if o == occ(&[bu]) => vec![(o, a), (occ(&[ad, bu, bd]), c(dd)), (occ(&[au, bu, bd]), c(ud))],
            o if o == occ(&[au, ad, bu]) => vec![(occ(&[au]), du), (occ(&[ad]), -uu), (o, a)],
            o if o == occ(&[au, bu]) => vec![
                (Occupation::VACUUM, a * uu),
                (occ(&[au, bd]), -uu * c(ud)),
                (occ(&[ad, bu]), ud * c(dd)),
                (o, a * a + ud.norm_sqr()),
                (occ(&[ad, bd]), -uu * c(dd)),
                (full, a * c(dd)),
            ],
            o if o == occ(&[ad, bu]) => vec![
                (Occupation::VACUUM, a * du),
                (o, a * a + dd.norm_sqr()),
                (occ(&[au, bd]), -c(ud) * du),
                (occ(&[au, bu]), dd * c(ud)),
                (occ(&[ad, bd]), -du * c(dd)),
                (full, -a * c(ud)),
            ],
            _ => return None,
        }
    } else {
        let b = coeffs.spinless_beta();
        let (p, q) = (Mode::PARTICLE, Mode::ANTIPARTICLE);
        match occupation.bits() {
            0 => vec![(Occupation::VACUUM, a), (occ(&[p, q]), -c(b))],
            1 | 2 => vec![(occupation, C64::new(1.0, 0.0))],
            3 => vec![(Occupation::VACUUM, b), (occupation, a)],
            _ => return None,
        }
    };
    Some(InOutExpansion::from_terms(coeffs.scenario.n_modes(), &terms))
}
