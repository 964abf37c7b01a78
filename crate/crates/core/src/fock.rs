//! Finite fermionic Fock space.
//!
//! Basis states are `N`-bit masks, bit `i` being the occupation of mode `i`
//! (little-endian in the mode index). The mask `x` stands for the ordered
//! product of creators with ascending index acting on the vacuum,
//!
//! ```text
//! |x> = f†_{i1} f†_{i2} ... f†_{ik} |0>,   i1 < i2 < ... < ik,
//! ```
//!
//! so that `f_i |x> = (-1)^s |x without i>` where `s` counts the occupied
//! modes of lower index (Jordan-Wigner ordering).
//!
//! For the spinful problems the modes are `a(↑), a(↓), b(↑), b(↓)`
//! (particle modes first); for the spinless problem they are `a, b`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::argument;
use crate::linalg::{hermiticity_defect, hermitian_eigen, trace};
use crate::{Error, Matrix, Result, C64};

pub const MAX_MODES: usize = 8;

/// Tolerance on the invariants of [`FockState`] and [`DensityOperator`].
pub const STATE_TOL: f64 = 1e-12;

/// Eigenvalues below this are treated as exact zeros by the entropy.
pub const EIGEN_FLOOR: f64 = 1e-14;

/// Index of a fermionic mode in the fixed ordering described in the module
/// docs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mode(pub usize);

impl Mode {
    pub const A_UP: Mode = Mode(0);
    pub const A_DOWN: Mode = Mode(1);
    pub const B_UP: Mode = Mode(2);
    pub const B_DOWN: Mode = Mode(3);

    pub const PARTICLE: Mode = Mode(0);
    pub const ANTIPARTICLE: Mode = Mode(1);

    pub fn index(self) -> usize {
        self.0
    }
}

/// A basis state of the occupation-number basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Occupation(pub u32);

impl Occupation {
    pub const VACUUM: Occupation = Occupation(0);

    pub fn from_modes(modes: &[Mode]) -> Occupation {
        Occupation(modes.iter().fold(0, |acc, m| acc | (1 << m.0)))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_occupied(self, mode: Mode) -> bool {
        self.0 >> mode.0 & 1 == 1
    }

    /// Total number of occupied modes.
    pub fn count(self) -> u32 {
        self.0.count_ones()
    }

    pub fn fits(self, n_modes: usize) -> bool {
        n_modes >= 32 || self.0 >> n_modes == 0
    }
}

fn check_modes(n_modes: usize) -> Result<()> {
    if n_modes == 0 || n_modes > MAX_MODES {
        return argument(format!("mode count {n_modes} outside 1..={MAX_MODES}"));
    }
    Ok(())
}

/// Matrix of the annihilator `f_mode` on `n_modes` modes.
pub fn annihilation_operator(mode: Mode, n_modes: usize) -> Result<Matrix> {
    check_modes(n_modes)?;
    if mode.0 >= n_modes {
        return argument(format!("mode {} out of range for {n_modes} modes", mode.0));
    }
    let dim = 1usize << n_modes;
    let bit = 1usize << mode.0;
    let below = bit - 1;
    let mut f = Matrix::zeros(dim, dim);
    for x in 0..dim {
        if x & bit != 0 {
            let sign = if (x & below).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            f[(x ^ bit, x)] = C64::new(sign, 0.0);
        }
    }
    Ok(f)
}

pub fn creation_operator(mode: Mode, n_modes: usize) -> Result<Matrix> {
    Ok(annihilation_operator(mode, n_modes)?.adjoint())
}

/// Diagonal `f†_mode f_mode`.
pub fn number_operator(mode: Mode, n_modes: usize) -> Result<Matrix> {
    check_modes(n_modes)?;
    if mode.0 >= n_modes {
        return argument(format!("mode {} out of range for {n_modes} modes", mode.0));
    }
    let dim = 1usize << n_modes;
    Ok(Matrix::from_fn(dim, dim, |r, c| {
        if r == c && r >> mode.0 & 1 == 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// All annihilators of an `n_modes` system, in mode order.
pub fn annihilators(n_modes: usize) -> Result<Vec<Matrix>> {
    (0..n_modes).map(|i| annihilation_operator(Mode(i), n_modes)).collect()
}

/// Normalized pure state on `2^n_modes` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    n_modes: usize,
    amplitudes: DVector<C64>,
}

impl FockState {
    /// Accepts amplitudes that are already normalized within [`STATE_TOL`].
    pub fn new(n_modes: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_modes(n_modes)?;
        if amplitudes.len() != 1 << n_modes {
            return argument(format!(
                "expected {} amplitudes for {n_modes} modes, got {}",
                1usize << n_modes,
                amplitudes.len()
            ));
        }
        let amplitudes = DVector::from_vec(amplitudes);
        let norm2 = amplitudes.norm_squared();
        if (norm2 - 1.0).abs() > STATE_TOL {
            return Err(Error::Validation(format!("state norm^2 = {norm2}, expected 1")));
        }
        Ok(FockState { n_modes, amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(n_modes: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Validation("cannot normalize a zero or non-finite vector".into()));
        }
        FockState::new(n_modes, amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn basis(n_modes: usize, occupation: Occupation) -> Result<Self> {
        check_modes(n_modes)?;
        if !occupation.fits(n_modes) {
            return argument(format!("occupation {:#b} does not fit {n_modes} modes", occupation.0));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << n_modes];
        amplitudes[occupation.index()] = C64::new(1.0, 0.0);
        FockState::new(n_modes, amplitudes)
    }

    pub fn vacuum(n_modes: usize) -> Result<Self> {
        FockState::basis(n_modes, Occupation::VACUUM)
    }

    /// Product of a state on the low modes with a state on the high modes,
    /// `|ψ> ⊗ |φ>` = (creators of ψ)(creators of φ)|0>.
    pub fn product(low: &FockState, high: &FockState) -> Result<Self> {
        let n_modes = low.n_modes + high.n_modes;
        check_modes(n_modes)?;
        let low_dim = low.dim();
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << n_modes];
        for (h, zh) in high.amplitudes.iter().enumerate() {
            for (l, zl) in low.amplitudes.iter().enumerate() {
                amplitudes[l + low_dim * h] = zl * zh;
            }
        }
        FockState::normalized(n_modes, amplitudes)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        1 << self.n_modes
    }

    pub fn amplitude(&self, occupation: Occupation) -> C64 {
        self.amplitudes[occupation.index()]
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Applies a unitary and re-validates normalization.
    pub fn evolve(&self, unitary: &Matrix) -> Result<FockState> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return argument(format!(
                "operator of shape {}x{} cannot act on a {}-dimensional state",
                unitary.nrows(),
                unitary.ncols(),
                self.dim()
            ));
        }
        FockState::new(self.n_modes, (unitary * &self.amplitudes).iter().copied().collect())
    }
}

/// Hermitian, unit-trace, positive semidefinite operator on `n_modes` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    n_modes: usize,
    matrix: Matrix,
}

impl DensityOperator {
    pub fn new(n_modes: usize, matrix: Matrix) -> Result<Self> {
        check_modes(n_modes)?;
        let dim = 1usize << n_modes;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return argument(format!(
                "density matrix must be {dim}x{dim}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > STATE_TOL {
            return Err(Error::Validation(format!("not Hermitian (defect {defect:e})")));
        }
        let tr = trace(&matrix);
        if (tr - C64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::Validation(format!("trace {tr} differs from 1")));
        }
        let (eigs, _) = hermitian_eigen(&matrix);
        if let Some(&min) = eigs.first() {
            if min < -STATE_TOL {
                return Err(Error::Validation(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(DensityOperator { n_modes, matrix })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0
    }
}

/// `|ψ><ψ|`.
pub fn outer_product(state: &FockState) -> DensityOperator {
    let psi = state.amplitudes();
    DensityOperator {
        n_modes: state.n_modes(),
        matrix: psi * psi.adjoint(),
    }
}

/// Reduced density operator on the modes in `keep`.
///
/// Fermionic convention: a full basis state `x` is first reordered so that
/// the kept creators stand to the left of the traced ones (each group keeping
/// ascending order), `|x> = s(x) |x_keep> ⊗ |x_trace>`, where `s(x) = ±1` is
/// the parity of the pairs (kept mode `i`, traced mode `j`) with `j < i` and
/// both occupied. Then `ρ_red[k, k'] = Σ_t s(k,t) s(k',t) ρ[(k,t), (k',t)]`.
/// Diagonal entries never pick up a sign, and when the kept modes are the
/// lowest-index ones (particles kept, antiparticles traced) all signs are `+1`.
pub fn partial_trace(rho: &DensityOperator, keep: &[Mode]) -> Result<DensityOperator> {
    let n = rho.n_modes;
    if keep.is_empty() {
        return argument("keep set is empty");
    }
    let mut kept: Vec<usize> = keep.iter().map(|m| m.0).collect();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return argument("keep set contains duplicates");
    }
    if let Some(&bad) = kept.iter().find(|&&m| m >= n) {
        return argument(format!("mode {bad} is not part of a {n}-mode operator"));
    }
    let traced: Vec<usize> = (0..n).filter(|m| !kept.contains(m)).collect();

    let compose = |k: usize, t: usize| -> (usize, f64) {
        let mut x = 0usize;
        for (pos, &m) in kept.iter().enumerate() {
            if k >> pos & 1 == 1 {
                x |= 1 << m;
            }
        }
        for (pos, &m) in traced.iter().enumerate() {
            if t >> pos & 1 == 1 {
                x |= 1 << m;
            }
        }
        let mut swaps = 0u32;
        for &i in &kept {
            if x >> i & 1 == 1 {
                swaps += traced.iter().filter(|&&j| j < i && x >> j & 1 == 1).count() as u32;
            }
        }
        (x, if swaps % 2 == 0 { 1.0 } else { -1.0 })
    };

    let kdim = 1usize << kept.len();
    let tdim = 1usize << traced.len();
    let mut reduced = Matrix::zeros(kdim, kdim);
    for t in 0..tdim {
        let cols: Vec<(usize, f64)> = (0..kdim).map(|k| compose(k, t)).collect();
        for (r, &(xr, sr)) in cols.iter().enumerate() {
            for (c, &(xc, sc)) in cols.iter().enumerate() {
                reduced[(r, c)] += rho.matrix[(xr, xc)] * (sr * sc);
            }
        }
    }
    // Symmetrise away rounding so the invariants hold at the 1e-12 level.
    let reduced = (&reduced + reduced.adjoint()).scale(0.5);
    DensityOperator::new(kept.len(), reduced)
}

/// Entropy in bits, `-Σ λ log2 λ`, with eigenvalues below [`EIGEN_FLOOR`]
/// contributing nothing.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    let s: f64 = rho
        .eigenvalues()
        .into_iter()
        .filter(|&l| l > EIGEN_FLOOR)
        .map(|l| -l * l.log2())
        .sum();
    s.max(0.0)
}
