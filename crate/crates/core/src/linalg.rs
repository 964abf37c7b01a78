//! Small dense helpers shared by the operator modules.
//!
//! Every matrix function here goes through the Hermitian eigendecomposition,
//! which is exact up to rounding for the `<= 256`-dimensional operators the
//! crate works with.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{Matrix, C64};

pub fn dagger(m: &Matrix) -> Matrix {
    m.adjoint()
}

/// Largest entry modulus.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    a * b - b * a
}

pub fn anticommutator(a: &Matrix, b: &Matrix) -> Matrix {
    a * b + b * a
}

/// `max |m - m^dagger|`.
pub fn hermiticity_defect(m: &Matrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn identity(dim: usize) -> Matrix {
    DMatrix::identity(dim, dim)
}

pub fn trace(m: &Matrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix. The input
/// is symmetrised first so a defect at rounding level cannot leak into the
/// decomposition.
pub fn hermitian_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Applies `f` to the spectrum of a Hermitian matrix: `V f(D) V^dagger`.
pub fn hermitian_function(m: &Matrix, f: impl Fn(f64) -> C64) -> Matrix {
    let (values, vectors) = hermitian_eigen(m);
    let n = values.len();
    let mut scaled = vectors.clone();
    for (c, &lambda) in values.iter().enumerate() {
        let w = f(lambda);
        for r in 0..n {
            scaled[(r, c)] *= w;
        }
    }
    scaled * vectors.adjoint()
}

/// `exp(gen)` for an anti-Hermitian `gen`, via the spectrum of `i * gen`.
pub fn expm_anti_hermitian(gen: &Matrix) -> Matrix {
    let h = gen.map(|z| z * C64::i());
    // gen = -i h  =>  exp(gen) = V exp(-i lambda) V^dagger
    hermitian_function(&h, |lambda| C64::new(0.0, -lambda).exp())
}

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}
