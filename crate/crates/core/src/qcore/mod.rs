//! Linear-algebra and quantum-information primitives.
//!
//! Matrices are dense `nalgebra` matrices of `Complex<f64>`. Superoperators
//! act on column-stacked vectorisations, `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

mod channel;
mod distance;
mod state;

pub use channel::{
    apply_channel, choi_of, kraus_from_choi, kraus_pair, tensor_apply, tensor_apply_matrix,
    ChoiMatrix, KrausSet, Superoperator,
};
pub use distance::{bures_distance, fidelity, statistical_distance, trace_distance};
pub use state::DensityMatrix;

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

/// Tolerance used when validating Hermiticity of user input.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// |0⟩⟨1|, lowers the σz eigenvalue from -1 to +1.
pub fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)])
}

pub fn sigma_minus() -> ComplexMatrix {
    sigma_plus().adjoint()
}

/// Matrix unit |i⟩⟨j| of dimension d.
pub fn matrix_unit(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    m[(i, j)] = c(1., 0.);
    m
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Column-stacking vectorisation.
pub fn vec_col(m: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_column_slice(m.as_slice())
}

pub fn unvec_col(v: &ComplexVector, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(d, d, v.as_slice())
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * c(0.5, 0.)
}

fn check_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    Ok(())
}

/// Eigenvalues (descending) and orthonormal eigenvectors (as columns) of a
/// Hermitian matrix.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_square(m)?;
    let defect = hermiticity_defect(m);
    let scale = m.iter().fold(1.0_f64, |a, z| a.max(z.norm()));
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NonHermitianInput(defect));
    }
    Ok(hermitian_eig_unchecked(&hermitian_part(m)))
}

pub(crate) fn hermitian_eig_unchecked(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let d = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(d, d);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(k));
    }
    (values, vectors)
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    let (vals, _) = hermitian_eig_unchecked(&hermitian_part(&gram));
    vals[0].max(0.0).sqrt()
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    let gram = m.adjoint() * m;
    let (vals, _) = hermitian_eig_unchecked(&hermitian_part(&gram));
    vals.iter().map(|v| v.max(0.0).sqrt()).sum()
}

/// Apply a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_fn(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let (vals, vecs) = hermitian_eig_unchecked(&hermitian_part(m));
    let diag = ComplexMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| c(f(v), 0.)),
    ));
    &vecs * diag * vecs.adjoint()
}

/// Square root of a positive semidefinite matrix; negative round-off
/// eigenvalues are clipped to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    hermitian_fn(m, |v| v.max(0.0).sqrt())
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Unitary `exp(-i t H)` for Hermitian `H`.
pub fn unitary_evolution(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let (vals, vecs) = hermitian_eig_unchecked(&hermitian_part(h));
    let diag = ComplexMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| C64::from_polar(1.0, -v * t)),
    ));
    &vecs * diag * vecs.adjoint()
}
