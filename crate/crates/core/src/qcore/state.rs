use super::{c, hermitian_eig_unchecked, hermitian_part, hermiticity_defect, trace, ComplexMatrix, ComplexVector};
use crate::error::{Error, Result};

const STATE_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-10;

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let defect = hermiticity_defect(&m);
        if defect > STATE_TOL {
            return Err(Error::NonHermitianInput(defect));
        }
        let tr = trace(&m);
        if (tr - c(1., 0.)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let (vals, _) = hermitian_eig_unchecked(&hermitian_part(&m));
        let min = vals[vals.len() - 1];
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(DensityMatrix(m))
    }

    /// Symmetrise and renormalise a numerically propagated matrix before
    /// validating it.
    pub fn from_numerical(m: &ComplexMatrix) -> Result<Self> {
        let h = hermitian_part(m);
        let tr = trace(&h).re;
        if !tr.is_finite() || tr <= 0.0 {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        Self::new(h / c(tr, 0.))
    }

    pub fn from_pure(psi: &ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(norm * norm));
        }
        Self::from_numerical(&(psi * psi.adjoint()))
    }

    /// Qubit state from a Bloch vector with |r| ≤ 1.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c((1. + z) / 2., 0.), c(x / 2., -y / 2.), c(x / 2., y / 2.), c((1. - z) / 2., 0.)],
        );
        Self::new(m)
    }

    /// |+⟩ = (|0⟩ + |1⟩)/√2.
    pub fn plus() -> Self {
        Self::from_bloch(1., 0., 0.).expect("valid state")
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix(ComplexMatrix::identity(d, d) / c(d as f64, 0.))
    }

    /// GHZ state (|0…0⟩ + |1…1⟩)/√2 on n qubits.
    pub fn ghz(n: usize) -> Self {
        let d = 1usize << n;
        let mut m = ComplexMatrix::zeros(d, d);
        for &(i, j) in &[(0, 0), (0, d - 1), (d - 1, 0), (d - 1, d - 1)] {
            m[(i, j)] = c(0.5, 0.);
        }
        DensityMatrix(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Bloch vector (x, y, z) of a qubit state.
    pub fn bloch(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::NotSingleQubit(self.dim()));
        }
        let m = &self.0;
        Ok([2.0 * m[(1, 0)].re, 2.0 * m[(1, 0)].im, (m[(0, 0)] - m[(1, 1)]).re])
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig_unchecked(&self.0).0
    }

    pub fn purity(&self) -> f64 {
        trace(&(&self.0 * &self.0)).re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bloch_round_trip() {
        let rho = DensityMatrix::from_bloch(0.3, -0.4, 0.5).unwrap();
        let b = rho.bloch().unwrap();
        assert!((b[0] - 0.3).abs() < 1e-15 && (b[1] + 0.4).abs() < 1e-15 && (b[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_states() {
        assert!(DensityMatrix::from_bloch(1.0, 1.0, 0.0).is_err());
        let m = ComplexMatrix::identity(2, 2);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidState(_))));
    }

    #[test]
    fn ghz_is_pure() {
        let g = DensityMatrix::ghz(3);
        assert!((g.purity() - 1.0).abs() < 1e-15);
        assert!(DensityMatrix::new(g.into_matrix()).is_ok());
    }
}
