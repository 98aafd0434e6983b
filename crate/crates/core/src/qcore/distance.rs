use super::{hermitian_eig_unchecked, hermitian_part, psd_sqrt, trace, DensityMatrix};
use crate::error::{Error, Result};

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(())
}

/// ½‖ρ − σ‖₁.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let (vals, _) = hermitian_eig_unchecked(&hermitian_part(&(rho.matrix() - sigma.matrix())));
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

/// Root fidelity `tr √(√ρ σ √ρ)`, clamped to [0, 1].
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let f = if rho.dim() == 2 {
        // tr√(√ρσ√ρ)² = tr ρσ + 2√(det ρ det σ) for qubits.
        let (a, b) = (rho.matrix(), sigma.matrix());
        let det = |m: &super::ComplexMatrix| (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re.max(0.0);
        let overlap = trace(&(a * b)).re;
        (overlap + 2.0 * (det(a) * det(b)).sqrt()).max(0.0).sqrt()
    } else {
        let s = psd_sqrt(rho.matrix());
        let inner = &s * sigma.matrix() * &s;
        let (vals, _) = hermitian_eig_unchecked(&hermitian_part(&inner));
        vals.iter().map(|v| v.max(0.0).sqrt()).sum()
    };
    Ok(f.clamp(0.0, 1.0))
}

/// Bures angle `arccos F(ρ, σ)`.
pub fn bures_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(fidelity(rho, sigma)?.acos())
}

/// Bhattacharyya angle `arccos Σ √(p q)` between two distributions.
pub fn statistical_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch { left: p.len(), right: q.len() });
    }
    for dist in [p, q] {
        let s: f64 = dist.iter().sum();
        if (s - 1.0).abs() > 1e-9 || dist.iter().any(|&v| v < 0.0) {
            return Err(Error::NotNormalized(s));
        }
    }
    let bc: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    Ok(bc.clamp(0.0, 1.0).acos())
}
