//! Classical and quantum Fisher information.

use crate::error::{Error, Result};
use crate::qcore::{
    bures_distance, c, hermitian_eig_unchecked, hermitian_part, hermiticity_defect, sigma_x, sigma_y, sigma_z,
    trace, ComplexMatrix, ComplexVector, DensityMatrix,
};

/// Eigenvalues of ρ (and SLD denominators) below this are treated as zero.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Outcome distribution p(x|ω0) with its derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamProbability {
    outcomes: Vec<String>,
    probs: Vec<f64>,
    dprobs: Vec<f64>,
}

impl ParamProbability {
    pub fn new(outcomes: Vec<String>, probs: Vec<f64>, dprobs: Vec<f64>) -> Result<Self> {
        if outcomes.len() != probs.len() {
            return Err(Error::LengthMismatch { left: outcomes.len(), right: probs.len() });
        }
        if probs.len() != dprobs.len() {
            return Err(Error::LengthMismatch { left: probs.len(), right: dprobs.len() });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 || probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::NotNormalized(total));
        }
        let dtotal: f64 = dprobs.iter().sum();
        if dtotal.abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("derivatives sum to {dtotal}, not 0")));
        }
        Ok(ParamProbability { outcomes, probs, dprobs })
    }

    /// Two outcomes "0"/"1" with P(0) = p.
    pub fn binary(p: f64, dp: f64) -> Result<Self> {
        Self::new(vec!["0".into(), "1".into()], vec![p, 1.0 - p], vec![dp, -dp])
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn dprobs(&self) -> &[f64] {
        &self.dprobs
    }
}

/// `Σ (∂p)²/p` over outcomes with p > 1e-15.
pub fn classical_fi(p: &ParamProbability) -> Result<f64> {
    let mut fi = 0.0;
    for (k, (&pk, &dk)) in p.probs.iter().zip(&p.dprobs).enumerate() {
        if pk > 1e-15 {
            fi += dk * dk / pk;
        } else if dk.abs() > 1e-12 {
            return Err(Error::SingularOutcome(k));
        }
    }
    Ok(fi)
}

/// `1/(ν F)`.
pub fn crb(fi: f64, nu: f64) -> Result<f64> {
    if !(fi > 0.0) {
        return Err(Error::ZeroInformation);
    }
    if !(nu > 0.0) {
        return Err(Error::InvalidArgument(format!("repetitions {nu} must be > 0")));
    }
    Ok(1.0 / (nu * fi))
}

/// Fisher information of independent events adds.
pub fn combine(fi1: f64, fi2: f64) -> f64 {
    fi1 + fi2
}

fn check_derivative(rho: &DensityMatrix, drho: &ComplexMatrix) -> Result<()> {
    if drho.nrows() != rho.dim() || drho.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: drho.nrows() });
    }
    let defect = hermiticity_defect(drho);
    if defect > 1e-9 {
        return Err(Error::NonHermitianDerivative(defect));
    }
    let tr = trace(drho).re;
    if tr.abs() > 1e-9 {
        return Err(Error::NonTracelessDerivative(tr));
    }
    Ok(())
}

/// Symmetric logarithmic derivative solving `∂ρ = (Lρ + ρL)/2` on the
/// support of ρ.
pub fn sld(rho: &DensityMatrix, drho: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_derivative(rho, drho)?;
    let (vals, vecs) = hermitian_eig_unchecked(rho.matrix());
    let p: Vec<f64> = vals.iter().map(|&v| if v > SUPPORT_CUTOFF { v } else { 0.0 }).collect();
    let mut l = vecs.adjoint() * hermitian_part(drho) * &vecs;
    let d = p.len();
    for j in 0..d {
        for k in 0..d {
            let s = p[j] + p[k];
            l[(j, k)] = if s > SUPPORT_CUTOFF { l[(j, k)] * (2.0 / s) } else { c(0., 0.) };
        }
    }
    Ok(hermitian_part(&(&vecs * l * vecs.adjoint())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct QfiResult {
    pub value: f64,
    pub sld: ComplexMatrix,
}

/// `F_Q = tr(ρ L²)`.
pub fn qfi(rho: &DensityMatrix, drho: &ComplexMatrix) -> Result<QfiResult> {
    let l = sld(rho, drho)?;
    let value = trace(&(rho.matrix() * &l * &l)).re.max(0.0);
    Ok(QfiResult { value, sld: l })
}

/// `4(⟨∂ψ|∂ψ⟩ − |⟨ψ|∂ψ⟩|²)` for a normalised ψ.
pub fn qfi_pure(psi: &ComplexVector, dpsi: &ComplexVector) -> Result<f64> {
    if psi.len() != dpsi.len() {
        return Err(Error::DimensionMismatch { expected: psi.len(), found: dpsi.len() });
    }
    let norm = psi.norm_squared();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(norm));
    }
    let overlap = psi.dotc(dpsi);
    Ok((4.0 * (dpsi.norm_squared() - overlap.norm_sqr())).max(0.0))
}

/// Single-shot variance of the estimate from an observable: `Δ²O / (∂⟨O⟩)²`.
pub fn error_prop_observable(mean_o: f64, mean_o2: f64, dmean_o: f64) -> Result<f64> {
    if dmean_o == 0.0 || !dmean_o.is_finite() {
        return Err(Error::ZeroSlope);
    }
    let var = mean_o2 - mean_o * mean_o;
    if var < -1e-12 {
        return Err(Error::InvalidArgument(format!("negative variance {var}")));
    }
    Ok(var.max(0.0) / (dmean_o * dmean_o))
}

/// QFI from the Bures distance between neighbouring states,
/// `4 (d_B(ρ₋, ρ₊) / 2ε)²`.
pub fn qfi_bures_oracle(minus: &DensityMatrix, center: &DensityMatrix, plus: &DensityMatrix, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("step {eps} must be > 0")));
    }
    let est = |d: f64, h: f64| 4.0 * (d / h).powi(2);
    let central = est(bures_distance(minus, plus)?, 2.0 * eps);
    let left = est(bures_distance(minus, center)?, eps);
    let right = est(bures_distance(center, plus)?, eps);
    if (left - right).abs() > 0.01 * left.max(right) + 1e-6 {
        return Err(Error::StepTooLarge { left, right });
    }
    Ok(central)
}

/// Outcome distribution of the projective qubit measurement along the Bloch
/// axis `n` (normalised internally).
pub fn projective_probability(rho: &DensityMatrix, drho: &ComplexMatrix, n: [f64; 3]) -> Result<ParamProbability> {
    if rho.dim() != 2 {
        return Err(Error::NotSingleQubit(rho.dim()));
    }
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if len == 0.0 {
        return Err(Error::InvalidArgument("measurement axis is zero".into()));
    }
    let obs = sigma_x() * c(n[0] / len, 0.) + sigma_y() * c(n[1] / len, 0.) + sigma_z() * c(n[2] / len, 0.);
    let m = trace(&(rho.matrix() * &obs)).re;
    let dm = trace(&(drho * &obs)).re;
    let p = (0.5 * (1.0 + m)).clamp(0.0, 1.0);
    ParamProbability::binary(p, 0.5 * dm)
}
