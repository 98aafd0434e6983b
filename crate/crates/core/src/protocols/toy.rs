use crate::qcore::{c, sigma_x, sigma_z, trace, unitary_evolution, ComplexVector, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Ramsey readout `⟨σ_z⟩` under a random static field
/// `H = ω0σz/2 + η(cos θ σx + sin θ σz)` with `η ~ N(0, σ_η²)`.
///
/// Each sample prepares |x+⟩, evolves for `t`, applies a π/2 rotation about
/// x and records `⟨σ_z⟩`.
pub fn toy_model_sample(theta: f64, sigma_eta: f64, omega0: f64, t: f64, samples: usize, seed: u64) -> Result<Vec<f64>> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    if !(sigma_eta >= 0.0 && sigma_eta.is_finite()) {
        return Err(Error::InvalidArgument(format!("sigma_eta = {sigma_eta} must be finite and >= 0")));
    }
    let normal = Normal::new(0.0, sigma_eta).expect("validated std-dev");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h0 = sigma_z() * c(0.5 * omega0, 0.);
    let noise = sigma_x() * c(theta.cos(), 0.) + sigma_z() * c(theta.sin(), 0.);
    let readout = unitary_evolution(&(sigma_x() * c(0.5, 0.)), FRAC_PI_2);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = ComplexVector::from_vec(vec![C64::new(s, 0.), C64::new(s, 0.)]);
    let out = (0..samples)
        .map(|_| {
            let eta = normal.sample(&mut rng);
            let u = unitary_evolution(&(&h0 + &noise * c(eta, 0.)), t);
            let psi = &readout * (u * &plus);
            let rho = &psi * psi.adjoint();
            trace(&(sigma_z() * rho)).re
        })
        .collect();
    Ok(out)
}

/// Default interrogation time `ω0 t = π/2`.
pub fn toy_default_time(omega0: f64) -> f64 {
    FRAC_PI_2 / omega0
}

/// Counts of samples in `bins` equal-width bins on [-1, 1].
pub fn histogram(samples: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    let bins = bins.max(1);
    let w = 2.0 / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in samples {
        let k = (((x + 1.0) / w).floor() as isize).clamp(0, bins as isize - 1) as usize;
        counts[k] += 1;
    }
    counts.into_iter().enumerate().map(|(k, n)| (-1.0 + k as f64 * w, -1.0 + (k + 1) as f64 * w, n)).collect()
}

pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_samples_coincide() {
        let xs = toy_model_sample(0.3, 0.0, 1.0, toy_default_time(1.0), 50, 1).unwrap();
        assert!(xs.iter().all(|&x| x == xs[0]));
        assert!((xs[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn seeded_runs_repeat() {
        let a = toy_model_sample(0.0, 0.1, 1.0, 1.0, 100, 9).unwrap();
        let b = toy_model_sample(0.0, 0.1, 1.0, 1.0, 100, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn histogram_counts_everything() {
        let h = histogram(&[-1.0, 0.0, 0.99, 1.0], 4);
        assert_eq!(h.iter().map(|b| b.2).sum::<usize>(), 4);
        assert_eq!(h[3].2, 2);
    }
}
