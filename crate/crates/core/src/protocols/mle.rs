use crate::error::{Error, Result};
use crate::fisher::ParamProbability;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    Mle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub seed: u64,
    /// Shots ν per simulated experiment.
    pub repetitions: u64,
    /// Number of simulated experiments.
    pub replications: usize,
    pub estimator: Estimator,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { seed: 0, repetitions: 100_000, replications: 200, estimator: Estimator::Mle }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub mse: f64,
    pub bias: f64,
    /// Replications whose estimate landed on the edge of the bracket.
    pub edge_hits: usize,
}

fn log_likelihood(p: f64, k: u64, nu: u64) -> f64 {
    let (k, f) = (k as f64, (nu - k) as f64);
    let a = if k > 0.0 { k * p.ln() } else { 0.0 };
    let b = if f > 0.0 { f * (1.0 - p).ln() } else { 0.0 };
    a + b
}

/// Maximiser of the binomial log-likelihood over `[lo, hi]`: dense scan
/// followed by golden-section refinement.
fn maximize_likelihood<F: Fn(f64) -> f64>(p: &F, k: u64, nu: u64, lo: f64, hi: f64) -> Result<f64> {
    let ll = |w: f64| {
        let v = log_likelihood(p(w).clamp(0.0, 1.0), k, nu);
        if v.is_nan() { f64::NEG_INFINITY } else { v }
    };
    let pts = 64;
    let h = (hi - lo) / pts as f64;
    let (j, _) = (0..=pts)
        .map(|j| (j, ll(lo + j as f64 * h)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty scan");
    let a = (lo + (j as f64 - 1.0) * h).max(lo);
    let b = (lo + (j as f64 + 1.0) * h).min(hi);
    crate::bounds::golden_section(|w| Ok(-ll(w)), a, b, 1e-13 * (1.0 + hi.abs()))
}

/// Empirical MSE and bias of the maximum-likelihood estimator for a
/// two-outcome model `P(0|ω)`, from `cfg.replications` experiments of
/// `cfg.repetitions` shots each. The likelihood is maximised on
/// `ω0 ± half_width`.
pub fn mle_monte_carlo<F>(p_model: F, omega0: f64, half_width: f64, cfg: &McConfig) -> Result<McResult>
where
    F: Fn(f64) -> Result<ParamProbability> + Sync,
{
    if cfg.repetitions == 0 || cfg.replications == 0 {
        return Err(Error::InvalidArgument("repetitions and replications must be >= 1".into()));
    }
    if !(half_width > 0.0) {
        return Err(Error::InvalidArgument(format!("bracket half-width {half_width} must be > 0")));
    }
    let truth = p_model(omega0)?;
    if truth.probs().len() != 2 {
        return Err(Error::InvalidArgument("model must have two outcomes".into()));
    }
    let p0 = truth.probs()[0];
    if p0 == 0.0 || p0 == 1.0 {
        return Err(Error::LikelihoodDegenerate);
    }
    let p = |w: f64| p_model(w).map(|q| q.probs()[0]).unwrap_or(f64::NAN);
    let binom = Binomial::new(cfg.repetitions, p0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let (lo, hi) = (omega0 - half_width, omega0 + half_width);
    let edge = 1e-9 * half_width;
    let estimates = (0..cfg.replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            let k = binom.sample(&mut rng);
            maximize_likelihood(&p, k, cfg.repetitions, lo, hi)
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = estimates.len() as f64;
    let bias = estimates.iter().map(|w| w - omega0).sum::<f64>() / n;
    let mse = estimates.iter().map(|w| (w - omega0).powi(2)).sum::<f64>() / n;
    let edge_hits = estimates.iter().filter(|&&w| w - lo < edge || hi - w < edge).count();
    Ok(McResult { mse, bias, edge_hits })
}
