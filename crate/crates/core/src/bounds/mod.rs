//! Channel-extension upper bound on the quantum Fisher information of N
//! parallel uses of a qubit channel, and the time-optimised QCRB built
//! from it.

mod bfgs;
mod nelder_mead;
mod objective;
mod time;

pub use nelder_mead::{nelder_mead, NmOptions, NmResult};
pub use objective::{alpha_beta, tilde_kraus, HermitianParam};
pub use time::{geometric_grid, qcrb_over_time, qcrb_over_time_with, QcrbOptions, QcrbResult, SWEEP_RANK};
pub(crate) use time::golden_section;

use crate::error::{Error, Result};
use crate::qcore::KrausSet;
use objective::Objective;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Bound on F for N probes at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub n: u64,
    pub t: Option<f64>,
    pub value: f64,
    pub h_opt: HermitianParam,
    pub objective_evals: usize,
    pub converged: bool,
    /// ‖β‖ at the optimum; below 1e-8 the second inequality is expected to be tight.
    pub beta_norm: f64,
    /// Relative spread of the converged restart minima.
    pub restart_spread: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_evals: usize,
    pub rel_tol: f64,
    /// Starting point of the first restart (zero if absent).
    pub warm_start: Option<Vec<f64>>,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions { restarts: 20, seed: 0x5eed, max_evals: 10_000, rel_tol: 1e-8, warm_start: None }
    }
}

/// Smoothing levels, relative to the objective at h = 0.
const TAU_SCHEDULE: [f64; 9] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10];

/// One restart: BFGS on the smoothed objective while the smoothing is
/// tightened, then a Nelder–Mead polish on the exact objective.
fn minimize_from(obj: &Objective, x0: Vec<f64>, scale: f64, opts: &BoundOptions) -> (Vec<f64>, f64, usize, bool) {
    let s0 = obj.eval(&vec![0.0; obj.num_params()]).max(f64::MIN_POSITIVE);
    let w = obj.weight().max(1.0);
    let mut x = x0;
    let mut evals = 0;
    let mut converged = true;
    for &rel in &TAU_SCHEDULE {
        let tau_a = rel * s0;
        let tau_b = tau_a / (w * s0).sqrt();
        let out = bfgs::bfgs(|x, g| obj.eval_smooth(x, tau_a, tau_b, g), x, scale, 500, 1e-14);
        evals += out.evals;
        x = out.x;
        converged = out.converged;
        if evals >= opts.max_evals {
            break;
        }
    }
    let before = obj.eval(&x);
    let mut f = |x: &[f64]| obj.eval(x);
    let nm = NmOptions { max_evals: 2000, rel_tol: 1e-13, abs_tol: 1e-300 };
    let polish = nelder_mead(&mut f, &x, scale * 1e-6, &nm);
    evals += polish.evals + 1;
    let (x, fx) = if polish.f < before { (polish.x, polish.f) } else { (x, before) };
    converged &= (before - fx) <= opts.rel_tol * fx.abs();
    (x, fx, evals, converged)
}

/// `4N · min_h [‖α‖ + (N−1)‖β‖²]` with explicit optimiser settings.
pub fn cqfi_upper_with(k: &KrausSet, n: u64, opts: &BoundOptions) -> Result<BoundResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    if k.completeness_defect() > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "Kraus set is not complete (defect {:.3e})",
            k.completeness_defect()
        )));
    }
    let obj = Objective::new(k, n)?;
    let np = obj.num_params();
    let scale = obj.scale();
    if scale == 0.0 {
        return Ok(BoundResult {
            n,
            t: None,
            value: 0.0,
            h_opt: HermitianParam::zeros(k.len()),
            objective_evals: 1,
            converged: true,
            beta_norm: 0.0,
            restart_spread: 0.0,
        });
    }
    let normal = Normal::new(0.0, scale).expect("finite scale");
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut minima = Vec::with_capacity(opts.restarts);
    let mut total = 0;
    let mut all_converged = true;
    for r in 0..opts.restarts.max(1) {
        let x0 = if r == 0 {
            opts.warm_start.clone().filter(|w| w.len() == np).unwrap_or_else(|| vec![0.0; np])
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(r as u64);
            (0..np).map(|_| normal.sample(&mut rng)).collect()
        };
        let (x, f, evals, conv) = minimize_from(&obj, x0, scale, opts);
        total += evals;
        all_converged &= conv;
        minima.push(f);
        if best.as_ref().is_none_or(|(_, fb)| f < *fb) {
            best = Some((x, f));
        }
    }
    let (x, f) = best.expect("at least one restart");
    if !f.is_finite() {
        return Err(Error::OptimizerFailed("objective is not finite".into()));
    }
    let hi = minima.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = if f > 0.0 { (hi - f) / f } else { hi - f };
    Ok(BoundResult {
        n,
        t: None,
        value: 4.0 * n as f64 * f,
        beta_norm: obj.beta_norm(&x),
        h_opt: HermitianParam::from_params(k.len(), x)?,
        objective_evals: total,
        converged: all_converged,
        restart_spread: spread,
    })
}

/// Finite-N channel-extension bound with default optimiser settings.
pub fn cqfi_upper(k: &KrausSet, n: u64) -> Result<BoundResult> {
    cqfi_upper_with(k, n, &BoundOptions::default())
}

/// Extended-channel QFI `4 min_h ‖α‖`.
pub fn cqfi_n1(k: &KrausSet) -> Result<BoundResult> {
    cqfi_upper(k, 1)
}
