use crate::dynamics::{NoiseModel, RateKind};
use crate::error::{Error, Result};

/// Probability of returning to |0⟩ after a noiseless Ramsey sequence.
pub fn ramsey_survival(omega0: f64, t: f64) -> f64 {
    (0.5 * omega0 * t).cos().powi(2)
}

/// Survival probability under dephasing with coherence decay `e^{-γt}`,
/// for one probe of a separable strategy or for an N-probe GHZ state.
pub fn dephasing_probs(omega0: f64, t: f64, gamma: f64, n: u64, entangled: bool) -> f64 {
    let k = if entangled { n as f64 } else { 1.0 };
    0.5 * (1.0 + (-k * gamma * t).exp() * (k * omega0 * t).cos())
}

/// ∂/∂ω0 of [`dephasing_probs`].
pub fn dephasing_probs_derivative(omega0: f64, t: f64, gamma: f64, n: u64, entangled: bool) -> f64 {
    let k = if entangled { n as f64 } else { 1.0 };
    -0.5 * k * t * (-k * gamma * t).exp() * (k * omega0 * t).sin()
}

/// Cramér–Rao bound `Δ²ω̂` for N probes over total time T with ν = T/t
/// repetitions of the two-outcome measurement.
pub fn dephasing_crb(omega0: f64, t: f64, gamma: f64, n: u64, entangled: bool, total_time: f64) -> Result<f64> {
    let p = dephasing_probs(omega0, t, gamma, n, entangled);
    let dp = dephasing_probs_derivative(omega0, t, gamma, n, entangled);
    let var = p * (1.0 - p);
    if dp == 0.0 || var <= 0.0 {
        return Err(Error::ZeroInformation);
    }
    let fi = dp * dp / var;
    // Separable probes contribute N independent copies of the same data.
    let copies = if entangled { 1.0 } else { n as f64 };
    Ok(t / (total_time * copies * fi))
}

/// Optimal interrogation time and precision under dephasing. Both
/// strategies reach `2γe/(NT)`.
pub fn dephasing_optimum(gamma: f64, n: u64, total_time: f64, entangled: bool) -> Result<(f64, f64)> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} must be > 0")));
    }
    let nf = n as f64;
    let t_opt = if entangled { 1.0 / (2.0 * nf * gamma) } else { 1.0 / (2.0 * gamma) };
    Ok((t_opt, 2.0 * gamma * std::f64::consts::E / (nf * total_time)))
}

fn require_pure_dephasing(model: &NoiseModel) -> Result<()> {
    if !model.is_pure_dephasing() {
        return Err(Error::WrongAngle(model.theta));
    }
    Ok(())
}

/// GHZ survival probability under phase-covariant noise:
/// `½(1 + e^{−NΓ(t)} cos Nω0t)` with Γ the integrated rate.
pub fn pc_ghz_survival(n: u64, t: f64, model: &NoiseModel, omega0: f64) -> Result<f64> {
    require_pure_dephasing(model)?;
    let nf = n as f64;
    Ok(0.5 * (1.0 + (-nf * model.rate_integral(t)?).exp() * (nf * omega0 * t).cos()))
}

/// Joint optimum over time of the GHZ precision `e^{2NΓ(t)}/(N² t T)`,
/// found from the stationarity condition `2N γ(t) t = 1` by bisection.
pub fn pc_zeno_optimum(n: u64, model: &NoiseModel, total_time: f64) -> Result<(f64, f64)> {
    require_pure_dephasing(model)?;
    if matches!(model.rate_kind, RateKind::Custom(_)) {
        return Err(Error::EngineModelMismatch {
            engine: "analytic-pc".into(),
            reason: "needs tcl-ohmic or semigroup rates".into(),
        });
    }
    let nf = n as f64;
    let phi = |t: f64| -> Result<f64> { Ok(2.0 * nf * model.rate(t)? * t - 1.0) };
    let mut hi = 1.0;
    let mut tries = 0;
    while phi(hi)? <= 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::BracketFailed);
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let bound = (2.0 * nf * model.rate_integral(t)?).exp() / (nf * nf * t * total_time);
    Ok((t, bound))
}

/// Noise-equivalent signal: `noise_std / |slope| / conversion`, where
/// `conversion` is dω/dB for the field units of interest.
pub fn nep(signal_slope: f64, noise_std: f64, conversion: f64) -> Result<f64> {
    if signal_slope == 0.0 || !signal_slope.is_finite() {
        return Err(Error::ZeroSlope);
    }
    if conversion == 0.0 {
        return Err(Error::InvalidArgument("conversion factor is zero".into()));
    }
    Ok(noise_std / signal_slope.abs() / conversion.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_2, PI};

    #[test]
    fn ramsey_values() {
        assert_eq!(ramsey_survival(1.0, 0.0), 1.0);
        assert!(ramsey_survival(PI, 1.0) < 1e-30);
        assert!((ramsey_survival(FRAC_PI_2, 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dephasing_optimum_example() {
        for ent in [false, true] {
            let (_, b) = dephasing_optimum(0.5, 10, 100.0, ent).unwrap();
            assert!((b - E / 1000.0).abs() < 1e-15);
        }
        let (ts, _) = dephasing_optimum(0.5, 10, 100.0, false).unwrap();
        let (te, _) = dephasing_optimum(0.5, 10, 100.0, true).unwrap();
        assert!((te * 10.0 - ts).abs() < 1e-15);
    }

    #[test]
    fn pc_requires_pure_dephasing() {
        let m = NoiseModel { theta: 0.0, ..Default::default() };
        assert!(matches!(pc_ghz_survival(2, 0.1, &m, 1.0), Err(Error::WrongAngle(_))));
        assert!(matches!(pc_zeno_optimum(2, &m, 1.0), Err(Error::WrongAngle(_))));
    }

    #[test]
    fn zeno_constant() {
        let m = NoiseModel::default();
        let (_, b) = pc_zeno_optimum(1_000_000, &m, 1.0).unwrap();
        let c = b * 1e9;
        assert!((c / (20.0 * E).sqrt() - 1.0).abs() < 0.05);
    }

    #[test]
    fn nep_linear_in_noise() {
        assert!((nep(-2.0, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((nep(-2.0, 2.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(nep(0.0, 1.0, 1.0), Err(Error::ZeroSlope));
    }
}
