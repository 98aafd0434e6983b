use crate::bounds::geometric_grid;
use crate::dynamics::ChannelWithDerivative;
use crate::error::{Error, Result};
use crate::qcore::{c, matrix_unit, sigma_x, sigma_y, trace, unvec_col, vec_col, ComplexMatrix, C64};

/// Parity signal and its ω0-derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParitySignal {
    pub mean: f64,
    pub dmean: f64,
}

fn readout(phi: f64) -> ComplexMatrix {
    sigma_x() * c(phi.cos(), 0.) + sigma_y() * c(phi.sin(), 0.)
}

/// Transfer amplitudes `m_ab = tr[σ Λ(|a⟩⟨b|)]` and their derivatives.
fn amplitudes(ch: &ChannelWithDerivative, obs: &ComplexMatrix) -> Result<[[(C64, C64); 2]; 2]> {
    if ch.map.dim() != 2 {
        return Err(Error::NotSingleQubit(ch.map.dim()));
    }
    let mut m = [[(C64::new(0., 0.), C64::new(0., 0.)); 2]; 2];
    for (a, row) in m.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            let e = vec_col(&matrix_unit(2, a, b));
            let out = unvec_col(&(ch.map.matrix() * &e), 2);
            let dout = unvec_col(&(&ch.dmap * &e), 2);
            *slot = (trace(&(obs * out)), trace(&(obs * dout)));
        }
    }
    Ok(m)
}

/// `⟨⊗σ_φ⟩` on the GHZ state after N parallel uses of the channel, with
/// `σ_φ = cos φ σx + sin φ σy`.
pub fn parity_expectation_ghz_phased(ch: &ChannelWithDerivative, n: u64, phi: f64) -> Result<ParitySignal> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    let m = amplitudes(ch, &readout(phi))?;
    let nn = i32::try_from(n).map_err(|_| Error::InvalidArgument(format!("N = {n} too large")))?;
    let mut mean = C64::new(0., 0.);
    let mut dmean = C64::new(0., 0.);
    for &(v, dv) in m.iter().flatten() {
        mean += v.powi(nn);
        dmean += v.powi(nn - 1) * dv * (n as f64);
    }
    mean *= 0.5;
    dmean *= 0.5;
    // GHZ weights are Hermitian, so the sum is real up to rounding.
    let tol = 1e-10 * (1.0 + mean.norm() + dmean.norm());
    if mean.im.abs() > tol || dmean.im.abs() > tol * (n as f64) * (1.0 + ch.t) {
        return Err(Error::InvalidArgument(format!("parity has imaginary part {:.3e}", mean.im)));
    }
    Ok(ParitySignal { mean: mean.re, dmean: dmean.re })
}

/// `⟨⊗σ_x⟩` on the GHZ state after N parallel uses of the channel.
pub fn parity_expectation_ghz(ch: &ChannelWithDerivative, n: u64) -> Result<ParitySignal> {
    parity_expectation_ghz_phased(ch, n, 0.0)
}

const SATURATION: f64 = 1e-10;

/// Error-propagation precision `t(1 − ⟨P⟩²)/(T (∂⟨P⟩)²)`.
pub fn parity_precision_phased(ch: &ChannelWithDerivative, n: u64, total_time: f64, phi: f64) -> Result<f64> {
    if !(total_time > 0.0) {
        return Err(Error::InvalidArgument(format!("total time {total_time} must be > 0")));
    }
    let s = parity_expectation_ghz_phased(ch, n, phi)?;
    let var = 1.0 - s.mean * s.mean;
    // A saturated signal (⟨P⟩ = ±1 to rounding) has no resolvable slope.
    if s.dmean == 0.0 || !s.dmean.is_finite() || var < SATURATION {
        return Err(Error::ZeroSlope);
    }
    Ok(ch.t * var / (total_time * s.dmean * s.dmean))
}

pub fn parity_precision(ch: &ChannelWithDerivative, n: u64, total_time: f64) -> Result<f64> {
    parity_precision_phased(ch, n, total_time, 0.0)
}

/// Readout phase minimising the parity precision, searched over one
/// period `Nφ ∈ [0, π)`. Returns `(φ, precision)`.
pub fn optimal_readout_phase(ch: &ChannelWithDerivative, n: u64, total_time: f64) -> Result<(f64, f64)> {
    let nf = n as f64;
    let cost = |psi: f64| -> f64 {
        parity_precision_phased(ch, n, total_time, psi / nf).unwrap_or(f64::INFINITY)
    };
    let pts = 48;
    let h = std::f64::consts::PI / pts as f64;
    let (k, _) = (0..pts)
        .map(|k| (k, cost(k as f64 * h)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty scan");
    let centre = k as f64 * h;
    let psi = crate::bounds::golden_section(|u| Ok(cost(u)), centre - h, centre + h, 1e-10)?;
    let best = cost(psi);
    if !best.is_finite() {
        return Err(Error::ZeroSlope);
    }
    Ok((psi / nf, best))
}

/// Minimum over t of the phase-optimised parity precision, scanning a
/// geometric grid of `points` times and refining by golden section in log t.
/// Returns `(t_opt, precision, boundary)`.
pub fn parity_time_optimum<F>(channel_at: F, n: u64, window: (f64, f64), total_time: f64, points: usize) -> Result<(f64, f64, bool)>
where
    F: Fn(f64) -> Result<ChannelWithDerivative>,
{
    let cost = |t: f64| -> Result<f64> {
        match optimal_readout_phase(&channel_at(t)?, n, total_time) {
            Ok((_, v)) => Ok(v),
            Err(Error::ZeroSlope) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    };
    let grid = geometric_grid(window.0, window.1, points.max(3));
    let vals = grid.iter().map(|&t| cost(t)).collect::<Result<Vec<_>>>()?;
    let (k, &v) = vals.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty grid");
    if !v.is_finite() {
        return Err(Error::ZeroSlope);
    }
    if k == 0 || k + 1 == grid.len() {
        return Ok((grid[k], v, true));
    }
    let u = crate::bounds::golden_section(|u| cost(u.exp()), grid[k - 1].ln(), grid[k + 1].ln(), 1e-6)?;
    let t = u.exp();
    let vt = cost(t)?;
    Ok(if vt <= v { (t, vt, false) } else { (grid[k], v, false) })
}
