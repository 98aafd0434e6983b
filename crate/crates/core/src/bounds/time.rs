use super::{cqfi_upper_with, BoundOptions, BoundResult};
use crate::dynamics::{ChannelTrajectory, NoiseModel};
use crate::error::{Error, Result};

/// Kraus rank used along time sweeps; zero-padding keeps h at 16 reals.
pub const SWEEP_RANK: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct QcrbOptions {
    pub grid_points: usize,
    /// Golden-section stopping width, relative in t.
    pub t_rel_tol: f64,
    /// Optimiser settings on the scan and refinement points.
    pub scan: BoundOptions,
    /// Optimiser settings for the reported point.
    pub polish: BoundOptions,
}

impl Default for QcrbOptions {
    fn default() -> Self {
        QcrbOptions {
            grid_points: 60,
            t_rel_tol: 1e-4,
            scan: BoundOptions { restarts: 2, ..Default::default() },
            polish: BoundOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QcrbResult {
    pub t_opt: f64,
    /// `t_opt / (T·F̄(t_opt))`.
    pub bound_value: f64,
    /// The minimum sits on an edge of the time window.
    pub boundary: bool,
    pub bound: BoundResult,
}

pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect();
    // Pin the ends so window edges are hit exactly.
    g[0] = lo;
    g[n - 1] = hi;
    g
}

fn check_window(window: (f64, f64)) -> Result<()> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("time window ({lo}, {hi}) must satisfy 0 < t_lo < t_hi")));
    }
    Ok(())
}

/// Minimise `t/(T·F̄(t))` over the window, where F̄ is the finite-N
/// channel-extension bound.
pub fn qcrb_over_time(model: &NoiseModel, omega0: f64, n: u64, window: (f64, f64), total_time: f64) -> Result<QcrbResult> {
    check_window(window)?;
    let opts = QcrbOptions::default();
    let traj = ChannelTrajectory::build(model, omega0, &geometric_grid(window.0, window.1, opts.grid_points))?;
    qcrb_over_time_with(&traj, n, window, total_time, &opts)
}

pub fn qcrb_over_time_with(
    traj: &ChannelTrajectory,
    n: u64,
    window: (f64, f64),
    total_time: f64,
    opts: &QcrbOptions,
) -> Result<QcrbResult> {
    check_window(window)?;
    if !(total_time > 0.0) {
        return Err(Error::InvalidArgument(format!("total time {total_time} must be > 0")));
    }
    let bound_at = |t: f64, o: &BoundOptions| -> Result<BoundResult> {
        let k = traj.at(t)?.kraus(Some(SWEEP_RANK))?;
        let mut r = cqfi_upper_with(&k, n, o)?;
        r.t = Some(t);
        Ok(r)
    };
    let cost = |r: &BoundResult| {
        let t = r.t.expect("time set");
        if r.value > 0.0 { t / (total_time * r.value) } else { f64::INFINITY }
    };

    let grid = geometric_grid(window.0, window.1, opts.grid_points.max(3));
    let mut scan = Vec::with_capacity(grid.len());
    let mut warm: Option<Vec<f64>> = None;
    for &t in &grid {
        let o = BoundOptions { warm_start: warm.take(), ..opts.scan.clone() };
        let r = bound_at(t, &o)?;
        warm = Some(r.h_opt.params().to_vec());
        scan.push(r);
    }
    if scan.iter().all(|r| r.value == 0.0) {
        return Err(Error::FlatObjective);
    }
    let k = (0..scan.len()).min_by(|&a, &b| cost(&scan[a]).total_cmp(&cost(&scan[b]))).expect("non-empty grid");
    let boundary = k == 0 || k + 1 == scan.len();

    let t_opt = if boundary {
        grid[k]
    } else {
        let warm = scan[k].h_opt.params().to_vec();
        let eval = |u: f64| -> Result<f64> {
            let o = BoundOptions { warm_start: Some(warm.clone()), ..opts.scan.clone() };
            Ok(cost(&bound_at(u.exp(), &o)?))
        };
        golden_section(eval, grid[k - 1].ln(), grid[k + 1].ln(), opts.t_rel_tol)?.exp()
    };
    let polish = BoundOptions { warm_start: Some(scan[k].h_opt.params().to_vec()), ..opts.polish.clone() };
    let bound = bound_at(t_opt, &polish)?;
    Ok(QcrbResult { t_opt, bound_value: cost(&bound), boundary, bound })
}

/// Golden-section minimisation of `f` on `[a, b]` down to width `tol`.
pub(crate) fn golden_section<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { x1 } else { x2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let x = golden_section(|x| Ok((x - 0.3).powi(2)), -1.0, 2.0, 1e-9).unwrap();
        assert!((x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn grid_endpoints() {
        let g = geometric_grid(0.01, 10.0, 60);
        assert_eq!(g.len(), 60);
        assert!((g[0] - 0.01).abs() < 1e-15 && (g[59] - 10.0).abs() < 1e-12);
    }
}
