use crate::bounds::{geometric_grid, qcrb_over_time_with, QcrbOptions};
use crate::dynamics::{ChannelTrajectory, NoiseModel, RateKind};
use crate::error::{Error, Result};
use crate::protocols::{dephasing_optimum, parity_time_optimum, pc_zeno_optimum};
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    ChannelExtension,
    ParityGhz,
    AnalyticPc,
    AnalyticDephasing,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::ChannelExtension => "channel-extension",
            Engine::ParityGhz => "parity-ghz",
            Engine::AnalyticPc => "analytic-pc",
            Engine::AnalyticDephasing => "analytic-dephasing",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Engine::ChannelExtension, Engine::ParityGhz, Engine::AnalyticPc, Engine::AnalyticDephasing]
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown engine '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub model: NoiseModel,
    pub omega0: f64,
    pub n_grid: Vec<u64>,
    /// Initial time window for every N.
    pub t_window: (f64, f64),
    pub engine: Engine,
    pub total_time: f64,
    /// Times a boundary row is re-run with the offending edge moved 10×.
    pub max_widenings: usize,
    pub grid_points: usize,
    pub seed: u64,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
}

impl SweepSpec {
    pub fn new(model: NoiseModel, omega0: f64, n_grid: Vec<u64>, engine: Engine) -> Self {
        SweepSpec {
            model,
            omega0,
            n_grid,
            t_window: (1e-3, 30.0),
            engine,
            total_time: 1.0,
            max_widenings: 3,
            grid_points: 60,
            seed: 0x5eed,
            workers: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.n_grid.len() < 6 {
            return Err(Error::InvalidArgument(format!("N grid has {} points, need at least 6", self.n_grid.len())));
        }
        if self.n_grid[0] == 0 || self.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("N grid must be strictly increasing and start at N >= 1".into()));
        }
        let (lo, hi) = self.t_window;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidArgument(format!("time window ({lo}, {hi}) must satisfy 0 < t_lo < t_hi")));
        }
        if !(self.total_time > 0.0) {
            return Err(Error::InvalidArgument(format!("total time {} must be > 0", self.total_time)));
        }
        self.check_engine()
    }

    fn check_engine(&self) -> Result<()> {
        let m = &self.model;
        let mismatch = |reason: &str| Err(Error::EngineModelMismatch { engine: self.engine.name().into(), reason: reason.into() });
        match self.engine {
            Engine::AnalyticPc if !m.is_pure_dephasing() || !matches!(m.rate_kind, RateKind::TclOhmic) => {
                mismatch("needs theta = pi/2 with tcl-ohmic rates")
            }
            Engine::AnalyticDephasing if !m.is_pure_dephasing() || !matches!(m.rate_kind, RateKind::Semigroup) => {
                mismatch("needs theta = pi/2 with semigroup rates")
            }
            Engine::AnalyticPc | Engine::AnalyticDephasing if m.lambda == 0.0 => mismatch("needs lambda > 0"),
            _ => Ok(()),
        }
    }
}

/// One N of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n: u64,
    pub t_opt: f64,
    pub bound_times_t: f64,
    /// t_opt still sits on a window edge after all widenings.
    pub boundary: bool,
}

fn trajectory(spec: &SweepSpec, window: (f64, f64)) -> Result<ChannelTrajectory> {
    ChannelTrajectory::build(&spec.model, spec.omega0, &geometric_grid(window.0, window.1, spec.grid_points))
}

fn numeric_row(spec: &SweepSpec, traj: &ChannelTrajectory, n: u64, window: (f64, f64)) -> Result<SweepRow> {
    let t_total = spec.total_time;
    match spec.engine {
        Engine::ChannelExtension => {
            let mut opts = QcrbOptions { grid_points: spec.grid_points, ..Default::default() };
            opts.scan.seed = spec.seed;
            opts.polish.seed = spec.seed;
            let r = qcrb_over_time_with(traj, n, window, t_total, &opts)?;
            Ok(SweepRow { n, t_opt: r.t_opt, bound_times_t: r.bound_value * t_total, boundary: r.boundary })
        }
        Engine::ParityGhz => {
            let (t, v, boundary) = parity_time_optimum(|t| traj.at(t), n, window, t_total, spec.grid_points)?;
            Ok(SweepRow { n, t_opt: t, bound_times_t: v * t_total, boundary })
        }
        _ => unreachable!("analytic engines have no time window"),
    }
}

fn analytic_row(spec: &SweepSpec, n: u64) -> Result<SweepRow> {
    let (t, b) = match spec.engine {
        Engine::AnalyticPc => pc_zeno_optimum(n, &spec.model, spec.total_time)?,
        Engine::AnalyticDephasing => dephasing_optimum(spec.model.gamma_infinity(), n, spec.total_time, true)?,
        _ => unreachable!("numeric engines handled separately"),
    };
    Ok(SweepRow { n, t_opt: t, bound_times_t: b * spec.total_time, boundary: false })
}

fn widened_row(spec: &SweepSpec, base: &ChannelTrajectory, n: u64) -> Result<SweepRow> {
    let mut window = spec.t_window;
    let mut row = numeric_row(spec, base, n, window)?;
    for _ in 0..spec.max_widenings {
        if !row.boundary {
            break;
        }
        if row.t_opt <= window.0 * (1.0 + 1e-9) {
            window.0 /= 10.0;
        } else {
            window.1 *= 10.0;
        }
        row = numeric_row(spec, &trajectory(spec, window)?, n, window)?;
    }
    Ok(row)
}

/// One row per N, ordered by N. Boundary rows are re-run on widened
/// windows and stay flagged if the minimum never leaves the edge.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let run = || -> Result<Vec<SweepRow>> {
        match spec.engine {
            Engine::AnalyticPc | Engine::AnalyticDephasing => spec.n_grid.par_iter().map(|&n| analytic_row(spec, n)).collect(),
            Engine::ChannelExtension | Engine::ParityGhz => {
                let base = trajectory(spec, spec.t_window)?;
                spec.n_grid.par_iter().map(|&n| widened_row(spec, &base, n)).collect()
            }
        }
    };
    let mut rows = if spec.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(spec.workers)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(run)?
    } else {
        run()?
    };
    rows.sort_by_key(|r| r.n);
    if spec.max_widenings > 0 && rows.iter().all(|r| r.boundary) {
        return Err(Error::AllRowsInvalid);
    }
    Ok(rows)
}

/// Rounded geometric grid of distinct integers from `lo` to `hi`.
pub fn geometric_n_grid(lo: u64, hi: u64, points: usize) -> Vec<u64> {
    let mut v: Vec<u64> = geometric_grid(lo as f64, hi as f64, points).iter().map(|x| x.round() as u64).collect();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn engine_names_round_trip() {
        for e in [Engine::ChannelExtension, Engine::ParityGhz, Engine::AnalyticPc, Engine::AnalyticDephasing] {
            assert_eq!(e.name().parse::<Engine>().unwrap(), e);
        }
        assert!("nope".parse::<Engine>().is_err());
    }

    #[test]
    fn analytic_pc_rejects_transversal() {
        let m = NoiseModel { theta: 0.0, ..Default::default() };
        let spec = SweepSpec::new(m, 1.0, geometric_n_grid(1, 1000, 8), Engine::AnalyticPc);
        assert!(matches!(sweep(&spec), Err(Error::EngineModelMismatch { .. })));
    }

    #[test]
    fn analytic_dephasing_rows_are_exact() {
        let m = NoiseModel { rate_kind: RateKind::Semigroup, ..Default::default() };
        let g = m.gamma_infinity();
        let mut spec = SweepSpec::new(m, 1.0, geometric_n_grid(1, 1000, 8), Engine::AnalyticDephasing);
        spec.total_time = 3.0;
        for r in sweep(&spec).unwrap() {
            assert_eq!(r.bound_times_t, 2.0 * g * std::f64::consts::E / (r.n as f64 * 3.0) * 3.0);
        }
    }

    #[test]
    fn short_grid_rejected() {
        let spec = SweepSpec::new(NoiseModel::default(), 1.0, vec![1, 2, 3], Engine::AnalyticPc);
        assert!(spec.validate().is_err());
    }
}
