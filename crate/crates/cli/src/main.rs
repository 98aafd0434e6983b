use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qlimits::bounds::{cqfi_upper_with, geometric_grid, qcrb_over_time_with, BoundOptions, QcrbOptions, SWEEP_RANK};
use qlimits::dynamics::{evolve_state, propagate, ChannelTrajectory};
use qlimits::fisher::qfi;
use qlimits::protocols::{histogram, toy_default_time, toy_model_sample, variance, InputKind, Measurement, ProtocolSpec};
use qlimits::qcore::DensityMatrix;
use qlimits::scaling::{
    expected_scaling, fit_exponent_with, format_f64, geometric_n_grid, load_config, sweep, write_numeric, write_sweep,
    write_table, Engine, FitOptions, RunConfig, SweepSpec,
};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qlimits", version, about = "Frequency-estimation precision limits for noisy qubit probes")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// `key = value` model file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Bloch vector of the |x+⟩ probe over time.
    Evolve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5.0)]
        t_max: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// QFI of the evolved |x+⟩ probe on a geometric time grid.
    Qfi {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 40)]
        points: usize,
    },
    /// Channel-extension bound, at a fixed time or optimised over the window.
    Bound {
        #[command(flatten)]
        common: Common,
        #[arg(long, short = 'n', default_value_t = 1)]
        n: u64,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Sweep over N with one of the engines, optionally fitting the exponent.
    Scaling {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        engine: Option<String>,
        #[arg(long)]
        n_max: Option<u64>,
        #[arg(long, default_value_t = 16)]
        n_points: usize,
        #[arg(long)]
        fit: bool,
        #[arg(long, default_value_t = 0.5)]
        tail_fraction: f64,
        /// Re-runs allowed for rows whose optimum sits on a window edge.
        #[arg(long, default_value_t = 3)]
        widenings: usize,
    },
    /// Precision of a concrete protocol against the interrogation time.
    Protocol {
        #[command(flatten)]
        common: Common,
        #[arg(long, short = 'n', default_value_t = 1)]
        n: u64,
        #[arg(long, value_enum, default_value_t = Input::Ghz)]
        input: Input,
        #[arg(long, default_value_t = 60)]
        points: usize,
    },
    /// Histogram of the toy-model readout under random static noise.
    Toy {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta: f64,
        /// Std-dev of the noise amplitude.
        #[arg(long, default_value_t = 0.1)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        omega0: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 50)]
        bins: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Input {
    Separable,
    Ghz,
}

/// Config problems exit with 2, numerical failures with 3.
#[derive(Debug)]
struct ConfigError(anyhow::Error);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err<E: Into<anyhow::Error>>(e: E) -> anyhow::Error {
    anyhow::Error::new(ConfigError(e.into()))
}

fn load(common: &Common) -> Result<RunConfig> {
    match &common.config {
        Some(p) => load_config(p).map_err(config_err),
        None => Ok(RunConfig::default()),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display())).map_err(config_err)?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn init_pool(workers: usize) -> Result<()> {
    if workers > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(workers).build_global().map_err(config_err)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Command::Evolve { common, t_max, points } => {
            let cfg = load(&common)?;
            if !(t_max > 0.0) || points < 2 {
                return Err(config_err(anyhow::anyhow!("need t_max > 0 and at least two points")));
            }
            let grid: Vec<f64> = (0..points).map(|k| t_max * k as f64 / (points - 1) as f64).collect();
            let states = evolve_state(&cfg.model, cfg.omega0, &DensityMatrix::plus(), &grid)?;
            let rows = grid
                .iter()
                .zip(&states)
                .map(|(&t, s)| s.bloch().map(|b| vec![t, b[0], b[1], b[2]]))
                .collect::<qlimits::Result<Vec<_>>>()?;
            write_numeric(output(common.out.as_deref())?, &["t", "x", "y", "z"], &rows)?;
        }
        Command::Qfi { common, points } => {
            let cfg = load(&common)?;
            let plus = DensityMatrix::plus();
            let mut rows = vec![];
            for t in geometric_grid(cfg.t_window.0, cfg.t_window.1, points.max(2)) {
                let ch = propagate(&cfg.model, cfg.omega0, t)?;
                let f = qfi(&ch.map.apply(&plus)?, &ch.apply_derivative(&plus))?.value;
                rows.push(vec![t, f]);
            }
            write_numeric(output(common.out.as_deref())?, &["t", "qfi"], &rows)?;
        }
        Command::Bound { common, n, t } => {
            let cfg = load(&common)?;
            let opts = BoundOptions { seed: common.seed, ..Default::default() };
            match t {
                Some(t) => {
                    let k = propagate(&cfg.model, cfg.omega0, t)?.kraus(Some(SWEEP_RANK))?;
                    let r = cqfi_upper_with(&k, n, &opts)?;
                    println!("bound={} beta_norm={:.3e} converged={}", r.value, r.beta_norm, r.converged);
                    if let Some(p) = &common.out {
                        write_numeric(output(Some(p))?, &["N", "t", "bound"], &[vec![n as f64, t, r.value]])?;
                    }
                }
                None => {
                    let q = QcrbOptions { scan: BoundOptions { restarts: 2, ..opts.clone() }, polish: opts, ..Default::default() };
                    let traj =
                        ChannelTrajectory::build(&cfg.model, cfg.omega0, &geometric_grid(cfg.t_window.0, cfg.t_window.1, q.grid_points))?;
                    let r = qcrb_over_time_with(&traj, n, cfg.t_window, cfg.total_time, &q)?;
                    println!("t_opt={} bound_times_T={} boundary={}", r.t_opt, r.bound_value * cfg.total_time, r.boundary);
                    if let Some(p) = &common.out {
                        let row = qlimits::scaling::SweepRow {
                            n,
                            t_opt: r.t_opt,
                            bound_times_t: r.bound_value * cfg.total_time,
                            boundary: r.boundary,
                        };
                        write_sweep(output(Some(p))?, &[row])?;
                    }
                }
            }
        }
        Command::Scaling { common, engine, n_max, n_points, fit, tail_fraction, widenings } => {
            let cfg = load(&common)?;
            let engine = match engine {
                Some(e) => e.parse::<Engine>().map_err(config_err)?,
                None => cfg.engine,
            };
            let grid = match (n_max, &cfg.n_grid) {
                (Some(hi), _) => geometric_n_grid(1, hi, n_points),
                (None, Some(g)) => g.clone(),
                (None, None) => geometric_n_grid(1, 1000, n_points),
            };
            let mut spec = SweepSpec::new(cfg.model.clone(), cfg.omega0, grid, engine);
            spec.t_window = cfg.t_window;
            spec.total_time = cfg.total_time;
            spec.seed = common.seed;
            spec.max_widenings = widenings;
            spec.validate().map_err(|e| if e.is_config_error() { config_err(e) } else { e.into() })?;
            let rows = sweep(&spec)?;
            write_sweep(output(common.out.as_deref())?, &rows)?;
            if fit {
                let f = fit_exponent_with(&rows, &FitOptions { tail_fraction, ..Default::default() })?;
                println!("kappa={} residual={} window={}..{}", f.exponent, f.residual, f.window.0, f.window.1);
                let r = expected_scaling(&cfg.model);
                eprintln!("reference {}: kappa={}", r.name, r.kappa);
            }
        }
        Command::Protocol { common, n, input, points } => {
            let cfg = load(&common)?;
            let (input, meas) = match input {
                Input::Ghz => (InputKind::Ghz, Measurement::Parity),
                Input::Separable => (InputKind::SeparablePlus, Measurement::Survival),
            };
            let spec = ProtocolSpec::new(n, cfg.total_time, input, meas).map_err(config_err)?;
            let grid = geometric_grid(cfg.t_window.0, cfg.t_window.1, points.max(2));
            let traj = ChannelTrajectory::build(&cfg.model, cfg.omega0, &grid)?;
            let mut rows = vec![];
            for &t in &grid {
                // Points where the signal is flat carry no information.
                if let Ok(v) = spec.precision(&traj.at(t)?) {
                    rows.push(vec![t, v * cfg.total_time]);
                }
            }
            if let Some(best) = rows.iter().min_by(|a, b| a[1].total_cmp(&b[1])) {
                println!("t_opt={} precision_times_T={}", best[0], best[1]);
            }
            write_numeric(output(common.out.as_deref())?, &["t", "precision_times_T"], &rows)?;
        }
        Command::Toy { common, theta, sigma, omega0, samples, bins } => {
            let xs = toy_model_sample(theta, sigma, omega0, toy_default_time(omega0), samples, common.seed).map_err(config_err)?;
            let rows = histogram(&xs, bins)
                .into_iter()
                .map(|(lo, hi, c)| vec![format_f64(lo), format_f64(hi), c.to_string()]);
            write_table(output(common.out.as_deref())?, &["bin_lo", "bin_hi", "count"], rows)?;
            eprintln!("variance={}", variance(&xs));
        }
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match e.downcast_ref::<qlimits::Error>() {
        Some(q) if q.is_config_error() => 2,
        Some(_) => 3,
        None => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = match &cli.cmd {
        Command::Evolve { common, .. }
        | Command::Qfi { common, .. }
        | Command::Bound { common, .. }
        | Command::Scaling { common, .. }
        | Command::Protocol { common, .. }
        | Command::Toy { common, .. } => common.workers,
    };
    if let Err(e) = init_pool(workers).and_then(|_| run(cli)) {
        eprintln!("error: {e:#}");
        return ExitCode::from(exit_code(&e));
    }
    ExitCode::SUCCESS
}
