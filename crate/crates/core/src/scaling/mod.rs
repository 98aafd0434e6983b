//! Sweeps over the probe number N, power-law fits against the known
//! scaling laws, and the config/CSV formats used by the command line tool.

mod config;
mod csvio;
mod fit;
mod reference;
mod sweep;

pub use config::{load_config, parse_angle, parse_config, parse_n_grid, RunConfig};
pub use csvio::{format_f64, read_numeric, read_sweep, write_numeric, write_sweep, write_table, SWEEP_HEADER};
pub use fit::{fit_exponent, fit_exponent_with, fit_top_decade, fit_window, linear_fit, FitOptions, FitQuantity, FitResult};
pub use reference::{
    expected_scaling, ReferenceScaling, HEISENBERG, MIXED_ANGLE, REFERENCE_TABLE, SQL, TRANSVERSAL_SEMIGROUP,
    TRANSVERSAL_TCL, ZENO,
};
pub use sweep::{geometric_n_grid, sweep, Engine, SweepRow, SweepSpec};
