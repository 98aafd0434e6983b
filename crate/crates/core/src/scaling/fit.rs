use super::SweepRow;
use crate::error::{Error, Result};

/// Least-squares power law `y ≈ e^{intercept} N^{exponent}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub exponent: f64,
    /// Natural-log intercept.
    pub intercept: f64,
    pub window: (u64, u64),
    /// RMS of the residuals in log space.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitQuantity {
    /// bound·T against N.
    Bound,
    /// t_opt against N.
    TOpt,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Fraction of the log-N range, counted from the largest N.
    pub tail_fraction: f64,
    pub include_boundary: bool,
    pub quantity: FitQuantity,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { tail_fraction: 0.5, include_boundary: false, quantity: FitQuantity::Bound }
    }
}

const MIN_ROWS: usize = 4;

/// Slope, intercept and RMS residual of a straight-line fit.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    (slope, icpt, (rss / n).sqrt())
}

fn value(r: &SweepRow, q: FitQuantity) -> f64 {
    match q {
        FitQuantity::Bound => r.bound_times_t,
        FitQuantity::TOpt => r.t_opt,
    }
}

fn fit_rows(rows: &[&SweepRow], q: FitQuantity) -> Result<FitResult> {
    let usable: Vec<&&SweepRow> = rows.iter().filter(|r| value(r, q) > 0.0 && value(r, q).is_finite()).collect();
    if usable.len() < MIN_ROWS {
        return Err(Error::InsufficientRows { found: usable.len(), needed: MIN_ROWS });
    }
    let x: Vec<f64> = usable.iter().map(|r| (r.n as f64).ln()).collect();
    let y: Vec<f64> = usable.iter().map(|r| value(r, q).ln()).collect();
    let (exponent, intercept, residual) = linear_fit(&x, &y);
    let window = (usable[0].n, usable[usable.len() - 1].n);
    Ok(FitResult { exponent, intercept, window, residual })
}

fn eligible(rows: &[SweepRow], include_boundary: bool) -> Vec<&SweepRow> {
    let mut v: Vec<&SweepRow> = rows.iter().filter(|r| include_boundary || !r.boundary).collect();
    v.sort_by_key(|r| r.n);
    v
}

/// Fit over the rows with `N ∈ [n_lo, n_hi]`.
pub fn fit_window(rows: &[SweepRow], n_lo: u64, n_hi: u64, quantity: FitQuantity, include_boundary: bool) -> Result<FitResult> {
    let sel: Vec<&SweepRow> =
        eligible(rows, include_boundary).into_iter().filter(|r| r.n >= n_lo && r.n <= n_hi).collect();
    fit_rows(&sel, quantity)
}

pub fn fit_exponent_with(rows: &[SweepRow], opts: &FitOptions) -> Result<FitResult> {
    if !(opts.tail_fraction > 0.0 && opts.tail_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!("tail fraction {} must lie in (0, 1]", opts.tail_fraction)));
    }
    let sel = eligible(rows, opts.include_boundary);
    let (Some(first), Some(last)) = (sel.first(), sel.last()) else {
        return Err(Error::InsufficientRows { found: 0, needed: MIN_ROWS });
    };
    let (a, b) = ((first.n as f64).ln(), (last.n as f64).ln());
    let cut = b - opts.tail_fraction * (b - a);
    let tail: Vec<&SweepRow> = sel.into_iter().filter(|r| (r.n as f64).ln() >= cut - 1e-12).collect();
    fit_rows(&tail, opts.quantity)
}

/// Log-log slope of bound·T over the tail of the sweep.
pub fn fit_exponent(rows: &[SweepRow], tail_fraction: f64) -> Result<FitResult> {
    fit_exponent_with(rows, &FitOptions { tail_fraction, ..Default::default() })
}

/// Fit over `[N_max/10, N_max]`.
pub fn fit_top_decade(rows: &[SweepRow], quantity: FitQuantity) -> Result<FitResult> {
    let n_max = eligible(rows, false).last().map(|r| r.n).ok_or(Error::AllRowsInvalid)?;
    fit_window(rows, (n_max as f64 / 10.0).ceil() as u64, n_max, quantity, false)
}
