use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_2;

/// Piecewise-linear rate table γ(t) on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    times: Vec<f64>,
    rates: Vec<f64>,
}

impl RateTable {
    pub fn new(times: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        if times.len() != rates.len() {
            return Err(Error::LengthMismatch { left: times.len(), right: rates.len() });
        }
        if times.len() < 2 {
            return Err(Error::InvalidModel("rate table needs at least two points".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidModel("rate table grid must be strictly increasing".into()));
        }
        if rates.iter().chain(&times).any(|v| !v.is_finite()) || rates.iter().any(|&r| r < 0.0) {
            return Err(Error::InvalidModel("rates must be finite and nonnegative".into()));
        }
        Ok(RateTable { times, rates })
    }

    /// Constant rate on [0, t_max].
    pub fn constant(rate: f64, t_max: f64) -> Result<Self> {
        Self::new(vec![0.0, t_max], vec![rate, rate])
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    fn segment(&self, t: f64) -> Result<usize> {
        let (lo, hi) = (self.times[0], self.times[self.times.len() - 1]);
        if t < lo || t > hi {
            return Err(Error::RateTableOutOfRange(t));
        }
        let k = self.times.partition_point(|&x| x <= t);
        Ok(k.clamp(1, self.times.len() - 1) - 1)
    }

    pub fn at(&self, t: f64) -> Result<f64> {
        let k = self.segment(t)?;
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let w = (t - t0) / (t1 - t0);
        Ok(self.rates[k] * (1.0 - w) + self.rates[k + 1] * w)
    }

    /// ∫_{t_0}^{t} γ(s) ds, exact for the piecewise-linear interpolant.
    pub fn integral(&self, t: f64) -> Result<f64> {
        let k = self.segment(t)?;
        let mut acc = 0.0;
        for j in 0..k {
            acc += 0.5 * (self.rates[j] + self.rates[j + 1]) * (self.times[j + 1] - self.times[j]);
        }
        acc += 0.5 * (self.rates[k] + self.at(t)?) * (t - self.times[k]);
        Ok(acc)
    }

    pub fn max_rate(&self) -> f64 {
        self.rates.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RateKind {
    /// γ(t) = (λ/β) arctan(ω_c t), the second-order TCL rate of an Ohmic bath.
    TclOhmic,
    /// γ∞ = λπ/(2β), the long-time limit.
    Semigroup,
    Custom(RateTable),
}

impl RateKind {
    pub fn name(&self) -> &'static str {
        match self {
            RateKind::TclOhmic => "tcl-ohmic",
            RateKind::Semigroup => "semigroup",
            RateKind::Custom(_) => "custom",
        }
    }
}

/// Qubit coupled to an Ohmic bath through `cos θ σx + sin θ σz`.
///
/// The dissipator carries weight γ(t)/2, so at θ = π/2 coherences decay as
/// `exp(-∫γ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub theta: f64,
    pub lambda: f64,
    pub beta: f64,
    pub omega_c: f64,
    pub rate_kind: RateKind,
    pub secular: bool,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            theta: FRAC_PI_2,
            lambda: 0.1,
            beta: 1.0,
            omega_c: 100.0,
            rate_kind: RateKind::TclOhmic,
            secular: true,
        }
    }
}

impl NoiseModel {
    pub fn new(theta: f64, lambda: f64, beta: f64, omega_c: f64, rate_kind: RateKind, secular: bool) -> Result<Self> {
        let m = NoiseModel { theta, lambda, beta, omega_c, rate_kind, secular };
        m.validate()?;
        Ok(m)
    }

    /// Pure dephasing with constant coherence decay rate `gamma` on [0, t_max].
    pub fn dephasing(gamma: f64, t_max: f64) -> Result<Self> {
        Self::new(FRAC_PI_2, 1.0, 1.0, 1.0, RateKind::Custom(RateTable::constant(gamma, t_max)?), true)
    }

    /// No coupling: unitary precession only.
    pub fn noiseless() -> Self {
        NoiseModel { lambda: 0.0, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=FRAC_PI_2 + 1e-12).contains(&self.theta) {
            return Err(Error::InvalidModel(format!("theta = {} outside [0, pi/2]", self.theta)));
        }
        // λ = 0 is accepted as the noiseless limit.
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidModel(format!("lambda = {} must be >= 0", self.lambda)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidModel(format!("beta = {} must be > 0", self.beta)));
        }
        if !(self.omega_c > 0.0 && self.omega_c.is_finite()) {
            return Err(Error::InvalidModel(format!("omega_c = {} must be > 0", self.omega_c)));
        }
        Ok(())
    }

    pub fn is_pure_dephasing(&self) -> bool {
        (self.theta - FRAC_PI_2).abs() < 1e-12
    }

    /// Semigroup rate λπ/(2β).
    pub fn gamma_infinity(&self) -> f64 {
        self.lambda * std::f64::consts::PI / (2.0 * self.beta)
    }

    pub fn rate(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        match &self.rate_kind {
            RateKind::Custom(table) => table.at(t),
            _ => rate_ohmic(t, self),
        }
    }

    /// Γ(t) = ∫₀ᵗ γ(s) ds.
    pub fn rate_integral(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        Ok(match &self.rate_kind {
            RateKind::TclOhmic => {
                let x = self.omega_c * t;
                (self.lambda / self.beta) * (t * x.atan() - x.ln_1p_sq() / (2.0 * self.omega_c))
            }
            RateKind::Semigroup => self.gamma_infinity() * t,
            RateKind::Custom(table) => table.integral(t)?,
        })
    }

    /// Fastest time scale relevant to the integrator.
    pub(crate) fn frequency_scale(&self) -> f64 {
        match &self.rate_kind {
            RateKind::TclOhmic => self.omega_c.max(self.gamma_infinity()),
            RateKind::Semigroup => self.gamma_infinity(),
            RateKind::Custom(table) => table.max_rate(),
        }
    }
}

trait Ln1pSq {
    fn ln_1p_sq(self) -> f64;
}

impl Ln1pSq for f64 {
    /// ln(1 + x²) without overflow for large x.
    fn ln_1p_sq(self) -> f64 {
        let a = self.abs();
        if a > 1e150 {
            2.0 * a.ln()
        } else {
            (a * a).ln_1p()
        }
    }
}

/// Ohmic TCL rate `(λ/β) arctan(ω_c t)`; the semigroup kind returns the
/// limit `λπ/(2β)`.
pub fn rate_ohmic(t: f64, model: &NoiseModel) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(match model.rate_kind {
        RateKind::Semigroup => model.gamma_infinity(),
        _ => (model.lambda / model.beta) * (model.omega_c * t).atan(),
    })
}
