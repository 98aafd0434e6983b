//! Protocol analytics: Ramsey and GHZ probabilities, the phase-covariant
//! Zeno optimum, GHZ parity readout under product channels, the toy model
//! and a maximum-likelihood Monte-Carlo harness.

mod analytic;
mod mle;
mod parity;
mod toy;

pub use analytic::{
    dephasing_crb, dephasing_optimum, dephasing_probs, dephasing_probs_derivative, nep, pc_ghz_survival,
    pc_zeno_optimum, ramsey_survival,
};
pub use mle::{mle_monte_carlo, Estimator, McConfig, McResult};
pub use parity::{
    optimal_readout_phase, parity_expectation_ghz, parity_expectation_ghz_phased, parity_precision,
    parity_precision_phased, parity_time_optimum, ParitySignal,
};
pub use toy::{histogram, toy_default_time, toy_model_sample, variance};

use crate::dynamics::ChannelWithDerivative;
use crate::error::{Error, Result};
use crate::fisher::{classical_fi, projective_probability};
use crate::qcore::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    SeparablePlus,
    Ghz,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measurement {
    /// Projection back onto the input, i.e. σx on each |x+⟩ probe.
    Survival,
    Parity,
    /// Per-probe projective measurement along a Bloch axis.
    Projective([f64; 3]),
}

/// N probes, total time T, and how they are prepared and read out.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSpec {
    pub n: u64,
    pub total_time: f64,
    pub input: InputKind,
    pub measurement: Measurement,
}

impl ProtocolSpec {
    pub fn new(n: u64, total_time: f64, input: InputKind, measurement: Measurement) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be >= 1".into()));
        }
        if !(total_time > 0.0) {
            return Err(Error::InvalidArgument(format!("total time {total_time} must be > 0")));
        }
        Ok(ProtocolSpec { n, total_time, input, measurement })
    }

    /// `Δ²ω̂` with ν = T/t repetitions, for the channel at its own time.
    pub fn precision(&self, ch: &ChannelWithDerivative) -> Result<f64> {
        match (self.input, self.measurement) {
            (InputKind::Ghz, Measurement::Parity) | (InputKind::Ghz, Measurement::Survival) => {
                parity_precision(ch, self.n, self.total_time)
            }
            (InputKind::SeparablePlus, m) => {
                let axis = match m {
                    Measurement::Projective(a) => a,
                    _ => [1.0, 0.0, 0.0],
                };
                let plus = DensityMatrix::plus();
                let rho = ch.map.apply(&plus)?;
                let drho = ch.apply_derivative(&plus);
                let fi = classical_fi(&projective_probability(&rho, &drho, axis)?)?;
                if !(fi > 0.0) {
                    return Err(Error::ZeroInformation);
                }
                Ok(ch.t / (self.total_time * self.n as f64 * fi))
            }
            (InputKind::Ghz, Measurement::Projective(_)) => {
                Err(Error::InvalidArgument("GHZ input supports parity readout only".into()))
            }
        }
    }
}
