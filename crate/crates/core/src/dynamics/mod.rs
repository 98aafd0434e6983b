//! Spin-boson master equation for a qubit probe, integrated jointly with its
//! frequency derivative.

mod model;
mod propagate;

pub use model::{rate_ohmic, NoiseModel, RateKind, RateTable};
pub use propagate::{
    default_steps, evolve_state, generator, generator_derivative, phase_covariance_defect, propagate,
    propagate_channel, propagate_converged, ChannelTrajectory, ChannelWithDerivative, STEPS_PER_UNIT,
};
