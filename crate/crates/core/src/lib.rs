//! Numerical toolkit for precision limits of frequency estimation with
//! noisy qubit probes.
//!
//! The crate is organised bottom-up:
//!
//! * [`qcore`]: matrices, states, channels, Choi/Kraus conversion, distances.
//! * [`dynamics`]: the spin-boson master equation and its joint propagation
//!   with the frequency derivative.
//! * [`fisher`]: classical and quantum Fisher information.
//! * [`bounds`]: the channel-extension upper bound on the QFI and the
//!   time-optimised QCRB.
//! * [`protocols`]: closed-form and simulated estimation strategies.
//! * [`scaling`]: N-sweeps, exponent fits, config and CSV plumbing.

pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod fisher;
pub mod protocols;
pub mod qcore;
pub mod scaling;

pub use error::{Error, Result};
