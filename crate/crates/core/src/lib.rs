//! Simulation of longitudinal and dispersive qubit readout.
//!
//! The crate covers intracavity pointer dynamics, homodyne signal-to-noise
//! ratio and readout fidelity, the transmon circuit design formulas,
//! multi-qubit pointer constellations and a Monte Carlo check of the
//! integrated homodyne record.
//!
//! Frequencies inside the crate are angular (rad/s) unless a name says
//! otherwise (`_mhz`, `_ghz`).

pub mod circuit;
pub mod config;
pub mod dynamics;
mod error;
pub mod figures;
pub mod measurement;
pub mod model;
pub mod montecarlo;
pub mod multiqubit;
pub mod ode;

pub use error::{Error, FieldError, Result};
pub use model::{
    EnvelopeKind, EnvelopeSpec, FrequencyParams, QubitState, ReadoutProtocol, SqueezeSpec, SystemParams, Validated,
    Warning,
};

pub use num_complex::Complex64;
