//! Stochastic simulation of magnetic-field-guided, enzyme-gated nanowire
//! self-assembly between a transmitter and a receiver, together with the
//! closed-form stability and bit-error analysis of the resulting link.
//!
//! * [`physics`]: hard spheres in a reflecting box, with lazy (PIT) and exact
//!   event-driven (PIC) collision handling.
//! * [`assembly`]: the wire growth rules applied to collisions with the tip.
//! * [`analysis`]: stability metric, noise standard deviation and error densities.
//! * [`harness`]: configuration, seeded runs, parameter sweeps and CSV output.

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod physics;
pub mod stats;

pub use error::{ConfigError, Error, Result};
pub use geometry::{SimBox, Vec3};
