//! Truncated Fock-space simulation of bosonic modes: state constructors,
//! linear-optical circuits, photon counting, photon-subtraction kitten states,
//! squeezed-cat fitting, closed-form oracles and Gaussian moment propagation.
//!
//! States are plain values; every operation returns a new state and is safe to
//! call from several threads at once.

pub mod analytics;
pub mod catfit;
pub mod circuits;
pub mod combinatorics;
pub mod error;
pub mod experiments;
pub mod expm;
pub mod fock;
pub mod gaussian;
pub mod kitten;
pub mod measurement;
pub mod optimize;
pub mod states;

pub use error::{Error, Result};
pub use fock::{fidelity, inner, tensor, FockState, ModeLayout};
pub use num_complex::Complex64;

/// Library version recorded in experiment metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
