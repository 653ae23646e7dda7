//! Geometric and dynamical single- and two-qubit gates: path synthesis,
//! robustness scans, parametrically modulated device models and open-system
//! fidelities.

pub mod device;
pub mod dynamical;
pub mod error;
pub mod geo;
pub mod open_system;
pub mod qcore;
pub mod robustness;
pub mod tolerances;

pub use error::{Error, Result};
