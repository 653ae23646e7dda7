//! Numerical tolerances and step caps used across the crate.
//!
//! Every threshold that appears in a check lives here so tests and the
//! acceptance runner read the same numbers.

/// Hermiticity check on Hamiltonians, max-norm of `A - A†`.
pub const HERMITIAN: f64 = 1e-12;

/// Relative Hermiticity check for Hamiltonians with large entries.
pub const HERMITIAN_REL: f64 = 1e-13;

/// Unitarity of a matrix exponential.
pub const EXPM_UNITARY: f64 = 1e-10;

/// Unitarity of a time-ordered propagator.
pub const PROPAGATOR_UNITARY: f64 = 1e-8;

/// Generic unitary flag on operators.
pub const UNITARY: f64 = 1e-9;

/// Largest rotation angle per propagation step, `‖H‖·Δt`.
pub const STEP_PHASE_CAP: f64 = 0.05;

/// Largest decay per master-equation step, `max(κ)·Δt`.
pub const STEP_DECAY_CAP: f64 = 1e-3;

/// Density matrix trace deviation.
pub const DENSITY_TRACE: f64 = 1e-8;

/// Density matrix Hermiticity.
pub const DENSITY_HERMITIAN: f64 = 1e-10;

/// Most negative eigenvalue accepted on a density matrix.
pub const DENSITY_MIN_EIG: f64 = -1e-8;

/// Most negative eigenvalue tolerated at the end of a master-equation run
/// before the step is halved and the run retried.
pub const MASTER_POSITIVITY: f64 = -1e-6;

/// Trace drift accepted at the end of a master-equation run.
pub const MASTER_TRACE_DRIFT: f64 = 1e-7;

/// Pure-state norm deviation.
pub const STATE_NORM: f64 = 1e-10;

/// Analytic/propagated gate agreement up to global phase.
pub const GATE_PROPAGATED: f64 = 1e-6;

/// Analytic gate agreement with textbook targets.
pub const GATE_ANALYTIC: f64 = 1e-9;

/// Residual dynamical phase on a geometric pulse.
pub const DYNAMICAL_PHASE: f64 = 1e-6;

/// Bessel function absolute accuracy.
pub const BESSEL: f64 = 1e-12;

/// Resolution of the fallback phase search in the global-phase distance.
pub const PHASE_GRID: f64 = 1e-4;

/// Default ceiling on the propagation step for fast device Hamiltonians (µs).
pub const DEVICE_MAX_STEP: f64 = 4e-6;

/// Default ceiling on the propagation step for two-level control pulses (µs).
pub const PULSE_MAX_STEP: f64 = 2.5e-4;
