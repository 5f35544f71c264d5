//! Numerical tolerances shared by the simulator, the reports and the tests.

/// Allowed drift of the squared norm after any gate.
pub const UNITARITY: f64 = 1e-12;

/// Largest weight tolerated outside the parity/compression ground state.
pub const LEAKAGE: f64 = 1e-12;

/// Per-amplitude agreement between simulation and closed form.
pub const ORACLE: f64 = 1e-10;

/// Success probabilities below this are treated as zero.
pub const MIN_SUCCESS_PROBABILITY: f64 = 1e-15;
