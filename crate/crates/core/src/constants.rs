//! Numerical conventions shared by the flat-model checks.

/// The field of `[ξ, η]` is `FIELD_BRACKET_SIGN` times the vector-field
/// commutator of the fields of `ξ` and `η`.
pub const FIELD_BRACKET_SIGN: i64 = -1;

/// Fixed step of the fourth-order Runge-Kutta flow integrator.
pub const RK4_STEP: f64 = 1e-3;

/// Step of the central differences in the tractor derivative.
pub const FD_STEP: f64 = 1e-5;

/// A flowed point leaves the chart when `|v_0|` drops below this.
pub const CHART_ESCAPE: f64 = 1e-6;

pub const IDENTITY_TOLERANCE: f64 = 1e-6;
pub const KILLING_TOLERANCE: f64 = 1e-8;
