//! Numerical tolerances shared across the crate.

/// Allowed deviation of a BPA's total mass from one.
pub const MASS_SUM: f64 = 1e-9;

/// Recovered masses in `[-NEGATIVE_CLAMP, 0)` are rounding noise and get clamped.
pub const NEGATIVE_CLAMP: f64 = 1e-9;

/// Computed masses at or below this are treated as zero when building a core.
pub const SUPPORT: f64 = 1e-12;

/// Slack on the `Bl ≤ Pr ≤ Pl` compatibility inequalities.
pub const COMPATIBILITY: f64 = 1e-12;

/// Allowed deviation of `α + Σβ` from one.
pub const WEIGHT_SUM: f64 = 1e-9;
