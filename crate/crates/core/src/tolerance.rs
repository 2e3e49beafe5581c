//! Numerical tolerances shared by every module.

use std::sync::OnceLock;

/// Default absolute tolerance for value and price comparisons.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Environment variable that overrides [`DEFAULT_EPS`] process-wide.
pub const TOL_ENV_VAR: &str = "EXCHANGE_LAB_TOL";

/// Simplex pivot tolerance: entries smaller than this are never pivoted on.
pub const PIVOT_TOL: f64 = 1e-10;

/// Primal feasibility tolerance for LP outcomes.
pub const FEAS_TOL: f64 = 1e-8;

/// Reduced-cost tolerance for declaring a basis optimal.
pub const OPT_TOL: f64 = 1e-9;

/// Absolute tolerance on the quality parameter in bisections.
pub const BISECTION_TOL: f64 = 1e-9;

/// Iteration cap for bisections.
pub const BISECTION_MAX_ITERS: usize = 200;

static EPS: OnceLock<f64> = OnceLock::new();

/// The comparison tolerance ε, read once from `EXCHANGE_LAB_TOL` if set to a
/// positive finite number.
pub fn eps() -> f64 {
    *EPS.get_or_init(|| {
        std::env::var(TOL_ENV_VAR)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|t| t.is_finite() && *t > 0.0)
            .unwrap_or(DEFAULT_EPS)
    })
}

/// Relative violation threshold for the feasibility systems inside quality
/// bisections. Tighter than [`FEAS_TOL`] so that the located threshold is not
/// shifted by the tolerance band when the system's numbers are small.
pub const SEARCH_FEAS_TOL: f64 = 1e-11;
