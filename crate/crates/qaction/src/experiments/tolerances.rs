//! Pass/fail thresholds used by the built-in experiment checks and the
//! acceptance suite. Every threshold is pinned here, with its origin.

/// Fitted m~ v~2 window at asymptotic T (reported asymptote 0.4999,
/// analytic value 0.5).
pub const PRODUCT_M_V2_WINDOW: (f64, f64) = (0.498, 0.502);

/// Fitted m~ v~-2 window at asymptotic T (reported asymptote 2.008,
/// analytic value 2).
pub const PRODUCT_M_VM2_WINDOW: (f64, f64) = (1.99, 2.03);

/// Maximum relative amplitude error of the balanced-boundary fit at
/// T in {1.0, 1.5, 2.0} (reported: about 0.001 in the regime 1 < T < 2).
pub const BALANCED_RESIDUAL_MAX: f64 = 2e-3;

/// Relative parameter tolerance of the harmonic identity fit.
pub const HARMONIC_PARAM_REL: f64 = 1e-4;

/// Bessel values against the independent series oracle.
pub const BESSEL_ORACLE_REL: f64 = 1e-10;

/// Chapman-Kolmogorov semigroup residual.
pub const CHAPMAN_KOLMOGOROV_RESIDUAL: f64 = 1e-6;

/// Eigenfunction property residual of the exact kernel.
pub const EIGENFUNCTION_RESIDUAL: f64 = 1e-6;

/// Ground-state length scale: Lambda_sc = 2.35 +- 0.01.
pub const LAMBDA_SC_CENTER: f64 = 2.35;
pub const LAMBDA_SC_TOL: f64 = 0.01;

/// Wave-function reconstruction sup-norm bound on [0.5, 2.35].
pub const RECONSTRUCTION_SUP_NORM: f64 = 0.01;

/// Wave-function peak location tolerance around sqrt(2).
pub const PEAK_LOCATION_TOL: f64 = 1e-3;

/// Resolution study: required N_t growth factor from T = 2 to T = 14
/// (reported 20-fold; the check is ordering plus this factor).
pub const RESOLUTION_NT_FACTOR: f64 = 10.0;

/// Chaotic fraction at the low end of the scanned energies.
pub const R_LOW_MAX: f64 = 0.1;

/// Chaotic fraction at the high end of the scanned energies.
pub const R_HIGH_MIN: f64 = 0.5;

/// Binomial z-score for the monotonicity-within-noise check of R(E).
pub const R_MONOTONE_Z: f64 = 2.0;

/// Transformation-law residual for exactly matched parameters.
pub const TRANSFORMATION_LAW_RESIDUAL: f64 = 1e-10;

/// Singular tube half-width around the quantum potential minimum.
pub const LAW_EPS_TUBE: f64 = 0.05;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::assertions_on_constants)]
    fn windows_contain_the_analytic_values() {
        assert!(PRODUCT_M_V2_WINDOW.0 < 0.5 && 0.5 < PRODUCT_M_V2_WINDOW.1);
        assert!(PRODUCT_M_VM2_WINDOW.0 < 2.0 && 2.0 < PRODUCT_M_VM2_WINDOW.1);
        assert!(LAMBDA_SC_CENTER - LAMBDA_SC_TOL < 2.352710956908684);
        assert!(2.352710956908684 < LAMBDA_SC_CENTER + LAMBDA_SC_TOL);
    }
}
