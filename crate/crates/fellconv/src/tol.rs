//! Centralized numerical tolerances.
//!
//! Every floating-point comparison in the crate routes through a
//! [`Tolerances`] value so that thresholds are pinned in one place.

/// Tolerance configuration shared by all numerical routines.
///
/// The defaults are the ones used throughout the test suite; constructors
/// store a copy so that immutable objects keep the thresholds they were
/// built with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max-norm defect allowed when an input must be Hermitian.
    pub hermitian_input: f64,
    /// Relative off-diagonal Frobenius mass at which the Jacobi sweep stops.
    pub eig_convergence: f64,
    /// Hard cap on Jacobi sweeps.
    pub eig_max_sweeps: usize,
    /// Relative residual allowed for `M = Q diag(w) Q*` after eigensolving.
    pub eig_reconstruct: f64,
    /// Residual gate for positive square roots (`S*S = M`).
    pub sqrt_residual: f64,
    /// Residual gate for membership of a matrix in the span of a basis.
    pub membership: f64,
    /// Residual gate for *-algebra closure under product and adjoint.
    pub closure: f64,
    /// Relative eigenvalue threshold below which a basis counts as dependent.
    pub independence: f64,
    /// Default tolerance for Fell-bundle axiom checks.
    pub axiom: f64,
    /// Eigenvalue slack when deciding positivity of a Hermitian matrix.
    pub positivity: f64,
    /// Absolute lower bound for the smallest eigenvalue of a regular-module Gram matrix.
    pub gram_min_eig: f64,
    /// Allowed disagreement between the two routes of the fiber norm.
    pub fiber_norm_agreement: f64,
    /// Residual gate for well-definedness in the pre-representation extension.
    pub prerep_well_defined: f64,
    /// Slack added to norm-dominance contracts.
    pub dominance_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian_input: 1e-12,
            eig_convergence: 1e-13,
            eig_max_sweeps: 100,
            eig_reconstruct: 1e-9,
            sqrt_residual: 1e-8,
            membership: 1e-9,
            closure: 1e-9,
            independence: 1e-12,
            axiom: 1e-9,
            positivity: 1e-9,
            gram_min_eig: 1e-10,
            fiber_norm_agreement: 1e-8,
            prerep_well_defined: 1e-8,
            dominance_slack: 1e-7,
        }
    }
}

impl Tolerances {
    /// Scale-aware comparison: `|x| <= tol * (1 + scale)`.
    pub fn within(x: f64, tol: f64, scale: f64) -> bool {
        x.abs() <= tol * (1.0 + scale.abs())
    }
}
