//! Dense complex linear algebra and finite-dimensional C*-algebra
//! primitives.

mod eigen;
mod matrix;
mod span;
mod staralg;

pub use eigen::{
    hermitian_eig, hermitian_eigenvalues, is_positive, operator_norm, positive_sqrt, HermitianEig,
};
pub use matrix::ComplexMatrix;
pub use span::{rank_of_vectors, MatrixSpan};
pub use staralg::{cstar_defect, MatrixStarAlgebra};

use thiserror::Error;

/// Errors from the matrix and star-algebra layer.
#[derive(Debug, Clone, Error)]
pub enum MatError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFiniteEntries,
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("Jacobi iteration did not converge (off-diagonal residual {residual:.3e})")]
    EigNonConvergence { residual: f64 },
    #[error("eigendecomposition reconstruction residual {residual:.3e} out of tolerance")]
    EigReconstruction { residual: f64 },
    #[error("matrix is not positive (min eigenvalue {min_eig:?})")]
    NotPositive { min_eig: Option<f64> },
    #[error("positive square root residual {residual:.3e} out of tolerance")]
    SqrtResidual { residual: f64 },
    #[error("basis element {index} has shape {rows}x{cols}, expected {ambient}x{ambient}")]
    BasisShape {
        index: usize,
        rows: usize,
        cols: usize,
        ambient: usize,
    },
    #[error("basis is linearly dependent (relative min eigenvalue {min_rel:.3e})")]
    DependentBasis { min_rel: f64 },
    #[error("span not closed under product at basis pair ({i},{j}) (residual {residual:.3e})")]
    NotClosedUnderProduct { i: usize, j: usize, residual: f64 },
    #[error("span not closed under adjoint at basis element {i} (residual {residual:.3e})")]
    NotClosedUnderStar { i: usize, residual: f64 },
    #[error("span has no multiplicative unit (residual {residual:.3e})")]
    NoUnit { residual: f64 },
    #[error("matrix is not in the algebra (membership residual {residual:.3e})")]
    NotInAlgebra { residual: f64 },
}
