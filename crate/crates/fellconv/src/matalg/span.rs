//! Linear spans of matrices and numerical rank of vector families.

use num_complex::Complex64;

use super::eigen::{hermitian_eig, HermitianEig};
use super::matrix::ComplexMatrix;
use super::MatError;
use crate::tol::Tolerances;

const PINV_CUT: f64 = 1e-13;

/// A linearly independent span of (possibly rectangular) matrices, with
/// least-squares projection. Used for Hilbert-bimodule fibers and ideal
/// subspaces, where no algebra structure is required.
#[derive(Debug, Clone)]
pub struct MatrixSpan {
    rows: usize,
    cols: usize,
    basis: Vec<ComplexMatrix>,
    gram: Option<HermitianEig>,
    tol: Tolerances,
}

impl MatrixSpan {
    pub fn new(
        rows: usize,
        cols: usize,
        basis: Vec<ComplexMatrix>,
        tol: &Tolerances,
    ) -> Result<Self, MatError> {
        for (i, b) in basis.iter().enumerate() {
            if b.rows() != rows || b.cols() != cols {
                return Err(MatError::BasisShape {
                    index: i,
                    rows: b.rows(),
                    cols: b.cols(),
                    ambient: rows,
                });
            }
            if !b.all_finite() {
                return Err(MatError::NonFiniteEntries);
            }
        }
        let dim = basis.len();
        let mut span = MatrixSpan {
            rows,
            cols,
            basis,
            gram: None,
            tol: *tol,
        };
        if dim == 0 {
            return Ok(span);
        }
        let mut gram = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                gram.set(i, j, span.basis[i].frobenius_inner(&span.basis[j]));
            }
        }
        let eig = hermitian_eig(&gram.hermitize(), tol)?;
        let max_eig = eig.values.last().copied().unwrap_or(0.0);
        let min_eig = eig.values.first().copied().unwrap_or(0.0);
        if max_eig <= 0.0 || min_eig < tol.independence * max_eig {
            return Err(MatError::DependentBasis {
                min_rel: if max_eig > 0.0 { min_eig / max_eig } else { 0.0 },
            });
        }
        span.gram = Some(eig);
        Ok(span)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn realize(&self, coords: &[Complex64]) -> ComplexMatrix {
        assert_eq!(coords.len(), self.dim());
        let mut out = ComplexMatrix::zeros(self.rows, self.cols);
        for (c, b) in coords.iter().zip(&self.basis) {
            if *c != Complex64::new(0.0, 0.0) {
                out = out.add(&b.scale(*c));
            }
        }
        out
    }

    /// Least-squares coordinates and the projection residual.
    pub fn project_raw(&self, m: &ComplexMatrix) -> (Vec<Complex64>, f64) {
        if self.dim() == 0 {
            return (Vec::new(), m.frobenius_norm());
        }
        let gram = self.gram.as_ref().unwrap();
        let rhs: Vec<Complex64> = self.basis.iter().map(|b| b.frobenius_inner(m)).collect();
        let coords = gram.pinv_apply(&rhs, PINV_CUT);
        let residual = self.realize(&coords).sub(m).frobenius_norm();
        (coords, residual)
    }

    /// Coordinates of a member, or an error when the residual exceeds the
    /// membership tolerance.
    pub fn project(&self, m: &ComplexMatrix) -> Result<Vec<Complex64>, MatError> {
        let (coords, residual) = self.project_raw(m);
        if !Tolerances::within(residual, self.tol.membership, m.frobenius_norm()) {
            return Err(MatError::NotInAlgebra { residual });
        }
        Ok(coords)
    }
}

/// Numerical rank of a family of coordinate vectors: the number of Gram
/// eigenvalues above `rel_tol * max_eigenvalue`.
pub fn rank_of_vectors(
    vectors: &[Vec<Complex64>],
    rel_tol: f64,
    cfg: &Tolerances,
) -> Result<usize, MatError> {
    let k = vectors.len();
    if k == 0 {
        return Ok(0);
    }
    let mut gram = ComplexMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in vectors[i].iter().zip(&vectors[j]) {
                acc += a.conj() * b;
            }
            gram.set(i, j, acc);
        }
    }
    let values = super::eigen::hermitian_eigenvalues(&gram.hermitize(), cfg)?;
    let max = values.last().copied().unwrap_or(0.0);
    if max <= 0.0 {
        return Ok(0);
    }
    Ok(values.iter().filter(|&&v| v > rel_tol * max).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangular_span_projects_members() {
        let tol = Tolerances::default();
        // X = 2x1 matrices supported on the first coordinate
        let e1 = ComplexMatrix::from_entries(
            2,
            1,
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        );
        let span = MatrixSpan::new(2, 1, vec![e1.clone()], &tol).unwrap();
        let member = e1.scale(Complex64::new(0.0, 2.0));
        let coords = span.project(&member).unwrap();
        assert!((coords[0] - Complex64::new(0.0, 2.0)).norm() < 1e-12);

        let outsider = ComplexMatrix::from_entries(
            2,
            1,
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        );
        assert!(span.project(&outsider).is_err());
    }

    #[test]
    fn vector_rank() {
        let tol = Tolerances::default();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let vs = vec![
            vec![one, zero],
            vec![zero, one],
            vec![one, one],
        ];
        assert_eq!(rank_of_vectors(&vs, 1e-9, &tol).unwrap(), 2);
        assert_eq!(rank_of_vectors(&[], 1e-9, &tol).unwrap(), 0);
        assert_eq!(rank_of_vectors(&[vec![zero, zero]], 1e-9, &tol).unwrap(), 0);
    }
}
