//! Concrete finite-dimensional C*-algebras: spans of matrices closed under
//! product and conjugate transpose.
//!
//! These are the unit fibers of a Fell bundle. The span is described by an
//! explicit basis; closure and the existence of an algebra unit are
//! verified at construction, never assumed. Membership is decided by
//! least-squares projection onto the span.

use num_complex::Complex64;

use super::eigen::{hermitian_eig, operator_norm, HermitianEig};
use super::matrix::ComplexMatrix;
use super::MatError;
use crate::tol::Tolerances;

/// A *-closed algebra of `ambient_dim x ambient_dim` complex matrices,
/// presented by a linearly independent basis.
///
/// The algebra unit may differ from the ambient identity (for example the
/// span of `E_11` inside the 2x2 matrices has unit `E_11`).
#[derive(Debug, Clone)]
pub struct MatrixStarAlgebra {
    ambient_dim: usize,
    basis: Vec<ComplexMatrix>,
    tol: Tolerances,
    gram: Option<HermitianEig>,
    unit: Vec<Complex64>,
    prod: Vec<Vec<Complex64>>,
    star: Vec<Vec<Complex64>>,
    blocks: Option<Vec<usize>>,
}

const PINV_CUT: f64 = 1e-13;

impl MatrixStarAlgebra {
    /// Build and verify an algebra from a basis.
    ///
    /// Checks, in order: entries finite and square of the right size;
    /// linear independence; closure of the span under products and
    /// adjoints; existence of a unit in the span. An empty basis is the
    /// zero algebra and is allowed.
    pub fn new(
        ambient_dim: usize,
        basis: Vec<ComplexMatrix>,
        tol: &Tolerances,
    ) -> Result<Self, MatError> {
        for (i, b) in basis.iter().enumerate() {
            if b.rows() != ambient_dim || b.cols() != ambient_dim {
                return Err(MatError::BasisShape {
                    index: i,
                    rows: b.rows(),
                    cols: b.cols(),
                    ambient: ambient_dim,
                });
            }
            if !b.all_finite() {
                return Err(MatError::NonFiniteEntries);
            }
        }
        let dim = basis.len();
        let mut alg = MatrixStarAlgebra {
            ambient_dim,
            basis,
            tol: *tol,
            gram: None,
            unit: Vec::new(),
            prod: Vec::new(),
            star: Vec::new(),
            blocks: None,
        };
        if dim == 0 {
            return Ok(alg);
        }

        // Frobenius Gram of the basis; eigenvalues decide independence and
        // drive every later projection.
        let mut gram = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                gram.set(i, j, alg.basis[i].frobenius_inner(&alg.basis[j]));
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
        alg.gram = Some(eig);

        // closure under products
        for i in 0..dim {
            for j in 0..dim {
                let p = alg.basis[i].mul(&alg.basis[j]);
                let (coords, residual) = alg.project_raw(&p);
                if !Tolerances::within(residual, tol.closure, p.frobenius_norm()) {
                    return Err(MatError::NotClosedUnderProduct { i, j, residual });
                }
                alg.prod.push(coords);
            }
        }
        // closure under adjoints
        for i in 0..dim {
            let s = alg.basis[i].adjoint();
            let (coords, residual) = alg.project_raw(&s);
            if !Tolerances::within(residual, tol.closure, s.frobenius_norm()) {
                return Err(MatError::NotClosedUnderStar { i, residual });
            }
            alg.star.push(coords);
        }

        alg.unit = alg.solve_unit()?;
        Ok(alg)
    }

    /// Direct sum of full matrix blocks `M_{d_1} + ... + M_{d_m}`, with the
    /// matrix-unit basis ordered block by block, row-major inside a block.
    pub fn block_diagonal(dims: &[usize], tol: &Tolerances) -> Result<Self, MatError> {
        let ambient: usize = dims.iter().sum();
        let mut basis = Vec::new();
        let mut offset = 0;
        for &d in dims {
            for r in 0..d {
                for c in 0..d {
                    basis.push(ComplexMatrix::matrix_unit(ambient, offset + r, offset + c));
                }
            }
            offset += d;
        }
        let mut alg = Self::new(ambient, basis, tol)?;
        alg.blocks = Some(dims.to_vec());
        Ok(alg)
    }

    /// The full matrix algebra `M_d`.
    pub fn full_matrix(d: usize, tol: &Tolerances) -> Result<Self, MatError> {
        Self::block_diagonal(&[d], tol)
    }

    /// The scalars, as 1x1 matrices.
    pub fn scalars(tol: &Tolerances) -> Result<Self, MatError> {
        Self::block_diagonal(&[1], tol)
    }

    /// Diagonal matrices in ambient dimension `d` (the commutative algebra
    /// `C^d`).
    pub fn diagonal(d: usize, tol: &Tolerances) -> Result<Self, MatError> {
        Self::block_diagonal(&vec![1; d], tol)
    }

    /// Number of basis elements (the linear dimension of the algebra).
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    /// Block dimensions, when the algebra was built as a block-diagonal
    /// sum of full matrix algebras.
    pub fn blocks(&self) -> Option<&[usize]> {
        self.blocks.as_deref()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// The matrix `sum_i coords[i] basis[i]`.
    pub fn realize(&self, coords: &[Complex64]) -> ComplexMatrix {
        assert_eq!(coords.len(), self.dim(), "coordinate length mismatch");
        let mut out = ComplexMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for (c, b) in coords.iter().zip(&self.basis) {
            if *c != Complex64::new(0.0, 0.0) {
                out = out.add(&b.scale(*c));
            }
        }
        out
    }

    pub(crate) fn project_raw(&self, m: &ComplexMatrix) -> (Vec<Complex64>, f64) {
        let dim = self.dim();
        if dim == 0 {
            return (Vec::new(), m.frobenius_norm());
        }
        let gram = self.gram.as_ref().expect("gram factor present for nonzero algebra");
        let rhs: Vec<Complex64> = self.basis.iter().map(|b| b.frobenius_inner(m)).collect();
        let coords = gram.pinv_apply(&rhs, PINV_CUT);
        let residual = self.realize(&coords).sub(m).frobenius_norm();
        (coords, residual)
    }

    /// Coordinates of `m` in the basis, or an error when `m` is not in the
    /// span (least-squares residual above the membership tolerance).
    pub fn project(&self, m: &ComplexMatrix) -> Result<Vec<Complex64>, MatError> {
        assert_eq!(m.rows(), self.ambient_dim);
        assert_eq!(m.cols(), self.ambient_dim);
        let (coords, residual) = self.project_raw(m);
        if !Tolerances::within(residual, self.tol.membership, m.frobenius_norm()) {
            return Err(MatError::NotInAlgebra { residual });
        }
        Ok(coords)
    }

    /// Membership residual without the gate; used by rank and span tests.
    pub fn projection_residual(&self, m: &ComplexMatrix) -> f64 {
        self.project_raw(m).1
    }

    /// Expansion of `basis[i] * basis[j]` in the basis.
    pub fn product_coords(&self, i: usize, j: usize) -> &[Complex64] {
        &self.prod[i * self.dim() + j]
    }

    /// Expansion of `basis[i]*` in the basis.
    pub fn star_basis_coords(&self, i: usize) -> &[Complex64] {
        &self.star[i]
    }

    /// Product of two coordinate vectors, in coordinates.
    pub fn mult_coords(&self, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
        let dim = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for i in 0..dim {
            if x[i] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                let f = x[i] * y[j];
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (o, p) in out.iter_mut().zip(self.product_coords(i, j)) {
                    *o += f * p;
                }
            }
        }
        out
    }

    /// Adjoint of a coordinate vector, in coordinates (antilinear).
    pub fn star_coords(&self, x: &[Complex64]) -> Vec<Complex64> {
        let dim = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for i in 0..dim {
            let c = x[i].conj();
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (o, s) in out.iter_mut().zip(self.star_basis_coords(i)) {
                *o += c * s;
            }
        }
        out
    }

    /// Coordinates of the algebra unit.
    pub fn unit_coords(&self) -> &[Complex64] {
        &self.unit
    }

    pub fn unit_matrix(&self) -> ComplexMatrix {
        self.realize(&self.unit)
    }

    /// Normalized trace `tr(m) / ambient_dim`: the faithful positive
    /// functional used for regular-module inner products.
    pub fn normalized_trace(&self, m: &ComplexMatrix) -> Complex64 {
        if self.ambient_dim == 0 {
            return Complex64::new(0.0, 0.0);
        }
        m.trace() / self.ambient_dim as f64
    }

    /// Operator norm of the element with the given coordinates.
    pub fn operator_norm_coords(&self, coords: &[Complex64]) -> Result<f64, MatError> {
        operator_norm(&self.realize(coords), &self.tol)
    }

    fn solve_unit(&self) -> Result<Vec<Complex64>, MatError> {
        let dim = self.dim();
        // Unknown e = sum_j x_j b_j with e b_i = b_i and b_i e = b_i for
        // all i; solved in coordinates by normal equations.
        let rows = 2 * dim * dim;
        let mut a = ComplexMatrix::zeros(rows, dim);
        let mut y = vec![Complex64::new(0.0, 0.0); rows];
        for i in 0..dim {
            for c in 0..dim {
                let left_row = i * dim + c;
                let right_row = dim * dim + i * dim + c;
                for j in 0..dim {
                    a.set(left_row, j, self.product_coords(j, i)[c]);
                    a.set(right_row, j, self.product_coords(i, j)[c]);
                }
                let ind = if c == i { 1.0 } else { 0.0 };
                y[left_row] = Complex64::new(ind, 0.0);
                y[right_row] = Complex64::new(ind, 0.0);
            }
        }
        let gram = a.adjoint().mul(&a).hermitize();
        let rhs = a.adjoint().apply(&y);
        let eig = hermitian_eig(&gram, &self.tol)?;
        let x = eig.pinv_apply(&rhs, PINV_CUT);

        // verify in matrix space
        let e = self.realize(&x);
        let mut worst = 0.0f64;
        for b in &self.basis {
            let left = e.mul(b).sub(b).frobenius_norm();
            let right = b.mul(&e).sub(b).frobenius_norm();
            worst = worst.max(left / (1.0 + b.frobenius_norm()));
            worst = worst.max(right / (1.0 + b.frobenius_norm()));
        }
        if worst > self.tol.closure {
            return Err(MatError::NoUnit { residual: worst });
        }
        Ok(x)
    }
}

/// The positivity defect `||a||^2 1_A - a* a` of Hermitian-algebra
/// calculus: always a positive element of the algebra.
pub fn cstar_defect(alg: &MatrixStarAlgebra, a: &ComplexMatrix) -> Result<ComplexMatrix, MatError> {
    alg.project(a)?; // membership gate
    let norm = operator_norm(a, alg.tolerances())?;
    let unit = alg.unit_matrix();
    Ok(unit.scale(Complex64::new(norm * norm, 0.0)).sub(&a.adjoint().mul(a)))
}
