//! Hermitian eigensolver (cyclic complex Jacobi) and the spectral
//! operations built on it: operator norm, positivity, positive square root.
//!
//! The solver is self-contained on purpose: fibers and regular modules in
//! this crate stay well below dimension ~200, where cyclic Jacobi is both
//! simple and accurate to near machine precision.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::MatError;
use crate::tol::Tolerances;

/// Eigendecomposition of a Hermitian matrix: `m = q diag(values) q*`,
/// eigenvalues ascending, columns of `q` the matching orthonormal
/// eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub q: ComplexMatrix,
}

impl HermitianEig {
    /// Apply the pseudo-inverse to a vector, dropping eigenvalues below
    /// `rel_cut * max|eigenvalue|`.
    pub fn pinv_apply(&self, b: &[Complex64], rel_cut: f64) -> Vec<Complex64> {
        let n = self.values.len();
        assert_eq!(b.len(), n);
        let cut = self.values.iter().fold(0.0f64, |m, &v| m.max(v.abs())) * rel_cut;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            let lam = self.values[k];
            if lam.abs() <= cut {
                continue;
            }
            // coefficient <q_k, b> / lambda_k
            let mut coef = Complex64::new(0.0, 0.0);
            for i in 0..n {
                coef += self.q.get(i, k).conj() * b[i];
            }
            coef /= lam;
            for i in 0..n {
                out[i] += coef * self.q.get(i, k);
            }
        }
        out
    }

    /// `f(m) = q diag(f(values)) q*` for a real function of the spectrum.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = ComplexMatrix::zeros(n, n);
        for c in 0..n {
            let fv = Complex64::new(f(self.values[c]), 0.0);
            for r in 0..n {
                scaled.set(r, c, self.q.get(r, c) * fv);
            }
        }
        scaled.mul(&self.q.adjoint())
    }
}

fn offdiag_frobenius(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a.get(r, c).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.
///
/// The input must be Hermitian to `tol.hermitian_input` (scaled by the
/// largest entry); the tolerance-level defect is symmetrized away before
/// iterating. Convergence: off-diagonal Frobenius mass below
/// `tol.eig_convergence * ||m||_F`, capped at `tol.eig_max_sweeps` sweeps.
pub fn hermitian_eig(m: &ComplexMatrix, tol: &Tolerances) -> Result<HermitianEig, MatError> {
    if !m.is_square() {
        return Err(MatError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.all_finite() {
        return Err(MatError::NonFiniteEntries);
    }
    let defect = m.hermitian_defect();
    if !Tolerances::within(defect, tol.hermitian_input, m.max_abs()) {
        return Err(MatError::NotHermitian { defect });
    }

    let n = m.rows();
    let mut a = m.hermitize();
    let mut q = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let target = tol.eig_convergence * scale;

    if n > 1 && scale > 0.0 {
        let mut converged = false;
        for _sweep in 0..tol.eig_max_sweeps {
            if offdiag_frobenius(&a) <= target {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for qq in p + 1..n {
                    rotate(&mut a, &mut q, p, qq);
                }
            }
        }
        if !converged && offdiag_frobenius(&a) > target {
            return Err(MatError::EigNonConvergence {
                residual: offdiag_frobenius(&a),
            });
        }
    }

    // sort ascending, carrying eigenvector columns along
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.partial_cmp(&a.get(j, j).re).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut sorted_q = ComplexMatrix::zeros(n, n);
    for (new_c, &old_c) in order.iter().enumerate() {
        for r in 0..n {
            sorted_q.set(r, new_c, q.get(r, old_c));
        }
    }

    let eig = HermitianEig { values, q: sorted_q };

    // reconstruction contract
    let rebuilt = eig.apply_function(|x| x);
    let residual = rebuilt.sub(&m.hermitize()).frobenius_norm();
    if !Tolerances::within(residual, tol.eig_reconstruct, scale) {
        return Err(MatError::EigReconstruction { residual });
    }
    Ok(eig)
}

/// One Jacobi rotation annihilating `a[p, q]`.
fn rotate(a: &mut ComplexMatrix, q: &mut ComplexMatrix, p: usize, r: usize) {
    let apq = a.get(p, r);
    let abs = apq.norm();
    if abs == 0.0 {
        return;
    }
    let n = a.rows();
    let u = apq / abs; // phase of the pivot
    let tau = (a.get(r, r).re - a.get(p, p).re) / (2.0 * abs);
    let t = if tau == 0.0 {
        1.0
    } else {
        -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // V = I except V[p,p] = c, V[p,r] = -s, V[r,p] = s*conj(u), V[r,r] = c*conj(u)
    let vpp = Complex64::new(c, 0.0);
    let vpr = Complex64::new(-s, 0.0);
    let vrp = u.conj() * s;
    let vrr = u.conj() * c;

    // A <- V* A V: columns first, then rows
    for k in 0..n {
        let akp = a.get(k, p);
        let akr = a.get(k, r);
        a.set(k, p, akp * vpp + akr * vrp);
        a.set(k, r, akp * vpr + akr * vrr);
    }
    for k in 0..n {
        let apk = a.get(p, k);
        let ark = a.get(r, k);
        a.set(p, k, vpp.conj() * apk + vrp.conj() * ark);
        a.set(r, k, vpr.conj() * apk + vrr.conj() * ark);
    }
    // scrub rounding noise where exact zeros/reals are known
    a.set(p, r, Complex64::new(0.0, 0.0));
    a.set(r, p, Complex64::new(0.0, 0.0));
    let dp = a.get(p, p);
    let dr = a.get(r, r);
    a.set(p, p, Complex64::new(dp.re, 0.0));
    a.set(r, r, Complex64::new(dr.re, 0.0));

    for k in 0..n {
        let qkp = q.get(k, p);
        let qkr = q.get(k, r);
        q.set(k, p, qkp * vpp + qkr * vrp);
        q.set(k, r, qkp * vpr + qkr * vrr);
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix, tol: &Tolerances) -> Result<Vec<f64>, MatError> {
    hermitian_eig(m, tol).map(|e| e.values)
}

/// Largest singular value, computed as the square root of the top
/// eigenvalue of `m* m`. Defined for rectangular inputs; zero for empty
/// matrices.
pub fn operator_norm(m: &ComplexMatrix, tol: &Tolerances) -> Result<f64, MatError> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0.0);
    }
    if !m.all_finite() {
        return Err(MatError::NonFiniteEntries);
    }
    let gram = m.adjoint().mul(m).hermitize();
    let values = hermitian_eigenvalues(&gram, tol)?;
    let top = values.last().copied().unwrap_or(0.0);
    Ok(top.max(0.0).sqrt())
}

/// True iff `m` is Hermitian to `tol` and its smallest eigenvalue is at
/// least `-tol`. Non-square or numerically intractable inputs are not
/// positive.
pub fn is_positive(m: &ComplexMatrix, tol: f64, cfg: &Tolerances) -> bool {
    if !m.is_square() || !m.all_finite() {
        return false;
    }
    if m.rows() == 0 {
        return true;
    }
    if m.hermitian_defect() > tol * (1.0 + m.max_abs()) {
        return false;
    }
    match hermitian_eigenvalues(&m.hermitize(), cfg) {
        Ok(values) => values.first().map(|&v| v >= -tol * (1.0 + m.max_abs())).unwrap_or(true),
        Err(_) => false,
    }
}

/// Positive square root of a positive matrix, via eigendecomposition with
/// negative eigenvalues clamped to zero.
pub fn positive_sqrt(m: &ComplexMatrix, cfg: &Tolerances) -> Result<ComplexMatrix, MatError> {
    if !is_positive(m, cfg.positivity, cfg) {
        let min_eig = hermitian_eigenvalues(&m.hermitize(), cfg)
            .ok()
            .and_then(|v| v.first().copied());
        return Err(MatError::NotPositive { min_eig });
    }
    let eig = hermitian_eig(&m.hermitize(), cfg)?;
    let s = eig.apply_function(|x| x.max(0.0).sqrt());
    let residual = s.mul(&s).sub(&m.hermitize()).frobenius_norm();
    if !Tolerances::within(residual, cfg.sqrt_residual, m.frobenius_norm()) {
        return Err(MatError::SqrtResidual { residual });
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn identity_spectrum() {
        let values = hermitian_eigenvalues(&ComplexMatrix::identity(3), &cfg()).unwrap();
        for v in values {
            assert!((v - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn known_spectrum_under_unitary_conjugation() {
        // U = [[0.6, 0.8i], [0.8i, 0.6]] is unitary; M = U diag(2,-1) U*
        let u = ComplexMatrix::from_entries(
            2,
            2,
            vec![
                Complex64::new(0.6, 0.0),
                Complex64::new(0.0, 0.8),
                Complex64::new(0.0, 0.8),
                Complex64::new(0.6, 0.0),
            ],
        );
        let d = ComplexMatrix::from_entries(
            2,
            2,
            vec![
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.0, 0.0),
            ],
        );
        let m = u.mul(&d).mul(&u.adjoint());
        let values = hermitian_eigenvalues(&m, &cfg()).unwrap();
        assert!((values[0] + 1.0).abs() < 1e-12);
        assert!((values[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_x_spectrum() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let values = hermitian_eigenvalues(&m, &cfg()).unwrap();
        assert!((values[0] + 1.0).abs() < 1e-13);
        assert!((values[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            hermitian_eigenvalues(&m, &cfg()),
            Err(MatError::NotHermitian { .. })
        ));
    }

    #[test]
    fn operator_norm_examples() {
        let t = cfg();
        assert_eq!(operator_norm(&ComplexMatrix::zeros(3, 3), &t).unwrap(), 0.0);
        let e12 = ComplexMatrix::matrix_unit(2, 0, 1);
        assert!((operator_norm(&e12, &t).unwrap() - 1.0).abs() < 1e-12);
        // shear [[1,1],[0,1]]: top singular value is the golden ratio
        let shear = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let phi = 1.618_033_988_749_895_f64;
        assert!((operator_norm(&shear, &t).unwrap() - phi).abs() < 1e-12);
    }

    #[test]
    fn cstar_identity_of_operator_norm() {
        let t = cfg();
        // fixed pseudo-random matrix, no RNG needed at this scale
        let m = ComplexMatrix::from_entries(
            3,
            3,
            (0..9)
                .map(|k| {
                    let x = ((k * 37 + 11) % 17) as f64 / 7.0 - 1.0;
                    let y = ((k * 53 + 5) % 19) as f64 / 9.0 - 1.0;
                    Complex64::new(x, y)
                })
                .collect(),
        );
        let lhs = operator_norm(&m.adjoint().mul(&m), &t).unwrap();
        let rhs = operator_norm(&m, &t).unwrap().powi(2);
        assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs));
    }

    #[test]
    fn operator_norm_submultiplicative() {
        let t = cfg();
        let a = ComplexMatrix::from_entries(
            2,
            2,
            vec![
                Complex64::new(0.7, -0.2),
                Complex64::new(1.4, 0.9),
                Complex64::new(-0.8, 0.1),
                Complex64::new(0.3, 0.5),
            ],
        );
        let b = ComplexMatrix::from_entries(
            2,
            2,
            vec![
                Complex64::new(-1.1, 0.6),
                Complex64::new(0.2, 0.2),
                Complex64::new(0.9, -0.4),
                Complex64::new(0.0, 1.3),
            ],
        );
        let nab = operator_norm(&a.mul(&b), &t).unwrap();
        let bound = operator_norm(&a, &t).unwrap() * operator_norm(&b, &t).unwrap();
        assert!(nab <= bound + 1e-9 * (1.0 + bound));
    }

    #[test]
    fn positivity_checks() {
        let t = cfg();
        let a = ComplexMatrix::from_entries(
            2,
            2,
            vec![
                Complex64::new(1.0, 0.3),
                Complex64::new(-0.2, 1.1),
                Complex64::new(0.4, -0.9),
                Complex64::new(0.0, 0.7),
            ],
        );
        assert!(is_positive(&a.adjoint().mul(&a), 1e-9, &t));
        assert!(is_positive(&ComplexMatrix::zeros(2, 2), 1e-9, &t));
        let nearly = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1e-3]]);
        assert!(!is_positive(&nearly, 1e-9, &t));
    }

    #[test]
    fn sqrt_examples() {
        let t = cfg();
        let id = ComplexMatrix::identity(3);
        assert!(positive_sqrt(&id, &t).unwrap().sub(&id).frobenius_norm() < 1e-12);

        let m = ComplexMatrix::from_real_rows(&[&[4.0, 0.0], &[0.0, 9.0]]);
        let s = positive_sqrt(&m, &t).unwrap();
        let want = ComplexMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 3.0]]);
        assert!(s.sub(&want).frobenius_norm() < 1e-10);

        let a = ComplexMatrix::from_entries(
            2,
            2,
            vec![
                Complex64::new(0.9, -0.4),
                Complex64::new(1.2, 0.8),
                Complex64::new(-0.3, 0.6),
                Complex64::new(0.5, 0.1),
            ],
        );
        let gram = a.adjoint().mul(&a);
        let s = positive_sqrt(&gram, &t).unwrap();
        let residual = s.mul(&s).sub(&gram).frobenius_norm();
        assert!(residual <= 1e-8 * (1.0 + gram.frobenius_norm()));
    }

    #[test]
    fn sqrt_scaling_monotone() {
        let t = cfg();
        let a = ComplexMatrix::from_entries(
            2,
            2,
            vec![
                Complex64::new(1.0, 0.2),
                Complex64::new(0.3, -0.7),
                Complex64::new(-0.6, 0.1),
                Complex64::new(0.8, 0.4),
            ],
        );
        let gram = a.adjoint().mul(&a);
        let s = positive_sqrt(&gram, &t).unwrap();
        for scale in [0.25, 4.0] {
            let scaled = positive_sqrt(&gram.scale(Complex64::new(scale, 0.0)), &t).unwrap();
            let want = s.scale(Complex64::new(scale.sqrt(), 0.0));
            assert!(scaled.sub(&want).frobenius_norm() <= 1e-8 * (1.0 + want.frobenius_norm()));
        }
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let t = cfg();
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert!(matches!(positive_sqrt(&m, &t), Err(MatError::NotPositive { .. })));
    }
}
