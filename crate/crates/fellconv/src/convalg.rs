//! The convolution *-algebra of sections of a Fell bundle.
//!
//! Sections are stored densely: one coordinate vector per groupoid
//! element. Convolution is `f*g(gamma) = sum_{alpha beta = gamma}
//! f(alpha) g(beta)`, involution is `f*(gamma) = f(gamma^{-1})*`.
//!
//! Three norms are computed exactly at this scale:
//!
//! * the I-norm, the larger of the range- and source-fiber sums;
//! * the sup norm, the largest fiber norm;
//! * the full C*-norm, realized as the operator norm in the left regular
//!   representation.
//!
//! On why the regular representation realizes the full norm: the section
//! space is a finite-dimensional *-algebra and the left regular action on
//! the direct sum of fibers (with a faithful trace inner product) is a
//! faithful *-representation, because acting on the unit section
//! reproduces the section itself. A finite-dimensional *-algebra with a
//! faithful *-representation is *-isomorphic to a direct sum of matrix
//! algebras, and on those the C*-norm is unique. In particular the
//! supremum of operator norms over any class of *-representations agrees
//! with the operator norm under the regular action. The machinery in
//! [`crate::reps`] cross-checks this: every validated representation is
//! dominated by this norm, with equality for the regular one.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::fellbundle::{BundleError, FellBundle, FiberElement};
use crate::matalg::{operator_norm, ComplexMatrix};
use crate::tol::Tolerances;

/// An element of the section space: one coordinate vector per groupoid
/// element (zero vectors permitted, and zero-length vectors over
/// zero-dimensional fibers).
#[derive(Debug, Clone)]
pub struct Section<'a> {
    bundle: &'a FellBundle,
    values: Vec<Vec<Complex64>>,
}

impl PartialEq for Section<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.bundle, other.bundle) && self.values == other.values
    }
}

impl<'a> Section<'a> {
    pub fn new(bundle: &'a FellBundle, values: Vec<Vec<Complex64>>) -> Result<Self, BundleError> {
        if values.len() != bundle.groupoid().n_elements() {
            return Err(BundleError::MalformedStructure {
                detail: format!(
                    "section has {} value slots, groupoid has {} elements",
                    values.len(),
                    bundle.groupoid().n_elements()
                ),
            });
        }
        for (g, v) in values.iter().enumerate() {
            if v.len() != bundle.fiber_dim(g) {
                return Err(BundleError::FiberDimMismatch {
                    element: g,
                    got: v.len(),
                    want: bundle.fiber_dim(g),
                });
            }
        }
        Ok(Section { bundle, values })
    }

    pub fn zero(bundle: &'a FellBundle) -> Self {
        let values = (0..bundle.groupoid().n_elements())
            .map(|g| vec![Complex64::new(0.0, 0.0); bundle.fiber_dim(g)])
            .collect();
        Section { bundle, values }
    }

    /// The section supported on one element with the given fiber value.
    pub fn delta(
        bundle: &'a FellBundle,
        element: usize,
        coords: Vec<Complex64>,
    ) -> Result<Self, BundleError> {
        if coords.len() != bundle.fiber_dim(element) {
            return Err(BundleError::FiberDimMismatch {
                element,
                got: coords.len(),
                want: bundle.fiber_dim(element),
            });
        }
        let mut s = Self::zero(bundle);
        s.values[element] = coords;
        Ok(s)
    }

    /// The canonical basis section `delta_gamma e_i`.
    pub fn basis_section(bundle: &'a FellBundle, element: usize, index: usize) -> Self {
        let mut s = Self::zero(bundle);
        s.values[element][index] = Complex64::new(1.0, 0.0);
        s
    }

    /// A section with independent uniform coordinates in the unit square,
    /// drawn from the caller's generator.
    pub fn seeded_random(bundle: &'a FellBundle, rng: &mut impl Rng) -> Self {
        let values = (0..bundle.groupoid().n_elements())
            .map(|g| {
                (0..bundle.fiber_dim(g))
                    .map(|_| {
                        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                    })
                    .collect()
            })
            .collect();
        Section { bundle, values }
    }

    pub fn bundle(&self) -> &'a FellBundle {
        self.bundle
    }

    pub fn value(&self, element: usize) -> &[Complex64] {
        &self.values[element]
    }

    pub fn set_value(&mut self, element: usize, coords: Vec<Complex64>) -> Result<(), BundleError> {
        if coords.len() != self.bundle.fiber_dim(element) {
            return Err(BundleError::FiberDimMismatch {
                element,
                got: coords.len(),
                want: self.bundle.fiber_dim(element),
            });
        }
        self.values[element] = coords;
        Ok(())
    }

    pub fn fiber(&self, element: usize) -> FiberElement {
        FiberElement::new(element, self.values[element].clone())
    }

    /// Elements carrying a nonzero coordinate (exact test).
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&g| self.values[g].iter().any(|c| *c != Complex64::new(0.0, 0.0)))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.support().is_empty()
    }

    /// Whether the support sits inside a single bisection, i.e. is itself
    /// a bisection.
    pub fn is_bisection_supported(&self) -> bool {
        self.bundle.groupoid().is_bisection(&self.support())
    }

    /// Restriction to a subset of elements: values outside are zeroed.
    pub fn restrict(&self, keep: &[usize]) -> Section<'a> {
        let mut out = Self::zero(self.bundle);
        for &g in keep {
            out.values[g] = self.values[g].clone();
        }
        out
    }

    pub fn add(&self, other: &Section<'a>) -> Result<Section<'a>, BundleError> {
        if !std::ptr::eq(self.bundle, other.bundle) {
            return Err(BundleError::BundleMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(Section { bundle: self.bundle, values })
    }

    pub fn sub(&self, other: &Section<'a>) -> Result<Section<'a>, BundleError> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, t: Complex64) -> Section<'a> {
        let values = self
            .values
            .iter()
            .map(|v| v.iter().map(|c| c * t).collect())
            .collect();
        Section { bundle: self.bundle, values }
    }

    /// Convolution `f*g(gamma) = sum over factorizations alpha beta =
    /// gamma` of the fiber products.
    pub fn convolve(&self, other: &Section<'a>) -> Result<Section<'a>, BundleError> {
        if !std::ptr::eq(self.bundle, other.bundle) {
            return Err(BundleError::BundleMismatch);
        }
        let g = self.bundle.groupoid();
        let mut out = Section::zero(self.bundle);
        for alpha in self.support() {
            for beta in other.support() {
                let Some(gamma) = g.compose_unchecked(alpha, beta) else {
                    continue;
                };
                let prod = self.bundle.fiber_multiply(
                    &FiberElement::new(alpha, self.values[alpha].clone()),
                    &FiberElement::new(beta, other.values[beta].clone()),
                )?;
                for (k, v) in prod.coords.iter().enumerate() {
                    out.values[gamma][k] += v;
                }
            }
        }
        Ok(out)
    }

    /// Involution `f*(gamma) = f(gamma^{-1})*`.
    pub fn involute(&self) -> Result<Section<'a>, BundleError> {
        let g = self.bundle.groupoid();
        let mut out = Section::zero(self.bundle);
        for gamma in 0..g.n_elements() {
            let inv = g.inverse_unchecked(gamma);
            let starred = self
                .bundle
                .fiber_star(&FiberElement::new(inv, self.values[inv].clone()))?;
            debug_assert_eq!(starred.element, gamma);
            out.values[gamma] = starred.coords;
        }
        Ok(out)
    }

    /// Largest fiber norm.
    pub fn sup_norm(&self) -> Result<f64, BundleError> {
        let mut best = 0.0f64;
        for gamma in 0..self.values.len() {
            if self.bundle.fiber_dim(gamma) == 0 {
                continue;
            }
            let n = self.bundle.fiber_norm(&self.fiber(gamma))?;
            best = best.max(n);
        }
        Ok(best)
    }

    /// The I-norm: the larger of the two suprema over units of the summed
    /// fiber norms along range and source fibers.
    pub fn i_norm(&self) -> Result<f64, BundleError> {
        let g = self.bundle.groupoid();
        let mut norms = vec![0.0f64; g.n_elements()];
        for gamma in 0..g.n_elements() {
            if self.bundle.fiber_dim(gamma) > 0 {
                norms[gamma] = self.bundle.fiber_norm(&self.fiber(gamma))?;
            }
        }
        let mut best = 0.0f64;
        for &x in g.units() {
            let range_sum: f64 = (0..g.n_elements())
                .filter(|&gamma| g.range_of(gamma) == x)
                .map(|gamma| norms[gamma])
                .sum();
            let source_sum: f64 = (0..g.n_elements())
                .filter(|&gamma| g.source_of(gamma) == x)
                .map(|gamma| norms[gamma])
                .sum();
            best = best.max(range_sum).max(source_sum);
        }
        Ok(best)
    }

    /// The full C*-norm: the operator norm under the left regular
    /// representation.
    pub fn full_norm(&self) -> Result<f64, BundleError> {
        let rep = self.bundle.regular_rep()?;
        let m = rep.action(self)?;
        Ok(operator_norm(&m, self.bundle.tolerances())?)
    }

    /// Canonical coordinates: the fiber vectors concatenated in element
    /// order.
    pub fn to_vector(&self) -> Vec<Complex64> {
        self.values.iter().flatten().copied().collect()
    }

    pub fn from_vector(bundle: &'a FellBundle, v: &[Complex64]) -> Result<Self, BundleError> {
        if v.len() != bundle.total_dim() {
            return Err(BundleError::MalformedStructure {
                detail: format!(
                    "vector length {} does not match total fiber dimension {}",
                    v.len(),
                    bundle.total_dim()
                ),
            });
        }
        let mut values = Vec::with_capacity(bundle.groupoid().n_elements());
        let mut at = 0;
        for g in 0..bundle.groupoid().n_elements() {
            let d = bundle.fiber_dim(g);
            values.push(v[at..at + d].to_vec());
            at += d;
        }
        Ok(Section { bundle, values })
    }
}

impl fmt::Display for Section<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in self.support() {
            write!(f, "  at {g}:")?;
            for c in &self.values[g] {
                write!(f, " {c}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// The section supported on the unit space whose value at each unit is the
/// algebra unit of that fiber. At finite scale this is an exact two-sided
/// multiplicative unit for the convolution product.
pub fn unit_section(bundle: &FellBundle) -> Result<Section<'_>, BundleError> {
    let mut s = Section::zero(bundle);
    for &u in bundle.groupoid().units() {
        let alg = bundle
            .unit_fiber(u)
            .ok_or(BundleError::MissingUnitFiber { unit: u })?;
        s.set_value(u, alg.unit_coords().to_vec())?;
    }
    Ok(s)
}

/// The left regular *-representation: the section space acting on itself
/// by convolution, on the Hilbert space `(+)_gamma A_gamma` with inner
/// product `<a, b> = tau_{s(gamma)}(a* b)` (normalized trace in the unit
/// fiber at the source), orthonormalized.
#[derive(Debug, Clone)]
pub struct RegularRep {
    hilbert_dim: usize,
    offsets: Vec<usize>,
    gram: ComplexMatrix,
    to_ortho: ComplexMatrix,
    from_ortho: ComplexMatrix,
}

impl FellBundle {
    /// The regular representation of this bundle, built once and cached;
    /// safe for concurrent readers.
    pub fn regular_rep(&self) -> Result<&RegularRep, BundleError> {
        self.regular_cache()
            .get_or_init(|| RegularRep::build(self))
            .as_ref()
            .map_err(|e| e.clone())
    }
}

impl RegularRep {
    /// Construct and verify the representation. Fails when a fiber Gram
    /// is degenerate, or when the *-homomorphism and faithfulness
    /// contracts do not hold on canonical basis sections.
    pub fn build(bundle: &FellBundle) -> Result<Self, BundleError> {
        let g = bundle.groupoid();
        let n = g.n_elements();
        let tol = bundle.tolerances();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut at = 0;
        for gamma in 0..n {
            offsets.push(at);
            at += bundle.fiber_dim(gamma);
        }
        offsets.push(at);
        let hilbert_dim = at;

        let mut gram = ComplexMatrix::zeros(hilbert_dim, hilbert_dim);
        let mut to_ortho = ComplexMatrix::zeros(hilbert_dim, hilbert_dim);
        let mut from_ortho = ComplexMatrix::zeros(hilbert_dim, hilbert_dim);
        for gamma in 0..n {
            let dim = bundle.fiber_dim(gamma);
            if dim == 0 {
                continue;
            }
            let block = bundle.fiber_gram(gamma)?;
            let eig = crate::matalg::hermitian_eig(&block.hermitize(), tol)?;
            let min_eig = eig.values.first().copied().unwrap_or(0.0);
            if min_eig <= tol.gram_min_eig {
                return Err(BundleError::GramDegenerate {
                    element: gamma,
                    min_eig,
                });
            }
            let w = eig.apply_function(f64::sqrt);
            let winv = eig.apply_function(|x| 1.0 / x.sqrt());
            gram.write_block(offsets[gamma], offsets[gamma], &block);
            to_ortho.write_block(offsets[gamma], offsets[gamma], &w);
            from_ortho.write_block(offsets[gamma], offsets[gamma], &winv);
        }

        let rep = RegularRep {
            hilbert_dim,
            offsets,
            gram,
            to_ortho,
            from_ortho,
        };
        rep.verify(bundle)?;
        Ok(rep)
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    /// The (block diagonal) Gram matrix of the canonical basis.
    pub fn gram(&self) -> &ComplexMatrix {
        &self.gram
    }

    /// The change of basis from canonical to orthonormal coordinates
    /// (the positive square root of the Gram matrix).
    pub fn orthonormalizer(&self) -> &ComplexMatrix {
        &self.to_ortho
    }

    /// Inverse of [`RegularRep::orthonormalizer`].
    pub fn orthonormalizer_inverse(&self) -> &ComplexMatrix {
        &self.from_ortho
    }

    fn offset(&self, gamma: usize) -> usize {
        self.offsets[gamma]
    }

    /// The convolution action of `f` in canonical coordinates.
    fn canonical_action(&self, f: &Section<'_>) -> Result<ComplexMatrix, BundleError> {
        let bundle = f.bundle();
        let g = bundle.groupoid();
        let mut c = ComplexMatrix::zeros(self.hilbert_dim, self.hilbert_dim);
        let support = f.support();
        for eta in 0..g.n_elements() {
            for j in 0..bundle.fiber_dim(eta) {
                let col = self.offset(eta) + j;
                for &alpha in &support {
                    let Some(target) = g.compose_unchecked(alpha, eta) else {
                        continue;
                    };
                    let prod = bundle.fiber_multiply(
                        &f.fiber(alpha),
                        &FiberElement::basis_vector(bundle, eta, j),
                    )?;
                    debug_assert_eq!(prod.element, target);
                    for (k, v) in prod.coords.iter().enumerate() {
                        let row = self.offset(target) + k;
                        let cur = c.get(row, col);
                        c.set(row, col, cur + v);
                    }
                }
            }
        }
        Ok(c)
    }

    /// The operator of `f` in the orthonormalized basis.
    pub fn action(&self, f: &Section<'_>) -> Result<ComplexMatrix, BundleError> {
        if f.bundle().total_dim() != self.hilbert_dim {
            return Err(BundleError::BundleMismatch);
        }
        let c = self.canonical_action(f)?;
        Ok(self.to_ortho.mul(&c).mul(&self.from_ortho))
    }

    /// Build-time verification on canonical basis sections: faithfulness
    /// (acting on the unit section reproduces the section), the adjoint
    /// identity, and multiplicativity.
    fn verify(&self, bundle: &FellBundle) -> Result<(), BundleError> {
        let g = bundle.groupoid();
        let tol = bundle.tolerances().axiom;
        let unit = unit_section(bundle)?;
        let unit_vec = unit.to_vector();

        let mut basis_ids = Vec::new();
        for gamma in 0..g.n_elements() {
            for i in 0..bundle.fiber_dim(gamma) {
                basis_ids.push((gamma, i));
            }
        }

        // faithfulness: C(delta) unit = delta
        for &(gamma, i) in &basis_ids {
            let delta = Section::basis_section(bundle, gamma, i);
            let c = self.canonical_action(&delta)?;
            let image = c.apply(&unit_vec);
            let expect = delta.to_vector();
            let defect: f64 = image
                .iter()
                .zip(&expect)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if defect > tol {
                return Err(BundleError::RegularRepDefect {
                    detail: format!(
                        "acting on the unit section does not reproduce basis section \
                         ({gamma},{i}); defect {defect:.3e}"
                    ),
                });
            }
        }

        // adjoint identity in canonical coordinates: G C(delta*) = C(delta)^adj G
        for &(gamma, i) in &basis_ids {
            let delta = Section::basis_section(bundle, gamma, i);
            let starred = delta.involute()?;
            let lhs = self.gram.mul(&self.canonical_action(&starred)?);
            let rhs = self.canonical_action(&delta)?.adjoint().mul(&self.gram);
            let defect = lhs.sub(&rhs).frobenius_norm();
            if !Tolerances::within(defect, tol, rhs.frobenius_norm()) {
                return Err(BundleError::RegularRepDefect {
                    detail: format!(
                        "adjoint identity fails at basis section ({gamma},{i}); \
                         defect {defect:.3e}"
                    ),
                });
            }
        }

        // multiplicativity on basis pairs, checked columnwise: products of
        // basis sections are single-fiber, so each triple costs one tensor
        // contraction per side
        for &(a, i) in &basis_ids {
            for &(b, j) in &basis_ids {
                let ab = if g.composable(a, b) {
                    Some(bundle.fiber_multiply(
                        &FiberElement::basis_vector(bundle, a, i),
                        &FiberElement::basis_vector(bundle, b, j),
                    )?)
                } else {
                    None
                };
                for &(beta, l) in &basis_ids {
                    let left = match &ab {
                        Some(v) if g.composable(v.element, beta) => Some(bundle.fiber_multiply(
                            v,
                            &FiberElement::basis_vector(bundle, beta, l),
                        )?),
                        _ => None,
                    };
                    let right = if g.composable(b, beta) {
                        let bc = bundle.fiber_multiply(
                            &FiberElement::basis_vector(bundle, b, j),
                            &FiberElement::basis_vector(bundle, beta, l),
                        )?;
                        if g.composable(a, bc.element) {
                            Some(bundle.fiber_multiply(
                                &FiberElement::basis_vector(bundle, a, i),
                                &bc,
                            )?)
                        } else {
                            None
                        }
                    } else {
                        None
                    };
                    let defect = match (&left, &right) {
                        (None, None) => 0.0,
                        (Some(v), None) | (None, Some(v)) => {
                            v.coords.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
                        }
                        (Some(v), Some(w)) => {
                            debug_assert_eq!(v.element, w.element);
                            v.coords
                                .iter()
                                .zip(&w.coords)
                                .map(|(x, y)| (x - y).norm_sqr())
                                .sum::<f64>()
                                .sqrt()
                        }
                    };
                    if defect > tol {
                        return Err(BundleError::RegularRepDefect {
                            detail: format!(
                                "multiplicativity fails at basis sections \
                                 ({a},{i}),({b},{j}),({beta},{l}); defect {defect:.3e}"
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fellbundle::{build_trivial_line_bundle, build_unit_bundle};
    use crate::groupoid::FiniteGroupoid;
    use crate::matalg::MatrixStarAlgebra;
    use std::collections::BTreeMap;

    fn cfg() -> Tolerances {
        Tolerances::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn convolution_of_matrix_units() {
        let g = FiniteGroupoid::pair(2);
        let b = build_trivial_line_bundle(&g, &cfg()).unwrap();
        // delta_(0,1) * delta_(1,0) = delta_(0,0)
        let f = Section::basis_section(&b, 1, 0);
        let h = Section::basis_section(&b, 2, 0);
        let prod = f.convolve(&h).unwrap();
        assert_eq!(prod.support(), vec![0]);
        assert_eq!(prod.value(0)[0], c(1.0, 0.0));
    }

    #[test]
    fn unit_supported_convolution_is_pointwise() {
        // f supported on units: (f*g)(gamma) = f(r(gamma)) g(gamma)
        let g = FiniteGroupoid::pair(2);
        let b = build_trivial_line_bundle(&g, &cfg()).unwrap();
        let mut f = Section::zero(&b);
        f.set_value(0, vec![c(2.0, 1.0)]).unwrap();
        f.set_value(3, vec![c(-1.0, 0.5)]).unwrap();
        let mut h = Section::zero(&b);
        for gamma in 0..4 {
            h.set_value(gamma, vec![c(0.3 + gamma as f64, -0.7)]).unwrap();
        }
        let prod = f.convolve(&h).unwrap();
        for gamma in 0..4 {
            let expect = f.value(g.range_of(gamma))[0] * h.value(gamma)[0];
            assert!((prod.value(gamma)[0] - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn group_algebra_convolution() {
        let g = FiniteGroupoid::cyclic(2);
        let b = build_trivial_line_bundle(&g, &cfg()).unwrap();
        let (a0, b0) = (c(1.0, 2.0), c(0.5, -1.0));
        let (c0, d0) = (c(-2.0, 0.0), c(0.0, 3.0));
        let mut f = Section::zero(&b);
        f.set_value(0, vec![a0]).unwrap();
        f.set_value(1, vec![b0]).unwrap();
        let mut h = Section::zero(&b);
        h.set_value(0, vec![c0]).unwrap();
        h.set_value(1, vec![d0]).unwrap();
        let prod = f.convolve(&h).unwrap();
        assert!((prod.value(0)[0] - (a0 * c0 + b0 * d0)).norm() < 1e-14);
        assert!((prod.value(1)[0] - (a0 * d0 + b0 * c0)).norm() < 1e-14);
    }

    #[test]
    fn involution_examples() {
        let g = FiniteGroupoid::pair(2);
        let b = build_trivial_line_bundle(&g, &cfg()).unwrap();

        // unit-supported real section is fixed
        let mut f = Section::zero(&b);
        f.set_value(0, vec![c(1.5, 0.0)]).unwrap();
        f.set_value(3, vec![c(-2.0, 0.0)]).unwrap();
        assert_eq!(f.involute().unwrap(), f);

        // delta_(0,1) z -> delta_(1,0) conj(z)
        let z = c(0.25, -4.0);
        let d = Section::delta(&b, 1, vec![z]).unwrap();
        let ds = d.involute().unwrap();
        assert_eq!(ds.support(), vec![2]);
        assert_eq!(ds.value(2)[0], z.conj());

        // involutive on an arbitrary section
        let mut any = Section::zero(&b);
        for gamma in 0..4 {
            any.set_value(gamma, vec![c(gamma as f64 - 1.3, 0.7 * gamma as f64)])
                .unwrap();
        }
        assert_eq!(any.involute().unwrap().involute().unwrap(), any);
    }

    #[test]
    fn antihomomorphism_of_involution() {
        let g = FiniteGroupoid::cyclic(3);
        let b = build_trivial_line_bundle(&g, &cfg()).unwrap();
        let mut f = Section::zero(&b);
        let mut h = Section::zero(&b);
        for gamma in 0..3 {
            f.set_value(gamma, vec![c(0.2 * gamma as f64 + 0.1, -0.4)]).unwrap();
            h.set_value(gamma, vec![c(-0.8, 0.3 * gamma as f64)]).unwrap();
        }
        let lhs = f.convolve(&h).unwrap().involute().unwrap();
        let rhs = h.involute().unwrap().convolve(&f.involute().unwrap()).unwrap();
        let defect: f64 = lhs
            .to_vector()
            .iter()
            .zip(&rhs.to_vector())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(defect < 1e-10);
    }

    #[test]
    fn norm_examples_on_z2() {
        let g = FiniteGroupoid::cyclic(2);
        let b = build_trivial_line_bundle(&g, &cfg()).unwrap();
        let mut f = Section::zero(&b);
        f.set_value(0, vec![c(1.0, 0.0)]).unwrap();
        f.set_value(1, vec![c(0.0, 1.0)]).unwrap();
        assert!((f.sup_norm().unwrap() - 1.0).abs() < 1e-12);
        assert!((f.i_norm().unwrap() - 2.0).abs() < 1e-12);
        // eigenvalues 1 +- i, so the full norm is sqrt(2), strictly below
        // the I-norm
        let sqrt2 = 1.414_213_562_373_095_1_f64;
        assert!((f.full_norm().unwrap() - sqrt2).abs() < 1e-10);
    }

    #[test]
    fn regular_action_on_group_algebra_is_the_circulant() {
        // over Z/2 the Gram is the identity, so the action of
        // a delta_e + b delta_g is literally [[a, b], [b, a]]
        let g = FiniteGroupoid::cyclic(2);
        let bundle = build_trivial_line_bundle(&g, &cfg()).unwrap();
        let (a, b) = (c(0.3, -1.2), c(2.0, 0.7));
        let mut f = Section::zero(&bundle);
        f.set_value(0, vec![a]).unwrap();
        f.set_value(1, vec![b]).unwrap();
        let m = bundle.regular_rep().unwrap().action(&f).unwrap();
        let want = ComplexMatrix::from_entries(2, 2, vec![a, b, b, a]);
        assert!(m.sub(&want).frobenius_norm() < 1e-12);
    }

    #[test]
    fn zero_section_norms() {
        let g = FiniteGroupoid::cyclic(2);
        let b = build_trivial_line_bundle(&g, &cfg()).unwrap();
        let z = Section::zero(&b);
        assert_eq!(z.sup_norm().unwrap(), 0.0);
        assert_eq!(z.i_norm().unwrap(), 0.0);
        assert_eq!(z.full_norm().unwrap(), 0.0);
    }

    #[test]
    fn bisection_supported_norms_agree() {
        let g = FiniteGroupoid::pair(2);
        let b = build_trivial_line_bundle(&g, &cfg()).unwrap();
        // {(0,1),(1,0)} is a bisection
        let mut f = Section::zero(&b);
        f.set_value(1, vec![c(0.7, -0.1)]).unwrap();
        f.set_value(2, vec![c(-0.2, 1.9)]).unwrap();
        assert!(f.is_bisection_supported());
        let sup = f.sup_norm().unwrap();
        assert!((f.i_norm().unwrap() - sup).abs() < 1e-12);
        assert!((f.full_norm().unwrap() - sup).abs() < 1e-9);
    }

    #[test]
    fn bisection_calculus_on_general_bisections() {
        // f supported in U, g in V: supp(f*g) inside UV, supp(f*) = U^-1,
        // f f* supported in the ranges of U with the squared sup norm
        let g = FiniteGroupoid::pair(2);
        let b = build_trivial_line_bundle(&g, &cfg()).unwrap();
        let u_set = vec![1usize, 2]; // {(0,1),(1,0)}
        let v_set = vec![0usize, 3]; // the unit space, also a bisection
        let mut f = Section::zero(&b);
        f.set_value(1, vec![c(0.8, -0.4)]).unwrap();
        f.set_value(2, vec![c(-1.5, 0.2)]).unwrap();
        let mut h = Section::zero(&b);
        h.set_value(0, vec![c(0.9, 0.1)]).unwrap();
        h.set_value(3, vec![c(0.3, -1.0)]).unwrap();

        let u = crate::groupoid::Bisection::new(&g, u_set.clone()).unwrap();
        let v = crate::groupoid::Bisection::new(&g, v_set).unwrap();
        let uv = g.bisection_product(&u, &v).unwrap();
        for s in f.convolve(&h).unwrap().support() {
            assert!(uv.contains(s));
        }

        let f_star = f.involute().unwrap();
        let u_inv = g.bisection_inverse(&u);
        assert_eq!(f_star.support(), u_inv.elements());

        let ff = f.convolve(&f_star).unwrap();
        let ranges: Vec<usize> = u_set.iter().map(|&x| g.range_of(x)).collect();
        for s in ff.support() {
            assert!(ranges.contains(&s));
        }
        let sup = f.sup_norm().unwrap();
        assert!((ff.sup_norm().unwrap() - sup * sup).abs() <= 1e-9 * (1.0 + sup * sup));
    }

    #[test]
    fn unit_section_is_exact_unit() {
        let g = FiniteGroupoid::pair(2);
        let b = build_trivial_line_bundle(&g, &cfg()).unwrap();
        let u = unit_section(&b).unwrap();
        assert_eq!(u.support(), vec![0, 3]);
        assert_eq!(u.convolve(&u).unwrap(), u);
        assert_eq!(u.involute().unwrap(), u);
        let mut f = Section::zero(&b);
        for gamma in 0..4 {
            f.set_value(gamma, vec![c(1.0 - gamma as f64, 0.5)]).unwrap();
        }
        assert_eq!(u.convolve(&f).unwrap(), f);
        assert_eq!(f.convolve(&u).unwrap(), f);
    }

    #[test]
    fn regular_rep_matches_matrix_model_on_pair_groupoid() {
        let n = 3;
        let g = FiniteGroupoid::pair(n);
        let b = build_trivial_line_bundle(&g, &cfg()).unwrap();
        assert_eq!(b.regular_rep().unwrap().hilbert_dim(), n * n);
        let mut f = Section::zero(&b);
        let mut model = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = c(0.3 * (i as f64 + 1.0), 0.2 * j as f64 - 0.4);
                f.set_value(i * n + j, vec![v]).unwrap();
                model.set(i, j, v);
            }
        }
        let want = operator_norm(&model, &cfg()).unwrap();
        assert!((f.full_norm().unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn unit_bundle_full_norm_is_blockwise_sup() {
        let g = FiniteGroupoid::pair(2);
        let fibers: BTreeMap<usize, MatrixStarAlgebra> = g
            .units()
            .iter()
            .map(|&u| (u, MatrixStarAlgebra::scalars(&cfg()).unwrap()))
            .collect();
        let b = build_unit_bundle(&g, fibers, &cfg()).unwrap();
        let mut f = Section::zero(&b);
        f.set_value(0, vec![c(0.3, 0.4)]).unwrap();
        f.set_value(3, vec![c(-2.0, 0.0)]).unwrap();
        // C* of the unit bundle is the direct sum of the unit fibers
        assert!((f.full_norm().unwrap() - 2.0).abs() < 1e-10);
        assert!((f.sup_norm().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cstar_identity_of_full_norm() {
        let g = FiniteGroupoid::cyclic(3);
        let b = build_trivial_line_bundle(&g, &cfg()).unwrap();
        let mut f = Section::zero(&b);
        f.set_value(0, vec![c(0.1, -0.9)]).unwrap();
        f.set_value(1, vec![c(1.2, 0.4)]).unwrap();
        f.set_value(2, vec![c(-0.5, 0.6)]).unwrap();
        let n = f.full_norm().unwrap();
        let nn = f.involute().unwrap().convolve(&f).unwrap().full_norm().unwrap();
        assert!((nn - n * n).abs() <= 1e-7 * (1.0 + n * n));
    }

    #[test]
    fn regular_rep_cache_is_safe_for_concurrent_readers() {
        let g = FiniteGroupoid::pair(3);
        let b = build_trivial_line_bundle(&g, &cfg()).unwrap();
        let mut f = Section::zero(&b);
        for gamma in 0..9 {
            f.set_value(gamma, vec![c(0.1 * gamma as f64, -0.05 * gamma as f64)])
                .unwrap();
        }
        let expect = f.full_norm().unwrap();
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..4)
                .map(|_| {
                    let fr = &f;
                    scope.spawn(move || fr.full_norm().unwrap())
                })
                .collect();
            for h in handles {
                assert!((h.join().unwrap() - expect).abs() < 1e-12);
            }
        });
    }

    #[test]
    fn bundle_mismatch_is_rejected() {
        let g = FiniteGroupoid::cyclic(2);
        let b1 = build_trivial_line_bundle(&g, &cfg()).unwrap();
        let b2 = build_trivial_line_bundle(&g, &cfg()).unwrap();
        let f = Section::zero(&b1);
        let h = Section::zero(&b2);
        assert!(matches!(f.convolve(&h), Err(BundleError::BundleMismatch)));
    }
}
