//! Fell bundles over finite groupoids.
//!
//! A bundle assigns to every groupoid element a finite-dimensional fiber:
//! over units a concrete matrix *-algebra, over arrows a coordinate space.
//! Multiplication is a family of bilinear structure tensors indexed by
//! composable pairs, involution a family of antilinear maps indexed by
//! elements. Only unit fibers carry an intrinsic norm; arrow fibers get
//! theirs through `||a||^2 = ||a* a||` evaluated in the unit fiber at the
//! source.

mod axioms;
mod build;

pub use axioms::{AxiomReport, AxiomStatus, AxiomVerdict};
pub use build::{
    build_linking_bundle, build_partial_action_bundle, build_trivial_line_bundle,
    build_unit_bundle, full_rectangular_basis, PartialActionData,
};

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use thiserror::Error;

use crate::convalg::RegularRep;
use crate::groupoid::{FiniteGroupoid, GroupoidError};
use crate::matalg::{is_positive, operator_norm, rank_of_vectors, ComplexMatrix, MatError,
    MatrixStarAlgebra};
use crate::tol::Tolerances;

/// Errors from bundle and section arithmetic.
#[derive(Debug, Clone, Error)]
pub enum BundleError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error("groupoid fails validation: {summary}")]
    InvalidGroupoid { summary: String },
    #[error("elements {g} and {h} are not composable")]
    NonComposable { g: usize, h: usize },
    #[error("no multiplication tensor for composable pair ({g},{h})")]
    MissingMultTensor { g: usize, h: usize },
    #[error("no involution tensor for element {g}")]
    MissingStarTensor { g: usize },
    #[error("malformed bundle structure: {detail}")]
    MalformedStructure { detail: String },
    #[error("unit {unit} has no fiber algebra")]
    MissingUnitFiber { unit: usize },
    #[error("coordinate vector for element {element} has length {got}, fiber dimension is {want}")]
    FiberDimMismatch { element: usize, got: usize, want: usize },
    #[error("unit-fiber tensors disagree with the concrete algebra at unit {unit}: {detail}")]
    UnitFiberMismatch { unit: usize, detail: String },
    #[error("fiber inner-product form degenerate over element {element} (min eigenvalue {min_eig:.3e})")]
    DegenerateFiberForm { element: usize, min_eig: f64 },
    #[error("fiber norm routes disagree over element {element}: source {s_route:.6e}, range {r_route:.6e}")]
    FiberNormDisagreement { element: usize, s_route: f64, r_route: f64 },
    #[error("sections belong to different bundles")]
    BundleMismatch,
    #[error("bimodule data incompatible: {detail}")]
    BimoduleIncompatible { detail: String },
    #[error("partial action axiom violated: {detail}")]
    PartialActionViolation { detail: String },
    #[error("regular module Gram degenerate over element {element} (min eigenvalue {min_eig:.3e})")]
    GramDegenerate { element: usize, min_eig: f64 },
    #[error("regular representation is not a *-homomorphism: {detail}")]
    RegularRepDefect { detail: String },
    #[error("no section named {name:?}")]
    NoSuchSection { name: String },
}

/// Bilinear structure tensor for one composable pair:
/// `m(e_i, e_j) = sum_k coeff(i,j,k) e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultTensor {
    left_dim: usize,
    right_dim: usize,
    out_dim: usize,
    coeffs: Vec<Complex64>,
}

impl MultTensor {
    pub fn zero(left_dim: usize, right_dim: usize, out_dim: usize) -> Self {
        MultTensor {
            left_dim,
            right_dim,
            out_dim,
            coeffs: vec![Complex64::new(0.0, 0.0); left_dim * right_dim * out_dim],
        }
    }

    pub fn left_dim(&self) -> usize {
        self.left_dim
    }

    pub fn right_dim(&self) -> usize {
        self.right_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.coeffs[(i * self.right_dim + j) * self.out_dim + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Complex64) {
        self.coeffs[(i * self.right_dim + j) * self.out_dim + k] = v;
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn scale(&self, t: Complex64) -> Self {
        MultTensor {
            left_dim: self.left_dim,
            right_dim: self.right_dim,
            out_dim: self.out_dim,
            coeffs: self.coeffs.iter().map(|c| c * t).collect(),
        }
    }

    /// Contract the tensor against a coordinate pair.
    pub fn apply(&self, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.left_dim);
        assert_eq!(y.len(), self.right_dim);
        let mut out = vec![Complex64::new(0.0, 0.0); self.out_dim];
        for i in 0..self.left_dim {
            if x[i] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..self.right_dim {
                let f = x[i] * y[j];
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..self.out_dim {
                    out[k] += f * self.get(i, j, k);
                }
            }
        }
        out
    }

    pub fn all_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// An element of one fiber: a coordinate vector over a groupoid element.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberElement {
    pub element: usize,
    pub coords: Vec<Complex64>,
}

impl FiberElement {
    pub fn new(element: usize, coords: Vec<Complex64>) -> Self {
        FiberElement { element, coords }
    }

    pub fn zero(bundle: &FellBundle, element: usize) -> Self {
        FiberElement {
            element,
            coords: vec![Complex64::new(0.0, 0.0); bundle.fiber_dim(element)],
        }
    }

    pub fn basis_vector(bundle: &FellBundle, element: usize, index: usize) -> Self {
        let mut v = Self::zero(bundle, element);
        v.coords[index] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    pub fn scale(&self, t: Complex64) -> Self {
        FiberElement {
            element: self.element,
            coords: self.coords.iter().map(|c| c * t).collect(),
        }
    }
}

/// Raw bundle data. Public by design: mutation studies and the file
/// loader build bundles from parts and then run [`FellBundle::check_axioms`]
/// over them.
#[derive(Debug, Clone)]
pub struct BundleParts {
    pub groupoid: FiniteGroupoid,
    pub unit_fibers: BTreeMap<usize, MatrixStarAlgebra>,
    pub fiber_dims: Vec<usize>,
    pub mult: BTreeMap<(usize, usize), MultTensor>,
    pub star: BTreeMap<usize, ComplexMatrix>,
    pub tol: Tolerances,
}

/// Outcome of the saturation test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturationReport {
    pub saturated: bool,
    /// First composable pair at which the fiber products fail to span.
    pub witness: Option<(usize, usize)>,
}

/// A Fell bundle over a finite groupoid.
///
/// Immutable after construction. [`FellBundle::assemble`] verifies the
/// structural invariants (fibers and tensors shaped consistently, unit
/// tensors matching the concrete algebras, fiber forms positive
/// definite); [`FellBundle::from_parts`] skips all of that so that broken
/// bundles can be handed to the axiom checker.
#[derive(Debug)]
pub struct FellBundle {
    groupoid: FiniteGroupoid,
    unit_fibers: BTreeMap<usize, MatrixStarAlgebra>,
    fiber_dims: Vec<usize>,
    mult: BTreeMap<(usize, usize), MultTensor>,
    star: BTreeMap<usize, ComplexMatrix>,
    tol: Tolerances,
    regular: OnceLock<Result<RegularRep, BundleError>>,
}

impl Clone for FellBundle {
    fn clone(&self) -> Self {
        // the regular-representation cache is rebuilt on demand
        FellBundle {
            groupoid: self.groupoid.clone(),
            unit_fibers: self.unit_fibers.clone(),
            fiber_dims: self.fiber_dims.clone(),
            mult: self.mult.clone(),
            star: self.star.clone(),
            tol: self.tol,
            regular: OnceLock::new(),
        }
    }
}

impl FellBundle {
    /// Wrap raw parts without structural validation.
    ///
    /// Panics only if `fiber_dims` has the wrong length. Algebraic
    /// operations on a structurally incoherent bundle may fail; run
    /// [`FellBundle::check_axioms`] to diagnose one.
    pub fn from_parts(parts: BundleParts) -> Self {
        assert_eq!(
            parts.fiber_dims.len(),
            parts.groupoid.n_elements(),
            "fiber dimension array length"
        );
        FellBundle {
            groupoid: parts.groupoid,
            unit_fibers: parts.unit_fibers,
            fiber_dims: parts.fiber_dims,
            mult: parts.mult,
            star: parts.star,
            tol: parts.tol,
            regular: OnceLock::new(),
        }
    }

    /// Build a bundle and verify its structural invariants.
    pub fn assemble(parts: BundleParts) -> Result<Self, BundleError> {
        let report = parts.groupoid.validate();
        if !report.is_valid() {
            return Err(BundleError::InvalidGroupoid {
                summary: report.violations[0].to_string(),
            });
        }
        let bundle = Self::from_parts(parts);
        bundle.check_structure()?;
        bundle.check_unit_fiber_agreement()?;
        bundle.validate_fiber_forms()?;
        Ok(bundle)
    }

    /// Clone the raw data back out, e.g. to build a mutated variant.
    pub fn parts(&self) -> BundleParts {
        BundleParts {
            groupoid: self.groupoid.clone(),
            unit_fibers: self.unit_fibers.clone(),
            fiber_dims: self.fiber_dims.clone(),
            mult: self.mult.clone(),
            star: self.star.clone(),
            tol: self.tol,
        }
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.groupoid
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn fiber_dim(&self, element: usize) -> usize {
        self.fiber_dims[element]
    }

    pub fn fiber_dims(&self) -> &[usize] {
        &self.fiber_dims
    }

    pub fn unit_fiber(&self, unit: usize) -> Option<&MatrixStarAlgebra> {
        self.unit_fibers.get(&unit)
    }

    pub fn unit_fibers(&self) -> &BTreeMap<usize, MatrixStarAlgebra> {
        &self.unit_fibers
    }

    pub fn mult_tensor(&self, g: usize, h: usize) -> Option<&MultTensor> {
        self.mult.get(&(g, h))
    }

    pub fn star_tensor(&self, g: usize) -> Option<&ComplexMatrix> {
        self.star.get(&g)
    }

    /// Total linear dimension `sum_gamma dim A_gamma` of the section space.
    pub fn total_dim(&self) -> usize {
        self.fiber_dims.iter().sum()
    }

    pub(crate) fn regular_cache(&self) -> &OnceLock<Result<RegularRep, BundleError>> {
        &self.regular
    }

    fn check_structure(&self) -> Result<(), BundleError> {
        axioms::mult_carrier_defect(self)
            .map_err(|detail| BundleError::MalformedStructure { detail })?;
        axioms::mult_shape_defect(self)
            .map_err(|detail| BundleError::MalformedStructure { detail })?;
        axioms::star_carrier_defect(self)
            .map_err(|detail| BundleError::MalformedStructure { detail })?;
        axioms::star_shape_defect(self)
            .map_err(|detail| BundleError::MalformedStructure { detail })?;
        for &u in self.groupoid.units() {
            let alg = self
                .unit_fibers
                .get(&u)
                .ok_or(BundleError::MissingUnitFiber { unit: u })?;
            if alg.dim() != self.fiber_dims[u] {
                return Err(BundleError::FiberDimMismatch {
                    element: u,
                    got: self.fiber_dims[u],
                    want: alg.dim(),
                });
            }
        }
        Ok(())
    }

    /// On units the tensors must reproduce the concrete algebra product
    /// and adjoint.
    fn check_unit_fiber_agreement(&self) -> Result<(), BundleError> {
        for &u in self.groupoid.units() {
            let alg = &self.unit_fibers[&u];
            let dim = alg.dim();
            let tensor = self
                .mult
                .get(&(u, u))
                .ok_or(BundleError::MissingMultTensor { g: u, h: u })?;
            for i in 0..dim {
                for j in 0..dim {
                    let want = alg.product_coords(i, j);
                    for k in 0..dim {
                        let defect = (tensor.get(i, j, k) - want[k]).norm();
                        if !Tolerances::within(defect, self.tol.closure, want[k].norm()) {
                            return Err(BundleError::UnitFiberMismatch {
                                unit: u,
                                detail: format!(
                                    "product tensor entry ({i},{j},{k}) off by {defect:.3e}"
                                ),
                            });
                        }
                    }
                }
            }
            let star = self
                .star
                .get(&u)
                .ok_or(BundleError::MissingStarTensor { g: u })?;
            for i in 0..dim {
                let want = alg.star_basis_coords(i);
                for k in 0..dim {
                    let defect = (star.get(k, i) - want[k]).norm();
                    if !Tolerances::within(defect, self.tol.closure, want[k].norm()) {
                        return Err(BundleError::UnitFiberMismatch {
                            unit: u,
                            detail: format!("star tensor entry ({k},{i}) off by {defect:.3e}"),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// The A-valued form `<a,b> = a* b` must induce a positive definite
    /// scalar Gram on every fiber; this is what makes each fiber a genuine
    /// normed space and the regular module an honest Hilbert space.
    pub fn validate_fiber_forms(&self) -> Result<(), BundleError> {
        for g in 0..self.groupoid.n_elements() {
            let gram = self.fiber_gram(g)?;
            if gram.rows() == 0 {
                continue;
            }
            let values = crate::matalg::hermitian_eigenvalues(&gram.hermitize(), &self.tol)?;
            let min_eig = values.first().copied().unwrap_or(0.0);
            if min_eig <= self.tol.gram_min_eig {
                return Err(BundleError::DegenerateFiberForm { element: g, min_eig });
            }
        }
        Ok(())
    }

    /// Scalar Gram of the fiber over `g` under the normalized-trace pairing
    /// `<e_i, e_j> = tau(e_i* e_j)` valued in the source unit fiber.
    pub(crate) fn fiber_gram(&self, g: usize) -> Result<ComplexMatrix, BundleError> {
        let dim = self.fiber_dims[g];
        let mut gram = ComplexMatrix::zeros(dim, dim);
        if dim == 0 {
            return Ok(gram);
        }
        let src = self.groupoid.source_of(g);
        let alg = self
            .unit_fibers
            .get(&src)
            .ok_or(BundleError::MissingUnitFiber { unit: src })?;
        for i in 0..dim {
            let ei = FiberElement::basis_vector(self, g, i);
            let ei_star = self.fiber_star(&ei)?;
            for j in 0..dim {
                let ej = FiberElement::basis_vector(self, g, j);
                let prod = self.fiber_multiply(&ei_star, &ej)?;
                debug_assert_eq!(prod.element, src);
                let m = alg.realize(&prod.coords);
                gram.set(i, j, alg.normalized_trace(&m));
            }
        }
        Ok(gram)
    }

    /// Product of two fiber elements; lives over the composed element.
    pub fn fiber_multiply(
        &self,
        a: &FiberElement,
        b: &FiberElement,
    ) -> Result<FiberElement, BundleError> {
        let Some(out_element) = self.groupoid.compose(a.element, b.element)? else {
            return Err(BundleError::NonComposable {
                g: a.element,
                h: b.element,
            });
        };
        let tensor = self
            .mult
            .get(&(a.element, b.element))
            .ok_or(BundleError::MissingMultTensor {
                g: a.element,
                h: b.element,
            })?;
        if tensor.left_dim != a.coords.len()
            || tensor.right_dim != b.coords.len()
            || tensor.out_dim != self.fiber_dims[out_element]
        {
            return Err(BundleError::MalformedStructure {
                detail: format!(
                    "mult tensor ({},{}) has shape ({},{},{})",
                    a.element, b.element, tensor.left_dim, tensor.right_dim, tensor.out_dim
                ),
            });
        }
        Ok(FiberElement {
            element: out_element,
            coords: tensor.apply(&a.coords, &b.coords),
        })
    }

    /// Involution; lives over the inverse element. Antilinear:
    /// `(sum c_i e_i)* = sum conj(c_i) e_i*`.
    pub fn fiber_star(&self, a: &FiberElement) -> Result<FiberElement, BundleError> {
        let inv = self.groupoid.inverse(a.element)?;
        let star = self
            .star
            .get(&a.element)
            .ok_or(BundleError::MissingStarTensor { g: a.element })?;
        if star.cols() != a.coords.len() || star.rows() != self.fiber_dims[inv] {
            return Err(BundleError::MalformedStructure {
                detail: format!(
                    "star tensor for {} has shape {}x{}",
                    a.element,
                    star.rows(),
                    star.cols()
                ),
            });
        }
        let conj: Vec<Complex64> = a.coords.iter().map(|c| c.conj()).collect();
        Ok(FiberElement {
            element: inv,
            coords: star.apply(&conj),
        })
    }

    /// Both routes to the squared fiber norm, without any agreement gate:
    /// `(||a* a||_{s}, ||a a*||_{r})`.
    pub fn fiber_norm_squares(&self, a: &FiberElement) -> Result<(f64, f64), BundleError> {
        let a_star = self.fiber_star(a)?;
        let src_prod = self.fiber_multiply(&a_star, a)?;
        let rng_prod = self.fiber_multiply(a, &a_star)?;
        let s2 = self.unit_fiber_opnorm(src_prod.element, &src_prod.coords)?;
        let r2 = self.unit_fiber_opnorm(rng_prod.element, &rng_prod.coords)?;
        Ok((s2, r2))
    }

    fn unit_fiber_opnorm(&self, unit: usize, coords: &[Complex64]) -> Result<f64, BundleError> {
        let alg = self
            .unit_fibers
            .get(&unit)
            .ok_or(BundleError::MissingUnitFiber { unit })?;
        if coords.len() != alg.dim() {
            return Err(BundleError::FiberDimMismatch {
                element: unit,
                got: coords.len(),
                want: alg.dim(),
            });
        }
        Ok(operator_norm(&alg.realize(coords), &self.tol)?)
    }

    /// Fell-bundle norm of a fiber element: `sqrt(||a* a||)` computed in
    /// the unit fiber at the source. The range route `sqrt(||a a*||)` is
    /// computed alongside and must agree; the positivity of `a* a` is also
    /// verified, failing with a degenerate-form error otherwise.
    pub fn fiber_norm(&self, a: &FiberElement) -> Result<f64, BundleError> {
        let a_star = self.fiber_star(a)?;
        let src_prod = self.fiber_multiply(&a_star, a)?;
        let alg = self
            .unit_fibers
            .get(&src_prod.element)
            .ok_or(BundleError::MissingUnitFiber {
                unit: src_prod.element,
            })?;
        let realized = alg.realize(&src_prod.coords);
        if !is_positive(&realized, self.tol.positivity, &self.tol) {
            let min_eig = crate::matalg::hermitian_eigenvalues(&realized.hermitize(), &self.tol)
                .ok()
                .and_then(|v| v.first().copied())
                .unwrap_or(f64::NAN);
            return Err(BundleError::DegenerateFiberForm {
                element: a.element,
                min_eig,
            });
        }
        let (s2, r2) = self.fiber_norm_squares(a)?;
        let ns = s2.max(0.0).sqrt();
        let nr = r2.max(0.0).sqrt();
        if !Tolerances::within(ns - nr, self.tol.fiber_norm_agreement, ns) {
            return Err(BundleError::FiberNormDisagreement {
                element: a.element,
                s_route: ns,
                r_route: nr,
            });
        }
        Ok(ns)
    }

    /// Per-axiom verification; see [`AxiomReport`].
    pub fn check_axioms(&self, tol: f64, sample_count: usize, seed: u64) -> AxiomReport {
        axioms::check_axioms(self, tol, sample_count, seed)
    }

    /// Exact-rank saturation test: for every composable pair, the products
    /// of basis elements must span the fiber over the composite.
    pub fn is_saturated(&self, rel_tol: f64) -> Result<SaturationReport, BundleError> {
        for (g, h) in self.groupoid.composable_pairs() {
            let gh = self.groupoid.compose_unchecked(g, h).unwrap();
            let target_dim = self.fiber_dims[gh];
            if target_dim == 0 {
                continue;
            }
            let mut products = Vec::new();
            for i in 0..self.fiber_dims[g] {
                let ei = FiberElement::basis_vector(self, g, i);
                for j in 0..self.fiber_dims[h] {
                    let ej = FiberElement::basis_vector(self, h, j);
                    products.push(self.fiber_multiply(&ei, &ej)?.coords);
                }
            }
            let rank = rank_of_vectors(&products, rel_tol, &self.tol)?;
            if rank < target_dim {
                return Ok(SaturationReport {
                    saturated: false,
                    witness: Some((g, h)),
                });
            }
        }
        Ok(SaturationReport {
            saturated: true,
            witness: None,
        })
    }
}
