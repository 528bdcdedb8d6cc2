//! Seeded random bundles and the invariant suite run over them.
//!
//! Arbitrary random composition tables are overwhelmingly invalid, so
//! groupoids are generated valid by construction: disjoint unions of pair
//! groupoids and cyclic groups. Bundles over them are direct sums of
//! gauge-twisted line bundles: every fiber of a component is `C^k` with
//! componentwise products, conjugated by random nonzero scalars per
//! element and line (units untouched). The twist is an isomorphism of the
//! untwisted bundle, so every law must keep holding exactly; any failure
//! is a bug, not noise.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::convalg::{unit_section, Section};
use crate::fellbundle::{BundleError, BundleParts, FellBundle, MultTensor};
use crate::groupoid::FiniteGroupoid;
use crate::matalg::{ComplexMatrix, MatrixStarAlgebra};
use crate::tol::Tolerances;

#[derive(Debug, Clone)]
pub struct FuzzOptions {
    pub seed: u64,
    pub count: usize,
    pub max_elements: usize,
    pub max_fiber_dim: usize,
}

impl Default for FuzzOptions {
    fn default() -> Self {
        FuzzOptions {
            seed: 0,
            count: 50,
            max_elements: 10,
            max_fiber_dim: 2,
        }
    }
}

/// One generated case, kept in a shape that supports dropping components
/// for minimization.
#[derive(Debug, Clone)]
pub struct CaseData {
    pub components: Vec<ComponentData>,
}

#[derive(Debug, Clone)]
pub struct ComponentData {
    pub groupoid: FiniteGroupoid,
    pub fiber_dim: usize,
    /// One scalar per (local element, line); units carry ones.
    pub gauge: Vec<Vec<Complex64>>,
}

#[derive(Debug, Clone)]
pub struct FuzzFailure {
    pub case_index: usize,
    pub detail: String,
    /// Canonical document text of the minimized failing bundle.
    pub repro: String,
}

#[derive(Debug, Clone, Default)]
pub struct FuzzOutcome {
    pub passes: usize,
    pub failures: Vec<FuzzFailure>,
}

fn case_rng(seed: u64, index: usize, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ stream.wrapping_mul(0x2545_f491_4f6c_dd1d),
    )
}

/// Draw one case description.
pub fn generate_case(rng: &mut ChaCha8Rng, max_elements: usize, max_fiber_dim: usize) -> CaseData {
    let max_elements = max_elements.max(1);
    let max_fiber_dim = max_fiber_dim.max(1);
    let mut components = Vec::new();
    let mut used = 0usize;
    let part_target = rng.random_range(1..=3usize);
    while components.len() < part_target {
        let remaining = max_elements - used;
        if remaining == 0 {
            break;
        }
        let groupoid = if rng.random_bool(0.5) {
            let n_max = (1..=3usize).rev().find(|n| n * n <= remaining).unwrap_or(1);
            let n = rng.random_range(1..=n_max);
            FiniteGroupoid::pair(n)
        } else {
            let m_max = remaining.min(6);
            let m = rng.random_range(1..=m_max);
            FiniteGroupoid::cyclic(m)
        };
        used += groupoid.n_elements();
        let fiber_dim = rng.random_range(1..=max_fiber_dim);
        let gauge = (0..groupoid.n_elements())
            .map(|g| {
                (0..fiber_dim)
                    .map(|_| {
                        if groupoid.is_unit(g) {
                            Complex64::new(1.0, 0.0)
                        } else {
                            let r = 0.5 + 1.5 * rng.random_range(0.0..1.0);
                            let theta = rng.random_range(0.0..std::f64::consts::TAU);
                            Complex64::new(r * theta.cos(), r * theta.sin())
                        }
                    })
                    .collect()
            })
            .collect();
        components.push(ComponentData {
            groupoid,
            fiber_dim,
            gauge,
        });
    }
    if components.is_empty() {
        components.push(ComponentData {
            groupoid: FiniteGroupoid::trivial_group(),
            fiber_dim: 1,
            gauge: vec![vec![Complex64::new(1.0, 0.0)]],
        });
    }
    CaseData { components }
}

/// Build the bundle a case describes.
pub fn build_case(case: &CaseData, tol: &Tolerances) -> Result<FellBundle, BundleError> {
    let groupoids: Vec<FiniteGroupoid> =
        case.components.iter().map(|c| c.groupoid.clone()).collect();
    let union = FiniteGroupoid::disjoint_union(&groupoids);

    // per global element: component index and local index
    let mut comp_of = Vec::with_capacity(union.n_elements());
    let mut local_of = Vec::with_capacity(union.n_elements());
    for (ci, c) in case.components.iter().enumerate() {
        for l in 0..c.groupoid.n_elements() {
            comp_of.push(ci);
            local_of.push(l);
        }
    }
    let fiber_dims: Vec<usize> = (0..union.n_elements())
        .map(|g| case.components[comp_of[g]].fiber_dim)
        .collect();
    let gauge = |g: usize, a: usize| case.components[comp_of[g]].gauge[local_of[g]][a];

    let mut unit_fibers = BTreeMap::new();
    for &u in union.units() {
        unit_fibers.insert(u, MatrixStarAlgebra::diagonal(fiber_dims[u], tol)?);
    }
    let mut mult = BTreeMap::new();
    for (g, h) in union.composable_pairs() {
        let gh = union.compose_unchecked(g, h).unwrap();
        let k = fiber_dims[g];
        let mut t = MultTensor::zero(k, k, k);
        for a in 0..k {
            t.set(a, a, a, gauge(g, a) * gauge(h, a) / gauge(gh, a));
        }
        mult.insert((g, h), t);
    }
    let mut star = BTreeMap::new();
    for g in 0..union.n_elements() {
        let gi = union.inverse_unchecked(g);
        let k = fiber_dims[g];
        let mut s = ComplexMatrix::zeros(k, k);
        for a in 0..k {
            s.set(a, a, gauge(g, a).conj() / gauge(gi, a));
        }
        star.insert(g, s);
    }
    FellBundle::assemble(BundleParts {
        groupoid: union,
        unit_fibers,
        fiber_dims,
        mult,
        star,
        tol: *tol,
    })
}

/// The invariant suite for one bundle. Returns the first failed law with
/// a witness description.
pub fn run_suite(bundle: &FellBundle, suite_rng: &mut ChaCha8Rng) -> Result<(), String> {
    let tol = bundle.tolerances();
    let report = bundle.groupoid().validate();
    if !report.is_valid() {
        return Err(format!("groupoid invalid: {}", report.violations[0]));
    }
    let axioms = bundle.check_axioms(tol.axiom, 10, suite_rng.random::<u64>());
    if !axioms.all_pass() {
        return Err(format!("axioms failed: {:?}", axioms.failed_axioms()));
    }
    let sat = bundle.is_saturated(tol.axiom).map_err(|e| e.to_string())?;
    if !sat.saturated {
        return Err(format!("twisted line bundle reported unsaturated at {:?}", sat.witness));
    }

    let f = Section::seeded_random(bundle, suite_rng);
    let g = Section::seeded_random(bundle, suite_rng);
    let u = unit_section(bundle).map_err(|e| e.to_string())?;

    // exact unit (up to roundoff in the gauge quotients)
    for (label, prod) in [
        ("u*f", u.convolve(&f).map_err(|e| e.to_string())?),
        ("f*u", f.convolve(&u).map_err(|e| e.to_string())?),
    ] {
        let defect: f64 = prod
            .to_vector()
            .iter()
            .zip(f.to_vector().iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale: f64 = f.to_vector().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if defect > 1e-12 * (1.0 + scale) {
            return Err(format!("unit section fails {label} by {defect:.3e}"));
        }
    }

    let full = f.full_norm().map_err(|e| e.to_string())?;
    let i_norm = f.i_norm().map_err(|e| e.to_string())?;
    let sup = f.sup_norm().map_err(|e| e.to_string())?;
    if sup > i_norm + 1e-12 * (1.0 + i_norm) {
        return Err(format!("sup norm {sup:.6e} exceeds I-norm {i_norm:.6e}"));
    }
    if full > i_norm + tol.dominance_slack * (1.0 + i_norm) {
        return Err(format!("full norm {full:.6e} exceeds I-norm {i_norm:.6e}"));
    }

    // C*-identity
    let ff = f
        .involute()
        .and_then(|s| s.convolve(&f))
        .map_err(|e| e.to_string())?;
    let nn = ff.full_norm().map_err(|e| e.to_string())?;
    if (nn - full * full).abs() > 1e-7 * (1.0 + full * full) {
        return Err(format!(
            "C*-identity fails: ||f* f|| = {nn:.6e} vs ||f||^2 = {:.6e}",
            full * full
        ));
    }

    // involution is isometric
    let nstar = f
        .involute()
        .map_err(|e| e.to_string())?
        .full_norm()
        .map_err(|e| e.to_string())?;
    if (nstar - full).abs() > 1e-9 * (1.0 + full) {
        return Err(format!("||f*|| = {nstar:.6e} differs from ||f|| = {full:.6e}"));
    }

    // submultiplicativity
    let fg = f.convolve(&g).map_err(|e| e.to_string())?;
    let n_fg = fg.full_norm().map_err(|e| e.to_string())?;
    let n_g = g.full_norm().map_err(|e| e.to_string())?;
    if n_fg > full * n_g + tol.dominance_slack * (1.0 + full * n_g) {
        return Err(format!(
            "full norm not submultiplicative: {n_fg:.6e} > {:.6e}",
            full * n_g
        ));
    }
    let i_fg = fg.i_norm().map_err(|e| e.to_string())?;
    let i_g = g.i_norm().map_err(|e| e.to_string())?;
    if i_fg > i_norm * i_g + 1e-9 * (1.0 + i_norm * i_g) {
        return Err(format!(
            "I-norm not submultiplicative: {i_fg:.6e} > {:.6e}",
            i_norm * i_g
        ));
    }

    // bisection lemma on a random pair of singletons
    let n = bundle.groupoid().n_elements();
    let gamma = suite_rng.random_range(0..n);
    let eta = suite_rng.random_range(0..n);
    let f_gamma = f.restrict(&[gamma]);
    let g_eta = g.restrict(&[eta]);
    let prod = f_gamma.convolve(&g_eta).map_err(|e| e.to_string())?;
    let allowed = bundle.groupoid().compose_unchecked(gamma, eta);
    for s in prod.support() {
        if Some(s) != allowed {
            return Err(format!(
                "support of singleton convolution leaks: element {s} outside product of ({gamma},{eta})"
            ));
        }
    }
    let ffstar = f_gamma
        .convolve(&f_gamma.involute().map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    for s in ffstar.support() {
        if s != bundle.groupoid().range_of(gamma) {
            return Err(format!("support of f f* leaks to {s}"));
        }
    }
    let lhs = ffstar.sup_norm().map_err(|e| e.to_string())?;
    let rhs = f_gamma.sup_norm().map_err(|e| e.to_string())?.powi(2);
    if (lhs - rhs).abs() > 1e-9 * (1.0 + rhs) {
        return Err(format!(
            "bisection norm identity fails: ||f f*|| = {lhs:.6e} vs ||f||^2 = {rhs:.6e}"
        ));
    }
    Ok(())
}

/// Shrink a failing case by dropping whole components while the failure
/// persists.
fn minimize(case: &CaseData, tol: &Tolerances, seed: u64, index: usize) -> CaseData {
    let mut current = case.clone();
    loop {
        let mut shrunk = None;
        for drop in 0..current.components.len() {
            if current.components.len() == 1 {
                break;
            }
            let mut candidate = current.clone();
            candidate.components.remove(drop);
            let failed = match build_case(&candidate, tol) {
                Ok(bundle) => run_suite(&bundle, &mut case_rng(seed, index, 1)).is_err(),
                Err(_) => true,
            };
            if failed {
                shrunk = Some(candidate);
                break;
            }
        }
        match shrunk {
            Some(c) => current = c,
            None => return current,
        }
    }
}

/// Run the fuzz campaign; deterministic for a given option set.
pub fn run_fuzz(opts: &FuzzOptions, tol: &Tolerances) -> FuzzOutcome {
    let mut outcome = FuzzOutcome::default();
    for i in 0..opts.count {
        let case = generate_case(
            &mut case_rng(opts.seed, i, 0),
            opts.max_elements,
            opts.max_fiber_dim,
        );
        let result = match build_case(&case, tol) {
            Ok(bundle) => run_suite(&bundle, &mut case_rng(opts.seed, i, 1)),
            Err(e) => Err(format!("construction failed: {e}")),
        };
        match result {
            Ok(()) => outcome.passes += 1,
            Err(detail) => {
                let minimized = minimize(&case, tol, opts.seed, i);
                let repro = build_case(&minimized, tol)
                    .ok()
                    .and_then(|b| {
                        super::format::BundleDocument::from_bundle(&b, &[])
                            .ok()
                            .map(|d| super::format::emit_bundle_file(&d))
                    })
                    .unwrap_or_default();
                outcome.failures.push(FuzzFailure {
                    case_index: i,
                    detail,
                    repro,
                });
            }
        }
    }
    outcome
}
