//! Command implementations behind the `fellconv` binary, kept as library
//! functions so they can be driven from tests and examples.
//!
//! Reports are line-oriented `key=value` text (stable keys: `axiom`,
//! `witness`, `norm_full`, `norm_i`, `norm_sup`, `saturated`, `result`).
//! Exit codes: 0 success, 1 mathematical violation, 2 input error.

pub mod format;
pub mod fuzz;

pub use format::{
    emit_bundle_file, emit_representation, parse_bundle_file, parse_representation,
    BundleDocument, ParseError,
};
pub use fuzz::{run_fuzz, FuzzOptions};

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::convalg::{unit_section, Section};
use crate::fellbundle::{
    build_linking_bundle, build_partial_action_bundle, build_trivial_line_bundle,
    build_unit_bundle, full_rectangular_basis, AxiomStatus, FellBundle, PartialActionData,
};
use crate::groupoid::FiniteGroupoid;
use crate::matalg::{ComplexMatrix, MatrixStarAlgebra};
use crate::tol::Tolerances;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            tol: 1e-9,
            samples: 100,
            seed: 0,
        }
    }
}

/// `check`: groupoid laws, bundle axioms, fiber-form nondegeneracy and the
/// saturation test for a document.
pub fn check_text(text: &str, opts: &CheckOptions) -> (i32, String) {
    let mut out = String::new();
    let doc = match parse_bundle_file(text) {
        Ok(d) => d,
        Err(e) => {
            let _ = writeln!(out, "parse_error={e}");
            let _ = writeln!(out, "result=input-error");
            return (EXIT_INPUT, out);
        }
    };
    let tolerances = Tolerances::default();
    let bundle = match doc.to_bundle(&tolerances) {
        Ok(b) => b,
        Err(e) => {
            let _ = writeln!(out, "construction_error={e}");
            let _ = writeln!(out, "result=input-error");
            return (EXIT_INPUT, out);
        }
    };

    let mut ok = true;
    let _ = writeln!(out, "tol={}", opts.tol);
    let _ = writeln!(out, "samples={}", opts.samples);
    let _ = writeln!(out, "seed={}", opts.seed);
    let groupoid_report = bundle.groupoid().validate();
    if groupoid_report.is_valid() {
        let _ = writeln!(out, "groupoid=ok");
    } else {
        ok = false;
        let _ = writeln!(out, "groupoid=invalid");
        for v in &groupoid_report.violations {
            let _ = writeln!(out, "groupoid_violation={v}");
        }
    }

    let axioms = bundle.check_axioms(opts.tol, opts.samples, opts.seed);
    for v in &axioms.verdicts {
        let status = match v.status {
            AxiomStatus::Pass => "pass",
            AxiomStatus::Fail => "fail",
            AxiomStatus::Skipped => "skipped",
        };
        let _ = writeln!(out, "axiom{}={status}", v.axiom);
    }
    for v in &axioms.verdicts {
        if v.status == AxiomStatus::Fail {
            ok = false;
            let _ = writeln!(out, "axiom={}", v.axiom);
            if let Some(d) = &v.detail {
                let _ = writeln!(out, "witness={d}");
            }
        }
    }

    if axioms.all_pass() && groupoid_report.is_valid() {
        match bundle.validate_fiber_forms() {
            Ok(()) => {
                let _ = writeln!(out, "fiber_form=ok");
            }
            Err(e) => {
                ok = false;
                let _ = writeln!(out, "fiber_form=degenerate");
                let _ = writeln!(out, "witness={e}");
            }
        }
        match bundle.is_saturated(opts.tol) {
            Ok(sat) => {
                let _ = writeln!(out, "saturated={}", sat.saturated);
                if let Some((g, h)) = sat.witness {
                    let _ = writeln!(out, "witness={g},{h}");
                }
            }
            Err(e) => {
                ok = false;
                let _ = writeln!(out, "saturation_error={e}");
            }
        }
    }

    let _ = writeln!(out, "result={}", if ok { "pass" } else { "fail" });
    (if ok { EXIT_OK } else { EXIT_VIOLATION }, out)
}

/// `norm`: the three norms of a named section, the C*-identity residual,
/// and the norm-equality flag for bisection-supported sections.
pub fn norm_text(text: &str, section_name: &str) -> (i32, String) {
    let mut out = String::new();
    let doc = match parse_bundle_file(text) {
        Ok(d) => d,
        Err(e) => {
            let _ = writeln!(out, "parse_error={e}");
            let _ = writeln!(out, "result=input-error");
            return (EXIT_INPUT, out);
        }
    };
    let tolerances = Tolerances::default();
    let bundle = match doc.to_bundle(&tolerances) {
        Ok(b) => b,
        Err(e) => {
            let _ = writeln!(out, "construction_error={e}");
            let _ = writeln!(out, "result=input-error");
            return (EXIT_INPUT, out);
        }
    };
    let values = match doc.section_values(section_name, &bundle) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(out, "section_error={e}");
            let _ = writeln!(out, "result=input-error");
            return (EXIT_INPUT, out);
        }
    };
    let section = match Section::new(&bundle, values) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(out, "section_error={e}");
            let _ = writeln!(out, "result=input-error");
            return (EXIT_INPUT, out);
        }
    };

    let computed = (|| -> Result<(f64, f64, f64, f64), crate::fellbundle::BundleError> {
        let sup = section.sup_norm()?;
        let i_norm = section.i_norm()?;
        let full = section.full_norm()?;
        let ff = section.involute()?.convolve(&section)?;
        let residual = (ff.full_norm()? - full * full).abs();
        Ok((sup, i_norm, full, residual))
    })();
    let (sup, i_norm, full, residual) = match computed {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(out, "norm_error={e}");
            let _ = writeln!(out, "result=fail");
            return (EXIT_VIOLATION, out);
        }
    };
    let _ = writeln!(out, "section={section_name}");
    let _ = writeln!(out, "norm_sup={sup}");
    let _ = writeln!(out, "norm_i={i_norm}");
    let _ = writeln!(out, "norm_full={full}");
    let _ = writeln!(out, "cstar_residual={residual}");
    let bisection = section.is_bisection_supported();
    let _ = writeln!(out, "bisection_supported={bisection}");
    let mut ok = true;
    if bisection {
        let equal = (full - sup).abs() <= 1e-8 * (1.0 + sup) && (i_norm - sup).abs() <= 1e-12 * (1.0 + sup);
        let _ = writeln!(out, "norms_equal={equal}");
        ok = equal;
    }
    let _ = writeln!(out, "result={}", if ok { "pass" } else { "fail" });
    (if ok { EXIT_OK } else { EXIT_VIOLATION }, out)
}

fn parse_params(params: &[String]) -> (BTreeMap<String, String>, Vec<String>) {
    let mut kv = BTreeMap::new();
    let mut bare = Vec::new();
    for p in params {
        match p.split_once('=') {
            Some((k, v)) => {
                kv.insert(k.to_string(), v.to_string());
            }
            None => bare.push(p.clone()),
        }
    }
    (kv, bare)
}

fn get_count(kv: &BTreeMap<String, String>, key: &str, default: usize) -> Result<usize, String> {
    match kv.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse::<usize>()
            .map_err(|_| format!("parameter {key} must be a count, got {v:?}")),
    }
}

/// A deterministic nonzero sample section for gallery files.
fn sample_section(bundle: &FellBundle) -> Section<'_> {
    let mut f = Section::zero(bundle);
    for gamma in 0..bundle.groupoid().n_elements() {
        let dim = bundle.fiber_dim(gamma);
        let coords: Vec<Complex64> = (0..dim)
            .map(|k| {
                Complex64::new(
                    1.0 / (1.0 + gamma as f64 + k as f64),
                    0.25 * gamma as f64 - 0.125 * k as f64,
                )
            })
            .collect();
        let _ = f.set_value(gamma, coords);
    }
    f
}

fn document_with_gallery_sections(
    bundle: &FellBundle,
    special: Option<Section<'_>>,
) -> Result<String, String> {
    let f = match special {
        Some(s) => s,
        None => sample_section(bundle),
    };
    let unit = unit_section(bundle).map_err(|e| e.to_string())?;
    let doc = BundleDocument::from_bundle(bundle, &[("f", &f), ("unit", &unit)])
        .map_err(|e| e.to_string())?;
    Ok(emit_bundle_file(&doc))
}

/// `example`: emit one of the gallery bundles as a document.
///
/// Names and parameters:
/// * `trivial m=<M>`: trivial line bundle over Z/M (default 1);
/// * `pair n=<N>`: trivial line bundle over the pair groupoid (default 2);
/// * `unitbundle [pair] n=<N> fiber=C|M2`: algebras over the units of a
///   pair groupoid, zero fibers on arrows;
/// * `linking p=<P> q=<Q>`: full matrix linking bundle;
/// * `partial z2-halved|z2-global`: the Fell bundle of a partial
///   (respectively global) action of Z/2.
pub fn example_text(name: &str, params: &[String]) -> Result<String, String> {
    let tol = Tolerances::default();
    let (kv, bare) = parse_params(params);
    match name {
        "trivial" => {
            let m = get_count(&kv, "m", 1)?;
            if m == 0 {
                return Err("parameter m must be at least 1".into());
            }
            let g = FiniteGroupoid::cyclic(m);
            let bundle = build_trivial_line_bundle(&g, &tol).map_err(|e| e.to_string())?;
            let special = if m == 2 {
                // delta_e + i delta_g: sup 1, I-norm 2, full norm sqrt(2)
                let mut f = Section::zero(&bundle);
                f.set_value(0, vec![Complex64::new(1.0, 0.0)]).map_err(|e| e.to_string())?;
                f.set_value(1, vec![Complex64::new(0.0, 1.0)]).map_err(|e| e.to_string())?;
                Some(f)
            } else {
                None
            };
            document_with_gallery_sections(&bundle, special)
        }
        "pair" => {
            let n = get_count(&kv, "n", 2)?;
            if n == 0 {
                return Err("parameter n must be at least 1".into());
            }
            let g = FiniteGroupoid::pair(n);
            let bundle = build_trivial_line_bundle(&g, &tol).map_err(|e| e.to_string())?;
            document_with_gallery_sections(&bundle, None)
        }
        "unitbundle" => {
            for b in &bare {
                if b != "pair" {
                    return Err(format!("unknown unitbundle variant {b:?}"));
                }
            }
            let n = get_count(&kv, "n", 2)?;
            if n == 0 {
                return Err("parameter n must be at least 1".into());
            }
            let fiber = kv.get("fiber").map(String::as_str).unwrap_or("C");
            let g = FiniteGroupoid::pair(n);
            let fibers: Result<BTreeMap<usize, MatrixStarAlgebra>, String> = g
                .units()
                .iter()
                .map(|&u| {
                    let alg = match fiber {
                        "C" => MatrixStarAlgebra::scalars(&tol),
                        "M2" => MatrixStarAlgebra::full_matrix(2, &tol),
                        other => return Err(format!("unknown fiber {other:?} (use C or M2)")),
                    };
                    alg.map(|a| (u, a)).map_err(|e| e.to_string())
                })
                .collect();
            let bundle = build_unit_bundle(&g, fibers?, &tol).map_err(|e| e.to_string())?;
            document_with_gallery_sections(&bundle, None)
        }
        "linking" => {
            let p = get_count(&kv, "p", 1)?;
            let q = get_count(&kv, "q", 1)?;
            if p == 0 || q == 0 || p > 6 || q > 6 {
                return Err("parameters p and q must be between 1 and 6".into());
            }
            let a = MatrixStarAlgebra::full_matrix(p, &tol).map_err(|e| e.to_string())?;
            let b_alg = MatrixStarAlgebra::full_matrix(q, &tol).map_err(|e| e.to_string())?;
            let bundle = build_linking_bundle(&a, &b_alg, full_rectangular_basis(p, q), &tol)
                .map_err(|e| e.to_string())?;
            document_with_gallery_sections(&bundle, None)
        }
        "partial" => {
            let mut variant = kv.get("variant").cloned();
            for b in &bare {
                if variant.is_none() {
                    variant = Some(b.clone());
                }
            }
            let variant = variant.unwrap_or_else(|| "z2-halved".into());
            let group = FiniteGroupoid::cyclic(2);
            let bundle = match variant.as_str() {
                "z2-halved" => {
                    let alg = MatrixStarAlgebra::diagonal(2, &tol).map_err(|e| e.to_string())?;
                    let dg = MatrixStarAlgebra::new(
                        2,
                        vec![ComplexMatrix::matrix_unit(2, 0, 0)],
                        &tol,
                    )
                    .map_err(|e| e.to_string())?;
                    let data = PartialActionData {
                        domains: vec![alg.clone(), dg],
                        maps: vec![ComplexMatrix::identity(2), ComplexMatrix::identity(1)],
                    };
                    build_partial_action_bundle(&group, &alg, &data, &tol)
                        .map_err(|e| e.to_string())?
                }
                "z2-global" => {
                    let alg = MatrixStarAlgebra::scalars(&tol).map_err(|e| e.to_string())?;
                    let data = PartialActionData {
                        domains: vec![alg.clone(), alg.clone()],
                        maps: vec![ComplexMatrix::identity(1), ComplexMatrix::identity(1)],
                    };
                    build_partial_action_bundle(&group, &alg, &data, &tol)
                        .map_err(|e| e.to_string())?
                }
                other => return Err(format!("unknown partial-action variant {other:?}")),
            };
            document_with_gallery_sections(&bundle, None)
        }
        other => Err(format!(
            "unknown example {other:?} (expected trivial, pair, unitbundle, linking or partial)"
        )),
    }
}

/// `fuzz`: the campaign report plus repro files (name, content) for any
/// failures.
pub fn fuzz_text(opts: &FuzzOptions) -> (i32, String, Vec<(String, String)>) {
    let tol = Tolerances::default();
    let outcome = run_fuzz(opts, &tol);
    let mut out = String::new();
    let _ = writeln!(out, "seed={}", opts.seed);
    let _ = writeln!(out, "count={}", opts.count);
    let _ = writeln!(out, "max_elements={}", opts.max_elements);
    let _ = writeln!(out, "max_fiber_dim={}", opts.max_fiber_dim);
    let _ = writeln!(out, "pass={}", outcome.passes);
    let _ = writeln!(out, "fail={}", outcome.failures.len());
    let mut files = Vec::new();
    for failure in &outcome.failures {
        let name = format!("fuzz-repro-{}.fellbundle", failure.case_index);
        let _ = writeln!(out, "case={}", failure.case_index);
        let _ = writeln!(out, "error={}", failure.detail);
        let _ = writeln!(out, "repro={name}");
        files.push((name, failure.repro.clone()));
    }
    let ok = outcome.failures.is_empty();
    let _ = writeln!(out, "result={}", if ok { "pass" } else { "fail" });
    (if ok { EXIT_OK } else { EXIT_VIOLATION }, out, files)
}
