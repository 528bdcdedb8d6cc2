//! The text format: emit a bundle with sections, parse it back
//! bit-exactly, and show the first-error diagnostics on broken input.

use num_complex::Complex64;

use fellconv::cli::{emit_bundle_file, parse_bundle_file, BundleDocument};
use fellconv::convalg::{unit_section, Section};
use fellconv::fellbundle::build_trivial_line_bundle;
use fellconv::groupoid::FiniteGroupoid;
use fellconv::tol::Tolerances;

fn main() {
    let tol = Tolerances::default();
    let g = FiniteGroupoid::cyclic(2);
    let bundle = build_trivial_line_bundle(&g, &tol).unwrap();
    let mut f = Section::zero(&bundle);
    f.set_value(0, vec![Complex64::new(1.0 / 3.0, 0.0)]).unwrap();
    f.set_value(1, vec![Complex64::new(0.0, -2.0 / 7.0)]).unwrap();
    let u = unit_section(&bundle).unwrap();

    let doc = BundleDocument::from_bundle(&bundle, &[("f", &f), ("unit", &u)]).unwrap();
    let text = emit_bundle_file(&doc);
    println!("--- emitted document ---\n{text}");

    let parsed = parse_bundle_file(&text).unwrap();
    println!("parse(emit(doc)) == doc: {}", parsed == doc);
    println!("emit is canonical:        {}", emit_bundle_file(&parsed) == text);

    let rebuilt = parsed.to_bundle(&tol).unwrap();
    println!("rebuilt bundle passes axioms: {}", rebuilt.check_axioms(1e-9, 50, 0).all_pass());

    // diagnostics carry line and column and name the offending value
    for (label, broken) in [
        ("empty input", String::new()),
        ("dangling element", text.replace("groupoid compose 1 1 0", "groupoid compose 1 1 9")),
        ("unknown key", format!("{text}wobble 1\n")),
    ] {
        match parse_bundle_file(&broken) {
            Ok(_) => println!("{label}: unexpectedly parsed"),
            Err(e) => println!("{label}: {e}"),
        }
    }
}
