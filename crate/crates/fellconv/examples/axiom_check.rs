//! Build bundles and run the per-axiom checker, including on a mutated
//! bundle to show how violations are reported.

use num_complex::Complex64;

use fellconv::fellbundle::{build_trivial_line_bundle, FellBundle};
use fellconv::groupoid::FiniteGroupoid;
use fellconv::tol::Tolerances;

fn main() {
    let tol = Tolerances::default();
    let g = FiniteGroupoid::pair(2);
    let bundle = build_trivial_line_bundle(&g, &tol).unwrap();

    println!("trivial line bundle over the pair groupoid on 2 points");
    let report = bundle.check_axioms(1e-9, 100, 0);
    print!("{report}");
    println!("all pass: {}\n", report.all_pass());

    // negate the involution tensor over one arrow: (a*)* = a fails there
    let mut parts = bundle.parts();
    let s = parts.star.get_mut(&1).unwrap();
    *s = s.scale(Complex64::new(-1.0, 0.0));
    let mutated = FellBundle::from_parts(parts);

    println!("same bundle with the involution negated over one arrow:");
    let report = mutated.check_axioms(1e-9, 100, 0);
    print!("{report}");
    println!("failed axioms: {:?}", report.failed_axioms());
}
