//! Extending a pre-representation to a genuine representation and
//! recovering the original on a round trip.

use num_complex::Complex64;

use fellconv::fellbundle::build_trivial_line_bundle;
use fellconv::groupoid::FiniteGroupoid;
use fellconv::reps::{extend_pre_representation, PreRepresentation, StarRepresentation};
use fellconv::tol::Tolerances;

fn main() {
    let tol = Tolerances::default();
    let g = FiniteGroupoid::cyclic(3);
    let bundle = build_trivial_line_bundle(&g, &tol).unwrap();
    let regular = StarRepresentation::regular(&bundle).unwrap();

    // view the regular representation as a pre-representation on the full
    // space, then extend it back
    let pre = PreRepresentation::from_representation(&regular);
    let report = pre.validate();
    println!("pre-representation conditions: {}", if report.is_valid() { "hold" } else { "FAIL" });

    let extended = extend_pre_representation(&pre, &bundle).unwrap();
    let mut worst = 0.0f64;
    for (key, m) in regular.images() {
        worst = worst.max(extended.image(key.0, key.1).sub(m).frobenius_norm());
    }
    println!("round-trip deviation on basis images: {worst:.3e}");
    println!("extension validates: {}", extended.validate().is_valid());

    // an input violating adjointability is rejected, not repaired
    let mut broken = PreRepresentation::from_representation(&regular);
    let m = broken.action_mut().get_mut(&(1, 0)).unwrap();
    *m = m.scale(Complex64::new(2.0, 0.0));
    match extend_pre_representation(&broken, &bundle) {
        Ok(_) => println!("unexpected: broken input accepted"),
        Err(e) => println!("\nbroken input rejected: {e}"),
    }
}
