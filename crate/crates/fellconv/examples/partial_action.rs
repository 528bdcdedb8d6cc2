//! Fell bundles of partial group actions: the prototypical unsaturated
//! examples, with an exactly computable norm.

use num_complex::Complex64;

use fellconv::convalg::Section;
use fellconv::fellbundle::{build_partial_action_bundle, PartialActionData};
use fellconv::groupoid::FiniteGroupoid;
use fellconv::matalg::{ComplexMatrix, MatrixStarAlgebra};
use fellconv::tol::Tolerances;

fn main() {
    let tol = Tolerances::default();
    let group = FiniteGroupoid::cyclic(2);

    // Z/2 acting on C^2 with domain C (+) 0 and the identity isomorphism:
    // the section algebra is three-dimensional
    let alg = MatrixStarAlgebra::diagonal(2, &tol).unwrap();
    let dg = MatrixStarAlgebra::new(2, vec![ComplexMatrix::matrix_unit(2, 0, 0)], &tol).unwrap();
    let data = PartialActionData {
        domains: vec![alg.clone(), dg],
        maps: vec![ComplexMatrix::identity(2), ComplexMatrix::identity(1)],
    };
    let bundle = build_partial_action_bundle(&group, &alg, &data, &tol).unwrap();
    println!("Z/2 partial action with domain C (+) 0:");
    println!("fiber dimensions {:?}, total {}", bundle.fiber_dims(), bundle.total_dim());
    println!("axioms: all pass = {}", bundle.check_axioms(1e-9, 50, 0).all_pass());
    let sat = bundle.is_saturated(1e-9).unwrap();
    println!("saturated: {} (witness pair {:?})", sat.saturated, sat.witness);

    // the norm has a closed form: with f(e) = (p, q) diagonal and
    // f(g) = x E11, the algebra splits as C^3 with coordinates
    // (p + x, p - x, q)
    let mut f = Section::zero(&bundle);
    let (p_val, q_val, x_val) = (
        Complex64::new(0.3, -0.2),
        Complex64::new(1.1, 0.4),
        Complex64::new(-0.7, 0.5),
    );
    f.set_value(0, vec![p_val, q_val]).unwrap();
    f.set_value(1, vec![x_val]).unwrap();
    let closed_form = (q_val.norm())
        .max((p_val + x_val).norm())
        .max((p_val - x_val).norm());
    println!("\nfull norm     = {}", f.full_norm().unwrap());
    println!("closed form   = {closed_form}");
    println!("I-norm        = {}", f.i_norm().unwrap());

    // the same group acting globally (domain everything) on C recovers
    // the group algebra, which is saturated
    let scalars = MatrixStarAlgebra::scalars(&tol).unwrap();
    let global = PartialActionData {
        domains: vec![scalars.clone(), scalars.clone()],
        maps: vec![ComplexMatrix::identity(1), ComplexMatrix::identity(1)],
    };
    let global_bundle = build_partial_action_bundle(&group, &scalars, &global, &tol).unwrap();
    println!("\nglobal action of Z/2 on C:");
    println!("saturated: {}", global_bundle.is_saturated(1e-9).unwrap().saturated);
    let mut h = Section::zero(&global_bundle);
    h.set_value(0, vec![Complex64::new(1.0, 0.0)]).unwrap();
    h.set_value(1, vec![Complex64::new(0.5, 0.0)]).unwrap();
    // characters evaluate to f(e) + f(g) and f(e) - f(g)
    println!(
        "full norm of delta_e + 0.5 delta_g = {} (characters give 1.5 and 0.5)",
        h.full_norm().unwrap()
    );
}
