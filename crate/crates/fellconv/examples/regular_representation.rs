//! The left regular representation: the faithful model behind the full
//! C*-norm, and how other representations are dominated by it.

use num_complex::Complex64;

use fellconv::convalg::{unit_section, Section};
use fellconv::fellbundle::build_trivial_line_bundle;
use fellconv::groupoid::FiniteGroupoid;
use fellconv::matalg::ComplexMatrix;
use fellconv::reps::{bisection_decomposition_bound, dominance_check, StarRepresentation};
use fellconv::tol::Tolerances;

fn main() {
    let tol = Tolerances::default();
    let g = FiniteGroupoid::cyclic(4);
    let bundle = build_trivial_line_bundle(&g, &tol).unwrap();

    let rep = bundle.regular_rep().unwrap();
    println!("regular module of the Z/4 group algebra: dimension {}", rep.hilbert_dim());

    // faithfulness: acting on the unit section reproduces the section
    let mut f = Section::zero(&bundle);
    for k in 0..4 {
        f.set_value(k, vec![Complex64::new(0.25 * (k as f64 + 1.0), -0.1 * k as f64)])
            .unwrap();
    }
    let u = unit_section(&bundle).unwrap();
    let image = f.convolve(&u).unwrap();
    println!("lambda(f) applied to the unit section recovers f: {}", image == f);

    // the regular representation achieves the full norm; compressions to
    // reducing subspaces stay below it
    let regular = StarRepresentation::regular(&bundle).unwrap();
    let (pi, full) = dominance_check(&regular, &f).unwrap();
    println!("\n||lambda(f)|| = {pi},  full norm = {full}");

    for j in 0..4usize {
        // the character lines of Z/4 are one-dimensional reducing subspaces
        let mut v = ComplexMatrix::zeros(4, 1);
        for k in 0..4 {
            let theta = std::f64::consts::TAU * ((j * k) % 4) as f64 / 4.0;
            v.set(k, 0, Complex64::new(0.5 * theta.cos(), 0.5 * theta.sin()));
        }
        let comp = regular.compress(&v).unwrap();
        let (pi, full) = dominance_check(&comp, &f).unwrap();
        println!("character {j}: ||pi(f)|| = {pi:.12} <= {full:.12}");
    }

    // the decomposition bound of a singleton cover: n times the sup norm
    let cover = g.singleton_cover();
    let bound = bisection_decomposition_bound(&f, &cover).unwrap();
    println!("\nsingleton-cover bound n*sup = {bound}, actual full norm = {full}");
}
