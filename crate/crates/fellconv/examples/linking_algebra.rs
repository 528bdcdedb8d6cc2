//! The linking bundle of a Hilbert bimodule: fibers A, X, X*, B over the
//! pair groupoid on two points, with section algebra the full block
//! matrix algebra.

use num_complex::Complex64;

use fellconv::convalg::Section;
use fellconv::fellbundle::{build_linking_bundle, full_rectangular_basis};
use fellconv::matalg::{operator_norm, ComplexMatrix, MatrixStarAlgebra};
use fellconv::tol::Tolerances;

fn main() {
    let tol = Tolerances::default();
    let (p, q) = (2usize, 1usize);
    let a = MatrixStarAlgebra::full_matrix(p, &tol).unwrap();
    let b_alg = MatrixStarAlgebra::full_matrix(q, &tol).unwrap();
    let x_basis = full_rectangular_basis(p, q);
    let bundle = build_linking_bundle(&a, &b_alg, x_basis.clone(), &tol).unwrap();

    println!("linking bundle with A = M_{p}, B = M_{q}, X = {p}x{q} matrices");
    println!("fiber dimensions: {:?}", bundle.fiber_dims());
    println!("axioms: all pass = {}", bundle.check_axioms(1e-9, 50, 0).all_pass());
    println!("saturated: {}", bundle.is_saturated(1e-9).unwrap().saturated);

    // a section is a 2x2 block matrix [[f(0,0), f(0,1)], [f(1,0), f(1,1)]];
    // its full norm is the operator norm of that block matrix
    let mut f = Section::zero(&bundle);
    f.set_value(0, a.project(&ComplexMatrix::from_real_rows(&[&[1.0, 0.5], &[0.0, -1.0]])).unwrap())
        .unwrap();
    f.set_value(1, vec![Complex64::new(0.0, 1.0), Complex64::new(2.0, 0.0)]).unwrap();
    f.set_value(2, vec![Complex64::new(1.0, 1.0), Complex64::new(0.0, 0.0)]).unwrap();
    f.set_value(3, vec![Complex64::new(-0.5, 0.0)]).unwrap();

    let n = p + q;
    let mut block = ComplexMatrix::zeros(n, n);
    block.write_block(0, 0, &a.realize(f.value(0)));
    let mut x = ComplexMatrix::zeros(p, q);
    for (k, basis) in x_basis.iter().enumerate() {
        x = x.add(&basis.scale(f.value(1)[k]));
    }
    block.write_block(0, p, &x);
    let mut xs = ComplexMatrix::zeros(q, p);
    for (k, basis) in x_basis.iter().enumerate() {
        xs = xs.add(&basis.adjoint().scale(f.value(2)[k]));
    }
    block.write_block(p, 0, &xs);
    block.write_block(p, p, &b_alg.realize(f.value(3)));

    println!("\nfull norm of the section      = {}", f.full_norm().unwrap());
    println!("operator norm of the block matrix = {}", operator_norm(&block, &tol).unwrap());

    // an unsaturated variant: A = C^2 acting on X = C through the first
    // coordinate only
    let a2 = MatrixStarAlgebra::diagonal(2, &tol).unwrap();
    let scalars = MatrixStarAlgebra::scalars(&tol).unwrap();
    let mut e1 = ComplexMatrix::zeros(2, 1);
    e1.set(0, 0, Complex64::new(1.0, 0.0));
    let partial = build_linking_bundle(&a2, &scalars, vec![e1], &tol).unwrap();
    let sat = partial.is_saturated(1e-9).unwrap();
    println!("\nhalved bimodule (X acts through one coordinate of C^2):");
    println!("axioms: all pass = {}", partial.check_axioms(1e-9, 50, 0).all_pass());
    println!("saturated: {} (witness pair {:?})", sat.saturated, sat.witness);
}
