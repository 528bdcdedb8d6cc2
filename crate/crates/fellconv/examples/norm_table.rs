//! The three norms on the section algebra: sup, I and full C*, with the
//! strict inequalities they can exhibit.

use num_complex::Complex64;

use fellconv::convalg::Section;
use fellconv::fellbundle::build_trivial_line_bundle;
use fellconv::groupoid::FiniteGroupoid;
use fellconv::matalg::{operator_norm, ComplexMatrix};
use fellconv::tol::Tolerances;

fn main() {
    let tol = Tolerances::default();

    // the group algebra of Z/2: f = delta_e + i delta_g has sup norm 1,
    // I-norm 2 and full norm sqrt(2) (eigenvalues 1 +- i)
    let z2 = FiniteGroupoid::cyclic(2);
    let bundle = build_trivial_line_bundle(&z2, &tol).unwrap();
    let mut f = Section::zero(&bundle);
    f.set_value(0, vec![Complex64::new(1.0, 0.0)]).unwrap();
    f.set_value(1, vec![Complex64::new(0.0, 1.0)]).unwrap();
    println!("Z/2 group algebra, f = delta_e + i delta_g:");
    println!("  sup norm  = {}", f.sup_norm().unwrap());
    println!("  I-norm    = {}", f.i_norm().unwrap());
    println!("  full norm = {}", f.full_norm().unwrap());

    // the C*-identity of the computed norm
    let ff = f.involute().unwrap().convolve(&f).unwrap();
    println!(
        "  C*-identity residual |(norm of f* f) - (norm of f)^2| = {:.3e}",
        (ff.full_norm().unwrap() - f.full_norm().unwrap().powi(2)).abs()
    );

    // over the pair groupoid the section algebra is a matrix algebra:
    // the full norm is the top singular value of the value matrix
    let n = 3;
    let pair = FiniteGroupoid::pair(n);
    let bundle = build_trivial_line_bundle(&pair, &tol).unwrap();
    let mut f = Section::zero(&bundle);
    let mut model = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = Complex64::new((i as f64 + 1.0) / (j as f64 + 2.0), 0.1 * j as f64);
            f.set_value(i * n + j, vec![v]).unwrap();
            model.set(i, j, v);
        }
    }
    println!("\npair groupoid on {n} points (the section algebra is M_{n}):");
    println!("  full norm            = {}", f.full_norm().unwrap());
    println!("  matrix operator norm = {}", operator_norm(&model, &tol).unwrap());
    println!("  I-norm (upper bound) = {}", f.i_norm().unwrap());

    // on a bisection all three norms collapse
    let restricted = f.restrict(&[1, 3]); // {(0,1),(1,0)}
    println!("\nsame section restricted to the bisection {{(0,1),(1,0)}}:");
    println!("  sup  = {}", restricted.sup_norm().unwrap());
    println!("  I    = {}", restricted.i_norm().unwrap());
    println!("  full = {}", restricted.full_norm().unwrap());
}
