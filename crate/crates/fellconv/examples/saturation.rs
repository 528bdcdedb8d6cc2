//! Saturation as an exact rank test: products of fibers must span the
//! fiber over the composite, for every composable pair.

use std::collections::BTreeMap;

use num_complex::Complex64;

use fellconv::fellbundle::{
    build_linking_bundle, build_trivial_line_bundle, build_unit_bundle,
};
use fellconv::groupoid::FiniteGroupoid;
use fellconv::matalg::{ComplexMatrix, MatrixStarAlgebra};
use fellconv::tol::Tolerances;

fn main() {
    let tol = Tolerances::default();
    let g = FiniteGroupoid::pair(2);

    let line = build_trivial_line_bundle(&g, &tol).unwrap();
    let sat = line.is_saturated(1e-9).unwrap();
    println!("trivial line bundle over the pair groupoid: saturated = {}", sat.saturated);

    // zero fibers off the unit space: products over arrows span nothing
    let fibers: BTreeMap<usize, MatrixStarAlgebra> = g
        .units()
        .iter()
        .map(|&u| (u, MatrixStarAlgebra::scalars(&tol).unwrap()))
        .collect();
    let unit_bundle = build_unit_bundle(&g, fibers, &tol).unwrap();
    let sat = unit_bundle.is_saturated(1e-9).unwrap();
    println!(
        "unit bundle (zero arrow fibers):            saturated = {}, witness pair = {:?}",
        sat.saturated, sat.witness
    );

    // a bimodule that only reaches part of A: rank 1 out of 2 at the unit
    let a = MatrixStarAlgebra::diagonal(2, &tol).unwrap();
    let b_alg = MatrixStarAlgebra::scalars(&tol).unwrap();
    let mut e1 = ComplexMatrix::zeros(2, 1);
    e1.set(0, 0, Complex64::new(1.0, 0.0));
    let halved = build_linking_bundle(&a, &b_alg, vec![e1], &tol).unwrap();
    let sat = halved.is_saturated(1e-9).unwrap();
    println!(
        "halved linking bundle:                      saturated = {}, witness pair = {:?}",
        sat.saturated, sat.witness
    );

    // full bimodules restore saturation
    let a = MatrixStarAlgebra::full_matrix(2, &tol).unwrap();
    let full = build_linking_bundle(
        &a,
        &b_alg,
        fellconv::fellbundle::full_rectangular_basis(2, 1),
        &tol,
    )
    .unwrap();
    println!(
        "full linking bundle:                        saturated = {}",
        full.is_saturated(1e-9).unwrap().saturated
    );
}
