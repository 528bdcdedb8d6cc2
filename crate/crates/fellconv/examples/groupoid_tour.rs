//! Finite groupoids and their bisection calculus: validation, partial
//! composition, and the inverse semigroup of bisections.

use fellconv::groupoid::{small_groupoids, Bisection, FiniteGroupoid};

fn main() {
    // the pair groupoid on {0,1}: elements (i,j) with (i,j)(j,k) = (i,k)
    let pair = FiniteGroupoid::pair(2);
    println!("pair groupoid on 2 points: {} elements, units {:?}", pair.n_elements(), pair.units());
    let report = pair.validate();
    println!("validation: {}", if report.is_valid() { "all laws hold" } else { "INVALID" });

    // composition is partial: (0,1)(1,1) is defined, (0,1)(0,1) is not
    println!("compose (0,1)*(1,1) -> {:?}", pair.compose(1, 3).unwrap());
    println!("compose (0,1)*(0,1) -> {:?}", pair.compose(1, 1).unwrap());
    println!("inverse of (0,1) -> element {}", pair.inverse(1).unwrap());

    // bisections: subsets on which range and source are injective
    println!("\n{{(0,1)}} is a bisection: {}", pair.is_bisection(&[1]));
    println!("{{(0,1),(0,0)}} is a bisection: {}", pair.is_bisection(&[1, 0]));

    let u = Bisection::new(&pair, vec![1, 2]).unwrap(); // {(0,1),(1,0)}
    let ui = pair.bisection_inverse(&u);
    let uui = pair.bisection_product(&u, &ui).unwrap();
    println!("U = {:?}", u.elements());
    println!("U^-1 = {:?}", ui.elements());
    println!("U U^-1 = {:?} (the ranges of U)", uui.elements());

    // the inverse semigroup law U U^-1 U = U, on every bisection of every
    // catalog groupoid
    let mut checked = 0usize;
    for (name, g) in small_groupoids(6) {
        let n = g.n_elements();
        for mask in 0u32..(1 << n) {
            let subset: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            if !g.is_bisection(&subset) {
                continue;
            }
            let b = Bisection::new(&g, subset).unwrap();
            let bi = g.bisection_inverse(&b);
            let bbi = g.bisection_product(&b, &bi).unwrap();
            let back = g.bisection_product(&bbi, &b).unwrap();
            assert_eq!(back, b, "{name}: inverse semigroup law failed");
            checked += 1;
        }
    }
    println!("\ninverse semigroup law U U^-1 U = U verified on {checked} bisections");

    // a deliberately broken groupoid: redirect one composition entry
    let mut pairs = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            if let Some(p) = pair.compose_unchecked(a, b) {
                pairs.push((a, b, if (a, b) == (1, 2) { 3 } else { p }));
            }
        }
    }
    let broken = FiniteGroupoid::from_parts(
        4,
        vec![0, 3],
        (0..4).map(|e| pair.range_of(e)).collect(),
        (0..4).map(|e| pair.source_of(e)).collect(),
        (0..4).map(|e| pair.inverse_unchecked(e)).collect(),
        &pairs,
    );
    println!("\nmutated composition table:");
    print!("{}", broken.validate());
}
