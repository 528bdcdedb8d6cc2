//! Property tests: serialization round trips and the *-algebra laws on
//! randomized sections.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fellconv::cli::fuzz::{build_case, generate_case};
use fellconv::cli::{emit_bundle_file, parse_bundle_file, BundleDocument};
use fellconv::convalg::Section;
use fellconv::fellbundle::{build_trivial_line_bundle, FellBundle};
use fellconv::groupoid::FiniteGroupoid;
use fellconv::tol::Tolerances;

fn coords_strategy(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

fn section_from<'a>(bundle: &'a FellBundle, coords: &[Complex64]) -> Section<'a> {
    Section::from_vector(bundle, coords).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Canonical documents round-trip bit-exactly through emit and parse.
    #[test]
    fn format_round_trip(seed in 0u64..1000, coords in coords_strategy(4)) {
        let tol = Tolerances::default();
        let case = generate_case(&mut ChaCha8Rng::seed_from_u64(seed), 6, 2);
        let bundle = build_case(&case, &tol).unwrap();
        let mut padded = coords.clone();
        padded.resize(bundle.total_dim(), Complex64::new(0.0, 0.0));
        let f = section_from(&bundle, &padded);
        let doc = BundleDocument::from_bundle(&bundle, &[("f", &f)]).unwrap();
        let text = emit_bundle_file(&doc);
        let parsed = parse_bundle_file(&text).unwrap();
        prop_assert_eq!(&parsed, &doc);
        prop_assert_eq!(emit_bundle_file(&parsed), text);
    }

    /// Convolution associates and distributes, and involution reverses
    /// products, on arbitrary sections of the Z/6 groupoid algebra.
    #[test]
    fn star_algebra_laws(
        a in coords_strategy(6),
        b in coords_strategy(6),
        d in coords_strategy(6),
    ) {
        let tol = Tolerances::default();
        let g = FiniteGroupoid::cyclic(6);
        let bundle = build_trivial_line_bundle(&g, &tol).unwrap();
        let (f, h, k) = (
            section_from(&bundle, &a),
            section_from(&bundle, &b),
            section_from(&bundle, &d),
        );

        let assoc_left = f.convolve(&h).unwrap().convolve(&k).unwrap();
        let assoc_right = f.convolve(&h.convolve(&k).unwrap()).unwrap();
        prop_assert!(vec_dist(&assoc_left, &assoc_right) < 1e-10);

        let dist_left = f.convolve(&h.add(&k).unwrap()).unwrap();
        let dist_right = f.convolve(&h).unwrap().add(&f.convolve(&k).unwrap()).unwrap();
        prop_assert!(vec_dist(&dist_left, &dist_right) < 1e-10);

        let anti_left = f.convolve(&h).unwrap().involute().unwrap();
        let anti_right = h.involute().unwrap().convolve(&f.involute().unwrap()).unwrap();
        prop_assert!(vec_dist(&anti_left, &anti_right) < 1e-10);
    }

    /// Norm ordering: sup norm below I-norm, full norm below I-norm, and
    /// the full norm of the involution matches.
    #[test]
    fn norm_inequalities(a in coords_strategy(4)) {
        let tol = Tolerances::default();
        let g = FiniteGroupoid::pair(2);
        let bundle = build_trivial_line_bundle(&g, &tol).unwrap();
        let f = section_from(&bundle, &a);
        let sup = f.sup_norm().unwrap();
        let i_norm = f.i_norm().unwrap();
        let full = f.full_norm().unwrap();
        prop_assert!(sup <= i_norm + 1e-12);
        prop_assert!(full <= i_norm + 1e-9 * (1.0 + i_norm));
        let star_full = f.involute().unwrap().full_norm().unwrap();
        prop_assert!((star_full - full).abs() <= 1e-9 * (1.0 + full));
    }
}

fn vec_dist(a: &Section<'_>, b: &Section<'_>) -> f64 {
    a.to_vector()
        .iter()
        .zip(b.to_vector().iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
