//! Acceptance suite: every criterion is one test with its tolerance
//! pinned in the assertion, against an oracle computed independently of
//! the code path it checks. Run with `--nocapture` to see one pass line
//! per criterion.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fellconv::cli::fuzz::{build_case, generate_case};
use fellconv::convalg::Section;
use fellconv::fellbundle::{
    build_linking_bundle, build_partial_action_bundle, build_trivial_line_bundle,
    build_unit_bundle, full_rectangular_basis, FellBundle, MultTensor, PartialActionData,
};
use fellconv::groupoid::{small_groupoids, FiniteGroupoid};
use fellconv::matalg::{operator_norm, ComplexMatrix, MatrixStarAlgebra};
use fellconv::reps::{
    dominance_check, extend_pre_representation, PreRepresentation, RepError, StarRepresentation,
};
use fellconv::tol::Tolerances;

fn cfg() -> Tolerances {
    Tolerances::default()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A seeded block-diagonal matrix algebra with blocks of dimension at
/// most 3.
fn random_block_algebra(r: &mut ChaCha8Rng) -> MatrixStarAlgebra {
    let n_blocks = r.random_range(1..=2usize);
    let blocks: Vec<usize> = (0..n_blocks).map(|_| r.random_range(1..=3usize)).collect();
    MatrixStarAlgebra::block_diagonal(&blocks, &cfg()).unwrap()
}

#[test]
fn criterion_01_pair_groupoid_matrix_oracle() {
    // the trivial line bundle over the pair groupoid on n points is M_n:
    // the full norm of a section equals the top singular value of the
    // n x n matrix of its values
    for n in 2..=5usize {
        let g = FiniteGroupoid::pair(n);
        let bundle = build_trivial_line_bundle(&g, &cfg()).unwrap();
        let mut r = rng(100 + n as u64);
        for _ in 0..100 {
            let f = Section::seeded_random(&bundle, &mut r);
            let mut model = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    model.set(i, j, f.value(i * n + j)[0]);
                }
            }
            let want = operator_norm(&model, &cfg()).unwrap();
            let got = f.full_norm().unwrap();
            assert!(
                (got - want).abs() <= 1e-8,
                "n={n}: full norm {got} vs matrix oracle {want}"
            );
        }
    }
    println!("criterion 1 (pair-groupoid matrix oracle): PASS");
}

#[test]
fn criterion_02_group_algebra_character_oracle() {
    // over Z/m the full norm is the largest character magnitude
    for m in 2..=6usize {
        let g = FiniteGroupoid::cyclic(m);
        let bundle = build_trivial_line_bundle(&g, &cfg()).unwrap();
        let mut r = rng(200 + m as u64);
        for _ in 0..100 {
            let f = Section::seeded_random(&bundle, &mut r);
            let mut want = 0.0f64;
            for j in 0..m {
                let mut hat = c(0.0, 0.0);
                for k in 0..m {
                    let theta = std::f64::consts::TAU * (j * k % m) as f64 / m as f64;
                    hat += f.value(k)[0] * c(theta.cos(), theta.sin());
                }
                want = want.max(hat.norm());
            }
            let got = f.full_norm().unwrap();
            assert!(
                (got - want).abs() <= 1e-8,
                "m={m}: full norm {got} vs character oracle {want}"
            );
        }
    }
    println!("criterion 2 (group-algebra character oracle): PASS");
}

#[test]
fn criterion_03_representation_dominance() {
    // every validated representation is dominated by the full norm, with
    // equality for the regular representation
    let tol = cfg();

    // cyclic groups with character-line compressions
    for m in [2usize, 3] {
        let g = FiniteGroupoid::cyclic(m);
        let bundle = build_trivial_line_bundle(&g, &tol).unwrap();
        let regular = StarRepresentation::regular(&bundle).unwrap();
        let mut reps = vec![regular.clone(), regular.direct_sum(&regular).unwrap()];
        for j in 0..m {
            let mut v = ComplexMatrix::zeros(m, 1);
            let scale = 1.0 / (m as f64).sqrt();
            for k in 0..m {
                let theta = std::f64::consts::TAU * (j * k % m) as f64 / m as f64;
                v.set(k, 0, c(scale * theta.cos(), scale * theta.sin()));
            }
            reps.push(regular.compress(&v).unwrap());
        }
        run_dominance(&bundle, &reps, 300 + m as u64);
    }

    // pair groupoids with column-block compressions
    for n in [2usize, 3] {
        let g = FiniteGroupoid::pair(n);
        let bundle = build_trivial_line_bundle(&g, &tol).unwrap();
        let regular = StarRepresentation::regular(&bundle).unwrap();
        let mut reps = vec![regular.clone(), regular.direct_sum(&regular).unwrap()];
        for l in 0..n {
            let mut v = ComplexMatrix::zeros(n * n, n);
            for i in 0..n {
                v.set(i * n + l, i, c(1.0, 0.0));
            }
            reps.push(regular.compress(&v).unwrap());
        }
        run_dominance(&bundle, &reps, 310 + n as u64);
    }

    // the three-dimensional partial-action algebra splits into three
    // one-dimensional blocks; compress onto each
    {
        let bundle = halved_partial_bundle(&tol);
        let regular = StarRepresentation::regular(&bundle).unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        let lines = [
            vec![c(s, 0.0), c(0.0, 0.0), c(s, 0.0)],
            vec![c(s, 0.0), c(0.0, 0.0), c(-s, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ];
        let mut reps = vec![regular.clone(), regular.direct_sum(&regular).unwrap()];
        for line in &lines {
            let mut v = ComplexMatrix::zeros(3, 1);
            for (r, &x) in line.iter().enumerate() {
                v.set(r, 0, x);
            }
            reps.push(regular.compress(&v).unwrap());
        }
        run_dominance(&bundle, &reps, 320);
    }

    // a unit bundle with M_2 fibers: each unit's block is reducing
    {
        let g = FiniteGroupoid::pair(2);
        let fibers: BTreeMap<usize, MatrixStarAlgebra> = g
            .units()
            .iter()
            .map(|&u| (u, MatrixStarAlgebra::full_matrix(2, &tol).unwrap()))
            .collect();
        let bundle = build_unit_bundle(&g, fibers, &tol).unwrap();
        let regular = StarRepresentation::regular(&bundle).unwrap();
        let mut reps = vec![regular.clone()];
        for block in 0..2 {
            let mut v = ComplexMatrix::zeros(8, 4);
            for i in 0..4 {
                v.set(block * 4 + i, i, c(1.0, 0.0));
            }
            reps.push(regular.compress(&v).unwrap());
        }
        run_dominance(&bundle, &reps, 330);
    }
    println!("criterion 3 (norm-equivalence dominance): PASS");
}

fn run_dominance(bundle: &FellBundle, reps: &[StarRepresentation<'_>], seed: u64) {
    for rep in reps {
        assert!(rep.validate().is_valid(), "{}", rep.validate());
    }
    let mut r = rng(seed);
    for _ in 0..100 {
        let f = Section::seeded_random(bundle, &mut r);
        for (k, rep) in reps.iter().enumerate() {
            let (pi, full) = dominance_check(rep, &f).unwrap();
            assert!(
                pi <= full + 1e-7,
                "rep {k}: ||pi(f)|| = {pi} exceeds full norm {full}"
            );
            if k == 0 {
                // the first entry is the regular representation itself
                assert!(
                    (pi - full).abs() <= 1e-9,
                    "regular rep norm {pi} differs from full norm {full}"
                );
            }
        }
    }
}

#[test]
fn criterion_04_bisection_norm_equalities() {
    // sections supported on a single bisection: full = sup to 1e-8 and
    // I-norm = sup exactly up to 1e-12
    let tol = cfg();
    let mut bundles: Vec<(String, FellBundle)> = Vec::new();
    for (name, g) in small_groupoids(6) {
        bundles.push((name, build_trivial_line_bundle(&g, &tol).unwrap()));
    }
    {
        let g = FiniteGroupoid::pair(2);
        let fibers: BTreeMap<usize, MatrixStarAlgebra> = g
            .units()
            .iter()
            .map(|&u| (u, MatrixStarAlgebra::full_matrix(2, &tol).unwrap()))
            .collect();
        bundles.push(("m2-unit".into(), build_unit_bundle(&g, fibers, &tol).unwrap()));
    }
    bundles.push(("z2-halved".into(), halved_partial_bundle(&tol)));

    let mut r = rng(400);
    for (name, bundle) in &bundles {
        let g = bundle.groupoid();
        let n = g.n_elements();
        let bisections: Vec<Vec<usize>> = (0u32..(1 << n))
            .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect::<Vec<_>>())
            .filter(|subset| g.is_bisection(subset))
            .collect();
        for _ in 0..20 {
            let f = Section::seeded_random(bundle, &mut r);
            let subset = &bisections[r.random_range(0..bisections.len())];
            let restricted = f.restrict(subset);
            let sup = restricted.sup_norm().unwrap();
            let full = restricted.full_norm().unwrap();
            let i_norm = restricted.i_norm().unwrap();
            assert!(
                (full - sup).abs() <= 1e-8,
                "{name}: full {full} vs sup {sup} on bisection {subset:?}"
            );
            assert!(
                (i_norm - sup).abs() <= 1e-12,
                "{name}: I-norm {i_norm} vs sup {sup} on bisection {subset:?}"
            );
        }
    }
    println!("criterion 4 (bisection norm equalities): PASS");
}

#[test]
fn criterion_05_unit_space_subalgebra() {
    // unit-supported sections: the full norm is the sup norm, over random
    // block fibers with blocks of dimension at most 3
    let tol = cfg();
    let mut r = rng(500);
    for trial in 0..6 {
        // a bundle with nonzero arrow fibers: the global action of Z/2 on
        // a random block algebra
        let alg = random_block_algebra(&mut r);
        let group = FiniteGroupoid::cyclic(2);
        let data = PartialActionData {
            domains: vec![alg.clone(), alg.clone()],
            maps: vec![
                ComplexMatrix::identity(alg.dim()),
                ComplexMatrix::identity(alg.dim()),
            ],
        };
        let bundle = build_partial_action_bundle(&group, &alg, &data, &tol).unwrap();
        let units: Vec<usize> = bundle.groupoid().units().to_vec();
        for _ in 0..20 {
            let f = Section::seeded_random(&bundle, &mut r).restrict(&units);
            let full = f.full_norm().unwrap();
            let sup = f.sup_norm().unwrap();
            assert!(
                (full - sup).abs() <= 1e-8,
                "trial {trial}: unit-supported full {full} vs sup {sup}"
            );
        }
    }
    println!("criterion 5 (unit-space subalgebra norm): PASS");
}

fn halved_partial_bundle(tol: &Tolerances) -> FellBundle {
    let group = FiniteGroupoid::cyclic(2);
    let alg = MatrixStarAlgebra::diagonal(2, tol).unwrap();
    let dg = MatrixStarAlgebra::new(2, vec![ComplexMatrix::matrix_unit(2, 0, 0)], tol).unwrap();
    let data = PartialActionData {
        domains: vec![alg.clone(), dg],
        maps: vec![ComplexMatrix::identity(2), ComplexMatrix::identity(1)],
    };
    build_partial_action_bundle(&group, &alg, &data, tol).unwrap()
}

#[test]
fn criterion_06_bisection_support_lemma() {
    // support containments and the norm identity for singleton-supported
    // sections, exhaustively over the small-groupoid catalog and then over
    // 100 fuzz bundles
    let tol = cfg();
    let mut r = rng(600);
    for (name, g) in small_groupoids(6) {
        let bundle = build_trivial_line_bundle(&g, &tol).unwrap();
        for gamma in 0..g.n_elements() {
            let f = Section::delta(
                &bundle,
                gamma,
                vec![c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))],
            )
            .unwrap();
            check_singleton_lemma(&name, &bundle, &f, gamma);
            for eta in 0..g.n_elements() {
                let h = Section::delta(
                    &bundle,
                    eta,
                    vec![c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))],
                )
                .unwrap();
                let prod = f.convolve(&h).unwrap();
                let allowed = g.compose_unchecked(gamma, eta);
                for s in prod.support() {
                    assert_eq!(Some(s), allowed, "{name}: supp(f*g) leaks to {s}");
                }
            }
        }
    }
    // fuzz cases
    for i in 0..100u64 {
        let case = generate_case(&mut rng(6000 + i), 8, 2);
        let bundle = build_case(&case, &tol).unwrap();
        let mut rr = rng(6100 + i);
        let f = Section::seeded_random(&bundle, &mut rr);
        let gamma = rr.random_range(0..bundle.groupoid().n_elements());
        let restricted = f.restrict(&[gamma]);
        check_singleton_lemma("fuzz", &bundle, &restricted, gamma);
    }
    println!("criterion 6 (bisection support lemma): PASS");
}

fn check_singleton_lemma(name: &str, bundle: &FellBundle, f: &Section<'_>, gamma: usize) {
    let g = bundle.groupoid();
    let f_star = f.involute().unwrap();
    for s in f_star.support() {
        assert_eq!(s, g.inverse_unchecked(gamma), "{name}: supp(f*) leaks");
    }
    let ff = f.convolve(&f_star).unwrap();
    for s in ff.support() {
        assert_eq!(s, g.range_of(gamma), "{name}: supp(f f*) leaks");
    }
    let sf = f_star.convolve(f).unwrap();
    for s in sf.support() {
        assert_eq!(s, g.source_of(gamma), "{name}: supp(f* f) leaks");
    }
    let sup = f.sup_norm().unwrap();
    let lhs = ff.sup_norm().unwrap();
    let rhs = sf.sup_norm().unwrap();
    assert!(
        (lhs - sup * sup).abs() <= 1e-9 * (1.0 + sup * sup),
        "{name}: ||f f*|| = {lhs} vs ||f||^2 = {}",
        sup * sup
    );
    assert!(
        (rhs - sup * sup).abs() <= 1e-9 * (1.0 + sup * sup),
        "{name}: ||f* f|| = {rhs} vs ||f||^2 = {}",
        sup * sup
    );
}

#[test]
fn criterion_07_linking_algebra_isomorphism() {
    // the section algebra of the linking bundle is the (p+q) x (p+q)
    // block matrix algebra: the blockwise map is a *-isomorphism and
    // matches the full norm
    let tol = cfg();
    for p in 1..=3usize {
        for q in 1..=3usize {
            let a = MatrixStarAlgebra::full_matrix(p, &tol).unwrap();
            let b_alg = MatrixStarAlgebra::full_matrix(q, &tol).unwrap();
            let x_basis = full_rectangular_basis(p, q);
            let bundle = build_linking_bundle(&a, &b_alg, x_basis.clone(), &tol).unwrap();

            let phi = |f: &Section<'_>| -> ComplexMatrix {
                let n = p + q;
                let mut m = ComplexMatrix::zeros(n, n);
                m.write_block(0, 0, &a.realize(f.value(0)));
                let mut x = ComplexMatrix::zeros(p, q);
                for (k, basis) in x_basis.iter().enumerate() {
                    x = x.add(&basis.scale(f.value(1)[k]));
                }
                m.write_block(0, p, &x);
                let mut xs = ComplexMatrix::zeros(q, p);
                for (k, basis) in x_basis.iter().enumerate() {
                    xs = xs.add(&basis.adjoint().scale(f.value(2)[k]));
                }
                m.write_block(p, 0, &xs);
                m.write_block(p, p, &b_alg.realize(f.value(3)));
                m
            };

            // *-isomorphism on the canonical basis
            let mut basis_sections = Vec::new();
            for gamma in 0..4 {
                for i in 0..bundle.fiber_dim(gamma) {
                    basis_sections.push(Section::basis_section(&bundle, gamma, i));
                }
            }
            assert_eq!(basis_sections.len(), (p + q) * (p + q));
            for f in &basis_sections {
                let defect = phi(&f.involute().unwrap())
                    .sub(&phi(f).adjoint())
                    .frobenius_norm();
                assert!(defect <= 1e-9, "p={p},q={q}: involutivity defect {defect}");
                for h in &basis_sections {
                    let lhs = phi(&f.convolve(h).unwrap());
                    let rhs = phi(f).mul(&phi(h));
                    let defect = lhs.sub(&rhs).frobenius_norm();
                    assert!(defect <= 1e-9, "p={p},q={q}: multiplicativity defect {defect}");
                }
            }
            // bijectivity on the basis: the block images are linearly
            // independent and count (p+q)^2
            let images: Vec<Vec<Complex64>> = basis_sections
                .iter()
                .map(|f| phi(f).entries().to_vec())
                .collect();
            let rank = fellconv::matalg::rank_of_vectors(&images, 1e-9, &tol).unwrap();
            assert_eq!(rank, (p + q) * (p + q), "p={p},q={q}: blockwise map not bijective");

            // norm agreement on seeded sections
            let mut r = rng(700 + (p * 10 + q) as u64);
            for _ in 0..20 {
                let f = Section::seeded_random(&bundle, &mut r);
                let want = operator_norm(&phi(&f), &tol).unwrap();
                let got = f.full_norm().unwrap();
                assert!(
                    (got - want).abs() <= 1e-8,
                    "p={p},q={q}: full norm {got} vs block-matrix oracle {want}"
                );
            }
        }
    }
    println!("criterion 7 (linking-algebra isomorphism): PASS");
}

#[test]
fn criterion_08_partial_action_norm_formula() {
    // Z/2 with domain C (+) 0: the section algebra is C^3 and the norm is
    // max(|f(e)_q|, |f(e)_p + f(g)|, |f(e)_p - f(g)|)
    let tol = cfg();
    let bundle = halved_partial_bundle(&tol);
    assert_eq!(bundle.total_dim(), 3);
    let mut r = rng(800);
    for _ in 0..100 {
        let f = Section::seeded_random(&bundle, &mut r);
        let p_coord = f.value(0)[0];
        let q_coord = f.value(0)[1];
        let g_coord = f.value(1)[0];
        let want = (q_coord.norm())
            .max((p_coord + g_coord).norm())
            .max((p_coord - g_coord).norm());
        let got = f.full_norm().unwrap();
        assert!(
            (got - want).abs() <= 1e-10,
            "full norm {got} vs C^3 oracle {want}"
        );
    }
    println!("criterion 8 (partial-action norm formula): PASS");
}

#[test]
fn criterion_09_unit_bundle_direct_sum() {
    // the section algebra of a unit bundle is the direct sum of the unit
    // fibers: the full norm is the largest fiber norm over units
    let tol = cfg();
    let mut r = rng(900);
    for n in [2usize, 3] {
        let g = FiniteGroupoid::pair(n);
        let fibers: BTreeMap<usize, MatrixStarAlgebra> = g
            .units()
            .iter()
            .map(|&u| (u, random_block_algebra(&mut r)))
            .collect();
        let bundle = build_unit_bundle(&g, fibers.clone(), &tol).unwrap();
        for _ in 0..50 {
            let f = Section::seeded_random(&bundle, &mut r);
            let mut want = 0.0f64;
            for (&u, alg) in &fibers {
                want = want.max(operator_norm(&alg.realize(f.value(u)), &tol).unwrap());
            }
            let got = f.full_norm().unwrap();
            assert!(
                (got - want).abs() <= 1e-9,
                "n={n}: full norm {got} vs blockwise oracle {want}"
            );
        }
    }
    println!("criterion 9 (unit bundle direct sum): PASS");
}

#[test]
fn criterion_10_pre_representation_round_trip() {
    let tol = cfg();
    let bundles: Vec<(String, FellBundle)> = vec![
        (
            "z3-line".into(),
            build_trivial_line_bundle(&FiniteGroupoid::cyclic(3), &tol).unwrap(),
        ),
        (
            "pair2-line".into(),
            build_trivial_line_bundle(&FiniteGroupoid::pair(2), &tol).unwrap(),
        ),
        ("z2-halved".into(), halved_partial_bundle(&tol)),
    ];
    for (name, bundle) in &bundles {
        let regular = StarRepresentation::regular(bundle).unwrap();

        // restriction with H_0 the full space
        let pre = PreRepresentation::from_representation(&regular);
        let ext = extend_pre_representation(&pre, bundle).unwrap();
        for (key, m) in regular.images() {
            let defect = ext.image(key.0, key.1).sub(m).frobenius_norm();
            assert!(defect <= 1e-9, "{name}: identity round trip deviates by {defect}");
        }

        // restriction to the subspace spanned by the images of the unit
        // section: the actions are the canonical convolution matrices
        let rep = bundle.regular_rep().unwrap();
        let w = rep.orthonormalizer();
        let winv = rep.orthonormalizer_inverse();
        let dim = rep.hilbert_dim();
        let h0_basis: Vec<Vec<Complex64>> = (0..dim)
            .map(|t| (0..dim).map(|r_| w.get(r_, t)).collect())
            .collect();
        let action: BTreeMap<(usize, usize), ComplexMatrix> = regular
            .images()
            .iter()
            .map(|(key, m)| (*key, winv.mul(m).mul(w)))
            .collect();
        let pre = PreRepresentation::new(bundle, dim, h0_basis, action).unwrap();
        assert!(pre.validate().is_valid(), "{name}: {}", pre.validate());
        let ext = extend_pre_representation(&pre, bundle).unwrap();
        for (key, m) in regular.images() {
            let defect = ext.image(key.0, key.1).sub(m).frobenius_norm();
            assert!(
                defect <= 1e-9,
                "{name}: generated-subspace round trip deviates by {defect}"
            );
        }

        // a mutation that breaks adjointability (and nothing else) is
        // rejected: conjugate the whole action by a non-unitary map, which
        // preserves the homomorphism property exactly
        let mut broken = PreRepresentation::from_representation(&regular);
        let mut s = ComplexMatrix::identity(dim);
        let mut s_inv = ComplexMatrix::identity(dim);
        s.set(0, 0, c(2.0, 0.0));
        s_inv.set(0, 0, c(0.5, 0.0));
        for m in broken.action_mut().values_mut() {
            *m = s_inv.mul(m).mul(&s);
        }
        let report = broken.validate();
        assert!(
            report.violations.iter().any(|v| v.contains("adjointability")),
            "{name}: expected an adjointability violation, got {report}"
        );
        let err = extend_pre_representation(&broken, bundle).unwrap_err();
        assert!(
            matches!(err, RepError::InvalidPreRepresentation { .. }),
            "{name}: expected rejection, got {err:?}"
        );
    }
    println!("criterion 10 (pre-representation round trip): PASS");
}

#[test]
fn criterion_11_axiom_checker_sensitivity() {
    let tol = cfg();
    let line2 = build_trivial_line_bundle(&FiniteGroupoid::pair(2), &tol).unwrap();
    let z2_line = build_trivial_line_bundle(&FiniteGroupoid::cyclic(2), &tol).unwrap();
    let m2_unit = {
        let g = FiniteGroupoid::pair(2);
        let fibers: BTreeMap<usize, MatrixStarAlgebra> = g
            .units()
            .iter()
            .map(|&u| (u, MatrixStarAlgebra::full_matrix(2, &tol).unwrap()))
            .collect();
        build_unit_bundle(&g, fibers, &tol).unwrap()
    };

    let mutations: Vec<(usize, FellBundle)> = vec![
        // 1: a tensor registered for the non-composable pair (0,1)(0,1)
        (1, {
            let mut parts = line2.parts();
            parts.mult.insert((1, 1), MultTensor::zero(1, 1, 1));
            FellBundle::from_parts(parts)
        }),
        // 2: a tensor with the wrong input arity
        (2, {
            let mut parts = line2.parts();
            parts.mult.insert((0, 1), MultTensor::zero(2, 1, 1));
            FellBundle::from_parts(parts)
        }),
        // 3: an associativity-breaking coefficient perturbation
        (3, {
            let mut parts = line2.parts();
            let t = parts.mult.get_mut(&(1, 2)).unwrap();
            t.set(0, 0, 0, c(1.0 + 1e-3, 0.0));
            FellBundle::from_parts(parts)
        }),
        // 4: one product scaled beyond the norm bound
        (4, {
            let mut parts = line2.parts();
            let t = parts.mult.get_mut(&(0, 1)).unwrap();
            *t = t.scale(c(2.0, 0.0));
            FellBundle::from_parts(parts)
        }),
        // 5: an involution landing in the wrong fiber dimension
        (5, {
            let mut parts = line2.parts();
            parts.star.insert(1, ComplexMatrix::zeros(2, 1));
            FellBundle::from_parts(parts)
        }),
        // 6: an involution with the wrong input dimension
        (6, {
            let mut parts = line2.parts();
            parts.star.insert(1, ComplexMatrix::zeros(1, 2));
            FellBundle::from_parts(parts)
        }),
        // 7: a negated involution
        (7, {
            let mut parts = line2.parts();
            let s = parts.star.get_mut(&1).unwrap();
            *s = s.scale(c(-1.0, 0.0));
            FellBundle::from_parts(parts)
        }),
        // 8: entrywise conjugation instead of conjugate transpose on a
        // 2x2 unit fiber ((a*)* = a still holds)
        (8, {
            let mut parts = m2_unit.parts();
            parts.star.insert(0, ComplexMatrix::identity(4));
            FellBundle::from_parts(parts)
        }),
        // 9: the whole multiplication scaled by 2
        (9, {
            let mut parts = z2_line.parts();
            for (_, t) in parts.mult.iter_mut() {
                *t = t.scale(c(2.0, 0.0));
            }
            FellBundle::from_parts(parts)
        }),
        // 10: a negated unit-fiber product, killing positivity
        (10, {
            let mut parts = line2.parts();
            let t = parts.mult.get_mut(&(0, 0)).unwrap();
            *t = t.scale(c(-1.0, 0.0));
            FellBundle::from_parts(parts)
        }),
    ];

    for (axiom, bundle) in &mutations {
        let report = bundle.check_axioms(1e-9, 50, 0);
        assert!(
            report.failed_axioms().contains(axiom),
            "mutation for axiom {axiom} not detected; report:\n{report}"
        );
    }
    // the axiom-8 mutation must not masquerade as an involutivity failure
    let report = mutations[7].1.check_axioms(1e-9, 50, 0);
    assert!(!report.failed_axioms().contains(&7));
    println!("criterion 11 (axiom-checker sensitivity): PASS");
}

#[test]
fn criterion_12_cstar_identity_over_fuzz_corpus() {
    let tol = cfg();
    for i in 0..200u64 {
        let case = generate_case(&mut rng(i), 10, 2);
        let bundle = build_case(&case, &tol).unwrap();
        let mut r = rng(12_000 + i);
        let f = Section::seeded_random(&bundle, &mut r);
        let full = f.full_norm().unwrap();
        let ff = f.involute().unwrap().convolve(&f).unwrap();
        let nn = ff.full_norm().unwrap();
        assert!(
            (nn - full * full).abs() <= 1e-7 * (1.0 + full * full),
            "case {i}: ||f* f|| = {nn} vs ||f||^2 = {}",
            full * full
        );
    }
    println!("criterion 12 (C*-identity over the fuzz corpus): PASS");
}
