mod common;

use common::{
    all_vectors, brute_sat, group_elements, random_dims, random_instance, rng, satisfies,
};
use gcsolve::constraint::{
    mmc_to_gc, AtomicConstraint, Fallback, GcInstance, Linearization, SolveOutcome, Solver,
    DEFAULT_CAP,
};
use rand::Rng;

#[test]
fn vo_lemma_on_enumerable_frames() {
    let mut r = rng(21);
    for round in 0..120 {
        let p = [2, 3][round % 2];
        let dims = random_dims(
            &mut r,
            3,
            if p == 2 { 5 } else { 3 },
            if p == 2 { 12 } else { 7 },
        );
        let k = r.random_range(1..=4);
        let (inst, _) = random_instance(&mut r, p, dims, k, None);
        let s = Solver::new(inst.clone()).unwrap();
        let fr = s.frame();
        let vos = s.vo_sets();
        for x in all_vectors(fr.dim(), p) {
            let u = fr.perm_of_coords(&x).unwrap();
            let pointwise = satisfies(&inst, &u);
            let per_orbit = fr.orbits().iter().zip(&vos).all(|(o, vo)| {
                vo.iter()
                    .any(|v| v.as_slice() == &x[o.offset()..o.offset() + o.dim()])
            });
            assert_eq!(pointwise, per_orbit, "round {round}");
        }
    }
}

#[test]
fn linear_matches_explicit_group_for_p2_k2() {
    let mut r = rng(22);
    let mut sat = 0;
    for round in 0..500 {
        let dims = random_dims(&mut r, 6, 6, 36);
        let (inst, planted) = random_instance(&mut r, 2, dims, 2, Some(12));
        let s = Solver::new(inst.clone()).unwrap();
        assert!(s.group_dim() <= 12);
        let out = s.solve_linear().unwrap();
        assert!(
            !matches!(out, SolveOutcome::NotLinear { .. }),
            "round {round}"
        );
        assert_eq!(out.is_sat(), brute_sat(&inst), "round {round}");
        if planted.is_some() {
            assert!(out.is_sat());
        }
        if let Some(w) = out.witness() {
            sat += 1;
            assert!(s.verify(w).is_satisfied());
            assert!(satisfies(&inst, w));
            assert!(group_elements(inst.degree(), inst.gens(), 2).contains(w));
        }
    }
    assert!(sat > 100 && sat < 500, "{sat}");
}

#[test]
fn corollary_small_orbit_sets_are_linear() {
    let mut r = rng(23);
    for _ in 0..300 {
        let dims = random_dims(&mut r, 5, 5, 20);
        let k = r.random_range(1..=4);
        let (inst, _) = random_instance(&mut r, 2, dims, k, None);
        let s = Solver::new(inst).unwrap();
        let vos = s.vo_sets();
        if vos.iter().all(|v| v.len() <= 2) {
            assert!(!matches!(s.linearize(), Linearization::NotLinear { .. }));
        }
    }
}

#[test]
fn product_and_enumerate_agree() {
    let mut r = rng(24);
    let mut nonlinear = 0;
    for round in 0..300 {
        let p = [2, 3][round % 2];
        let dims = random_dims(
            &mut r,
            4,
            if p == 2 { 5 } else { 3 },
            if p == 2 { 12 } else { 7 },
        );
        let k = r.random_range(2..=4);
        let (inst, _) = random_instance(&mut r, p, dims, k, None);
        let s = Solver::new(inst.clone()).unwrap();
        let product = s.solve_product(DEFAULT_CAP).unwrap();
        let enumerate = s.solve_enumerate(DEFAULT_CAP).unwrap();
        assert_eq!(product.is_sat(), enumerate.is_sat(), "round {round}");
        for out in [&product, &enumerate] {
            if let Some(w) = out.witness() {
                assert!(s.verify(w).is_satisfied());
            }
        }
        let full = s.solve(Fallback::Product, DEFAULT_CAP).unwrap();
        assert_eq!(full.is_sat(), enumerate.is_sat());
        match s.solve_linear().unwrap() {
            SolveOutcome::NotLinear { .. } => nonlinear += 1,
            out => assert_eq!(out.is_sat(), enumerate.is_sat()),
        }
    }
    assert!(nonlinear > 0);
}

#[test]
fn normalize_is_idempotent() {
    let mut r = rng(25);
    for _ in 0..200 {
        let p = [2, 3][r.random_range(0..2)];
        let dims = random_dims(&mut r, 3, 3, 6);
        let (inst, _) = random_instance(&mut r, p, dims, 3, None);
        let n = inst.degree();
        let raw: Vec<AtomicConstraint> = (0..r.random_range(0..2 * n))
            .map(|_| {
                let a = r.random_range(0..n);
                let set: Vec<usize> = (0..r.random_range(0..n))
                    .map(|_| r.random_range(0..n))
                    .collect();
                AtomicConstraint::new(a, set)
            })
            .collect();
        let once = GcInstance::normalize(p, n, inst.gens().to_vec(), &raw).unwrap();
        let twice = GcInstance::normalize(p, n, inst.gens().to_vec(), &once.to_atoms()).unwrap();
        assert_eq!(once, twice);
        let again =
            GcInstance::normalize(p, n, inst.gens().to_vec(), &once.constrained_atoms()).unwrap();
        assert_eq!(once, again);
    }
}

#[test]
fn mmc_disjuncts_match_lex_leader_search() {
    let mut r = rng(26);
    for _ in 0..150 {
        let p = [2, 3][r.random_range(0..2)];
        let dims = random_dims(&mut r, 3, 3, if p == 2 { 8 } else { 5 });
        let (inst, _) = random_instance(&mut r, p, dims, 2, None);
        let n = inst.degree();
        let model: Vec<u8> = (0..n).map(|_| r.random_range(0..3)).collect();
        let elems = group_elements(n, inst.gens(), p);
        let smaller = elems.iter().any(|g| {
            let moved: Vec<u8> = (0..n).map(|a| model[g.apply(a)]).collect();
            moved < model
        });
        let disjuncts = mmc_to_gc(&model, p, inst.gens()).unwrap();
        let any = disjuncts.into_iter().any(|d| {
            Solver::new(d)
                .unwrap()
                .solve_enumerate(DEFAULT_CAP)
                .unwrap()
                .is_sat()
        });
        assert_eq!(any, smaller);
    }
}
