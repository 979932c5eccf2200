mod common;

use bellpoly_core::arith::{int_rank, Rat};
use bellpoly_core::families::{ln_scenario, make, saturating_groups, verify_theorem4, FamilyId, Reference};
use bellpoly_core::inequality::{canonicalize, canonicalize_with, cg_to_full, full_to_cg, lift, LiftMap, SymmetryGroup};
use bellpoly_core::polytope::check_facet;
use bellpoly_core::scenario::{Behavior, CgVector, DeterministicStrategy, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn fm_matches_vertex_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut compared, mut drawn) = (0, 0);
    while compared < 200 {
        drawn += 1;
        if common::oracle_case(&mut rng).unwrap() {
            compared += 1;
        }
    }
    // systems whose vertex denominators overflow the integer enumeration are redrawn
    assert!(drawn < 300, "{drawn} draws for 200 comparisons");
}

#[test]
fn membership_answers_reverify() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let scenarios = [Scenario::bipartite(&[2, 2], &[2, 2]), Scenario::bipartite(&[2, 2], &[3, 2]), Scenario::bipartite(&[2, 3], &[2, 2])];
    let (mut local, mut nonlocal) = (0, 0);
    for k in 0..60 {
        let s = &scenarios[k % scenarios.len()];
        let b = common::random_behavior(&mut rng, s);
        if common::check_membership(&b).unwrap() {
            local += 1;
        } else {
            nonlocal += 1;
        }
    }
    assert!(local > 0 && nonlocal > 0, "{local} local, {nonlocal} nonlocal");
}

#[test]
fn canonical_form_is_invariant_under_random_relabelings() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let scenarios = [
        Scenario::bipartite(&[2, 2], &[2, 2]),
        Scenario::bipartite(&[2, 3], &[2, 2, 2]),
        Scenario::bipartite(&[3, 3], &[3, 3]),
        Scenario::from_slices(&[&[2, 2], &[2, 2], &[2, 2]]),
    ];
    let groups: Vec<SymmetryGroup> = scenarios.iter().map(|s| SymmetryGroup::new(s, usize::MAX).unwrap()).collect();
    for k in 0..200 {
        let (s, g) = (&scenarios[k % 4], &groups[k % 4]);
        let i = common::random_inequality(&mut rng, s);
        let r = common::random_relabeling(&mut rng, s);
        let moved = i.relabeled(&r).unwrap();
        let (a, b) = (canonicalize_with(g, &i).unwrap(), canonicalize_with(g, &moved).unwrap());
        assert!(a.same_as(&b), "{i} vs {moved}");
        // the representative is the smallest image
        assert!(a.normal_form() <= moved.normal_form());
        assert_eq!(moved.local_max(), i.local_max());
    }
}

#[test]
fn fine_lemma_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for s in [Scenario::bipartite(&[2, 2], &[2, 2]), Scenario::bipartite(&[2, 2], &[3, 2])] {
        for _ in 0..500 {
            common::fine_lemma_case(&mut rng, &s).unwrap();
        }
    }
}

#[test]
fn cg_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for s in [Scenario::bipartite(&[2, 3], &[3, 2]), Scenario::from_slices(&[&[2, 2], &[3], &[2, 2]])] {
        for _ in 0..20 {
            let b = common::random_behavior(&mut rng, &s);
            let cg = b.to_cg();
            assert_eq!(cg.to_behavior(), b);
            assert_eq!(CgVector::new(s.clone(), cg.coords().to_vec()).unwrap(), cg);
            // functionals agree in both coordinate systems
            let coeffs: Vec<i64> = (0..s.cg_len()).map(|_| rng.gen_range(-3..=3)).collect();
            let full = cg_to_full(&s, &coeffs);
            let (back, constant) = full_to_cg(&s, &full).unwrap();
            assert_eq!((back, constant), (coeffs.clone(), 0));
            let via_full: Rat = full.iter().zip(b.table()).map(|(&f, p)| &Rat::from_int(f) * p).sum();
            let via_cg: Rat = coeffs.iter().zip(cg.coords()).map(|(&c, p)| &Rat::from_int(c) * p).sum();
            assert_eq!(via_full, via_cg);
        }
    }
}

/// `P(a b | x y)` with 1-based labels at a deterministic point.
fn p(st: &DeterministicStrategy, a: usize, b: usize, x: usize, y: usize) -> i64 {
    (st.choices[0][x - 1] == a - 1 && st.choices[1][y - 1] == b - 1) as i64
}

#[test]
fn ineq2_bound_by_two_cases() {
    for n in 2..=6 {
        let i = make(&FamilyId::Ineq2 { n }).unwrap();
        let s = ln_scenario(n);
        let vertices = DeterministicStrategy::enumerate(&s);
        assert_eq!(vertices.len(), 2 * n * (1 << n));
        for v in &vertices {
            // the inequality reads expr >= 0, stored as -expr <= 0
            let expr = -i.evaluate_strategy(v);
            let case = if v.choices[0][0] == 0 {
                1 - (1..=n).map(|k| p(v, k, 1, 2, k)).sum::<i64>()
            } else {
                let pb = |k: usize| (v.choices[1][k - 1] == 0) as i64;
                (1..n).map(|k| pb(k) - p(v, k, 1, 2, k) + p(v, k, 1, 2, n)).sum::<i64>()
            };
            assert_eq!(expr, case, "n={n} {v:?}");
            assert!(expr >= 0);
        }
    }
}

#[test]
fn ineq2_certificates() {
    for n in 2..=6 {
        let cert = verify_theorem4(n).unwrap();
        assert_eq!(cert.saturating_vertices.len(), n * (n + 2));
        assert_eq!(cert.affine_rank(), n * (n + 2));
        assert!(cert.verify());
    }
    let i3 = make(&FamilyId::Ineq2 { n: 3 }).unwrap();
    assert_eq!(check_facet(&ln_scenario(3), &i3).unwrap().affine_rank(), 15);
}

#[test]
fn ineq2_points_are_triangular() {
    for n in 2..=6 {
        let [g1, g2, g3, g4] = saturating_groups(n).unwrap();
        // the private coordinate of each point, in insertion order
        let mut ordered: Vec<(DeterministicStrategy, [usize; 4])> = Vec::new();
        ordered.extend(g1.iter().map(|v| (v.clone(), [v.choices[0][1] + 1, 1, 2, 1])));
        for v in &g2 {
            let (k, l) = (v.choices[0][1] + 1, v.choices[1].iter().position(|&b| b == 1).unwrap() + 1);
            ordered.push((v.clone(), [k, 2, 2, l]));
        }
        ordered.extend(g3.iter().map(|v| (v.clone(), [v.choices[0][1] + 1, 2, 2, v.choices[0][1] + 1])));
        ordered.extend(g4.iter().map(|v| (v.clone(), [2, 1, 1, v.choices[1].iter().position(|&b| b == 0).unwrap() + 1])));
        for (t, (v, [a, b, x, y])) in ordered.iter().enumerate() {
            assert_eq!(p(v, *a, *b, *x, *y), 1, "n={n} {v:?}");
            for (w, _) in &ordered[..t] {
                assert_eq!(p(w, *a, *b, *x, *y), 0, "n={n} {v:?} after {w:?}");
            }
        }
        // hence linearly independent as full probability tables
        let s = ln_scenario(n);
        let rows: Vec<Vec<i64>> = ordered
            .iter()
            .map(|(v, _)| Behavior::deterministic(&s, v).table().iter().map(|r| r.to_i64().unwrap()).collect())
            .collect();
        assert_eq!(int_rank(&rows), n * (n + 2));
    }
}

#[test]
fn reference_classes_are_distinct() {
    let chsh = canonicalize(&make(&FamilyId::Chsh).unwrap()).unwrap();
    let cglmp = make(&FamilyId::Reference { name: Reference::Cglmp }).unwrap();
    let froissart = make(&FamilyId::Reference { name: Reference::Froissart }).unwrap();
    for (i, s) in [(&cglmp, Scenario::bipartite(&[3, 3], &[3, 3])), (&froissart, Scenario::bipartite(&[2, 2, 2], &[2, 2, 2]))] {
        let lifted = canonicalize(&lift(&make(&FamilyId::Chsh).unwrap(), &LiftMap::embedding(chsh.scenario(), &s).unwrap()).unwrap()).unwrap();
        assert!(!canonicalize(i).unwrap().same_as(&lifted));
        assert!(check_facet(&s, i).is_ok());
    }
    assert_ne!(cglmp.scenario(), froissart.scenario());
}

#[test]
fn lifts_of_facets_are_facets() {
    let chsh = make(&FamilyId::Chsh).unwrap();
    let new3 = make(&FamilyId::NewIneq3).unwrap();
    for (i, t) in [
        (&chsh, Scenario::bipartite(&[2, 3], &[3, 2])),
        (&chsh, Scenario::bipartite(&[3, 2], &[2, 2, 2])),
        (&chsh, Scenario::from_slices(&[&[2, 2], &[2, 2], &[2]])),
        (&new3, Scenario::bipartite(&[2, 3], &[2, 2, 3])),
    ] {
        let lifted = lift(i, &LiftMap::embedding(i.scenario(), &t).unwrap()).unwrap();
        assert_eq!(lifted.local_max(), lifted.bound());
        check_facet(&t, &lifted).unwrap_or_else(|e| panic!("{t}: {e}"));
    }
}

#[test]
fn relabeled_inequalities_keep_their_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let s = Scenario::bipartite(&[2, 3], &[3, 2]);
    for _ in 0..40 {
        let i = common::random_inequality(&mut rng, &s);
        let r = common::random_relabeling(&mut rng, &s);
        let b = common::random_behavior(&mut rng, &s);
        let moved = i.relabeled(&r).unwrap();
        assert_eq!(moved.evaluate(&r.apply_behavior(&b).unwrap()).unwrap(), i.evaluate(&b).unwrap());
    }
}
