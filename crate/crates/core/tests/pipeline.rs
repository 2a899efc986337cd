use std::sync::Arc;

use pgm_hsp::group::AbelianGroupSpec;
use pgm_hsp::pgm::{build_pgm, success_probability_formula, Caps};
use pgm_hsp::pipeline::{
    abelian_hsp_solve, check_h1_normal, closure, default_trials, detect_trivial_vs_order_p, order_p_cyclic_subgroups,
    outcome_distribution, quotient_well_defined, reduce_to_cyclic, run_pgm_hsp, solve_hsp, CosetOracle, HidingFunction,
    OracleFixture, Quotient, Reduction, SubgroupDescription,
};
use pgm_hsp::{Elem, GroupElement, SemidirectGroup};

const CAP: u128 = 10_000_000;

fn oracle(g: &SemidirectGroup, hidden: SubgroupDescription) -> CosetOracle {
    CosetOracle::new(Arc::new(g.clone()), hidden)
}

fn ge(a: &[u64], b: u64) -> GroupElement {
    GroupElement::new(Elem(a.to_vec()), b)
}

/// `f` is constant on left cosets of `H` and distinct across them.
fn hides(f: &dyn HidingFunction, h: &SubgroupDescription) -> bool {
    let g = f.group();
    let members = closure(g, &h.generators);
    g.elements().all(|x| {
        g.elements().all(|y| {
            let same = members.contains(&g.index(&g.mul(&g.inv(&x), &y)));
            (f.evaluate(&x) == f.evaluate(&y)) == same
        })
    })
}

#[test]
fn fixtures_hide_their_subgroups() {
    let g = SemidirectGroup::metacyclic(7, 3, 2).unwrap();
    for hidden in [SubgroupDescription::trivial(), SubgroupDescription::cyclic(&g, &Elem(vec![2]))] {
        let f = oracle(&g, hidden.clone());
        assert!(hides(&f, &hidden));
    }
    let json = r#"{"group":"zpr p=3 r=2 mu=1,1;0,1","hidden":{"d":[1,1]},"labeling":"canonical-coset"}"#;
    let f = CosetOracle::from_fixture(&OracleFixture::from_json(json).unwrap()).unwrap();
    assert_eq!(f.hidden().order, 3);
    assert_eq!(f.hidden().d, Some(Elem(vec![1, 1])));
    let json = r#"{"group":"zn N=8 p=2 mu=1","hidden":{"generators":[[2,0]]}}"#;
    let f = CosetOracle::from_fixture(&OracleFixture::from_json(json).unwrap()).unwrap();
    assert_eq!(f.hidden().order, 4);
    assert!(OracleFixture::from_json(r#"{"group":"zn N=7 p=3 mu=2","hidden":"everything"}"#)
        .and_then(|fx| CosetOracle::from_fixture(&fx))
        .is_err());
}

#[test]
fn abelian_hsp_examples() {
    let g = SemidirectGroup::metacyclic(7, 3, 2).unwrap();
    let f = oracle(&g, SubgroupDescription::trivial());
    let h1 = abelian_hsp_solve(&f, CAP).unwrap();
    assert!(h1.is_trivial());
    assert_eq!(f.queries(), 7);

    let z8 = SemidirectGroup::metacyclic(8, 2, 1).unwrap();
    let f = oracle(&z8, SubgroupDescription::from_generators(&z8, vec![ge(&[2], 0)]));
    let h1 = abelian_hsp_solve(&f, CAP).unwrap();
    assert_eq!(h1.generators, vec![ge(&[2], 0)]);
    assert_eq!(f.queries(), 8);

    let z55 = SemidirectGroup::with_matrix(5, &[vec![1, 0], vec![0, 1]]).unwrap();
    let line = SubgroupDescription::from_generators(&z55, vec![ge(&[1, 2], 0)]);
    let f = oracle(&z55, line.clone());
    let h1 = abelian_hsp_solve(&f, CAP).unwrap();
    assert_eq!(h1.generators.len(), 1);
    assert!(h1.same_subgroup(&line, &z55));
}

#[test]
fn normality_examples() {
    let h = SemidirectGroup::heisenberg(3).unwrap();
    assert!(check_h1_normal(&SubgroupDescription::trivial(), &h).unwrap());
    let a = h.abelian();
    for gen in [[1u64, 0], [0, 1], [1, 1], [1, 2]] {
        let sub = SubgroupDescription::from_generators(&h, vec![ge(&gen, 0)]);
        // oracle: compare the phi-image of the whole line with the line
        let line: std::collections::BTreeSet<Elem> = a.span(&[Elem(gen.to_vec())]).into_iter().collect();
        let image: std::collections::BTreeSet<Elem> = line.iter().map(|e| h.phi(e)).collect();
        assert_eq!(check_h1_normal(&sub, &h).unwrap(), image == line, "{gen:?}");
    }
    let g = SemidirectGroup::metacyclic(7, 3, 2).unwrap();
    assert!(check_h1_normal(&SubgroupDescription::from_generators(&g, vec![ge(&[1], 0)]), &g).unwrap());
    assert!(check_h1_normal(&SubgroupDescription::cyclic(&g, &Elem(vec![1])), &g).is_err());
}

#[test]
fn reduction_controls_are_well_defined() {
    // A = Z_4 with trivial action, H_1 = <2>
    let z4 = SemidirectGroup::metacyclic(4, 2, 1).unwrap();
    let z22 = SemidirectGroup::with_matrix(2, &[vec![1, 0], vec![0, 1]]).unwrap();
    let cases = [
        (z4.clone(), vec![ge(&[2], 0)]),
        (z4.clone(), vec![ge(&[2], 0), ge(&[1], 1)]),
        (z22.clone(), vec![ge(&[1, 0], 0)]),
        (z22.clone(), vec![ge(&[0, 1], 0), ge(&[1, 0], 1)]),
    ];
    for (g, gens) in cases {
        let h = SubgroupDescription::from_generators(&g, gens);
        let f = oracle(&g, h.clone());
        let (reduction, summary) = reduce_to_cyclic(&f, CAP).unwrap();
        assert!(summary.h1_normal);
        let Reduction::Reduced { quotient: Some(q), .. } = reduction else { panic!("expected a quotient") };
        assert_eq!(q.group.abelian().order(), 2);
        assert!(quotient_well_defined(&f, &q));
        let sol = solve_hsp(&f, 1, Some(200), 5, Caps::default()).unwrap();
        assert!(sol.subgroup.same_subgroup(&h, &g), "{} vs {}", sol.subgroup, h);
    }
}

#[test]
fn quotients_are_well_defined_exhaustively() {
    for g in [
        SemidirectGroup::metacyclic(9, 3, 4).unwrap(),
        SemidirectGroup::metacyclic(49, 7, 8).unwrap(),
        SemidirectGroup::heisenberg(3).unwrap(),
        SemidirectGroup::jordan(3, &[2, 1]).unwrap(),
        SemidirectGroup::jordan(5, &[1, 1]).unwrap(),
    ] {
        assert!(g.order() <= 343);
        let a = g.abelian();
        for gen in a.elements().filter(|e| !e.is_zero()) {
            let h1 = SubgroupDescription::from_generators(&g, vec![GroupElement::new(gen.clone(), 0)]);
            if !check_h1_normal(&h1, &g).unwrap() {
                continue;
            }
            let Some(q) = Quotient::new(&g, std::slice::from_ref(&gen)).unwrap() else { continue };
            assert_eq!(q.group.abelian().order() * h1.order, a.order());
            // representatives are the least elements of their cosets
            for (i, r) in q.representatives.iter().enumerate() {
                assert_eq!(q.group.abelian().index(&q.project(r)), i);
                assert!(a.elements().filter(|e| q.project(e) == q.project(r)).all(|e| *r <= e));
            }
            let f = oracle(&g, h1.clone());
            if g.order() <= 200 {
                assert!(quotient_well_defined(&f, &q), "{g} H1=<{gen}>");
            }
            // phi descends to the quotient
            for e in a.elements() {
                assert_eq!(q.project(&g.phi(&e)), q.group.phi(&q.project(&e)));
            }
        }
    }
    assert!(matches!(SemidirectGroup::metacyclic(49, 7, 8).unwrap().abelian(), AbelianGroupSpec::CyclicZN { n: 49 }));
}

#[test]
fn detection_examples() {
    let g = SemidirectGroup::metacyclic(7, 3, 2).unwrap();
    let trivial = oracle(&g, SubgroupDescription::trivial());
    let cyc = oracle(&g, SubgroupDescription::cyclic(&g, &Elem(vec![2])));
    for d in 0..7 {
        assert!(!detect_trivial_vs_order_p(&trivial, &Elem(vec![d])));
        // oracle: (d,1) lies in H exactly when d = 2
        let member = closure(&g, &cyc.hidden().generators).contains(&g.index(&ge(&[d], 1)));
        assert_eq!(detect_trivial_vs_order_p(&cyc, &Elem(vec![d])), member);
        assert_eq!(member, d == 2);
    }
}

#[test]
fn outcome_distribution_matches_formula() {
    let g = SemidirectGroup::metacyclic(7, 3, 2).unwrap();
    let povm = build_pgm(&g, 1, CAP).unwrap();
    let probs = outcome_distribution(&povm, &SubgroupDescription::cyclic(&g, &Elem(vec![2]))).unwrap();
    assert!((probs[2] - 19.0 / 49.0).abs() < 1e-12);
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let h = SemidirectGroup::heisenberg(3).unwrap();
    let povm = build_pgm(&h, 2, CAP).unwrap();
    let d = Elem(vec![1, 1]);
    let probs = outcome_distribution(&povm, &SubgroupDescription::cyclic(&h, &d)).unwrap();
    let f = success_probability_formula(&h, 2, CAP, CAP).unwrap().value();
    assert!((probs[h.abelian().index(&d)] - f).abs() < 1e-12);
    assert!(f >= 2.0 / 9.0);
}

#[test]
fn end_to_end_recovers_planted_subgroups() {
    for (g, k) in
        [(SemidirectGroup::metacyclic(7, 3, 2).unwrap(), 1usize), (SemidirectGroup::heisenberg(3).unwrap(), 2)]
    {
        let subs = order_p_cyclic_subgroups(&g);
        assert!(!subs.is_empty());
        for (i, h) in subs.iter().enumerate() {
            let f = oracle(&g, h.clone());
            let sol = solve_hsp(&f, k, None, 1000 + i as u64, Caps::default()).unwrap();
            assert!(sol.subgroup.same_subgroup(h, &g), "{g}: planted {h}, got {}", sol.subgroup);
        }
        let f = oracle(&g, SubgroupDescription::trivial());
        let sol = solve_hsp(&f, k, None, 7, Caps::default()).unwrap();
        assert!(sol.subgroup.is_trivial());
        let run = sol.run.unwrap();
        assert_eq!(run.trials_run, run.trials_budget);
        assert!(run.transcript.iter().all(|t| !t.verified));
    }
}

#[test]
fn trial_examples_and_accounting() {
    let h = SemidirectGroup::heisenberg(3).unwrap();
    let f = oracle(&h, SubgroupDescription::cyclic(&h, &Elem(vec![1, 1])));
    let run = run_pgm_hsp(&f, 2, Some(20), 3, Caps::default()).unwrap();
    assert_eq!(run.subgroup.d, Some(Elem(vec![1, 1])));
    assert!(run.per_trial_success >= 2.0 / 9.0);
    let state: u64 = run.transcript.iter().map(|t| t.state_queries).sum();
    let verify: u64 = run.transcript.iter().map(|t| t.verify_queries).sum();
    assert_eq!(state, 2 * run.trials_run);
    assert_eq!(state + verify, run.queries);
    assert_eq!(run.transcript_jsonl().lines().count() as u64, run.trials_run);

    let g = SemidirectGroup::metacyclic(7, 3, 2).unwrap();
    let f = oracle(&g, SubgroupDescription::cyclic(&g, &Elem(vec![2])));
    let run = run_pgm_hsp(&f, 1, Some(50), 3, Caps::default()).unwrap();
    assert_eq!(run.subgroup.d, Some(Elem(vec![2])));
    assert!((run.per_trial_success - 19.0 / 49.0).abs() < 1e-12);

    // identical seeds give identical transcripts
    let again =
        run_pgm_hsp(&oracle(&g, SubgroupDescription::cyclic(&g, &Elem(vec![2]))), 1, Some(50), 3, Caps::default())
            .unwrap();
    assert_eq!(again.transcript, run.transcript);
    assert!(default_trials(&g, 1, Caps::default()).unwrap() >= 40);
}
