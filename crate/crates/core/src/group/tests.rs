use super::*;
use crate::arith::{mul_mod, pow_mod};
use crate::phase::character_eval;

fn z7() -> SemidirectGroup {
    SemidirectGroup::metacyclic(7, 3, 2).unwrap()
}

fn e(v: &[u64]) -> Elem {
    Elem(v.to_vec())
}

fn ge(a: &[u64], b: u64) -> GroupElement {
    GroupElement::new(e(a), b)
}

/// Groups with |G| <= 200 used for exhaustive checks.
fn small_groups() -> Vec<SemidirectGroup> {
    vec![
        z7(),
        SemidirectGroup::metacyclic(9, 3, 4).unwrap(),
        SemidirectGroup::metacyclic(4, 2, 3).unwrap(),
        SemidirectGroup::metacyclic(13, 3, 3).unwrap(),
        SemidirectGroup::heisenberg(3).unwrap(),
        SemidirectGroup::heisenberg(5).unwrap(),
        SemidirectGroup::jordan(2, &[2]).unwrap(),
        SemidirectGroup::jordan(3, &[3]).unwrap(),
        SemidirectGroup::jordan(3, &[2, 1]).unwrap(),
        // a non-canonical mu similar to the Heisenberg block
        SemidirectGroup::with_matrix(3, &[vec![2, 1], vec![2, 0]]).unwrap(),
    ]
}

#[test]
fn element_mul_examples() {
    let g = z7();
    assert_eq!(g.mul(&ge(&[1], 1), &ge(&[1], 0)), ge(&[3], 1));
    for x in g.elements() {
        assert_eq!(g.mul(&x, &g.identity()), x);
    }
}

#[test]
fn heisenberg_mul_applies_transposed_mu() {
    let g = SemidirectGroup::heisenberg(3).unwrap();
    // phi = mu^T = [[1,0],[1,1]]; naive application, b times
    let naive_phi = |b: u64, v: &[u64]| {
        let mut v = v.to_vec();
        for _ in 0..b {
            v = vec![v[0] % 3, (v[0] + v[1]) % 3];
        }
        v
    };
    for x in g.elements() {
        for y in g.elements() {
            let pa = naive_phi(x.b, y.a.coords());
            let expect = ge(&[(x.a.0[0] + pa[0]) % 3, (x.a.0[1] + pa[1]) % 3], (x.b + y.b) % 3);
            assert_eq!(g.mul(&x, &y), expect);
        }
    }
    assert_eq!(g.mul(&ge(&[1, 0], 1), &ge(&[0, 1], 1)), ge(&[1, 1], 2));
}

#[test]
fn inverse_matches_exhaustive_search() {
    let g = z7();
    let x = ge(&[1], 1);
    let found: Vec<GroupElement> = g.elements().filter(|y| g.mul(&x, y) == g.identity()).collect();
    assert_eq!(found, vec![g.inv(&x)]);
    assert_eq!(g.inv(&g.identity()), g.identity());
    let h = SemidirectGroup::heisenberg(3).unwrap();
    for x in h.elements() {
        assert_eq!(h.inv(&h.inv(&x)), x);
    }
}

#[test]
fn group_axioms_exhaustive() {
    for g in small_groups() {
        assert!(g.order() <= 200);
        let els: Vec<GroupElement> = g.elements().collect();
        let id = g.identity();
        for x in &els {
            assert!(g.contains(x));
            assert_eq!(g.mul(&id, x), *x);
            assert_eq!(g.mul(x, &id), *x);
            let xi = g.inv(x);
            assert_eq!(g.mul(x, &xi), id, "{g}: right inverse of {x}");
            assert_eq!(g.mul(&xi, x), id, "{g}: left inverse of {x}");
            for y in &els {
                let xy = g.mul(x, y);
                for z in &els {
                    assert_eq!(g.mul(&xy, z), g.mul(x, &g.mul(y, z)), "{g}");
                }
            }
        }
        // the identity is unique
        let ids = els.iter().filter(|x| els.iter().all(|y| g.mul(x, y) == *y)).count();
        assert_eq!(ids, 1);
    }
}

#[test]
fn phi_sum_examples() {
    let g = z7();
    assert_eq!(g.phi_sum(0, &e(&[5])), e(&[0]));
    assert_eq!(g.phi_sum(2, &e(&[1])), e(&[3]));
    let h = SemidirectGroup::heisenberg(5).unwrap();
    for d in h.abelian().elements() {
        // oracle: iterate the group law p times
        let mut acc = h.identity();
        for _ in 0..5 {
            acc = h.mul(&acc, &GroupElement::new(d.clone(), 1));
        }
        assert_eq!(acc, h.identity());
        assert!(h.phi_sum(5, &d).is_zero());
    }
}

#[test]
fn phi_sum_is_the_power_law() {
    for g in small_groups() {
        for d in g.abelian().elements() {
            let gen = GroupElement::new(d.clone(), 1);
            let mut acc = g.identity();
            for b in 0..=2 * g.p() {
                assert_eq!(acc, GroupElement::new(g.phi_sum(b, &d), b % g.p()));
                acc = g.mul(&acc, &gen);
            }
        }
    }
}

#[test]
fn cocycle_identity() {
    for g in small_groups() {
        let p = g.p();
        for a in g.abelian().elements() {
            for b in 0..=p {
                for c in 0..=p - b {
                    let lhs = g.phi_sum(b + c, &a);
                    let rhs = g.abelian().add(&g.phi_sum(b, &a), &g.phi_pow(b, &g.phi_sum(c, &a)));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

#[test]
fn matrix_sum_examples() {
    let g = z7();
    assert!(g.matrix_sum(0).is_zero());
    assert_eq!(g.matrix_sum(2).as_scalar(), Some(3));
    for p in [3u64, 5, 7, 11, 13] {
        let h = SemidirectGroup::heisenberg(p).unwrap();
        let table = h.matrix_sum_table(p + 1);
        for b in 0..=p {
            let closed = heisenberg_matrix_sum(p, b);
            assert_eq!(h.matrix_sum(b).as_matrix(), Some(&closed));
            assert_eq!(table[b as usize].as_matrix(), Some(&closed));
        }
    }
}

#[test]
fn jordan_matrix_sums_are_binomial() {
    for (p, blocks) in [(3u64, vec![2]), (5, vec![3]), (5, vec![2, 2]), (7, vec![3, 1]), (7, vec![4])] {
        let g = SemidirectGroup::jordan(p, &blocks).unwrap();
        let table = g.matrix_sum_table(p + 1);
        for b in 0..=p {
            let binom = binomial_matrix_sum(p, &blocks, b);
            assert_eq!(table[b as usize].as_matrix(), Some(&binom));
            assert_eq!(g.matrix_sum(b).as_matrix(), Some(&binom));
        }
        // M^(0) = M^(p) = 0 when every block is shorter than p
        assert!(g.matrix_sum(p).is_zero());
    }
}

#[test]
fn matrix_sum_doubling_identity() {
    // 311 is prime and 31 | 310, so root^10 has order 31
    let root = (2..311u64).find(|&g| (1..310).all(|e| 310 % e != 0 || e == 310 || pow_mod(g, e, 311) != 1)).unwrap();
    let groups = vec![
        SemidirectGroup::metacyclic(311, 31, pow_mod(root, 10, 311)).unwrap(),
        SemidirectGroup::heisenberg(31).unwrap(),
        SemidirectGroup::jordan(31, &[3, 2]).unwrap(),
        SemidirectGroup::metacyclic(9, 3, 4).unwrap(),
        z7(),
    ];
    for g in groups {
        let table = g.matrix_sum_table(2 * g.p());
        for b in 0..g.p() {
            let mb = g.matrix_sum(b);
            let lhs = &table[2 * b as usize];
            let rhs = g.mu().pow(b).add(&g.mu().identity_like()).compose(&mb);
            assert_eq!(*lhs, rhs, "{g} b={b}");
            assert_eq!(table[b as usize], mb);
        }
    }
}

#[test]
fn conjugate_matrix_sum_identity() {
    let g = z7();
    for b in 0..3 {
        assert_eq!(g.conjugate_matrix_sum(b).unwrap(), g.matrix_sum(b));
    }
    assert!(g.conjugate_matrix_sum(0).unwrap().is_zero());

    let mut groups = small_groups();
    groups.push(SemidirectGroup::heisenberg(11).unwrap());
    groups.push(SemidirectGroup::metacyclic(50, 5, 11).unwrap());
    for g in groups {
        let a = g.abelian();
        assert!(a.order() <= 121);
        for b in 0..g.p() {
            let conj = g.conjugate_matrix_sum(b).unwrap();
            for d in a.elements() {
                let pd = g.phi_sum(b, &d);
                for x in a.elements() {
                    let hx = Elem(conj.apply(x.coords()));
                    assert_eq!(character_eval(a, &x, &pd), character_eval(a, &hx, &d), "{g}");
                }
            }
        }
    }
}

#[test]
fn character_bilinear_and_symmetric() {
    let specs = [
        AbelianGroupSpec::CyclicZN { n: 7 },
        AbelianGroupSpec::CyclicZN { n: 12 },
        AbelianGroupSpec::CyclicZN { n: 50 },
        AbelianGroupSpec::VectorZpR { p: 11, r: 2 },
        AbelianGroupSpec::VectorZpR { p: 3, r: 3 },
        AbelianGroupSpec::VectorZpR { p: 2, r: 4 },
    ];
    for a in specs {
        assert!(a.order() <= 121);
        let els: Vec<Elem> = a.elements().collect();
        for x in &els {
            for y in &els {
                let cxy = character_eval(&a, x, y);
                assert_eq!(cxy, character_eval(&a, y, x));
                for y2 in &els {
                    let sum = a.add(y, y2);
                    assert_eq!(character_eval(&a, x, &sum), cxy * character_eval(&a, x, y2));
                    // chi_x chi_x' = chi_{x+x'}
                    let xs = a.add(x, y2);
                    assert_eq!(character_eval(&a, &xs, y), cxy * character_eval(&a, y2, y));
                }
            }
        }
    }
}

#[test]
fn subgroup_orders() {
    for g in small_groups() {
        assert_eq!(g.subgroup_order(&g.abelian().zero()), g.p());
    }
    let h = SemidirectGroup::heisenberg(3).unwrap();
    assert!(h.abelian().elements().all(|d| h.subgroup_order(&d) == 3));
    let g = SemidirectGroup::metacyclic(9, 3, 4).unwrap();
    assert_eq!(mul_mod(1 + 4 + 16, 1, 9), 3);
    // oracle: smallest n with (1,1)^n = identity, via square-and-multiply powers
    let gen = ge(&[1], 1);
    let n = (1..=g.order()).find(|&n| g.pow(&gen, n) == g.identity()).unwrap();
    assert_eq!(n, 9);
    assert_eq!(g.subgroup_order(&e(&[1])), 9);
    assert_eq!(g.subgroup_order(&e(&[3])), 3);
}

#[test]
fn jordan_partition_of_raw_mu() {
    let g = SemidirectGroup::with_matrix(3, &[vec![2, 1], vec![2, 0]]).unwrap();
    assert_eq!(g.jordan_blocks(), None);
    assert_eq!(g.jordan_partition(), Some(vec![2]));
    assert!(g.jordan_canonical().unwrap().is_heisenberg());
    let j = SemidirectGroup::jordan(5, &[1, 3, 1]).unwrap();
    assert_eq!(j.jordan_blocks(), Some(vec![1, 3, 1]));
    assert_eq!(j.jordan_partition(), Some(vec![3, 1, 1]));
    let id = SemidirectGroup::jordan(3, &[1, 1]).unwrap();
    assert_eq!(id.jordan_partition(), Some(vec![1, 1]));
}

#[test]
fn construction_rejects_bad_automorphisms() {
    assert!(SemidirectGroup::metacyclic(7, 3, 3).is_err()); // 3^3 = 6 mod 7
    assert!(SemidirectGroup::metacyclic(9, 3, 3).is_err()); // not a unit
    assert!(SemidirectGroup::metacyclic(7, 4, 1).is_err()); // 4 not prime
    assert!(SemidirectGroup::with_matrix(3, &[vec![1, 0], vec![0, 0]]).is_err());
    assert!(SemidirectGroup::with_matrix(5, &[vec![2, 0], vec![0, 1]]).is_err());
    // 2^5 = 2
}
