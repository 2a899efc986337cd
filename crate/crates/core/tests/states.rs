use num_complex::Complex64;
use pgm_hsp::linalg::{self, CMatrix, CVector};
use pgm_hsp::states::{
    coset_density, coset_state, ensemble_sigma, fourier_conjugate, fourier_coset_state, hidden_subgroup_state_k,
    tensor_power, BlockBasis, BlockDecomposition, DensityMatrix,
};
use pgm_hsp::{Elem, Error, GroupElement, SemidirectGroup};

const CAP: u128 = 10_000_000;

fn groups() -> Vec<SemidirectGroup> {
    vec![
        SemidirectGroup::metacyclic(7, 3, 2).unwrap(),
        SemidirectGroup::heisenberg(3).unwrap(),
        SemidirectGroup::metacyclic(13, 3, 3).unwrap(),
        SemidirectGroup::jordan(3, &[3]).unwrap(),
        SemidirectGroup::heisenberg(5).unwrap(),
    ]
}

/// Left coset `(l,0) <(d,1)>` by repeated multiplication.
fn coset_by_mul(g: &SemidirectGroup, l: &Elem, d: &Elem) -> Vec<usize> {
    let gen = GroupElement::new(d.clone(), 1);
    let start = GroupElement::new(l.clone(), 0);
    let mut out: Vec<usize> = (0..g.p()).map(|b| g.index(&g.mul(&start, &g.pow(&gen, b)))).collect();
    out.sort();
    out
}

/// `rho_d` from explicit cosets, without `phi_sum`.
fn oracle_rho(g: &SemidirectGroup, d: &Elem) -> CMatrix {
    let n = g.order() as usize;
    let mut m = CMatrix::zeros(n, n);
    for l in g.abelian().elements() {
        let mut v = CVector::zeros(n);
        for i in coset_by_mul(g, &l, d) {
            v[i] = Complex64::new(1.0 / (g.p() as f64).sqrt(), 0.0);
        }
        m += &v * v.adjoint();
    }
    m.unscale(g.abelian().order() as f64)
}

fn support(v: &CVector) -> Vec<usize> {
    (0..v.len()).filter(|&i| v[i].norm() > 1e-12).collect()
}

#[test]
fn coset_state_examples() {
    let g = SemidirectGroup::metacyclic(7, 3, 2).unwrap();
    let v = coset_state(&g, &Elem(vec![0]), &Elem(vec![1])).unwrap().amplitudes;
    let expect: Vec<usize> =
        [(0, 0), (1, 1), (3, 2)].iter().map(|&(a, b)| g.index(&GroupElement::new(Elem(vec![a]), b))).collect();
    assert_eq!(support(&v), expect);
    assert!((v.norm() - 1.0).abs() < 1e-12);
    let zero = coset_state(&g, &Elem(vec![4]), &Elem(vec![0])).unwrap().amplitudes;
    assert_eq!(support(&zero), (0..3).map(|b| g.index(&GroupElement::new(Elem(vec![4]), b))).collect::<Vec<_>>());
    let z9 = SemidirectGroup::metacyclic(9, 3, 4).unwrap();
    assert!(matches!(coset_state(&z9, &Elem(vec![0]), &Elem(vec![1])), Err(Error::NotOrderP(_, 9))));
}

#[test]
fn coset_states_match_multiplication_and_are_orthonormal() {
    for g in groups() {
        assert!(g.order() <= 125);
        let a = g.abelian();
        for d in g.order_p_elements() {
            let states: Vec<(Vec<usize>, CVector)> = a
                .elements()
                .map(|l| {
                    let v = coset_state(&g, &l, &d).unwrap().amplitudes;
                    assert_eq!(support(&v), coset_by_mul(&g, &l, &d));
                    (coset_by_mul(&g, &l, &d), v)
                })
                .collect();
            for (c1, v1) in &states {
                for (c2, v2) in &states {
                    let ip = v1.dotc(v2).re;
                    let expect = if c1 == c2 { 1.0 } else { 0.0 };
                    assert!((ip - expect).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn heisenberg_coset_support() {
    let g = SemidirectGroup::heisenberg(3).unwrap();
    let d = Elem(vec![1, 1]);
    let v = coset_state(&g, &Elem(vec![0, 0]), &d).unwrap().amplitudes;
    assert_eq!(support(&v), coset_by_mul(&g, &Elem(vec![0, 0]), &d));
    let other = coset_state(&g, &Elem(vec![1, 0]), &d).unwrap().amplitudes;
    assert!(v.dotc(&other).norm() < 1e-12);
}

#[test]
fn fourier_coset_state_phases() {
    let g = SemidirectGroup::metacyclic(7, 3, 2).unwrap();
    let v = fourier_coset_state(&g, &Elem(vec![1]), &Elem(vec![1])).unwrap().amplitudes;
    let w = Complex64::from_polar(1.0, std::f64::consts::TAU / 7.0);
    for (b, t) in [(0u64, 0i32), (1, 1), (2, 3)] {
        let got = v[g.index(&GroupElement::new(Elem(vec![1]), b))] * (3f64).sqrt();
        assert!((got - w.powi(t)).norm() < 1e-12);
    }
    for x in 0..7 {
        let v = fourier_coset_state(&g, &Elem(vec![x]), &Elem(vec![0])).unwrap().amplitudes;
        assert!(v
            .iter()
            .filter(|z| z.norm() > 0.0)
            .all(|z| (z - Complex64::new(1.0 / 3f64.sqrt(), 0.0)).norm() < 1e-12));
    }
}

#[test]
fn fourier_consistency() {
    for g in groups() {
        let dec = BlockDecomposition::build(&g, 1, CAP).unwrap();
        for d in g.order_p_elements() {
            let oracle = fourier_conjugate(&g, &DensityMatrix { matrix: oracle_rho(&g, &d) });
            let ours = dec.state_dense(&d, 4096).unwrap();
            assert!(linalg::max_abs_diff(&oracle.matrix, &ours.matrix) < 1e-12, "{g} d={d}");
            assert!(linalg::max_abs_diff(&coset_density(&g, &d).unwrap().matrix, &oracle_rho(&g, &d)) < 1e-12);
            // the k = 1 state is also the mixture of Fourier coset states
            let mut mix = CMatrix::zeros(ours.dim(), ours.dim());
            for x in g.abelian().elements() {
                let v = fourier_coset_state(&g, &x, &d).unwrap().amplitudes;
                mix += &v * v.adjoint();
            }
            assert!(linalg::max_abs_diff(&mix.unscale(g.abelian().order() as f64), &ours.matrix) < 1e-12);
        }
    }
}

#[test]
fn tensor_powers_match_block_formula() {
    for (g, k) in [
        (SemidirectGroup::heisenberg(3).unwrap(), 2usize),
        (SemidirectGroup::metacyclic(7, 3, 2).unwrap(), 2),
        (SemidirectGroup::metacyclic(9, 3, 4).unwrap(), 2),
    ] {
        let basis = BlockBasis::new(&g, k);
        let dec = BlockDecomposition::build(&g, k, CAP).unwrap();
        let single = BlockDecomposition::build(&g, 1, CAP).unwrap();
        for d in g.abelian().elements() {
            let oracle = tensor_power(&single.state_dense(&d, 4096).unwrap().matrix, basis, 4096).unwrap();
            let rho = dec.state_dense(&d, 4096).unwrap();
            assert!(linalg::max_abs_diff(&oracle, &rho.matrix) < 1e-12, "{g} d={d}");
            assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            assert!(rho.hermiticity_residual() < 1e-12);
        }
    }
}

#[test]
fn blocks_are_rank_one_and_states_psd() {
    let g = SemidirectGroup::heisenberg(3).unwrap();
    let (rho, dec) = hidden_subgroup_state_k(&g, &Elem(vec![2, 1]), 2, 4096, CAP).unwrap();
    let n = dec.basis().block_size();
    for xi in 0..dec.basis().blocks() {
        let block = rho.matrix.view((xi * n, xi * n), (n, n)).into_owned();
        let sv = block.singular_values();
        let mut sv: Vec<f64> = sv.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        assert!(sv[1] < 1e-10);
    }
    let small = SemidirectGroup::metacyclic(7, 3, 2).unwrap();
    let (rho1, _) = hidden_subgroup_state_k(&small, &Elem(vec![1]), 1, 4096, CAP).unwrap();
    assert!(rho1.min_eigenvalue() >= -1e-9);
    assert!((rho1.trace().re - 1.0).abs() < 1e-12);
    assert!(hidden_subgroup_state_k(&g, &Elem(vec![0, 0]), 3, 4096, CAP).is_err());
}

#[test]
fn d_zero_block_structure() {
    let g = SemidirectGroup::metacyclic(7, 3, 2).unwrap();
    let dec = BlockDecomposition::build(&g, 1, CAP).unwrap();
    for xi in 0..7 {
        // chi_w(0) = 1: every block is |G|^-1 times the all-ones matrix
        let block = dec.state_block(&Elem(vec![0]), xi);
        assert!(block.iter().all(|z| (z - Complex64::new(1.0 / 21.0, 0.0)).norm() < 1e-12));
    }
}

#[test]
fn sigma_is_sum_of_states() {
    for (g, k) in
        [(SemidirectGroup::metacyclic(7, 3, 2).unwrap(), 1usize), (SemidirectGroup::heisenberg(3).unwrap(), 2)]
    {
        let sigma = ensemble_sigma(&g, k, 4096, CAP).unwrap();
        assert!((sigma.trace().re - g.abelian().order() as f64).abs() < 1e-10);
        let dec = BlockDecomposition::build(&g, k, CAP).unwrap();
        let mut direct = CMatrix::zeros(sigma.dim(), sigma.dim());
        for j in g.abelian().elements() {
            direct += dec.state_dense(&j, 4096).unwrap().matrix;
        }
        assert!(linalg::max_abs_diff(&direct, &sigma.matrix) < 1e-12);
        let nonzero = linalg::hermitian_eigenvalues(&sigma.matrix).iter().filter(|&&l| l > 1e-9).count();
        let terms: usize = dec.blocks().iter().map(Vec::len).sum();
        assert_eq!(nonzero, terms);
        let proj = dec.support_dense(4096).unwrap();
        assert!(linalg::max_abs_diff(&(&proj * &sigma.matrix), &sigma.matrix) < 1e-12);
    }
}

#[test]
fn blocks_partition_and_are_orthonormal() {
    let g = SemidirectGroup::jordan(3, &[2, 1]).unwrap();
    let dec = BlockDecomposition::build(&g, 2, CAP).unwrap();
    for xi in 0..dec.basis().blocks() {
        let entries = dec.block(xi);
        assert_eq!(entries.iter().map(|e| e.eta).sum::<usize>(), 9);
        for e in entries {
            for f in entries {
                let ip = dec.solution_state(e).dotc(&dec.solution_state(f)).re;
                assert!((ip - if e.w == f.w { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn matrix_export_is_pairs() {
    let g = SemidirectGroup::metacyclic(7, 3, 2).unwrap();
    let (rho, _) = hidden_subgroup_state_k(&g, &Elem(vec![1]), 1, 4096, CAP).unwrap();
    let pairs = rho.to_pairs();
    assert_eq!(pairs.len(), 21);
    assert!((pairs[0][0][0] - rho.matrix[(0, 0)].re).abs() == 0.0);
    let json = serde_json::to_string(&pairs).unwrap();
    assert!(json.starts_with("[[["));
}
