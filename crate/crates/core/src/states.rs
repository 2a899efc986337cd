//! Coset states, their Fourier transforms and the `k`-copy hidden subgroup states.
//!
//! Basis of `C[A^k x Z_p^k]`: index `x_index * p^k + b_index`, where both
//! `x_index` and `b_index` are mixed radix with copy 0 least significant and
//! each `A` element is indexed little-endian in its coordinates.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Elem, GroupElement, SemidirectGroup};
use crate::linalg::{self, CMatrix, CVector};
use crate::msum::{x_from_index, MSumSolver};
use crate::phase::RootTable;

/// Default cap on dense dimensions `|G|^k`.
pub const DEFAULT_DIM_CAP: u128 = 4096;

/// Index arithmetic for the block basis of `C[A^k x Z_p^k]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BlockBasis {
    pub order_a: usize,
    pub p: usize,
    pub k: usize,
}

impl BlockBasis {
    pub fn new(group: &SemidirectGroup, k: usize) -> Self {
        BlockBasis { order_a: group.abelian().order() as usize, p: group.p() as usize, k }
    }

    pub fn blocks(&self) -> usize {
        self.order_a.pow(self.k as u32)
    }

    pub fn block_size(&self) -> usize {
        self.p.pow(self.k as u32)
    }

    pub fn dim(&self) -> usize {
        self.blocks() * self.block_size()
    }

    pub fn dim_u128(&self) -> u128 {
        (self.order_a as u128 * self.p as u128).saturating_pow(self.k as u32)
    }

    pub fn index(&self, x_index: usize, b_index: usize) -> usize {
        x_index * self.block_size() + b_index
    }

    pub fn b_index(&self, b: &[u64]) -> usize {
        b.iter().rev().fold(0, |acc, &v| acc * self.p + v as usize)
    }

    pub fn b_from_index(&self, mut idx: usize) -> Vec<u64> {
        (0..self.k)
            .map(|_| {
                let v = idx % self.p;
                idx /= self.p;
                v as u64
            })
            .collect()
    }

    /// Position in this basis of index `t` of the `k`-fold Kronecker product of
    /// the single-copy basis (copy 0 most significant there).
    pub fn from_kron_index(&self, mut t: usize) -> usize {
        let g = self.order_a * self.p;
        let mut parts = vec![0usize; self.k];
        for j in (0..self.k).rev() {
            parts[j] = t % g;
            t /= g;
        }
        let (mut xi, mut bi) = (0, 0);
        for &part in parts.iter().rev() {
            xi = xi * self.order_a + part / self.p;
            bi = bi * self.p + part % self.p;
        }
        self.index(xi, bi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub amplitudes: CVector,
}

impl StateVector {
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        linalg::vector_to_pairs(&self.amplitudes)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    pub matrix: CMatrix,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        linalg::max_abs_diff(&self.matrix, &self.matrix.adjoint())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.matrix)
    }

    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        linalg::matrix_to_pairs(&self.matrix)
    }
}

fn require_order_p(group: &SemidirectGroup, d: &Elem) -> Result<()> {
    let order = group.subgroup_order(d);
    if order == group.p() {
        Ok(())
    } else {
        Err(Error::NotOrderP(d.to_string(), order))
    }
}

/// `|psi_{l,d}> = p^(-1/2) sum_b |l + Phi^(b)(d), b>` in `C[G]`.
pub fn coset_state(group: &SemidirectGroup, l: &Elem, d: &Elem) -> Result<StateVector> {
    require_order_p(group, d)?;
    let a = group.abelian();
    let amp = Complex64::new(1.0 / (group.p() as f64).sqrt(), 0.0);
    let mut v = CVector::zeros(group.order() as usize);
    for b in 0..group.p() {
        let g = GroupElement::new(a.add(l, &group.phi_sum(b, d)), b);
        v[group.index(&g)] = amp;
    }
    Ok(StateVector { amplitudes: v })
}

/// `|psi~_{x,d}> = p^(-1/2) sum_b chi_x(Phi^(b)(d)) |x, b>` in `C[A x Z_p]`.
pub fn fourier_coset_state(group: &SemidirectGroup, x: &Elem, d: &Elem) -> Result<StateVector> {
    require_order_p(group, d)?;
    let a = group.abelian();
    let roots = RootTable::new(a.modulus());
    let scale = 1.0 / (group.p() as f64).sqrt();
    let mut v = CVector::zeros(group.order() as usize);
    for b in 0..group.p() {
        let phase = roots.get(a.pairing(x, &group.phi_sum(b, d)));
        v[group.index(&GroupElement::new(x.clone(), b))] = phase.scale(scale);
    }
    Ok(StateVector { amplitudes: v })
}

/// `rho_d = |A|^(-1) sum_l |psi_{l,d}><psi_{l,d}|`, in the group basis.
pub fn coset_density(group: &SemidirectGroup, d: &Elem) -> Result<DensityMatrix> {
    let n = group.order() as usize;
    let mut m = CMatrix::zeros(n, n);
    let a = group.abelian();
    for l in a.elements() {
        let v = coset_state(group, &l, d)?.amplitudes;
        m += linalg::outer(&v, &v);
    }
    Ok(DensityMatrix { matrix: m.unscale(a.order() as f64) })
}

/// `(F_A (x) I) rho (F_A (x) I)^dagger` on `C[A x Z_p]`.
pub fn fourier_conjugate(group: &SemidirectGroup, rho: &DensityMatrix) -> DensityMatrix {
    let p = group.p() as usize;
    let f = linalg::kron(&linalg::fourier_matrix(group.abelian(), false), &CMatrix::identity(p, p));
    DensityMatrix { matrix: &f * &rho.matrix * f.adjoint() }
}

/// One nonzero term of a block: `w`, `S^x_w` as basis indices of `Z_p^k`, `eta^x_w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockEntry {
    pub w: Elem,
    pub solutions: Vec<usize>,
    pub eta: usize,
}

/// For each `x in A^k`, the terms `(w, S^x_w, eta^x_w)` with `eta^x_w > 0`, sorted by `w`.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    group: SemidirectGroup,
    basis: BlockBasis,
    roots: RootTable,
    blocks: Vec<Vec<BlockEntry>>,
}

impl BlockDecomposition {
    pub fn build(group: &SemidirectGroup, k: usize, enum_cap: u128) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        let basis = BlockBasis::new(group, k);
        Error::check_cap("block decomposition |G|^k", basis.dim_u128(), enum_cap)?;
        let solver = MSumSolver::new(group, enum_cap);
        let a = group.abelian();
        let blocks = (0..basis.blocks())
            .into_par_iter()
            .map(|xi| {
                let lists = solver.solution_lists(&x_from_index(group, k, xi))?;
                Ok(lists
                    .into_iter()
                    .enumerate()
                    .filter(|(_, s)| !s.is_empty())
                    .map(|(wi, s)| {
                        let mut solutions: Vec<usize> = s.iter().map(|b| basis.b_index(b)).collect();
                        solutions.sort_unstable();
                        BlockEntry { w: a.element(wi), eta: solutions.len(), solutions }
                    })
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockDecomposition { group: group.clone(), basis, roots: RootTable::new(a.modulus()), blocks })
    }

    pub fn group(&self) -> &SemidirectGroup {
        &self.group
    }

    pub fn basis(&self) -> BlockBasis {
        self.basis
    }

    pub fn k(&self) -> usize {
        self.basis.k
    }

    pub fn block(&self, x_index: usize) -> &[BlockEntry] {
        &self.blocks[x_index]
    }

    pub fn blocks(&self) -> &[Vec<BlockEntry>] {
        &self.blocks
    }

    /// `chi_w(j)` as a complex number.
    pub fn character(&self, w: &Elem, j: &Elem) -> Complex64 {
        self.roots.get(self.group.abelian().pairing(w, j))
    }

    /// `|S^x_w>` as a vector of `C[Z_p^k]`.
    pub fn solution_state(&self, entry: &BlockEntry) -> CVector {
        let mut v = CVector::zeros(self.basis.block_size());
        let amp = Complex64::new(1.0 / (entry.eta as f64).sqrt(), 0.0);
        for &b in &entry.solutions {
            v[b] = amp;
        }
        v
    }

    /// Unnormalized block vector `u` with `rho~_d^(x)k |x-block = |G|^(-k) |u><u|`:
    /// `u = sum_w chi_w(d) sqrt(eta^x_w) |S^x_w>`.
    pub fn state_block_vector(&self, d: &Elem, x_index: usize) -> CVector {
        let mut u = CVector::zeros(self.basis.block_size());
        for entry in &self.blocks[x_index] {
            let phase = self.character(&entry.w, d);
            for &b in &entry.solutions {
                u[b] = phase;
            }
        }
        u
    }

    /// `|G|^(-k)`, the weight of every block of `rho~_d^(x)k`.
    pub fn block_weight(&self) -> f64 {
        (self.group.order() as f64).powi(self.basis.k as i32).recip()
    }

    pub fn state_block(&self, d: &Elem, x_index: usize) -> CMatrix {
        let u = self.state_block_vector(d, x_index);
        linalg::outer(&u, &u).scale(self.block_weight())
    }

    /// `Sigma` restricted to the `x` block: `(|A|/|G|^k) sum_w eta |S_w><S_w|`.
    pub fn sigma_block(&self, x_index: usize) -> CMatrix {
        let n = self.basis.block_size();
        let scale = self.basis.order_a as f64 * self.block_weight();
        let mut m = CMatrix::zeros(n, n);
        for entry in &self.blocks[x_index] {
            let s = self.solution_state(entry);
            m += linalg::outer(&s, &s).scale(scale * entry.eta as f64);
        }
        m
    }

    /// Projector onto `span{|x, S^x_w>}` within the `x` block.
    pub fn support_block(&self, x_index: usize) -> CMatrix {
        let n = self.basis.block_size();
        let mut m = CMatrix::zeros(n, n);
        for entry in &self.blocks[x_index] {
            let s = self.solution_state(entry);
            m += linalg::outer(&s, &s);
        }
        m
    }

    pub fn assemble(&self, dim_cap: u128, block: impl Fn(usize) -> CMatrix) -> Result<CMatrix> {
        linalg::check_dim(self.basis.dim_u128(), dim_cap)?;
        let n = self.basis.block_size();
        let mut m = CMatrix::zeros(self.basis.dim(), self.basis.dim());
        for xi in 0..self.basis.blocks() {
            m.view_mut((xi * n, xi * n), (n, n)).copy_from(&block(xi));
        }
        Ok(m)
    }

    /// Dense `rho~_d^(x)k`.
    pub fn state_dense(&self, d: &Elem, dim_cap: u128) -> Result<DensityMatrix> {
        Ok(DensityMatrix { matrix: self.assemble(dim_cap, |xi| self.state_block(d, xi))? })
    }

    /// Dense `Sigma = sum_j rho~_j^(x)k`.
    pub fn sigma_dense(&self, dim_cap: u128) -> Result<DensityMatrix> {
        Ok(DensityMatrix { matrix: self.assemble(dim_cap, |xi| self.sigma_block(xi))? })
    }

    pub fn support_dense(&self, dim_cap: u128) -> Result<CMatrix> {
        self.assemble(dim_cap, |xi| self.support_block(xi))
    }

    /// `eta^x_w` by basis index of `w`.
    pub fn eta_row(&self, x_index: usize) -> Vec<usize> {
        let a = self.group.abelian();
        let mut row = vec![0; self.basis.order_a];
        for e in &self.blocks[x_index] {
            row[a.index(&e.w)] = e.eta;
        }
        row
    }
}

/// `rho~_d^(x)k` together with its block decomposition.
pub fn hidden_subgroup_state_k(
    group: &SemidirectGroup,
    d: &Elem,
    k: usize,
    dim_cap: u128,
    enum_cap: u128,
) -> Result<(DensityMatrix, BlockDecomposition)> {
    linalg::check_dim(BlockBasis::new(group, k).dim_u128(), dim_cap)?;
    let dec = BlockDecomposition::build(group, k, enum_cap)?;
    Ok((dec.state_dense(d, dim_cap)?, dec))
}

/// `Sigma = sum_j rho~_j^(x)k`, diagonal in the `|x, S^x_w>` basis.
pub fn ensemble_sigma(group: &SemidirectGroup, k: usize, dim_cap: u128, enum_cap: u128) -> Result<DensityMatrix> {
    linalg::check_dim(BlockBasis::new(group, k).dim_u128(), dim_cap)?;
    BlockDecomposition::build(group, k, enum_cap)?.sigma_dense(dim_cap)
}

/// `rho^(x)k` of a single-copy matrix, permuted into the block basis.
pub fn tensor_power(single: &CMatrix, basis: BlockBasis, dim_cap: u128) -> Result<CMatrix> {
    linalg::check_dim(basis.dim_u128(), dim_cap)?;
    let mut kron = single.clone();
    for _ in 1..basis.k {
        kron = linalg::kron(&kron, single);
    }
    let perm: Vec<usize> = (0..kron.nrows()).map(|t| basis.from_kron_index(t)).collect();
    let n = kron.nrows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(perm[i], perm[j])] = kron[(i, j)];
        }
    }
    Ok(out)
}
