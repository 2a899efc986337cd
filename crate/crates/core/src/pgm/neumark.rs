use num_complex::Complex64;
use serde::Serialize;

use crate::linalg::{self, CMatrix, CVector};
use crate::msum::SolutionSet;
use crate::phase::RootTable;
use crate::states::{BlockBasis, BlockDecomposition, StateVector};

/// Unitary `U~^x` on `C^|A| (+) C^(p^k)` whose upper-left `|A| x p^k` block is
/// `V~^x = sum_w |w><S^x_w|`.
#[derive(Clone, Debug)]
pub struct NeumarkBlock {
    pub x_index: usize,
    pub order_a: usize,
    pub block_size: usize,
    pub v_tilde: CMatrix,
    pub unitary: CMatrix,
}

const GS_ACCEPT: f64 = 1e-6;

impl NeumarkBlock {
    /// Columns `0..p^k` are `[V~; I - V~^dagger V~]`; the remaining columns are
    /// standard basis vectors in index order, orthonormalized against the rest.
    pub fn build(dec: &BlockDecomposition, x_index: usize) -> Self {
        let order_a = dec.basis().order_a;
        let block_size = dec.basis().block_size();
        let a = dec.group().abelian();
        let mut v_tilde = CMatrix::zeros(order_a, block_size);
        for entry in dec.block(x_index) {
            let s = dec.solution_state(entry);
            v_tilde.row_mut(a.index(&entry.w)).copy_from(&s.transpose());
        }
        let n = order_a + block_size;
        let proj = v_tilde.adjoint() * &v_tilde;
        let comp = CMatrix::identity(block_size, block_size) - proj;
        let mut cols: Vec<CVector> = Vec::with_capacity(n);
        for c in 0..block_size {
            let mut col = CVector::zeros(n);
            col.rows_mut(0, order_a).copy_from(&v_tilde.column(c));
            col.rows_mut(order_a, block_size).copy_from(&comp.column(c));
            cols.push(col);
        }
        for i in 0..n {
            if cols.len() == n {
                break;
            }
            let mut v = CVector::zeros(n);
            v[i] = Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for c in &cols {
                    let proj = c.dotc(&v);
                    v -= c * proj;
                }
            }
            let norm = v.norm();
            if norm > GS_ACCEPT {
                cols.push(v.unscale(norm));
            }
        }
        let unitary = CMatrix::from_columns(&cols);
        NeumarkBlock { x_index, order_a, block_size, v_tilde, unitary }
    }

    pub fn unitarity_residual(&self) -> f64 {
        linalg::unitarity_residual(&self.unitary)
    }

    pub fn upper_left(&self) -> CMatrix {
        self.unitary.view((0, 0), (self.order_a, self.block_size)).into_owned()
    }

    /// System part of `U~^dagger |w>`: `|S^x_w>` when `eta^x_w > 0`, else `|xi^x_w>`.
    pub fn sample(&self, w_index: usize) -> CVector {
        let mut e = CVector::zeros(self.order_a + self.block_size);
        e[w_index] = Complex64::new(1.0, 0.0);
        let out = self.unitary.adjoint() * e;
        out.rows(0, self.block_size).into_owned()
    }

    /// Outcome probabilities for a block state `rho` on `C^(p^k)`: embed, apply
    /// `U~`, inverse Fourier transform on the `A` register, read the diagonal.
    /// Entry `|A|` is the total weight left on the ancilla.
    pub fn measure(&self, dec: &BlockDecomposition, rho: &CMatrix) -> Vec<f64> {
        let n = self.order_a + self.block_size;
        let mut embedded = CMatrix::zeros(n, n);
        embedded.view_mut((0, 0), (self.block_size, self.block_size)).copy_from(rho);
        let finv = linalg::fourier_matrix(dec.group().abelian(), true);
        let mut w = CMatrix::identity(n, n);
        w.view_mut((0, 0), (self.order_a, self.order_a)).copy_from(&finv);
        let w = w * &self.unitary;
        let out = &w * embedded * w.adjoint();
        let mut probs: Vec<f64> = (0..self.order_a).map(|j| out[(j, j)].re).collect();
        probs.push((self.order_a..n).map(|i| out[(i, i)].re).sum());
        probs
    }
}

/// `|S^x_w>` prepared by the labelled-superposition trick, with its
/// postselection probability `1/eta` (`0` and the zero vector when `eta = 0`).
#[derive(Clone, Debug, Serialize)]
pub struct QuantumSample {
    #[serde(skip)]
    pub state: StateVector,
    pub eta: usize,
    pub postselection_probability: f64,
}

/// Start from `eta^(-1/2) sum_j |j>|b_j>` on `C^eta (x) C[Z_p^k]`, apply the
/// Fourier transform on `Z_eta` and keep the `|0>` branch.
pub fn quantum_sample_vector(basis: BlockBasis, solutions: &SolutionSet) -> QuantumSample {
    let n = basis.block_size();
    let eta = solutions.eta;
    if eta == 0 {
        return QuantumSample {
            state: StateVector { amplitudes: CVector::zeros(n) },
            eta,
            postselection_probability: 0.0,
        };
    }
    let roots = RootTable::new(eta as u64);
    let amp = 1.0 / (eta as f64).sqrt();
    let mut branch = CVector::zeros(n);
    let kept = 0u64;
    for (j, b) in solutions.solutions.iter().enumerate() {
        // <kept|F_eta|j>
        let f0j = roots.get(kept * j as u64).scale(amp);
        branch[basis.b_index(b)] += f0j * amp;
    }
    let prob = branch.norm_squared();
    QuantumSample {
        state: StateVector { amplitudes: branch.unscale(prob.sqrt()) },
        eta,
        postselection_probability: prob,
    }
}
