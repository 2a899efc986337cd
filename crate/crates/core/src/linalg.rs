//! Dense complex matrices and the Fourier transform on `A`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::AbelianGroupSpec;
use crate::phase::RootTable;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance for positive semidefiniteness.
pub const PSD_TOL: f64 = 1e-9;
/// Tolerance for unitarity.
pub const UNITARY_TOL: f64 = 1e-10;

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn outer(u: &CVector, v: &CVector) -> CMatrix {
    u * v.adjoint()
}

/// Eigenvalues of a Hermitian matrix, ascending. Only the Hermitian part is used.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// `f(H)` on the eigenvalues of Hermitian `H`, with eigenvalues below `cutoff` sent to zero.
pub fn hermitian_function(m: &CMatrix, cutoff: f64, f: impl Fn(f64) -> f64) -> CMatrix {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > cutoff {
            let v = eig.eigenvectors.column(i);
            out += (v * v.adjoint()).scale(f(lambda));
        }
    }
    out
}

pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.ncols();
    max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(n, n))
}

/// `F|l> = |A|^(-1/2) sum_x chi_x(l) |x>`, or its inverse.
pub fn fourier_matrix(a: &AbelianGroupSpec, inverse: bool) -> CMatrix {
    let n = a.order() as usize;
    let roots = RootTable::new(a.modulus());
    let scale = 1.0 / (n as f64).sqrt();
    let elems: Vec<_> = a.elements().collect();
    CMatrix::from_fn(n, n, |x, l| {
        let z = roots.get(a.pairing(&elems[x], &elems[l])).scale(scale);
        if inverse {
            z.conj()
        } else {
            z
        }
    })
}

pub fn check_dim(dim: u128, cap: u128) -> Result<()> {
    Error::check_cap("dense dimension", dim, cap)
}

/// Rows of `[re, im]` pairs.
pub fn matrix_to_pairs(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn vector_to_pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}
