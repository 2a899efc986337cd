use crate::arith::{add_mod, inv_mod, mul_mod, pow_mod, sub_mod};

/// Square matrix over `Z_m`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModMatrix {
    modulus: u64,
    size: usize,
    data: Vec<u64>,
}

impl ModMatrix {
    pub fn from_rows(modulus: u64, rows: &[Vec<u64>]) -> Option<Self> {
        let size = rows.len();
        if size == 0 || rows.iter().any(|r| r.len() != size) {
            return None;
        }
        let data = rows.iter().flatten().map(|&v| v % modulus).collect();
        Some(ModMatrix { modulus, size, data })
    }

    pub fn zero(modulus: u64, size: usize) -> Self {
        ModMatrix { modulus, size, data: vec![0; size * size] }
    }

    pub fn identity(modulus: u64, size: usize) -> Self {
        let mut m = Self::zero(modulus, size);
        for i in 0..size {
            m.data[i * size + i] = 1 % modulus;
        }
        m
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.size + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.size + j] = v % self.modulus;
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.data.chunks(self.size).map(|c| c.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.modulus, self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                t.data[j * self.size + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn add(&self, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| add_mod(a, b, self.modulus)).collect();
        ModMatrix { modulus: self.modulus, size: self.size, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| sub_mod(a, b, self.modulus)).collect();
        ModMatrix { modulus: self.modulus, size: self.size, data }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.size;
        let m = self.modulus;
        let mut out = Self::zero(m, n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let idx = i * n + j;
                    out.data[idx] = add_mod(out.data[idx], mul_mod(a, other.get(k, j), m), m);
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::identity(self.modulus, self.size);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        (0..self.size)
            .map(|i| {
                (0..self.size)
                    .fold(0u64, |acc, j| add_mod(acc, mul_mod(self.get(i, j), v[j], self.modulus), self.modulus))
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.modulus, self.size)
    }

    /// Rank over `Z_p`; `modulus` must be prime.
    pub fn rank(&self) -> usize {
        row_reduce(self.modulus, self.rows()).len()
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.size
    }
}

/// Reduced row echelon form over `Z_p`, returning the nonzero rows.
/// Pivots are the leading nonzero entries, normalized to 1.
pub fn row_reduce(p: u64, mut rows: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(found) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_multiple_of(p)) else {
            continue;
        };
        rows.swap(pivot_row, found);
        let inv = inv_mod(rows[pivot_row][col], p).expect("nonzero mod prime");
        for v in rows[pivot_row].iter_mut() {
            *v = mul_mod(*v, inv, p);
        }
        for r in 0..rows.len() {
            if r != pivot_row && !rows[r][col].is_multiple_of(p) {
                let f = rows[r][col];
                let pivot = rows[pivot_row].clone();
                for (v, &q) in rows[r].iter_mut().zip(&pivot) {
                    *v = sub_mod(*v, mul_mod(f, q, p), p);
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.truncate(pivot_row);
    rows
}

/// An endomorphism of `Z_N` (multiplication by a scalar) or of `Z_p^r` (a matrix).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LinearMap {
    Scalar { modulus: u64, value: u64 },
    Matrix(ModMatrix),
}

impl LinearMap {
    pub fn scalar(modulus: u64, value: u64) -> Self {
        LinearMap::Scalar { modulus, value: value % modulus }
    }

    pub fn zero_like(&self) -> Self {
        match self {
            LinearMap::Scalar { modulus, .. } => LinearMap::scalar(*modulus, 0),
            LinearMap::Matrix(m) => LinearMap::Matrix(ModMatrix::zero(m.modulus(), m.size())),
        }
    }

    pub fn identity_like(&self) -> Self {
        match self {
            LinearMap::Scalar { modulus, .. } => LinearMap::scalar(*modulus, 1),
            LinearMap::Matrix(m) => LinearMap::Matrix(ModMatrix::identity(m.modulus(), m.size())),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (LinearMap::Scalar { modulus, value }, LinearMap::Scalar { value: v2, .. }) => {
                LinearMap::scalar(*modulus, add_mod(*value, *v2, *modulus))
            }
            (LinearMap::Matrix(a), LinearMap::Matrix(b)) => LinearMap::Matrix(a.add(b)),
            _ => panic!("mixed linear map kinds"),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        match (self, other) {
            (LinearMap::Scalar { modulus, value }, LinearMap::Scalar { value: v2, .. }) => {
                LinearMap::scalar(*modulus, mul_mod(*value, *v2, *modulus))
            }
            (LinearMap::Matrix(a), LinearMap::Matrix(b)) => LinearMap::Matrix(a.mul(b)),
            _ => panic!("mixed linear map kinds"),
        }
    }

    pub fn pow(&self, e: u64) -> Self {
        match self {
            LinearMap::Scalar { modulus, value } => LinearMap::scalar(*modulus, pow_mod(*value, e, *modulus)),
            LinearMap::Matrix(m) => LinearMap::Matrix(m.pow(e)),
        }
    }

    pub fn transpose(&self) -> Self {
        match self {
            LinearMap::Scalar { .. } => self.clone(),
            LinearMap::Matrix(m) => LinearMap::Matrix(m.transpose()),
        }
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        match self {
            LinearMap::Scalar { modulus, value } => vec![mul_mod(*value, v[0], *modulus)],
            LinearMap::Matrix(m) => m.apply(v),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            LinearMap::Scalar { value, .. } => *value == 0,
            LinearMap::Matrix(m) => m.is_zero(),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            LinearMap::Scalar { modulus, value } => *value == 1 % *modulus,
            LinearMap::Matrix(m) => m.is_identity(),
        }
    }

    pub fn as_scalar(&self) -> Option<u64> {
        match self {
            LinearMap::Scalar { value, .. } => Some(*value),
            LinearMap::Matrix(_) => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&ModMatrix> {
        match self {
            LinearMap::Matrix(m) => Some(m),
            LinearMap::Scalar { .. } => None,
        }
    }
}
