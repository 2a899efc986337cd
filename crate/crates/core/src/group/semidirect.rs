use std::fmt;

use serde::{Deserialize, Serialize};

use super::abelian::{AbelianGroupSpec, Elem};
use super::linear::{LinearMap, ModMatrix};
use crate::arith::{binom_mod_p, gcd, inv_mod, is_prime, mul_mod, pow_mod, sub_mod};
use crate::error::{Error, Result};

/// An element `(a, b)` of `A x| Z_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub a: Elem,
    pub b: u64,
}

impl GroupElement {
    pub fn new(a: Elem, b: u64) -> Self {
        GroupElement { a, b }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// The semidirect product `G = A x|_phi Z_p`.
///
/// `mu` is stored in the convention where the conjugate sum acts as
/// `Phi^(b)^(x) = M^(b) x` with `M^(b) = sum_{i<b} mu^i`. For `Z_N` this is
/// plain multiplication by `mu`. For `Z_p^r` the automorphism itself is
/// `phi(a) = mu^T a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemidirectGroup {
    a: AbelianGroupSpec,
    p: u64,
    mu: LinearMap,
    phi: LinearMap,
    // phi^b for b < p (phi^p = I), when p is small enough to cache
    phi_powers: Vec<LinearMap>,
}

const PHI_CACHE_LIMIT: u64 = 1 << 16;

impl SemidirectGroup {
    pub fn new(a: AbelianGroupSpec, p: u64, mu: LinearMap) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidGroup(format!("p = {p} is not prime")));
        }
        match (&a, &mu) {
            (AbelianGroupSpec::CyclicZN { n }, LinearMap::Scalar { modulus, value }) => {
                if *n < 2 {
                    return Err(Error::InvalidGroup(format!("N = {n} must be at least 2")));
                }
                if modulus != n {
                    return Err(Error::InvalidGroup("mu modulus differs from N".into()));
                }
                if gcd(*value, *n) != 1 {
                    return Err(Error::InvalidGroup(format!("mu = {value} is not a unit mod {n}")));
                }
            }
            (AbelianGroupSpec::VectorZpR { p: q, r }, LinearMap::Matrix(m)) => {
                if *q != p {
                    return Err(Error::InvalidGroup(format!("A = Z_{q}^r but p = {p}")));
                }
                if *r == 0 {
                    return Err(Error::InvalidGroup("r must be positive".into()));
                }
                if m.size() != *r || m.modulus() != p {
                    return Err(Error::InvalidGroup(format!("mu must be {r}x{r} over Z_{p}")));
                }
                if !m.is_invertible() {
                    return Err(Error::InvalidGroup("mu is singular".into()));
                }
            }
            _ => return Err(Error::InvalidGroup("mu kind does not match A".into())),
        }
        if !mu.pow(p).is_identity() {
            return Err(Error::InvalidGroup("mu^p is not the identity".into()));
        }
        let phi = mu.transpose();
        let mut phi_powers = Vec::new();
        if p <= PHI_CACHE_LIMIT {
            let mut cur = phi.identity_like();
            for _ in 0..p {
                phi_powers.push(cur.clone());
                cur = cur.compose(&phi);
            }
        }
        Ok(SemidirectGroup { a, p, mu, phi, phi_powers })
    }

    pub fn metacyclic(n: u64, p: u64, mu: u64) -> Result<Self> {
        Self::new(AbelianGroupSpec::CyclicZN { n }, p, LinearMap::scalar(n, mu))
    }

    pub fn with_matrix(p: u64, rows: &[Vec<u64>]) -> Result<Self> {
        let m = ModMatrix::from_rows(p, rows)
            .ok_or_else(|| Error::InvalidGroup("mu must be a nonempty square matrix".into()))?;
        let r = m.size();
        Self::new(AbelianGroupSpec::VectorZpR { p, r }, p, LinearMap::Matrix(m))
    }

    /// `Z_p^r x| Z_p` with `mu` block diagonal, one upper Jordan block per entry of `blocks`.
    pub fn jordan(p: u64, blocks: &[usize]) -> Result<Self> {
        let r: usize = blocks.iter().sum();
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::InvalidGroup("Jordan block sizes must be positive".into()));
        }
        let mut rows = vec![vec![0u64; r]; r];
        let mut start = 0;
        for &size in blocks {
            for i in start..start + size {
                rows[i][i] = 1;
                if i + 1 < start + size {
                    rows[i][i + 1] = 1;
                }
            }
            start += size;
        }
        Self::with_matrix(p, &rows)
    }

    pub fn heisenberg(p: u64) -> Result<Self> {
        Self::jordan(p, &[2])
    }

    pub fn abelian(&self) -> &AbelianGroupSpec {
        &self.a
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// The stored automorphism datum `mu`.
    pub fn mu(&self) -> &LinearMap {
        &self.mu
    }

    pub fn order(&self) -> u64 {
        self.a.order() * self.p
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::new(self.a.zero(), 0)
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.a.contains(&g.a) && g.b < self.p
    }

    /// Index of `(a, b)` in the `|A| * p` basis: `index(a) * p + b`.
    pub fn index(&self, g: &GroupElement) -> usize {
        self.a.index(&g.a) * self.p as usize + g.b as usize
    }

    pub fn element(&self, idx: usize) -> GroupElement {
        let p = self.p as usize;
        GroupElement::new(self.a.element(idx / p), (idx % p) as u64)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order() as usize).map(move |i| self.element(i))
    }

    pub fn phi(&self, a: &Elem) -> Elem {
        Elem(self.phi.apply(&a.0))
    }

    /// `phi^b(a)` for any `b >= 0`.
    pub fn phi_pow(&self, b: u64, a: &Elem) -> Elem {
        match self.phi_powers.get((b % self.p) as usize) {
            Some(m) => Elem(m.apply(&a.0)),
            None => Elem(self.phi.pow(b % self.p).apply(&a.0)),
        }
    }

    /// `(a,b)(a',b') = (a + phi^b(a'), b + b')`.
    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let a = self.a.add(&g.a, &self.phi_pow(g.b, &h.a));
        GroupElement::new(a, (g.b + h.b) % self.p)
    }

    /// `(a,b)^{-1} = (phi^{-b}(-a), -b)`.
    pub fn inv(&self, g: &GroupElement) -> GroupElement {
        let nb = (self.p - g.b % self.p) % self.p;
        GroupElement::new(self.phi_pow(nb, &self.a.neg(&g.a)), nb)
    }

    pub fn pow(&self, g: &GroupElement, mut e: u64) -> GroupElement {
        let mut acc = self.identity();
        let mut base = g.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `Phi^(b)(a) = sum_{i<b} phi^i(a)`, for any `b >= 0` (no reduction mod p).
    pub fn phi_sum(&self, b: u64, a: &Elem) -> Elem {
        Elem(geometric_sum(&self.phi, b).apply(&a.0))
    }

    /// `M^(b) = sum_{i<b} mu^i` via the doubling identity `M^(2b) = (I + mu^b) M^(b)`.
    pub fn matrix_sum(&self, b: u64) -> LinearMap {
        geometric_sum(&self.mu, b)
    }

    /// `M^(b)` for `b = 0..count`, by direct accumulation.
    pub fn matrix_sum_table(&self, count: u64) -> Vec<LinearMap> {
        let mut table = Vec::with_capacity(count as usize);
        let mut sum = self.mu.zero_like();
        let mut power = self.mu.identity_like();
        for _ in 0..count {
            table.push(sum.clone());
            sum = sum.add(&power);
            power = power.compose(&self.mu);
        }
        table
    }

    /// Representation of the conjugate map `Phi^(b)^`, the map with
    /// `chi_x(Phi^(b)(d)) = chi_{Phi^(b)^(x)}(d)`.
    ///
    /// For both supported families this is `M^(b)` in the stored convention
    /// (self-conjugate scalar for `Z_N`, the transpose of `Phi^(b)`'s matrix for `Z_p^r`).
    pub fn conjugate_matrix_sum(&self, b: u64) -> Result<LinearMap> {
        match self.a {
            AbelianGroupSpec::CyclicZN { .. } | AbelianGroupSpec::VectorZpR { .. } => Ok(self.matrix_sum(b)),
        }
    }

    pub fn conjugate_phi_sum(&self, b: u64, x: &Elem) -> Elem {
        Elem(self.matrix_sum(b).apply(&x.0))
    }

    /// Order of `<(d,1)>`, found by iterating the group law.
    pub fn subgroup_order(&self, d: &Elem) -> u64 {
        let g = GroupElement::new(d.clone(), 1);
        let id = self.identity();
        let mut cur = g.clone();
        let mut n = 1u64;
        while cur != id {
            cur = self.mul(&cur, &g);
            n += 1;
        }
        n
    }

    /// Elements of `<(d,1)>` as `(Phi^(b)(d), b)` for `b < p`.
    pub fn cyclic_subgroup(&self, d: &Elem) -> Vec<GroupElement> {
        (0..self.p).map(|b| GroupElement::new(self.phi_sum(b, d), b)).collect()
    }

    /// `d` with `|<(d,1)>| = p`.
    pub fn order_p_elements(&self) -> Vec<Elem> {
        self.a.elements().filter(|d| self.phi_sum(self.p, d).is_zero()).collect()
    }

    pub fn all_order_p(&self) -> bool {
        self.a.elements().all(|d| self.phi_sum(self.p, &d).is_zero())
    }

    /// Jordan block sizes if `mu` is already in (upper) Jordan canonical form.
    pub fn jordan_blocks(&self) -> Option<Vec<usize>> {
        let m = self.mu.as_matrix()?;
        let r = m.size();
        let mut blocks = Vec::new();
        let mut size = 1;
        for i in 0..r {
            for j in 0..r {
                let v = m.get(i, j);
                let ok = if i == j {
                    v == 1
                } else if j == i + 1 {
                    v <= 1
                } else {
                    v == 0
                };
                if !ok {
                    return None;
                }
            }
            if i + 1 < r && m.get(i, i + 1) == 1 {
                size += 1;
            } else {
                blocks.push(size);
                size = 1;
            }
        }
        Some(blocks)
    }

    /// Block sizes of the Jordan form of `mu` (which is unipotent since `mu^p = I`),
    /// read off from the ranks of powers of `mu - I`. Sorted descending.
    pub fn jordan_partition(&self) -> Option<Vec<usize>> {
        let m = self.mu.as_matrix()?;
        let r = m.size();
        let nil = m.sub(&ModMatrix::identity(m.modulus(), r));
        let mut ranks = vec![r];
        let mut pw = ModMatrix::identity(m.modulus(), r);
        while *ranks.last().unwrap() > 0 {
            pw = pw.mul(&nil);
            ranks.push(pw.rank());
        }
        // blocks of size >= i: ranks[i-1] - ranks[i]
        let at_least: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
        let mut blocks = Vec::new();
        for (i, &cnt) in at_least.iter().enumerate() {
            let next = at_least.get(i + 1).copied().unwrap_or(0);
            for _ in 0..cnt - next {
                blocks.push(i + 1);
            }
        }
        blocks.sort_unstable_by(|a, b| b.cmp(a));
        Some(blocks)
    }

    /// The isomorphic group whose `mu` is in Jordan canonical form.
    pub fn jordan_canonical(&self) -> Result<Self> {
        let blocks = self.jordan_partition().ok_or_else(|| Error::Unsupported("Jordan form needs A = Z_p^r".into()))?;
        Self::jordan(self.p, &blocks)
    }

    pub fn is_heisenberg(&self) -> bool {
        self.p > 2
            && self.a == AbelianGroupSpec::VectorZpR { p: self.p, r: 2 }
            && self.mu.as_matrix().map(ModMatrix::rows) == Some(vec![vec![1, 1], vec![0, 1]])
    }
}

fn geometric_sum(base: &LinearMap, b: u64) -> LinearMap {
    // (sum, power) = (M^(n), base^n), built from the high bit down.
    let mut sum = base.zero_like();
    let mut power = base.identity_like();
    if b == 0 {
        return sum;
    }
    for bit in (0..64 - b.leading_zeros()).rev() {
        // doubling: M^(2n) = (I + base^n) M^(n)
        sum = power.identity_like().add(&power).compose(&sum);
        power = power.compose(&power);
        if (b >> bit) & 1 == 1 {
            // M^(n+1) = I + base M^(n)
            sum = base.compose(&sum).add(&base.identity_like());
            power = power.compose(base);
        }
    }
    sum
}

/// `M^(b)` for upper Jordan blocks: entry `(i,j)` is `binom(b, j-i+1) mod p` within each block.
pub fn binomial_matrix_sum(p: u64, blocks: &[usize], b: u64) -> ModMatrix {
    let r: usize = blocks.iter().sum();
    let mut m = ModMatrix::zero(p, r);
    let mut start = 0;
    for &size in blocks {
        for i in 0..size {
            for j in i..size {
                m.set(start + i, start + j, binom_mod_p(b, (j - i + 1) as u64, p));
            }
        }
        start += size;
    }
    m
}

/// Closed form of the Heisenberg matrix sum: `[[b, s b (1-b)], [0, b]]` with `s = (-2)^{-1} mod p`.
pub fn heisenberg_matrix_sum(p: u64, b: u64) -> ModMatrix {
    let s = inv_mod(p - 2 % p, p).expect("p odd");
    let b = b % p;
    let off = mul_mod(mul_mod(s, b, p), sub_mod(1, b, p), p);
    ModMatrix::from_rows(p, &[vec![b, off], vec![0, b]]).unwrap()
}

/// Every `(N, p, mu)` with `2 <= N <= max_n`, `p` prime and `mu != 1` a unit with `mu^p = 1 mod N`.
pub fn metacyclic_parameters(max_n: u64) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        for p in (2..n).filter(|&p| is_prime(p)) {
            for mu in 2..n {
                if gcd(mu, n) == 1 && pow_mod(mu, p, n) == 1 {
                    out.push((n, p, mu));
                }
            }
        }
    }
    out
}
