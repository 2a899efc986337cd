use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{add_mod, mul_mod, sub_mod};

/// The abelian factor `A`: either `Z_N` or `Z_p^r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AbelianGroupSpec {
    CyclicZN { n: u64 },
    VectorZpR { p: u64, r: usize },
}

/// An element of `A`, stored as its coordinate vector (length 1 for `Z_N`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub Vec<u64>);

impl Elem {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

impl AbelianGroupSpec {
    pub fn order(&self) -> u64 {
        match *self {
            AbelianGroupSpec::CyclicZN { n } => n,
            AbelianGroupSpec::VectorZpR { p, r } => p.pow(r as u32),
        }
    }

    /// Modulus of each coordinate.
    pub fn modulus(&self) -> u64 {
        match *self {
            AbelianGroupSpec::CyclicZN { n } => n,
            AbelianGroupSpec::VectorZpR { p, .. } => p,
        }
    }

    /// Number of coordinates.
    pub fn rank(&self) -> usize {
        match *self {
            AbelianGroupSpec::CyclicZN { .. } => 1,
            AbelianGroupSpec::VectorZpR { r, .. } => r,
        }
    }

    pub fn zero(&self) -> Elem {
        Elem(vec![0; self.rank()])
    }

    pub fn reduce(&self, coords: &[u64]) -> Option<Elem> {
        (coords.len() == self.rank()).then(|| Elem(coords.iter().map(|&c| c % self.modulus()).collect()))
    }

    pub fn contains(&self, e: &Elem) -> bool {
        e.0.len() == self.rank() && e.0.iter().all(|&c| c < self.modulus())
    }

    pub fn add(&self, x: &Elem, y: &Elem) -> Elem {
        let m = self.modulus();
        Elem(x.0.iter().zip(&y.0).map(|(&a, &b)| add_mod(a, b, m)).collect())
    }

    pub fn sub(&self, x: &Elem, y: &Elem) -> Elem {
        let m = self.modulus();
        Elem(x.0.iter().zip(&y.0).map(|(&a, &b)| sub_mod(a, b, m)).collect())
    }

    pub fn neg(&self, x: &Elem) -> Elem {
        self.sub(&self.zero(), x)
    }

    pub fn scale(&self, k: u64, x: &Elem) -> Elem {
        let m = self.modulus();
        Elem(x.0.iter().map(|&a| mul_mod(a, k % m, m)).collect())
    }

    /// `x . y mod m`, the exponent numerator of `chi_x(y)`.
    pub fn pairing(&self, x: &Elem, y: &Elem) -> u64 {
        let m = self.modulus();
        x.0.iter().zip(&y.0).fold(0, |acc, (&a, &b)| add_mod(acc, mul_mod(a, b, m), m))
    }

    /// Mixed-radix index, little-endian in the coordinates.
    pub fn index(&self, e: &Elem) -> usize {
        let m = self.modulus() as usize;
        e.0.iter().rev().fold(0usize, |acc, &c| acc * m + c as usize)
    }

    pub fn element(&self, mut idx: usize) -> Elem {
        let m = self.modulus() as usize;
        let mut coords = Vec::with_capacity(self.rank());
        for _ in 0..self.rank() {
            coords.push((idx % m) as u64);
            idx /= m;
        }
        Elem(coords)
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order() as usize).map(move |i| self.element(i))
    }

    /// Closure of a set of generators under addition.
    pub fn span(&self, generators: &[Elem]) -> Vec<Elem> {
        let mut seen = vec![false; self.order() as usize];
        let zero = self.zero();
        seen[self.index(&zero)] = true;
        let mut members = vec![zero];
        let mut frontier = members.clone();
        while let Some(e) = frontier.pop() {
            for g in generators {
                let n = self.add(&e, g);
                let i = self.index(&n);
                if !seen[i] {
                    seen[i] = true;
                    members.push(n.clone());
                    frontier.push(n);
                }
            }
        }
        members.sort_by_key(|e| self.index(e));
        members
    }
}

impl fmt::Display for AbelianGroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AbelianGroupSpec::CyclicZN { n } => write!(f, "Z_{n}"),
            AbelianGroupSpec::VectorZpR { p, r } => write!(f, "Z_{p}^{r}"),
        }
    }
}
