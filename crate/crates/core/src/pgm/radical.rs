use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// `sum_s c_s sqrt(s)` with `s` squarefree and `c_s > 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RadicalSum {
    terms: BTreeMap<u64, u128>,
}

/// `n = m^2 s` with `s` squarefree; returns `(m, s)`.
pub fn squarefree_split(mut n: u64) -> (u64, u64) {
    let (mut m, mut s) = (1, 1);
    let mut f = 2;
    while f * f <= n {
        while n.is_multiple_of(f * f) {
            n /= f * f;
            m *= f;
        }
        if n.is_multiple_of(f) {
            n /= f;
            s *= f;
        }
        f += 1;
    }
    (m, s * n)
}

impl RadicalSum {
    /// Adds `c sqrt(n)`.
    pub fn add_sqrt(&mut self, c: u128, n: u64) {
        if c == 0 || n == 0 {
            return;
        }
        let (m, s) = squarefree_split(n);
        *self.terms.entry(s).or_insert(0) += c * m as u128;
    }

    pub fn add(&mut self, other: &RadicalSum) {
        for (&s, &c) in &other.terms {
            *self.terms.entry(s).or_insert(0) += c;
        }
    }

    /// `(sum_i sqrt(a_i))^2`.
    pub fn square_of_root_sum(values: &[u64]) -> Self {
        let mut out = RadicalSum::default();
        for (i, &a) in values.iter().enumerate() {
            out.add_sqrt(1, a * a);
            for &b in &values[i + 1..] {
                out.add_sqrt(2, a * b);
            }
        }
        out
    }

    pub fn rational_part(&self) -> u128 {
        self.terms.get(&1).copied().unwrap_or(0)
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&s| s == 1)
    }

    pub fn to_f64(&self) -> f64 {
        self.terms.iter().map(|(&s, &c)| c as f64 * (s as f64).sqrt()).sum()
    }

    pub fn terms(&self) -> &BTreeMap<u64, u128> {
        &self.terms
    }

    /// Exact sign of `scale * self - q` for `scale > 0`.
    pub fn compare_scaled(&self, scale: Ratio<i128>, q: Ratio<i128>) -> Result<Ordering> {
        // compare irrational part I with R = q/scale - rational part
        let r = q / scale - Ratio::from_integer(self.rational_part() as i128);
        let irrational: Vec<(u64, u128)> = self.terms.iter().filter(|(&s, _)| s != 1).map(|(&s, &c)| (s, c)).collect();
        if irrational.is_empty() {
            return Ok(Ratio::from_integer(0).cmp(&r));
        }
        if r <= Ratio::from_integer(0) {
            return Ok(Ordering::Greater);
        }
        if let [(s, c)] = irrational[..] {
            // c sqrt(s) vs r > 0: compare c^2 s with r^2
            let lhs = Ratio::from_integer((c * c) as i128 * s as i128);
            return Ok(lhs.cmp(&(r * r)));
        }
        // several independent radicals: the sum is irrational, so never equal to r
        let value: f64 = irrational.iter().map(|&(s, c)| c as f64 * (s as f64).sqrt()).sum();
        let target = *r.numer() as f64 / *r.denom() as f64;
        let tol = 1e-12 * value.abs().max(target.abs()).max(1.0);
        if (value - target).abs() > tol {
            Ok(value.partial_cmp(&target).expect("finite"))
        } else {
            Err(Error::Invariant("radical comparison within floating tolerance".into()))
        }
    }
}

impl std::fmt::Display for RadicalSum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|(&s, &c)| if s == 1 { c.to_string() } else { format!("{c}*sqrt({s})") }).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree() {
        assert_eq!(squarefree_split(1), (1, 1));
        assert_eq!(squarefree_split(12), (2, 3));
        assert_eq!(squarefree_split(72), (6, 2));
        assert_eq!(squarefree_split(30), (1, 30));
    }

    #[test]
    fn squares_and_comparisons() {
        let s = RadicalSum::square_of_root_sum(&[1, 1, 1]);
        assert_eq!(s.to_string(), "9");
        let t = RadicalSum::square_of_root_sum(&[2, 1]);
        assert_eq!(t.to_string(), "3 + 2*sqrt(2)");
        let one = Ratio::from_integer(1);
        assert_eq!(t.compare_scaled(one, Ratio::new(58, 10)).unwrap(), Ordering::Greater);
        assert_eq!(t.compare_scaled(one, Ratio::new(583, 100)).unwrap(), Ordering::Less);
        assert_eq!(s.compare_scaled(Ratio::new(1, 3), Ratio::from_integer(3)).unwrap(), Ordering::Equal);
    }
}
