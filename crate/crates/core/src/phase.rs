//! Exact root-of-unity phases `exp(2 pi i t / m)`.

use std::f64::consts::TAU;
use std::ops::Mul;

use num_complex::Complex64;

use crate::arith::gcd;
use crate::group::{AbelianGroupSpec, Elem};

/// The phase `exp(2 pi i t/m)`, kept in lowest terms with `0 <= t < m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhaseValue {
    num: u64,
    den: u64,
}

impl PhaseValue {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "phase denominator must be positive");
        let t = num % den;
        let g = gcd(t, den);
        PhaseValue { num: t / g, den: den / g }
    }

    pub const ONE: PhaseValue = PhaseValue { num: 0, den: 1 };

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn conj(self) -> Self {
        PhaseValue::new(self.den - self.num, self.den)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(1.0, TAU * self.num as f64 / self.den as f64)
    }
}

impl Mul for PhaseValue {
    type Output = PhaseValue;

    fn mul(self, rhs: PhaseValue) -> PhaseValue {
        let den = self.den / gcd(self.den, rhs.den) * rhs.den;
        let t = (self.num as u128 * (den / self.den) as u128 + rhs.num as u128 * (den / rhs.den) as u128) % den as u128;
        PhaseValue::new(t as u64, den)
    }
}

/// `chi_x(y)`: `exp(2 pi i xy/N)` on `Z_N`, `exp(2 pi i (x.y)/p)` on `Z_p^r`.
pub fn character_eval(a: &AbelianGroupSpec, x: &Elem, y: &Elem) -> PhaseValue {
    PhaseValue::new(a.pairing(x, y), a.modulus())
}

/// Complex values of `exp(2 pi i t/m)` for `t < m`, so assembly never
/// recomputes transcendental functions for equal phases.
#[derive(Clone, Debug)]
pub struct RootTable {
    m: u64,
    roots: Vec<Complex64>,
}

impl RootTable {
    pub fn new(m: u64) -> Self {
        let roots = (0..m).map(|t| PhaseValue::new(t, m).to_complex()).collect();
        RootTable { m, roots }
    }

    #[inline]
    pub fn get(&self, t: u64) -> Complex64 {
        self.roots[(t % self.m) as usize]
    }

    pub fn phase(&self, ph: PhaseValue) -> Complex64 {
        debug_assert_eq!(self.m % ph.denominator(), 0);
        self.get(ph.numerator() * (self.m / ph.denominator()))
    }
}
