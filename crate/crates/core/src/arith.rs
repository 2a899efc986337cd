//! Modular integer helpers shared by the group and solver code.

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    add_mod(a % m, m - b % m, m)
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return if m == 1 { Some(0) } else { None };
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Deterministic trial division. Desk-scale moduli only.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn euler_phi(n: u64) -> u64 {
    (1..=n).filter(|&x| gcd(x, n) == 1).count() as u64
}

/// `binom(n, k) mod p` for prime `p` (Lucas' theorem).
pub fn binom_mod_p(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while n > 0 || k > 0 {
        let (ni, ki) = (n % p, k % p);
        if ki > ni {
            return 0;
        }
        acc = mul_mod(acc, small_binom_mod(ni, ki, p), p);
        n /= p;
        k /= p;
    }
    acc
}

fn small_binom_mod(n: u64, k: u64, p: u64) -> u64 {
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num = mul_mod(num, (n - i) % p, p);
        den = mul_mod(den, (i + 1) % p, p);
    }
    mul_mod(num, inv_mod(den, p).expect("k < p so k! is a unit"), p)
}

/// Square roots modulo an odd prime.
///
/// Below `TABLE_LIMIT` the roots come from a precomputed residue table;
/// above it Tonelli-Shanks is used. Both paths are deterministic.
#[derive(Debug, Clone)]
pub struct SqrtModP {
    p: u64,
    table: Option<Vec<Option<u64>>>,
}

impl SqrtModP {
    pub const TABLE_LIMIT: u64 = 10_000;

    pub fn new(p: u64) -> Self {
        let table = (p < Self::TABLE_LIMIT).then(|| {
            let mut t = vec![None; p as usize];
            for r in 0..p {
                let sq = mul_mod(r, r, p) as usize;
                // keep the smaller root
                if t[sq].is_none() {
                    t[sq] = Some(r);
                }
            }
            t
        });
        SqrtModP { p, table }
    }

    /// Some root `r` with `r^2 = a`, the smaller of the pair when the table is used.
    pub fn sqrt(&self, a: u64) -> Option<u64> {
        let a = a % self.p;
        match &self.table {
            Some(t) => t[a as usize],
            None => tonelli_shanks(a, self.p),
        }
    }
}

pub fn tonelli_shanks(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Integer square root, floor.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}
