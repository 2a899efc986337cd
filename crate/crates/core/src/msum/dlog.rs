use std::collections::HashMap;

use crate::arith::{inv_mod, isqrt, mul_mod, pow_mod};

/// Baby-step giant-step: the `b < order` with `base^b = target (mod modulus)`.
///
/// `base` must be a unit whose multiplicative order divides `order`.
/// Returns the smallest such `b`, or `None`.
pub fn discrete_log_bsgs(base: u64, target: u64, order: u64, modulus: u64) -> Option<u64> {
    let target = target % modulus;
    if order == 0 {
        return None;
    }
    let m = {
        let s = isqrt(order as u128) as u64;
        if s * s < order {
            s + 1
        } else {
            s
        }
    };
    let mut baby: HashMap<u64, u64> = HashMap::with_capacity(m as usize);
    let mut cur = 1 % modulus;
    for j in 0..m {
        baby.entry(cur).or_insert(j);
        cur = mul_mod(cur, base, modulus);
    }
    let giant = inv_mod(pow_mod(base, m, modulus), modulus)?;
    let mut gamma = target;
    for i in 0..m {
        if let Some(&j) = baby.get(&gamma) {
            let b = i * m + j;
            return (b < order).then_some(b);
        }
        gamma = mul_mod(gamma, giant, modulus);
    }
    None
}
