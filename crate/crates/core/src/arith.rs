//! Exact integer helpers shared across modules.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

pub fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r > 0 && r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Smallest `r` with `r^d >= v`. Exact; `v >= 1`, `d >= 1`.
pub fn ceil_nth_root(v: &BigUint, d: u32) -> BigUint {
    assert!(d >= 1, "root degree must be positive");
    if v.is_zero() {
        return BigUint::zero();
    }
    let r = v.nth_root(d);
    if &r.pow(d) < v {
        r + 1u32
    } else {
        r
    }
}

/// Largest `r` with `r^d <= v`.
pub fn floor_nth_root(v: &BigUint, d: u32) -> BigUint {
    assert!(d >= 1, "root degree must be positive");
    v.nth_root(d)
}

pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Product of the values as a big integer; the empty product is 1.
pub fn product<'a>(values: impl IntoIterator<Item = &'a u64>) -> BigUint {
    values
        .into_iter()
        .fold(BigUint::one(), |acc, &v| acc * v)
}

pub fn big_to_u64(v: &BigUint) -> Option<u64> {
    v.to_u64()
}
