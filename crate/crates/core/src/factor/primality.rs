//! Primality: Miller–Rabin with the first thirteen prime bases (a proof below
//! 3.3·10^24), Baillie–PSW above that.

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::ToPrimitive;

use super::modular::{BigRing, ModRing, Mont128, Mont64};

const BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const SMALL: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// 3 317 044 064 679 887 385 961 981: the thirteen bases decide every n below.
const MR_DETERMINISTIC_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;

fn bits_msb_first(mut v: u128) -> Vec<bool> {
    let mut bits = Vec::with_capacity(128);
    while v > 0 {
        bits.push(v & 1 == 1);
        v >>= 1;
    }
    bits.reverse();
    bits
}

fn big_bits_msb_first(v: &BigUint) -> Vec<bool> {
    (0..v.bits()).rev().map(|i| v.bit(i)).collect()
}

fn pow_bits<R: ModRing>(ring: &R, base: &R::E, bits: &[bool]) -> R::E {
    let mut acc = ring.one();
    for &b in bits {
        acc = ring.square(&acc);
        if b {
            acc = ring.mul(&acc, base);
        }
    }
    acc
}

/// One strong-probable-prime round; `n - 1 = d · 2^s` with `d` given by bits.
fn sprp<R: ModRing>(ring: &R, base: &R::E, d_bits: &[bool], s: u32) -> bool {
    let one = ring.one();
    let minus_one = ring.neg(&one);
    let mut x = pow_bits(ring, base, d_bits);
    if x == one || x == minus_one {
        return true;
    }
    for _ in 1..s {
        x = ring.square(&x);
        if x == minus_one {
            return true;
        }
        if x == one {
            return false;
        }
    }
    false
}

fn jacobi_small(mut a: u64, mut m: u64) -> i32 {
    debug_assert!(m % 2 == 1);
    a %= m;
    let mut sign = 1;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if m % 8 == 3 || m % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            sign = -sign;
        }
        a %= m;
    }
    if m == 1 {
        sign
    } else {
        0
    }
}

/// Selfridge's parameter: first `D` in 5, -7, 9, -11, … with `(D/n) = -1`.
/// `None` when some `|D|` shares a factor with `n` (so `n` is composite,
/// given `n` exceeds every `|D|` tried). `n_mod(k)` must return `n mod k`.
fn selfridge_d(n_mod: impl Fn(u64) -> u64) -> Option<i64> {
    let n4 = n_mod(4);
    let mut abs = 5u64;
    let mut negative = false;
    loop {
        let reciprocity = if abs % 4 == 3 && n4 == 3 { -1 } else { 1 };
        let mut j = jacobi_small(n_mod(abs), abs) * reciprocity;
        if negative && n4 == 3 {
            j = -j;
        }
        match j {
            -1 => return Some(if negative { -(abs as i64) } else { abs as i64 }),
            0 => return None,
            _ => {}
        }
        abs += 2;
        negative = !negative;
    }
}

fn from_i64<R: ModRing>(ring: &R, v: i64) -> R::E {
    if v >= 0 {
        ring.from_u64(v as u64)
    } else {
        ring.neg(&ring.from_u64(v.unsigned_abs()))
    }
}

/// Strong Lucas test with `P = 1`, `Q = (1 - D) / 4`; `n + 1 = d · 2^s`.
fn strong_lucas<R: ModRing>(ring: &R, d: i64, d_bits: &[bool], s: u32) -> bool {
    let q = (1 - d) / 4;
    let dd = from_i64(ring, d);
    let qq = from_i64(ring, q);
    let mut u = ring.one();
    let mut v = ring.one();
    let mut qk = qq.clone();
    for &bit in &d_bits[1..] {
        u = ring.mul(&u, &v);
        v = ring.sub(&ring.square(&v), &ring.add(&qk, &qk));
        qk = ring.square(&qk);
        if bit {
            let nu = ring.half(&ring.add(&u, &v));
            let nv = ring.half(&ring.add(&ring.mul(&dd, &u), &v));
            u = nu;
            v = nv;
            qk = ring.mul(&qk, &qq);
        }
    }
    if ring.is_zero(&u) || ring.is_zero(&v) {
        return true;
    }
    for _ in 1..s {
        v = ring.sub(&ring.square(&v), &ring.add(&qk, &qk));
        if ring.is_zero(&v) {
            return true;
        }
        qk = ring.square(&qk);
    }
    false
}

/// Handles everything up to 97^2; `None` means "undecided, n > 9409 and
/// coprime to the small primes".
fn small_screen(n: u128) -> Option<bool> {
    if n < 2 {
        return Some(false);
    }
    for &p in &SMALL {
        if n == p as u128 {
            return Some(true);
        }
        if n.is_multiple_of(p as u128) {
            return Some(false);
        }
    }
    if n < 97 * 97 {
        return Some(true);
    }
    None
}

fn split_pow2(v: u128) -> (Vec<bool>, u32) {
    let s = v.trailing_zeros();
    (bits_msb_first(v >> s), s)
}

fn is_square_u128(n: u128) -> bool {
    let r = n.sqrt();
    r * r == n
}

pub fn is_prime_u64(n: u64) -> bool {
    if let Some(v) = small_screen(n as u128) {
        return v;
    }
    let ring = Mont64::new(n);
    let (d_bits, s) = split_pow2(n as u128 - 1);
    BASES[..12]
        .iter()
        .all(|&a| sprp(&ring, &ring.from_u64(a), &d_bits, s))
}

pub fn is_prime_u128(n: u128) -> bool {
    if let Ok(small) = u64::try_from(n) {
        return is_prime_u64(small);
    }
    if let Some(v) = small_screen(n) {
        return v;
    }
    let ring = Mont128::new(n);
    let (d_bits, s) = split_pow2(n - 1);
    if n < MR_DETERMINISTIC_LIMIT {
        return BASES
            .iter()
            .all(|&a| sprp(&ring, &ring.from_u64(a), &d_bits, s));
    }
    if !sprp(&ring, &ring.from_u64(2), &d_bits, s) || is_square_u128(n) {
        return false;
    }
    let Some(d) = selfridge_d(|k| (n % k as u128) as u64) else {
        return false;
    };
    // n is odd and below u128::MAX (which is divisible by 3), so n + 1 fits.
    let (np1_bits, t) = split_pow2(n + 1);
    strong_lucas(&ring, d, &np1_bits, t)
}

pub fn is_prime_big(n: &BigUint) -> bool {
    if let Some(v) = n.to_u128() {
        return is_prime_u128(v);
    }
    for &p in &SMALL {
        if (n % p).to_u64() == Some(0) {
            return false;
        }
    }
    let ring = BigRing::new(n.clone());
    let nm1 = n - 1u32;
    let s = nm1.trailing_zeros().expect("n - 1 > 0") as u32;
    let d_bits = big_bits_msb_first(&(&nm1 >> s));
    if !sprp(&ring, &ring.from_u64(2), &d_bits, s) {
        return false;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        return false;
    }
    let Some(d) = selfridge_d(|k| (n % k).to_u64().expect("residue below k")) else {
        return false;
    };
    let np1 = n + 1u32;
    let t = np1.trailing_zeros().expect("n + 1 > 0") as u32;
    let np1_bits = big_bits_msb_first(&(&np1 >> t));
    strong_lucas(&ring, d, &np1_bits, t)
}
