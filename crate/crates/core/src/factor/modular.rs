//! Residue rings used by the primality tests and rho: Montgomery form for
//! odd moduli below 2^64 and 2^128, plain reduction for anything larger.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

pub trait ModRing {
    /// Element representation; opaque outside the ring.
    type E: Clone + PartialEq;
    /// Integer type of the modulus.
    type Int: Clone;

    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn from_u64(&self, v: u64) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    /// `a / 2`; the modulus is odd.
    fn half(&self, a: &Self::E) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    /// `gcd(a, modulus)`. Montgomery scaling is a unit, so the raw
    /// representation gives the same gcd as the value itself.
    fn gcd_modulus(&self, a: &Self::E) -> Self::Int;
    fn modulus(&self) -> Self::Int;

    fn square(&self, a: &Self::E) -> Self::E {
        self.mul(a, a)
    }

    fn neg(&self, a: &Self::E) -> Self::E {
        self.sub(&self.zero(), a)
    }

    fn pow_u128(&self, base: &Self::E, mut exp: u128) -> Self::E {
        let mut acc = self.one();
        let mut b = base.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            exp >>= 1;
            if exp > 0 {
                b = self.square(&b);
            }
        }
        acc
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

#[derive(Clone, Debug)]
pub struct Mont64 {
    n: u64,
    inv: u64,
    r2: u64,
}

impl Mont64 {
    pub fn new(n: u64) -> Self {
        assert!(n % 2 == 1 && n > 1, "Montgomery modulus must be odd and > 1");
        let mut inv = n;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(n.wrapping_mul(inv)));
        }
        let r1 = ((1u128 << 64) % n as u128) as u64;
        let r2 = ((r1 as u128 * r1 as u128) % n as u128) as u64;
        Mont64 { n, inv, r2 }
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let lo = t as u64;
        let hi = (t >> 64) as u64;
        let m = lo.wrapping_mul(self.inv);
        let mh = ((m as u128 * self.n as u128) >> 64) as u64;
        let (r, borrow) = hi.overflowing_sub(mh);
        if borrow {
            r.wrapping_add(self.n)
        } else {
            r
        }
    }

    pub fn to_int(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }
}

impl ModRing for Mont64 {
    type E = u64;
    type Int = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        self.from_u64(1)
    }

    fn from_u64(&self, v: u64) -> u64 {
        self.redc((v % self.n) as u128 * self.r2 as u128)
    }

    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let (s, carry) = a.overflowing_add(*b);
        if carry || s >= self.n {
            s.wrapping_sub(self.n)
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        let (d, borrow) = a.overflowing_sub(*b);
        if borrow {
            d.wrapping_add(self.n)
        } else {
            d
        }
    }

    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.redc(*a as u128 * *b as u128)
    }

    fn half(&self, a: &u64) -> u64 {
        if a & 1 == 0 {
            a >> 1
        } else {
            (a >> 1) + (self.n >> 1) + 1
        }
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn gcd_modulus(&self, a: &u64) -> u64 {
        gcd_u64(*a, self.n)
    }

    fn modulus(&self) -> u64 {
        self.n
    }
}

#[inline]
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & MASK);
    let (b1, b0) = (b >> 64, b & MASK);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let lo = (p00 & MASK) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

#[inline]
fn mul_hi(a: u128, b: u128) -> u128 {
    mul_wide(a, b).0
}

#[derive(Clone, Debug)]
pub struct Mont128 {
    n: u128,
    inv: u128,
    r2: u128,
}

impl Mont128 {
    pub fn new(n: u128) -> Self {
        assert!(n % 2 == 1 && n > 1, "Montgomery modulus must be odd and > 1");
        let mut inv = n;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(n.wrapping_mul(inv)));
        }
        // 2^128 mod n, then doubled another 128 times.
        let mut r = (u128::MAX % n + 1) % n;
        for _ in 0..128 {
            r = add_mod_u128(r, r, n);
        }
        Mont128 { n, inv, r2: r }
    }

    #[inline]
    fn redc(&self, hi: u128, lo: u128) -> u128 {
        let m = lo.wrapping_mul(self.inv);
        let mh = mul_hi(m, self.n);
        let (r, borrow) = hi.overflowing_sub(mh);
        if borrow {
            r.wrapping_add(self.n)
        } else {
            r
        }
    }

    pub fn to_int(&self, a: u128) -> u128 {
        self.redc(0, a)
    }

    pub fn from_u128(&self, v: u128) -> u128 {
        let (hi, lo) = mul_wide(v % self.n, self.r2);
        self.redc(hi, lo)
    }
}

#[inline]
fn add_mod_u128(a: u128, b: u128, n: u128) -> u128 {
    let (s, carry) = a.overflowing_add(b);
    if carry || s >= n {
        s.wrapping_sub(n)
    } else {
        s
    }
}

impl ModRing for Mont128 {
    type E = u128;
    type Int = u128;

    fn zero(&self) -> u128 {
        0
    }

    fn one(&self) -> u128 {
        self.from_u128(1)
    }

    fn from_u64(&self, v: u64) -> u128 {
        self.from_u128(v as u128)
    }

    #[inline]
    fn add(&self, a: &u128, b: &u128) -> u128 {
        add_mod_u128(*a, *b, self.n)
    }

    #[inline]
    fn sub(&self, a: &u128, b: &u128) -> u128 {
        let (d, borrow) = a.overflowing_sub(*b);
        if borrow {
            d.wrapping_add(self.n)
        } else {
            d
        }
    }

    #[inline]
    fn mul(&self, a: &u128, b: &u128) -> u128 {
        let (hi, lo) = mul_wide(*a, *b);
        self.redc(hi, lo)
    }

    fn half(&self, a: &u128) -> u128 {
        if a & 1 == 0 {
            a >> 1
        } else {
            (a >> 1) + (self.n >> 1) + 1
        }
    }

    fn is_zero(&self, a: &u128) -> bool {
        *a == 0
    }

    fn gcd_modulus(&self, a: &u128) -> u128 {
        gcd_u128(*a, self.n)
    }

    fn modulus(&self) -> u128 {
        self.n
    }
}

/// Plain residues modulo an arbitrary odd `n`.
#[derive(Clone, Debug)]
pub struct BigRing {
    n: BigUint,
}

impl BigRing {
    pub fn new(n: BigUint) -> Self {
        assert!(n.is_odd() && n > BigUint::one(), "modulus must be odd and > 1");
        BigRing { n }
    }

    pub fn from_big(&self, v: &BigUint) -> BigUint {
        v % &self.n
    }
}

impl ModRing for BigRing {
    type E = BigUint;
    type Int = BigUint;

    fn zero(&self) -> BigUint {
        BigUint::zero()
    }

    fn one(&self) -> BigUint {
        BigUint::one()
    }

    fn from_u64(&self, v: u64) -> BigUint {
        BigUint::from(v) % &self.n
    }

    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.n {
            s - &self.n
        } else {
            s
        }
    }

    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            &self.n - (b - a)
        }
    }

    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.n
    }

    fn half(&self, a: &BigUint) -> BigUint {
        if a.is_even() {
            a >> 1
        } else {
            (a + &self.n) >> 1
        }
    }

    fn is_zero(&self, a: &BigUint) -> bool {
        a.is_zero()
    }

    fn gcd_modulus(&self, a: &BigUint) -> BigUint {
        a.gcd(&self.n)
    }

    fn modulus(&self) -> BigUint {
        self.n.clone()
    }
}
