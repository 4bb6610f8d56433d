//! Oracles shared by the integration tests and the acceptance harness. They
//! deliberately avoid the crate's factoring engine: plain trial division,
//! `BigUint::modpow` Miller-Rabin and a Floyd rho on `BigUint`.

#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use omega_bounds::bounds::{
    hybrid_bound, pow2_bound, ramification_bound, trivial_bound, Pow2Strength, RamificationContext,
};
use omega_bounds::cyclotomic::{phi_eval, ramified_divides, split_xn_minus_1};
use omega_bounds::partition::NFactorization;

pub fn small_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if sieve[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
    }
    out
}

fn mr_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71] {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'bases: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn floyd_split(n: &BigUint) -> BigUint {
    let mut c = BigUint::one();
    loop {
        let f = |v: &BigUint| (v * v + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = BigUint::one();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
        }
        if d != *n {
            return d;
        }
        c += 1u32;
    }
}

fn big_prime_factors(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if mr_prime(&n) {
        out.push(n);
        return;
    }
    let d = floyd_split(&n);
    let e = &n / &d;
    big_prime_factors(d, out);
    big_prime_factors(e, out);
}

/// Distinct prime factors of `v > 0`, ascending.
pub fn distinct_primes(v: &BigUint, trial: &[u64]) -> Vec<BigUint> {
    let mut n = v.clone();
    let mut out = Vec::new();
    for &p in trial {
        let pb = BigUint::from(p);
        if &pb * &pb > n {
            break;
        }
        if (&n % &pb).is_zero() {
            out.push(pb.clone());
            while (&n % &pb).is_zero() {
                n /= &pb;
            }
        }
    }
    let mut big = Vec::new();
    big_prime_factors(n, &mut big);
    out.extend(big);
    out.sort();
    out.dedup();
    out
}

pub fn omega(v: &BigUint, trial: &[u64]) -> usize {
    distinct_primes(v, trial).len()
}

/// `ω(x^n - 1)` straight from the integer.
pub fn omega_xn_minus_1(x: u64, n: u32, trial: &[u64]) -> usize {
    omega(&(BigUint::from(x).pow(n) - 1u32), trial)
}

#[derive(Debug, Default)]
pub struct Tally {
    pub checks: usize,
    pub failures: usize,
    /// The first few failures, described.
    pub examples: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < 10 {
                self.examples.push(what());
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.failures == 0
    }
}

/// Lemma-level divisibility facts over the stated ranges.
pub fn lemma_suite() -> Vec<(&'static str, Tally)> {
    let phis = small_primes(50);
    let rhos = small_primes(2000);
    let mut out = Vec::new();

    // ρ | x - 1 and ρ | Φ_φ(x) only for ρ = φ.
    let mut t = Tally::default();
    for &phi in &phis {
        for x in 2..=500u64 {
            let g = BigUint::from(x - 1).gcd(&phi_eval(phi, &BigUint::from(x)));
            let mut g = g.to_u64().expect("gcd divides x - 1");
            for &r in &rhos {
                if g % r == 0 {
                    t.check(r == phi, || format!("ρ={r} φ={phi} x={x}"));
                    while g % r == 0 {
                        g /= r;
                    }
                }
            }
            t.check(g == 1, || format!("gcd cofactor {g} at φ={phi} x={x}"));
        }
    }
    out.push(("common factors of x-1 and Φ_φ(x)", t));

    // φ | x^φ - 1 ⟺ φ | x - 1 and φ | Φ_φ(x); then φ^2 | x^φ - 1.
    let mut t = Tally::default();
    for &phi in &phis {
        let p = BigUint::from(phi);
        let p2 = &p * &p;
        for x in 1..=500u64 {
            let xb = BigUint::from(x);
            let lhs = (xb.pow(phi as u32) - 1u32).is_multiple_of(&p);
            let rhs = (BigUint::from(x - 1)).is_multiple_of(&p) && phi_eval(phi, &xb).is_multiple_of(&p);
            t.check(lhs == rhs, || format!("φ={phi} x={x}"));
            if lhs {
                t.check((xb.pow(phi as u32) - 1u32).is_multiple_of(&p2), || format!("φ^2 at φ={phi} x={x}"));
            }
        }
    }
    out.push(("divisibility of x^φ - 1 by φ", t));

    // Primes ρ ≠ φ dividing Φ_φ(x) are 1 mod φ (checked for ρ <= 2000).
    let mut t = Tally::default();
    for &phi in &phis {
        for x in 1..=500u64 {
            for &r in &rhos {
                if r == phi {
                    continue;
                }
                // Φ_φ(x) mod ρ by Horner.
                let xr = x % r;
                let mut acc = 0u64;
                for _ in 0..phi {
                    acc = (acc * xr + 1) % r;
                }
                if acc == 0 {
                    t.check(r % phi == 1, || format!("ρ={r} | Φ_{phi}({x})"));
                }
            }
        }
    }
    out.push(("primes of Φ_φ(x) are 1 mod φ", t));

    // In the tower split, a prime shared by an earlier and a later factor is
    // the later factor's base (for x - 1 versus anything, and across bases).
    let mut t = Tally::default();
    for n in 2..=60u64 {
        let nf = NFactorization::of(n).unwrap();
        for x in 2..=50u64 {
            let split = split_xn_minus_1(&BigUint::from(x), &nf).unwrap();
            t.check(split.product() == BigUint::from(x).pow(n as u32) - 1u32, || {
                format!("product at x={x} n={n}")
            });
            let fs = &split.factors;
            for j in 1..fs.len() {
                let base = fs[j].base.expect("only the first factor is x - 1");
                for i in 0..j {
                    if fs[i].base == Some(base) {
                        continue;
                    }
                    let mut g = fs[i].value.gcd(&fs[j].value);
                    let b = BigUint::from(base);
                    while !g.is_zero() && g.is_multiple_of(&b) {
                        g /= &b;
                    }
                    t.check(g.is_one(), || format!("x={x} n={n} factors {i},{j} share {g}"));
                }
            }
        }
    }
    out.push(("cross-base factors share only the base", t));

    // φ | x^n - 1 ⟺ φ | x^r - 1 (r the φ-free part of n) ⟺ φ divides every
    // factor of base φ in the split.
    let mut t = Tally::default();
    for n in 2..=60u64 {
        let nf = NFactorization::of(n).unwrap();
        for x in 2..=50u64 {
            let xb = BigUint::from(x);
            let split = split_xn_minus_1(&xb, &nf).unwrap();
            for &phi in nf.bases() {
                let claimed = ramified_divides(phi, &xb, &nf).unwrap();
                let p = BigUint::from(phi);
                let direct = (xb.pow(n as u32) - 1u32).is_multiple_of(&p);
                let mut r = n;
                while r % phi == 0 {
                    r /= phi;
                }
                let via_r = (xb.pow(r as u32) - 1u32).is_multiple_of(&p);
                let all_pieces = split
                    .factors
                    .iter()
                    .filter(|f| f.base == Some(phi))
                    .all(|f| f.value.is_multiple_of(&p));
                t.check(claimed == direct && direct == via_r && via_r == all_pieces, || {
                    format!("φ={phi} x={x} n={n}")
                });
            }
        }
    }
    out.push(("divisibility by a base prime of n", t));

    // Odd x, n = 2^a: 2^{a+2} | x^n - 1.
    let mut t = Tally::default();
    for a in 1..=6u32 {
        let n = 1u32 << a;
        let m = 1u128 << (a + 2);
        for x in (1..2000u128).step_by(2) {
            let mut acc = 1u128;
            for _ in 0..n {
                acc = acc * (x % m) % m;
            }
            t.check(acc == 1, || format!("x={x} a={a}"));
        }
    }
    out.push(("2^{a+2} divides x^{2^a} - 1 for odd x", t));
    out
}

pub const SOUNDNESS_NS: [u64; 8] = [2, 3, 4, 5, 6, 8, 9, 12];

/// Checks every bound variant that applies to `x` against the true
/// `ω(x^n - 1)` for `x ∈ [2, x_max]`.
pub fn soundness_suite(x_max: u64) -> Tally {
    let trial = small_primes(100_000);
    let mut t = Tally::default();
    let mut cache: HashMap<(u64, usize, String), BigUint> = HashMap::new();
    for &n in &SOUNDNESS_NS {
        let nf = NFactorization::of(n).unwrap();
        for x in 2..=x_max {
            let w = omega_xn_minus_1(x, n as u32, &trial);
            let xb = BigUint::from(x);
            let mut variants: Vec<(String, BigUint)> = Vec::new();
            let mut get = |key: String, f: &dyn Fn() -> BigUint| {
                cache.entry((n, w, key.clone())).or_insert_with(f).clone()
            };
            variants.push(("trivial".into(), get("trivial".into(), &|| trivial_bound(&nf, w).unwrap().bound)));
            variants.push(("hybrid".into(), get("hybrid".into(), &|| hybrid_bound(&nf, w).unwrap().bound)));
            for &phi in nf.bases() {
                let divides = (xb.pow(n as u32) - 1u32).is_multiple_of(&BigUint::from(phi));
                if divides && w == 0 {
                    continue;
                }
                let key = format!("ram {phi} {divides}");
                let b = get(key.clone(), &|| {
                    let ctx = RamificationContext::new(&nf, phi, divides).unwrap();
                    ramification_bound(&nf, w, &ctx).unwrap().bound
                });
                variants.push((key, b));
            }
            if let Some(a) = nf.pow2_exponent() {
                variants.push(("pow2".into(), get("pow2".into(), &|| pow2_bound(a, w, Pow2Strength::Full).unwrap().bound)));
                variants.push(("pow2 weak".into(), get("pow2 weak".into(), &|| pow2_bound(a, w, Pow2Strength::Weak).unwrap().bound)));
            }
            for (name, b) in variants {
                t.check(xb >= b, || format!("x={x} n={n} ω={w}: {name} bound {b}"));
            }
        }
    }
    t
}
