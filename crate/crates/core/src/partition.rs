//! Residue-class partition of the primes induced by the prime factors of `n`.
//!
//! For `n = φ_1^{a_1} ⋯ φ_m^{a_m}` with `φ_1 < … < φ_m`, a prime `ρ` lies in
//! class `j >= 1` when `j` is the largest index with `ρ ≡ 1 (mod φ_j)`, and in
//! class 0 when no such index exists. The classes are disjoint and cover all
//! primes; membership depends only on the bases, never on the exponents.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::primes_in_range;

/// `n` as an ascending list of prime bases with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NFactorization {
    bases: Vec<u64>,
    exponents: Vec<u32>,
    #[serde(with = "crate::serde_big")]
    n: BigUint,
}

impl NFactorization {
    pub fn new(bases: Vec<u64>, exponents: Vec<u32>) -> Result<Self> {
        if bases.len() != exponents.len() {
            return Err(Error::InvalidFactorization(
                "bases and exponents differ in length".into(),
            ));
        }
        if bases.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFactorization(
                "bases must be strictly increasing".into(),
            ));
        }
        if let Some(&b) = bases.iter().find(|&&b| !is_small_prime(b)) {
            return Err(Error::NotPrime(b));
        }
        if exponents.contains(&0) {
            return Err(Error::InvalidFactorization(
                "exponents must be positive".into(),
            ));
        }
        let n = bases
            .iter()
            .zip(&exponents)
            .fold(BigUint::one(), |acc, (&b, &e)| acc * BigUint::from(b).pow(e));
        Ok(NFactorization {
            bases,
            exponents,
            n,
        })
    }

    /// Factors a machine-size `n >= 1` by trial division.
    pub fn of(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        let mut bases = Vec::new();
        let mut exponents = Vec::new();
        let mut rest = n;
        let mut p = 2u64;
        while p * p <= rest {
            if rest.is_multiple_of(p) {
                let mut e = 0;
                while rest.is_multiple_of(p) {
                    rest /= p;
                    e += 1;
                }
                bases.push(p);
                exponents.push(e);
            }
            p += 1;
        }
        if rest > 1 {
            bases.push(rest);
            exponents.push(1);
        }
        Self::new(bases, exponents)
    }

    pub fn bases(&self) -> &[u64] {
        &self.bases
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    /// `n` as a machine integer, when it fits.
    pub fn n_u64(&self) -> Option<u64> {
        num_traits::ToPrimitive::to_u64(&self.n)
    }

    /// Number of distinct prime factors `m`.
    pub fn m(&self) -> usize {
        self.bases.len()
    }

    /// 1-based index of `prime` among the bases.
    pub fn base_index(&self, prime: u64) -> Option<usize> {
        self.bases.iter().position(|&b| b == prime).map(|i| i + 1)
    }

    /// `∏_{k<=t} φ_k^{a_k}` with overflow check; `t = 0` gives 1.
    pub fn level_exponent(&self, t: usize) -> Result<u64> {
        let mut acc = 1u64;
        for (&b, &e) in self.bases.iter().zip(&self.exponents).take(t) {
            for _ in 0..e {
                acc = acc.checked_mul(b).ok_or(Error::ExponentOverflow)?;
            }
        }
        Ok(acc)
    }

    /// Whether `n` is a power of two (n = 2^a, a >= 1).
    pub fn pow2_exponent(&self) -> Option<u32> {
        (self.bases == [2]).then(|| self.exponents[0])
    }

    /// Same bases with every exponent raised by `by`.
    pub fn raised(&self, by: u32) -> Self {
        Self::new(
            self.bases.clone(),
            self.exponents.iter().map(|e| e + by).collect(),
        )
        .expect("raising exponents keeps the factorization valid")
    }
}

impl fmt::Display for NFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.n)
    }
}

fn is_small_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Class index of the prime `rho` with respect to `n`'s bases.
pub fn classify_prime(rho: u64, n_fact: &NFactorization) -> Result<usize> {
    if !is_small_prime(rho) {
        return Err(Error::NotPrime(rho));
    }
    Ok(classify_unchecked(rho, n_fact.bases()))
}

fn classify_unchecked(rho: u64, bases: &[u64]) -> usize {
    bases
        .iter()
        .rposition(|&phi| rho % phi == 1)
        .map_or(0, |i| i + 1)
}

/// Modification applied to a class product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassModifier {
    None,
    /// Remove this prime from the candidate list.
    Exclude(u64),
    /// Count this prime as one mandatory member.
    Force(u64),
}

/// Lazily extended lists of the classes `Π_n^0 … Π_n^m`.
#[derive(Clone, Debug)]
pub struct PrimePartition {
    n_fact: NFactorization,
    classes: Vec<Vec<u64>>,
    prefix: Vec<Vec<BigUint>>,
    limit: u64,
}

impl PrimePartition {
    pub fn new(n_fact: NFactorization) -> Self {
        let m = n_fact.m();
        let mut part = PrimePartition {
            n_fact,
            classes: vec![Vec::new(); m + 1],
            prefix: vec![vec![BigUint::one()]; m + 1],
            limit: 1,
        };
        part.extend_to(1024);
        part
    }

    pub fn n_fact(&self) -> &NFactorization {
        &self.n_fact
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Largest prime classified so far.
    pub fn generation_limit(&self) -> u64 {
        self.limit
    }

    /// Elements of class `j` known so far.
    pub fn known(&self, j: usize) -> &[u64] {
        &self.classes[j]
    }

    /// Size of class `j` when it is finite. Only class 0 of an even `n` is
    /// finite: it is exactly `{2}`.
    pub fn class_capacity(&self, j: usize) -> Option<usize> {
        (j == 0 && self.n_fact.bases().first() == Some(&2)).then_some(1)
    }

    fn check_class(&self, j: usize) -> Result<()> {
        if j >= self.classes.len() {
            return Err(Error::ClassIndex {
                index: j,
                classes: self.classes.len(),
            });
        }
        Ok(())
    }

    fn extend_to(&mut self, new_limit: u64) {
        if new_limit <= self.limit {
            return;
        }
        for p in primes_in_range(self.limit + 1, new_limit) {
            let j = classify_unchecked(p, self.n_fact.bases());
            self.classes[j].push(p);
        }
        self.limit = new_limit;
    }

    /// Makes the first `count` members of class `j` available (or all of a
    /// finite class). Returns how many are available.
    pub fn ensure(&mut self, j: usize, count: usize) -> usize {
        let want = self.class_capacity(j).map_or(count, |cap| count.min(cap));
        while self.classes[j].len() < want {
            let next = self.limit * 2;
            self.extend_to(next);
        }
        want
    }

    /// `r_{i,j}`: the `i`-th (1-based) smallest prime of class `j`, or `None`
    /// past the end of a finite class.
    pub fn class_element(&mut self, j: usize, i: usize) -> Result<Option<u64>> {
        self.check_class(j)?;
        assert!(i >= 1, "class element index is 1-based");
        let avail = self.ensure(j, i);
        Ok((avail >= i).then(|| self.classes[j][i - 1]))
    }

    /// 1-based rank of `prime` inside class `j`.
    pub fn rank_in_class(&mut self, j: usize, prime: u64) -> Result<usize> {
        self.check_class(j)?;
        if classify_prime(prime, &self.n_fact)? != j {
            return Err(Error::NotInClass { prime, class: j });
        }
        self.extend_to(prime);
        let pos = self.classes[j]
            .binary_search(&prime)
            .expect("classified prime below the limit is listed");
        Ok(pos + 1)
    }

    fn unmodified_prefix(&mut self, j: usize, count: usize) -> &[BigUint] {
        let avail = self.ensure(j, count);
        let pre = &mut self.prefix[j];
        while pre.len() <= avail {
            let k = pre.len();
            let next = &pre[k - 1] * self.classes[j][k - 1];
            pre.push(next);
        }
        &self.prefix[j][..=avail]
    }

    /// Product of `k` members of class `j` chosen as small as possible, under
    /// `modifier`. `Ok(None)` means class `j` does not have enough members.
    pub fn class_product(
        &mut self,
        j: usize,
        k: usize,
        modifier: ClassModifier,
    ) -> Result<Option<BigUint>> {
        let table = self.class_products(j, k, modifier)?;
        Ok(table.into_iter().nth(k).flatten())
    }

    /// `class_product(j, k, modifier)` for every `k` in `0..=max_k`.
    pub fn class_products(
        &mut self,
        j: usize,
        max_k: usize,
        modifier: ClassModifier,
    ) -> Result<Vec<Option<BigUint>>> {
        self.check_class(j)?;
        match modifier {
            ClassModifier::None => {
                let pre = self.unmodified_prefix(j, max_k);
                Ok((0..=max_k).map(|k| pre.get(k).cloned()).collect())
            }
            ClassModifier::Exclude(p) => {
                let b = self.rank_in_class(j, p)?;
                let pre = self.unmodified_prefix(j, max_k + 1).to_vec();
                Ok((0..=max_k)
                    .map(|k| {
                        if k < b {
                            pre.get(k).cloned()
                        } else {
                            pre.get(k + 1).map(|v| v / p)
                        }
                    })
                    .collect())
            }
            ClassModifier::Force(p) => {
                if max_k == 0 {
                    return Err(Error::ForceWithZeroCount);
                }
                let b = self.rank_in_class(j, p)?;
                let pre = self.unmodified_prefix(j, max_k).to_vec();
                Ok((0..=max_k)
                    .map(|k| {
                        if k == 0 {
                            None
                        } else if k >= b {
                            pre.get(k).cloned()
                        } else {
                            pre.get(k - 1).map(|v| v * p)
                        }
                    })
                    .collect())
            }
        }
    }
}
