//! Sieve criteria for membership in `L_n`, in exact rational arithmetic.
//!
//! Each criterion produces a threshold `R`: a prime power `q > R` is a member.
//! The radical of `q^n - 1` is split as `k · ∏φ_i · ∏l_j`, always with every
//! prime of `k` below every `φ_i` below every `l_j`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{euler_phi, FactorMultiset};
use crate::primes::nth_prime;

/// A sieve threshold; `Infinite` when no split of the radical applies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Threshold {
    Finite(BigRational),
    Infinite,
}

impl Threshold {
    /// `q > R`, decided exactly.
    pub fn passes(&self, q: &BigUint) -> bool {
        match self {
            Threshold::Finite(r) => BigRational::from_integer(BigInt::from(q.clone())) > *r,
            Threshold::Infinite => false,
        }
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Threshold::Finite(r) => Some(r),
            Threshold::Infinite => None,
        }
    }

    /// `⌊R⌋`, or `None` for the sentinel.
    pub fn floor(&self) -> Option<BigUint> {
        self.finite().map(|r| {
            r.floor()
                .to_integer()
                .to_biguint()
                .expect("thresholds are non-negative")
        })
    }
}

impl PartialOrd for Threshold {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Threshold {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Threshold::Finite(a), Threshold::Finite(b)) => a.cmp(b),
            (Threshold::Finite(_), Threshold::Infinite) => Ordering::Less,
            (Threshold::Infinite, Threshold::Finite(_)) => Ordering::Greater,
            (Threshold::Infinite, Threshold::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Finite(r) => write!(f, "{r}"),
            Threshold::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SieveKind {
    Prime,
    Modified,
    General,
}

impl fmt::Display for SieveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SieveKind::Prime => "prime",
            SieveKind::Modified => "modified",
            SieveKind::General => "general",
        })
    }
}

/// The factor written `F` in the modified sieve: `φ(k)` or `φ(k)/k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TotientTerm {
    #[default]
    Totient,
    TotientRatio,
}

/// Shape of the modified-sieve threshold. The default (`F = φ(k)`, no `- 1`
/// inside the square) is the form that reproduces the published degree-5
/// survivor counts; the alternatives are kept for comparison.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModifiedForm {
    pub term: TotientTerm,
    /// Subtract 1 from the quotient before squaring.
    pub subtract_one: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveSplit {
    pub k_part: FactorMultiset,
    pub phi_part: Vec<BigUint>,
    pub l_part: Vec<BigUint>,
    pub delta: BigRational,
    pub epsilon: BigRational,
    pub m_ratio: BigRational,
}

impl SieveSplit {
    /// Splits the ascending radical primes: the top `r` become `l`, the next
    /// `s` become `φ`, the rest form `k`.
    pub fn from_sorted(primes: &[BigUint], s: usize, r: usize) -> Result<Self> {
        if s + r > primes.len() {
            return Err(Error::InvalidArgument(format!(
                "split of {} primes into s={s}, r={r}",
                primes.len()
            )));
        }
        let w = primes.len();
        let k_primes = &primes[..w - s - r];
        let phi_part = primes[w - s - r..w - r].to_vec();
        let l_part = primes[w - r..].to_vec();
        let k_part = FactorMultiset::new(k_primes.iter().map(|p| (p.clone(), 1)))?;
        let k = k_part.value().clone();
        let m_ratio = ratio(euler_phi(&k_part), k);
        Ok(SieveSplit {
            delta: delta_of(&phi_part),
            epsilon: reciprocal_sum(&l_part),
            k_part,
            phi_part,
            l_part,
            m_ratio,
        })
    }

    pub fn s(&self) -> usize {
        self.phi_part.len()
    }

    pub fn r(&self) -> usize {
        self.l_part.len()
    }
}

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn reciprocal_sum(primes: &[BigUint]) -> BigRational {
    primes
        .iter()
        .fold(BigRational::zero(), |acc, p| acc + ratio(BigUint::one(), p.clone()))
}

/// `δ = 1 - Σ 1/φ_i`.
pub fn delta_of(phis: &[BigUint]) -> BigRational {
    BigRational::one() - reciprocal_sum(phis)
}

fn pow2(e: usize) -> BigRational {
    int(BigInt::one() << e)
}

fn n_minus_1_sq(n: u64) -> BigRational {
    let v = BigInt::from(n.saturating_sub(1));
    int(&v * &v)
}

/// `(n-1)^2 · 4^{ω-s} · ((s-1)/δ + 2)^2`.
pub fn prime_sieve_threshold(n: u64, omega: usize, phis: &[BigUint]) -> Result<BigRational> {
    let s = phis.len();
    if s > omega {
        return Err(Error::InvalidArgument(format!("s = {s} exceeds ω = {omega}")));
    }
    let delta = delta_of(phis);
    if !delta.is_positive() {
        return Err(Error::Inapplicable("δ must be positive"));
    }
    let inner = int(s as i64 - 1) / delta + int(2);
    Ok(n_minus_1_sq(n) * pow2(2 * (omega - s)) * &inner * &inner)
}

/// The `(ω+1-s)`-th through `ω`-th primes: the largest `δ` could possibly be
/// smaller than with the true primes of `q^n - 1`.
pub fn presumed_phis(omega: usize, s: usize) -> Vec<BigUint> {
    (omega + 1 - s..=omega)
        .filter(|&i| i >= 1)
        .map(|i| BigUint::from(nth_prime(i)))
        .collect()
}

/// Prime-sieve threshold with unknown factorization, minimized over `s`.
/// Returns the threshold and the minimizing `s` (smallest on ties).
pub fn presumed_prime_sieve(n: u64, omega: usize) -> (BigRational, usize) {
    let mut best: Option<(BigRational, usize)> = None;
    for s in 0..=omega {
        let Ok(t) = prime_sieve_threshold(n, omega, &presumed_phis(omega, s)) else {
            continue;
        };
        if best.as_ref().is_none_or(|(b, _)| t < *b) {
            best = Some((t, s));
        }
    }
    best.expect("s = 0 always applies")
}

fn totient_term(split: &SieveSplit, term: TotientTerm) -> BigRational {
    match term {
        TotientTerm::Totient => int(BigInt::from(euler_phi(&split.k_part))),
        TotientTerm::TotientRatio => split.m_ratio.clone(),
    }
}

/// `(n-1)^2 ((2^{ω-s-1} F (s-1+2δ) + 1 - 1/l) / (Fδ - 1/l))^2`, for a split
/// with a single `l`; with `subtract_one`, the quotient is reduced by 1
/// before squaring.
pub fn modified_sieve_threshold(
    n: u64,
    omega: usize,
    split: &SieveSplit,
    form: ModifiedForm,
) -> Result<BigRational> {
    if omega < 2 || split.r() != 1 || split.s() + 1 > omega {
        return Err(Error::Inapplicable("modified sieve needs ω ≥ 2 and exactly one l"));
    }
    let f = totient_term(split, form.term);
    let inv_l = split.epsilon.clone();
    let s = split.s();
    let denom = &f * &split.delta - &inv_l;
    if !denom.is_positive() {
        return Err(Error::Inapplicable("δ must exceed 1/(l·F)"));
    }
    let numer = pow2(omega - s - 1) * &f * (int(s as i64 - 1) + int(2) * &split.delta)
        + BigRational::one()
        - &inv_l;
    let mut inner = numer / denom;
    if form.subtract_one {
        inner -= BigRational::one();
    }
    Ok(n_minus_1_sq(n) * &inner * &inner)
}

/// `(n-1)^2 ((2^{ω-s-r} m (s-1+2δ) - δm + r - ε) / (δm - ε))^2`, `m = φ(k)/k`.
pub fn general_sieve_threshold(n: u64, omega: usize, split: &SieveSplit) -> Result<BigRational> {
    let (s, r) = (split.s(), split.r());
    if s + r > omega {
        return Err(Error::InvalidArgument(format!("s + r exceeds ω = {omega}")));
    }
    let dm = &split.delta * &split.m_ratio;
    let denom = &dm - &split.epsilon;
    if !denom.is_positive() {
        return Err(Error::Inapplicable("δm must exceed ε"));
    }
    let numer = pow2(omega - s - r) * &split.m_ratio * (int(s as i64 - 1) + int(2) * &split.delta)
        - &dm
        + int(r as i64)
        - &split.epsilon;
    let inner = numer / denom;
    Ok(n_minus_1_sq(n) * &inner * &inner)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveOutcome {
    pub threshold: Threshold,
    pub passes: bool,
    pub split: Option<SieveSplit>,
    pub kind: SieveKind,
}

/// Smallest threshold of the given kind over all ordered splits of the
/// radical of `q^n - 1` (`fm` is its factorization).
pub fn best_sieve(
    q: &BigUint,
    n: u64,
    fm: &FactorMultiset,
    kind: SieveKind,
    form: ModifiedForm,
) -> SieveOutcome {
    let primes: Vec<BigUint> = fm.primes().cloned().collect();
    let omega = primes.len();
    let shapes: Vec<(usize, usize)> = match kind {
        SieveKind::Prime => (0..=omega).map(|s| (s, 0)).collect(),
        SieveKind::Modified if omega >= 2 => (0..omega).map(|s| (s, 1)).collect(),
        SieveKind::Modified => Vec::new(),
        SieveKind::General => (0..=omega)
            .flat_map(|r| (0..=omega - r).map(move |s| (s, r)))
            .collect(),
    };
    let mut best: Option<(BigRational, SieveSplit)> = None;
    for (s, r) in shapes {
        let split = SieveSplit::from_sorted(&primes, s, r).expect("shape fits the radical");
        let t = match kind {
            SieveKind::Prime => prime_sieve_threshold(n, omega, &split.phi_part),
            SieveKind::Modified => modified_sieve_threshold(n, omega, &split, form),
            SieveKind::General => general_sieve_threshold(n, omega, &split),
        };
        let Ok(t) = t else { continue };
        if best.as_ref().is_none_or(|(b, _)| t < *b) {
            best = Some((t, split));
        }
    }
    match best {
        Some((t, split)) => {
            let threshold = Threshold::Finite(t);
            SieveOutcome {
                passes: threshold.passes(q),
                threshold,
                split: Some(split),
                kind,
            }
        }
        None => SieveOutcome {
            threshold: Threshold::Infinite,
            passes: false,
            split: None,
            kind,
        },
    }
}
