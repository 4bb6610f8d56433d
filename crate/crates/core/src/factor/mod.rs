//! Exact factorization: trial division below 10^5, then Miller–Rabin /
//! Baillie–PSW and Brent's rho on what remains. `x^n - 1` is factored piece by
//! piece through its cyclotomic split, and pieces only get trial-divided by
//! primes that can actually divide them.

pub mod modular;
pub mod primality;
pub mod rho;
pub mod trial;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::split_xn_minus_1;
use crate::error::{Error, Result};
use crate::partition::NFactorization;
use modular::{BigRing, Mont128, Mont64};
use rho::{brent, RhoResult};
use trial::{strip, Admissible, TRIAL_LIMIT};

pub use primality::{is_prime_big as is_prime, is_prime_u128, is_prime_u64};

pub const DEFAULT_EFFORT_CAP: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorConfig {
    /// Rho iterations allowed per composite cofactor.
    pub effort_cap: u64,
    /// Mixed into the per-cofactor seed; `None` seeds with the cofactor alone.
    pub seed: Option<u64>,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            effort_cap: DEFAULT_EFFORT_CAP,
            seed: None,
        }
    }
}

impl FactorConfig {
    fn rng_for(&self, value_low: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.map_or(value_low, |s| s ^ value_low))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePower {
    #[serde(with = "crate::serde_big")]
    pub prime: BigUint,
    pub exponent: u32,
}

/// A complete factorization. Construction checks that every listed prime is
/// prime and that the product matches the value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMultiset", into = "RawMultiset")]
pub struct FactorMultiset {
    entries: Vec<PrimePower>,
    value: BigUint,
}

#[derive(Serialize, Deserialize)]
struct RawMultiset {
    entries: Vec<PrimePower>,
    #[serde(with = "crate::serde_big")]
    value: BigUint,
}

impl TryFrom<RawMultiset> for FactorMultiset {
    type Error = Error;

    fn try_from(raw: RawMultiset) -> Result<Self> {
        let fm = FactorMultiset::new(raw.entries.into_iter().map(|pp| (pp.prime, pp.exponent)))?;
        if fm.value != raw.value {
            return Err(Error::InvalidArgument(format!(
                "factorization multiplies to {}, not {}",
                fm.value, raw.value
            )));
        }
        Ok(fm)
    }
}

impl From<FactorMultiset> for RawMultiset {
    fn from(fm: FactorMultiset) -> Self {
        RawMultiset {
            entries: fm.entries,
            value: fm.value,
        }
    }
}

impl FactorMultiset {
    pub fn one() -> Self {
        FactorMultiset {
            entries: Vec::new(),
            value: BigUint::one(),
        }
    }

    /// Builds from `(prime, multiplicity)` pairs in any order; repeated primes
    /// are merged.
    pub fn new(pairs: impl IntoIterator<Item = (BigUint, u32)>) -> Result<Self> {
        let mut map: BTreeMap<BigUint, u32> = BTreeMap::new();
        for (p, e) in pairs {
            if e == 0 {
                return Err(Error::InvalidArgument(format!("zero multiplicity for {p}")));
            }
            *map.entry(p).or_default() += e;
        }
        let mut value = BigUint::one();
        for (p, &e) in &map {
            if !is_prime(p) {
                return Err(Error::InvalidArgument(format!("{p} is not prime")));
            }
            value *= p.pow(e);
        }
        let entries = map
            .into_iter()
            .map(|(prime, exponent)| PrimePower { prime, exponent })
            .collect();
        Ok(FactorMultiset { entries, value })
    }

    fn from_map(map: BTreeMap<BigUint, u32>, expected: &BigUint) -> Self {
        let fm = FactorMultiset::new(map).expect("factoring produced only primes");
        assert_eq!(&fm.value, expected, "factorization lost a factor");
        fm
    }

    pub fn entries(&self) -> &[PrimePower] {
        &self.entries
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// Number of distinct primes.
    pub fn omega(&self) -> usize {
        self.entries.len()
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> + '_ {
        self.entries.iter().map(|pp| &pp.prime)
    }

    pub fn radical(&self) -> BigUint {
        self.primes().product()
    }

    pub fn multiplicity(&self, p: &BigUint) -> u32 {
        self.entries
            .binary_search_by(|pp| pp.prime.cmp(p))
            .map_or(0, |i| self.entries[i].exponent)
    }

    /// Factorization of the product.
    pub fn merge(&self, other: &FactorMultiset) -> FactorMultiset {
        let pairs = self
            .entries
            .iter()
            .chain(&other.entries)
            .map(|pp| (pp.prime.clone(), pp.exponent));
        FactorMultiset::new(pairs).expect("both sides are valid")
    }

    /// The multiset restricted to the given primes (each kept with its
    /// multiplicity); primes not present are ignored.
    pub fn restrict<'a>(&self, primes: impl IntoIterator<Item = &'a BigUint>) -> FactorMultiset {
        let keep: Vec<&BigUint> = primes.into_iter().collect();
        let pairs = self
            .entries
            .iter()
            .filter(|pp| keep.contains(&&pp.prime))
            .map(|pp| (pp.prime.clone(), pp.exponent));
        FactorMultiset::new(pairs).expect("subset of a valid multiset")
    }
}

/// `∏ p^{e-1} (p - 1)`.
pub fn euler_phi(fm: &FactorMultiset) -> BigUint {
    fm.entries
        .iter()
        .map(|pp| pp.prime.pow(pp.exponent - 1) * (&pp.prime - 1u32))
        .product()
}

pub fn factorize(n: &BigUint) -> Result<FactorMultiset> {
    factorize_with(n, &FactorConfig::default())
}

pub fn factorize_with(n: &BigUint, cfg: &FactorConfig) -> Result<FactorMultiset> {
    let mut map = BTreeMap::new();
    factor_piece(n, Admissible::ALL, cfg, &mut map)?;
    Ok(FactorMultiset::from_map(map, n))
}

pub fn factorize_u64(n: u64) -> Result<FactorMultiset> {
    factorize(&BigUint::from(n))
}

/// Factors `q^n - 1` through the cyclotomic split, piece by piece.
pub fn factor_qn_minus_1(
    q: &BigUint,
    n_fact: &NFactorization,
    cfg: &FactorConfig,
) -> Result<FactorMultiset> {
    let split = split_xn_minus_1(q, n_fact)?;
    let mut map = BTreeMap::new();
    for factor in &split.factors {
        factor_piece(&factor.value, admissible_for(factor.base, factor.level), cfg, &mut map)?;
    }
    let expected = split.tower[n_fact.m()].clone() - 1u32;
    Ok(FactorMultiset::from_map(map, &expected))
}

/// Primes dividing `Φ_{φ^j}(y)` are `φ` itself or `≡ 1 (mod φ^j)`.
fn admissible_for(base: Option<u64>, level: u32) -> Admissible {
    match base {
        None => Admissible::ALL,
        Some(phi) => Admissible {
            modulus: phi.checked_pow(level).unwrap_or(phi),
            base: phi,
        },
    }
}

fn add_prime(map: &mut BTreeMap<BigUint, u32>, p: BigUint, e: u32) {
    *map.entry(p).or_default() += e;
}

fn factor_piece(
    n: &BigUint,
    adm: Admissible,
    cfg: &FactorConfig,
    map: &mut BTreeMap<BigUint, u32>,
) -> Result<()> {
    if n.is_zero() {
        return Err(Error::InvalidArgument("cannot factor 0".into()));
    }
    if let Some(small) = n.to_u128() {
        let mut found = Vec::new();
        factor_u128(small, adm, cfg, &mut found)?;
        for (p, e) in found {
            add_prime(map, BigUint::from(p), e);
        }
        return Ok(());
    }
    let mut rest = n.clone();
    let two_exp = rest.trailing_zeros().unwrap_or(0) as u32;
    if two_exp > 0 {
        add_prime(map, BigUint::from(2u32), two_exp);
        rest >>= two_exp;
    }
    for op in trial::odd_primes() {
        if !adm.allows(op.p) {
            continue;
        }
        let mut e = 0;
        while (&rest % op.p).is_zero() {
            rest /= op.p;
            e += 1;
        }
        if e > 0 {
            add_prime(map, BigUint::from(op.p), e);
        }
        if rest.to_u128().is_some() {
            break;
        }
    }
    let mut stack = vec![rest];
    while let Some(c) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if let Some(small) = c.to_u128() {
            let mut found = Vec::new();
            factor_u128(small, adm, cfg, &mut found)?;
            for (p, e) in found {
                add_prime(map, BigUint::from(p), e);
            }
            continue;
        }
        if is_prime(&c) {
            add_prime(map, c, 1);
            continue;
        }
        let r = c.sqrt();
        if &r * &r == c {
            stack.push(r.clone());
            stack.push(r);
            continue;
        }
        let ring = BigRing::new(c.clone());
        let low = (&c & BigUint::from(u64::MAX)).to_u64().unwrap_or(0);
        let mut rng = cfg.rng_for(low);
        let mut budget = cfg.effort_cap;
        match brent(&ring, &mut rng, &mut budget) {
            RhoResult::Factor(d) => {
                stack.push(&c / &d);
                stack.push(d);
            }
            RhoResult::Exhausted => {
                return Err(Error::EffortExceeded {
                    value: c.to_string(),
                    cap: cfg.effort_cap,
                })
            }
        }
    }
    Ok(())
}

/// Splits a composite odd `c` with no prime factor below the trial limit.
fn split_u128(c: u128, cfg: &FactorConfig) -> Result<u128> {
    let mut rng = cfg.rng_for(c as u64);
    let mut budget = cfg.effort_cap;
    let result = if let Ok(c64) = u64::try_from(c) {
        match brent(&Mont64::new(c64), &mut rng, &mut budget) {
            RhoResult::Factor(d) => RhoResult::Factor(d as u128),
            RhoResult::Exhausted => RhoResult::Exhausted,
        }
    } else {
        brent(&Mont128::new(c), &mut rng, &mut budget)
    };
    match result {
        RhoResult::Factor(d) => Ok(d),
        RhoResult::Exhausted => Err(Error::EffortExceeded {
            value: c.to_string(),
            cap: cfg.effort_cap,
        }),
    }
}

fn is_square(n: u128) -> Option<u128> {
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

/// Fully factors a cofactor whose prime factors all exceed the trial limit.
fn factor_large_cofactor(c: u128, cfg: &FactorConfig, found: &mut Vec<(u128, u32)>) -> Result<()> {
    let mut stack = vec![c];
    while let Some(c) = stack.pop() {
        if c == 1 {
            continue;
        }
        if is_prime_u128(c) {
            found.push((c, 1));
            continue;
        }
        if let Some(r) = is_square(c) {
            stack.push(r);
            stack.push(r);
            continue;
        }
        let d = split_u128(c, cfg)?;
        stack.push(c / d);
        stack.push(d);
    }
    Ok(())
}

fn factor_u128(n: u128, adm: Admissible, cfg: &FactorConfig, found: &mut Vec<(u128, u32)>) -> Result<()> {
    let mut rest = n;
    let exhausted = strip(&mut rest, adm, 0, TRIAL_LIMIT, found);
    if rest == 1 {
        return Ok(());
    }
    let limit = TRIAL_LIMIT as u128;
    if exhausted || rest < limit * limit {
        found.push((rest, 1));
        return Ok(());
    }
    factor_large_cofactor(rest, cfg, found)
}

/// Result of counting the distinct primes of `q^n - 1` against a window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OmegaScreen {
    Below,
    Exact(usize),
    Above,
}

/// Largest `k` with `(limit + 1)^k <= r`: how many primes above `limit` can
/// divide `r`.
fn max_large_primes(r: u128, limit: u64) -> usize {
    let base = limit as u128 + 1;
    let mut k = 0;
    let mut acc: u128 = 1;
    while let Some(next) = acc.checked_mul(base) {
        if next > r {
            break;
        }
        acc = next;
        k += 1;
    }
    k
}

const STAGES: [u64; 6] = [128, 512, 2048, 8192, 32768, TRIAL_LIMIT];

/// Decides whether `ω(q^n - 1)` lies in `[lo, hi]`, returning it exactly if
/// so. Stops as soon as the count is provably outside the window, which is
/// usually long before the factorization is complete.
pub fn screen_omega_qn_minus_1(
    q: &BigUint,
    n_fact: &NFactorization,
    lo: usize,
    hi: usize,
    cfg: &FactorConfig,
) -> Result<OmegaScreen> {
    let classify = |w: usize| {
        if w < lo {
            OmegaScreen::Below
        } else if w > hi {
            OmegaScreen::Above
        } else {
            OmegaScreen::Exact(w)
        }
    };
    let split = split_xn_minus_1(q, n_fact)?;
    let largest_base = n_fact.bases().iter().copied().max().unwrap_or(1);
    let pieces: Option<Vec<(u128, Admissible)>> = split
        .factors
        .iter()
        .map(|f| f.value.to_u128().map(|v| (v, admissible_for(f.base, f.level))))
        .collect();
    let Some(mut pieces) = pieces.filter(|_| largest_base <= STAGES[0]) else {
        let fm = factor_qn_minus_1(q, n_fact, cfg)?;
        return Ok(classify(fm.omega()));
    };

    let mut small: Vec<u128> = Vec::new();
    let mut done = vec![false; pieces.len()];
    let mut prev = 0u64;
    let mut scratch = Vec::new();
    for &stage in &STAGES {
        for (i, (value, adm)) in pieces.iter_mut().enumerate() {
            if done[i] {
                continue;
            }
            scratch.clear();
            done[i] = strip(value, *adm, prev, stage, &mut scratch);
            // A prime left over below the stage bound may be a base of n
            // shared with another piece.
            if done[i] && *value > 1 && *value <= stage as u128 {
                scratch.push((*value, 1));
                *value = 1;
            }
            for &(p, _) in &scratch {
                if !small.contains(&p) {
                    small.push(p);
                }
            }
        }
        prev = stage;
        // Cofactors are now pairwise coprime: shared primes divide n, and
        // every base of n is below the first stage.
        let mut lower = small.len();
        let mut upper = small.len();
        for (i, &(value, _)) in pieces.iter().enumerate() {
            if value > 1 {
                lower += 1;
                upper += if done[i] { 1 } else { max_large_primes(value, stage) };
            }
        }
        if upper < lo {
            return Ok(OmegaScreen::Below);
        }
        if lower > hi {
            return Ok(OmegaScreen::Above);
        }
        if lower == upper {
            return Ok(classify(lower));
        }
    }

    let limit = TRIAL_LIMIT as u128;
    let mut exact = small.len();
    let mut pending: Vec<u128> = Vec::new();
    for (i, &(value, _)) in pieces.iter().enumerate() {
        if value == 1 {
            continue;
        }
        if done[i] || value < limit * limit {
            exact += 1;
        } else {
            pending.push(value);
        }
    }
    // Cheap resolutions first, keeping running bounds for early exit.
    let mut hard = Vec::new();
    for &c in &pending {
        if is_prime_u128(c) {
            exact += 1;
        } else if max_large_primes(c, TRIAL_LIMIT) == 2 {
            exact += if is_square(c).is_some() { 1 } else { 2 };
        } else {
            hard.push(c);
        }
    }
    let bounds = |exact: usize, rest: &[u128]| {
        let lower = exact + 2 * rest.len();
        let upper = exact + rest.iter().map(|&c| max_large_primes(c, TRIAL_LIMIT)).sum::<usize>();
        (lower, upper)
    };
    for k in 0..hard.len() {
        let (lower, upper) = bounds(exact, &hard[k..]);
        if upper < lo {
            return Ok(OmegaScreen::Below);
        }
        if lower > hi {
            return Ok(OmegaScreen::Above);
        }
        let mut found = Vec::new();
        factor_large_cofactor(hard[k], cfg, &mut found)?;
        found.sort_unstable();
        found.dedup_by_key(|pe| pe.0);
        exact += found.len();
    }
    Ok(classify(exact))
}

/// `ω(q^n - 1)`.
pub fn omega_qn_minus_1(q: &BigUint, n_fact: &NFactorization, cfg: &FactorConfig) -> Result<usize> {
    match screen_omega_qn_minus_1(q, n_fact, 0, usize::MAX, cfg)? {
        OmegaScreen::Exact(w) => Ok(w),
        _ => unreachable!("the window covers every count"),
    }
}
