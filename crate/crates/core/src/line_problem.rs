//! The degree-`n` line problem: cut-offs on `ω`, the per-`ω` search
//! intervals, candidate enumeration and the sieve cascade.
//!
//! For each `ω`, a prime power `q` outside `L_n` must satisfy
//! `B(n, ω) <= q <= S(n, ω)`, where `B` is a lower bound from the number of
//! prime factors of `q^n - 1` and `S` the presumed-mode prime sieve.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundEngine;
use crate::error::{Error, Result};
use crate::factor::{factor_qn_minus_1, screen_omega_qn_minus_1, FactorConfig, FactorMultiset, OmegaScreen};
use crate::partition::NFactorization;
use crate::sieves::{best_sieve, presumed_prime_sieve, ModifiedForm, SieveKind};

pub use crate::primes::prime_powers_in;

/// How many consecutive `ω` with `B > S` end the upward cut-off scan. The
/// lower bound grows like a primorial root and the threshold like `4^ω`, so
/// once the gap opens it never closes again in the tabulated range.
pub const CUTOFF_SCAN_WINDOW: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Trivial,
    Hybrid,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cutoff {
    pub omega: usize,
    /// `S(n, ω)` at the cut-off.
    pub qmax: BigRational,
}

fn lower_bound(engine: &mut BoundEngine, kind: BoundKind, omega: usize) -> Result<BigUint> {
    Ok(match kind {
        BoundKind::Trivial => engine.trivial(omega)?.bound,
        BoundKind::Hybrid => engine.hybrid_or_pow2(omega)?.bound,
    })
}

fn admits(bound: &BigUint, threshold: &BigRational) -> bool {
    BigRational::from_integer(BigInt::from(bound.clone())) <= *threshold
}

/// Largest `ω` with `B(n, ω) <= S(n, ω)`, scanning `ω` upward for the
/// trivial bound, and downward from `start` for the hybrid bound (which
/// dominates the trivial one, so its cut-off cannot be larger).
fn scan_cutoff(engine: &mut BoundEngine, kind: BoundKind, start: Option<usize>) -> Result<Cutoff> {
    let n = engine.n_fact().n_u64().ok_or(Error::InvalidArgument("n too large".into()))?;
    let mut found: Option<Cutoff> = None;
    match start {
        None => {
            let mut misses = 0;
            let mut omega = 1;
            while misses < CUTOFF_SCAN_WINDOW {
                let (s, _) = presumed_prime_sieve(n, omega);
                if admits(&lower_bound(engine, kind, omega)?, &s) {
                    found = Some(Cutoff { omega, qmax: s });
                    misses = 0;
                } else {
                    misses += 1;
                }
                omega += 1;
            }
        }
        Some(top) => {
            for omega in (1..=top).rev() {
                let (s, _) = presumed_prime_sieve(n, omega);
                if admits(&lower_bound(engine, kind, omega)?, &s) {
                    found = Some(Cutoff { omega, qmax: s });
                    break;
                }
            }
        }
    }
    found.ok_or(Error::InvalidArgument(format!("no ω admits a non-member for n = {n}")))
}

pub fn cutoff(n: u64, kind: BoundKind) -> Result<Cutoff> {
    let mut engine = BoundEngine::new(NFactorization::of(n)?);
    match kind {
        BoundKind::Trivial => scan_cutoff(&mut engine, kind, None),
        BoundKind::Hybrid => {
            let trivial = scan_cutoff(&mut engine, BoundKind::Trivial, None)?;
            scan_cutoff(&mut engine, kind, Some(trivial.omega))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutoffRow {
    pub n: u64,
    pub trivial_cutoff: usize,
    pub hybrid_cutoff: usize,
    pub trivial_qmax: BigRational,
    pub hybrid_qmax: BigRational,
    pub search_fraction: BigRational,
}

impl CutoffRow {
    /// Search fraction as a whole percentage, rounded half up.
    pub fn search_percent(&self) -> u64 {
        let pct = &self.search_fraction * BigRational::from_integer(100.into());
        let rounded = (pct + BigRational::new(1.into(), 2.into())).floor();
        rounded.to_integer().to_u64().expect("percentage fits")
    }
}

pub fn cutoff_row(n: u64) -> Result<CutoffRow> {
    let mut engine = BoundEngine::new(NFactorization::of(n)?);
    let trivial = scan_cutoff(&mut engine, BoundKind::Trivial, None)?;
    let hybrid = scan_cutoff(&mut engine, BoundKind::Hybrid, Some(trivial.omega))?;
    Ok(CutoffRow {
        n,
        trivial_cutoff: trivial.omega,
        hybrid_cutoff: hybrid.omega,
        search_fraction: &hybrid.qmax / &trivial.qmax,
        trivial_qmax: trivial.qmax,
        hybrid_qmax: hybrid.qmax,
    })
}

pub fn cutoff_table(ns: impl IntoIterator<Item = u64>) -> Result<Vec<CutoffRow>> {
    let ns: Vec<u64> = ns.into_iter().collect();
    ns.par_iter().map(|&n| cutoff_row(n)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalRow {
    pub omega: usize,
    /// Lower bound on `q` (the ceiled hybrid bound).
    pub lower: u64,
    /// `⌊S(n, ω)⌋`.
    pub upper: u64,
}

/// Search intervals for `ω = 1, …, c` with `c` the hybrid cut-off.
pub fn intervals(n: u64) -> Result<Vec<IntervalRow>> {
    let c = cutoff(n, BoundKind::Hybrid)?;
    interval_rows(n, c.omega)
}

/// Search intervals for `ω = 1, …, max_omega`.
pub fn interval_rows(n: u64, max_omega: usize) -> Result<Vec<IntervalRow>> {
    let mut engine = BoundEngine::new(NFactorization::of(n)?);
    (1..=max_omega)
        .map(|omega| {
            let lower = engine.hybrid_or_pow2(omega)?.bound;
            let (s, _) = presumed_prime_sieve(n, omega);
            let upper = s.floor().to_integer();
            let too_big = || Error::InvalidArgument(format!("interval for ω = {omega} exceeds u64"));
            Ok(IntervalRow {
                omega,
                lower: lower.to_u64().ok_or_else(too_big)?,
                upper: upper.to_u64().ok_or_else(too_big)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub q: u64,
    /// The `ω` bucket it was found in, equal to `ω(q^n - 1)`.
    pub omega: usize,
    pub factors: FactorMultiset,
}

/// The `ω` whose intervals contain `q`, as an inclusive range.
fn window_for(q: u64, rows: &[IntervalRow]) -> Option<(usize, usize)> {
    let mut hit = rows.iter().filter(|r| r.lower <= q && q <= r.upper).map(|r| r.omega);
    let first = hit.next()?;
    let last = hit.next_back().unwrap_or(first);
    Some((first, last))
}

const CHUNK: usize = 2048;

/// Every prime power `q` lying in the interval of its own `ω(q^n - 1)`.
/// Each `q` is screened once against the range of buckets whose intervals
/// contain it; at most one of them can match.
pub fn enumerate_candidates(n: u64, rows: &[IntervalRow], cfg: &FactorConfig) -> Result<Vec<Candidate>> {
    let n_fact = NFactorization::of(n)?;
    let Some(lo) = rows.iter().map(|r| r.lower).filter(|&l| l >= 2).min() else {
        return Ok(Vec::new());
    };
    let hi = rows.iter().map(|r| r.upper).max().unwrap_or(0);
    if hi < lo {
        return Ok(Vec::new());
    }
    let qs = prime_powers_in(lo.max(2), hi);
    let chunks: Vec<Result<Vec<Candidate>>> = qs
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut out = Vec::new();
            for &q in chunk {
                let Some((a, b)) = window_for(q, rows) else { continue };
                let big_q = BigUint::from(q);
                if let OmegaScreen::Exact(w) = screen_omega_qn_minus_1(&big_q, &n_fact, a, b, cfg)? {
                    let factors = factor_qn_minus_1(&big_q, &n_fact, cfg)?;
                    assert_eq!(factors.omega(), w, "screen and factorization disagree at q = {q}");
                    out.push(Candidate { q, omega: w, factors });
                }
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for chunk in chunks {
        all.extend(chunk?);
    }
    Ok(all)
}

/// Per-`ω` counts, listed from the largest `ω` down as in the published tables.
pub fn bucket_counts(candidates: &[Candidate], max_omega: usize) -> Vec<(usize, usize)> {
    let mut counts = vec![0usize; max_omega + 1];
    for c in candidates {
        counts[c.omega] += 1;
    }
    (1..=max_omega).rev().map(|w| (w, counts[w])).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeRow {
    pub omega: usize,
    pub prime: usize,
    pub modified: usize,
    pub general: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cascade {
    /// Candidates not eliminated by the prime sieve.
    pub after_prime: Vec<u64>,
    pub after_modified: Vec<u64>,
    pub after_general: Vec<u64>,
    pub rows: Vec<CascadeRow>,
}

impl Cascade {
    pub fn totals(&self) -> (usize, usize, usize) {
        (self.after_prime.len(), self.after_modified.len(), self.after_general.len())
    }

    /// The exception set: survivors of all three sieves, ascending.
    pub fn exceptions(&self) -> &[u64] {
        &self.after_general
    }
}

/// Applies the prime, modified and general sieves in turn; each only sees
/// the survivors of the previous one.
pub fn sieve_cascade(n: u64, candidates: &[Candidate], max_omega: usize, form: ModifiedForm) -> Cascade {
    let survives = |c: &Candidate, kind| !best_sieve(&BigUint::from(c.q), n, &c.factors, kind, form).passes;
    let flags: Vec<(bool, bool, bool)> = candidates
        .par_iter()
        .map(|c| {
            let p = survives(c, SieveKind::Prime);
            let m = p && survives(c, SieveKind::Modified);
            let g = m && survives(c, SieveKind::General);
            (p, m, g)
        })
        .collect();
    let mut rows: Vec<CascadeRow> = (1..=max_omega)
        .rev()
        .map(|omega| CascadeRow {
            omega,
            prime: 0,
            modified: 0,
            general: 0,
        })
        .collect();
    let mut cascade = Cascade {
        after_prime: Vec::new(),
        after_modified: Vec::new(),
        after_general: Vec::new(),
        rows: Vec::new(),
    };
    for (c, &(p, m, g)) in candidates.iter().zip(&flags) {
        let row = &mut rows[max_omega - c.omega];
        if p {
            row.prime += 1;
            cascade.after_prime.push(c.q);
        }
        if m {
            row.modified += 1;
            cascade.after_modified.push(c.q);
        }
        if g {
            row.general += 1;
            cascade.after_general.push(c.q);
        }
    }
    for list in [&mut cascade.after_prime, &mut cascade.after_modified, &mut cascade.after_general] {
        list.sort_unstable();
    }
    cascade.rows = rows;
    cascade
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureDiff {
    /// Computed but absent from the fixture.
    pub added: Vec<String>,
    /// In the fixture but not computed.
    pub missing: Vec<String>,
}

impl FixtureDiff {
    pub fn of<T: Ord + ToString + Clone>(computed: &[T], fixture: &[T]) -> Self {
        let mut a = computed.to_vec();
        let mut b = fixture.to_vec();
        a.sort();
        b.sort();
        FixtureDiff {
            added: a.iter().filter(|x| b.binary_search(x).is_err()).map(T::to_string).collect(),
            missing: b.iter().filter(|x| a.binary_search(x).is_err()).map(T::to_string).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.missing.is_empty()
    }
}

/// Parses one decimal integer per line; blank lines and `#` comments skipped.
pub fn parse_integer_list(text: &str) -> Result<Vec<u64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.parse::<u64>()
                .map_err(|e| Error::InvalidArgument(format!("bad fixture line {l:?}: {e}")))
        })
        .collect()
}

/// `⌊S⌋` for a threshold known to be non-negative.
pub fn floor_u(r: &BigRational) -> BigUint {
    let f = r.floor().to_integer();
    if f < BigInt::zero() {
        BigUint::zero()
    } else {
        f.to_biguint().expect("non-negative")
    }
}
