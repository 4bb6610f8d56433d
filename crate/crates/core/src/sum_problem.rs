//! Search for prime powers `q` that might admit no primitive `α ∈ F_{q^n}`
//! with `α + 1/α` also primitive.
//!
//! Such a `q` must satisfy `q^n <= 16^ω` with `ω = ω(q^n - 1)`, which forces
//! `ω <= 15` and `n <= 4ω`. The grids record which `(n, ω)` cells still have
//! a non-empty search interval under the trivial and hybrid lower bounds, and
//! the exception pairs are the cells holding an actual witness `q`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::floor_nth_root;
use crate::bounds::{primorial, BoundEngine};
use crate::error::{Error, Result};
use crate::factor::{screen_omega_qn_minus_1, FactorConfig, OmegaScreen};
use crate::partition::NFactorization;
use crate::primes::prime_powers_in;

pub const MAX_OMEGA: usize = 15;
pub const MAX_N: u64 = 60;

/// For `n = 1` the question is settled: these are exactly the prime powers
/// with no such `α`.
pub const DEGREE_ONE_EXCEPTIONS: [u64; 9] = [2, 3, 4, 5, 7, 9, 13, 25, 121];

/// How many witnesses a cell keeps verbatim.
pub const WITNESS_SAMPLE: usize = 8;

/// The sufficient condition `q^n > 16^ω`, kept as an integer comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnThreshold {
    pub n: u32,
    /// `16^ω`.
    pub bound: BigUint,
}

impl UnThreshold {
    /// Whether `q` is certified by the criterion.
    pub fn certifies(&self, q: u64) -> bool {
        BigUint::from(q).pow(self.n) > self.bound
    }

    /// Largest `q` not certified: `⌊16^{ω/n}⌋`.
    pub fn max_uncertified(&self) -> BigUint {
        floor_nth_root(&self.bound, self.n)
    }
}

pub fn un_sieve_threshold(n: u32, omega: usize) -> Result<UnThreshold> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    Ok(UnThreshold {
        n,
        bound: BigUint::from(16u32).pow(omega as u32),
    })
}

/// `primorial(ω) < 16^ω`, which holds exactly for `ω <= 15`.
pub fn omega_cutoff_check(omega: usize) -> bool {
    primorial(omega) < BigUint::from(16u32).pow(omega as u32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    Empty,
    IntervalNonempty,
    HasWitness,
}

impl CellStatus {
    /// Code used in the grid CSVs.
    pub fn code(self) -> u8 {
        match self {
            CellStatus::Empty => 0,
            CellStatus::IntervalNonempty => 1,
            CellStatus::HasWitness => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCell {
    pub n: u64,
    pub omega: usize,
    pub status: CellStatus,
    /// Smallest admissible `q`, from the lower bound.
    pub q_lower: u64,
    /// `⌊16^{ω/n}⌋`.
    pub q_upper: u64,
    /// Prime powers in `[q_lower, q_upper]`.
    pub interval_size: usize,
    /// `q` in the interval with `ω(q^n - 1) = ω`.
    pub witness_count: usize,
    /// The subset of those with `gcd(q, n) = 1`.
    pub coprime_witness_count: usize,
    /// The first few witnesses, ascending.
    pub witnesses: Vec<u64>,
}

/// How `q` is compared with the real-valued lower bound `H`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Endpoint {
    /// `q^n ∈ (H^n, 16^ω]`, so `q = H` is excluded when `H` is an integer.
    /// This is the published search and reproduces its pair list.
    #[default]
    Open,
    /// `q >= H`, everything the bound alone allows.
    Closed,
}

/// Which lower bound a grid uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridBound {
    /// `q^n > primorial(ω)`.
    Trivial,
    /// The hybrid bound (power-of-two bound for `n = 2^a`).
    Hybrid(Endpoint),
}

/// Searchable `(n, ω)` cells: `2 <= n <= min(60, 4ω)`, `1 <= ω <= 15`.
pub fn grid_cells() -> impl Iterator<Item = (u64, usize)> {
    (1..=MAX_OMEGA).flat_map(|omega| (2..=MAX_N.min(4 * omega as u64)).map(move |n| (n, omega)))
}

fn q_range(engine: &mut BoundEngine, bound: GridBound, omega: usize) -> Result<(u64, u64)> {
    let n = engine.n_fact().n_u64().expect("small n");
    let lower = match bound {
        GridBound::Trivial => engine.trivial(omega)?.bound,
        GridBound::Hybrid(e) => engine.hybrid_or_pow2_with(omega, e == Endpoint::Open)?.bound,
    };
    let upper = un_sieve_threshold(n as u32, omega)?.max_uncertified();
    // q^n <= 16^15 keeps both ends far below 2^64.
    let lower = lower.to_u64().unwrap_or(u64::MAX);
    let upper = upper.to_u64().expect("16^ω root fits");
    Ok((lower.max(2), upper))
}

/// One grid cell; with `search`, every prime power in the interval is
/// screened for `ω(q^n - 1) = ω`.
pub fn grid_cell(n: u64, omega: usize, bound: GridBound, search: bool, cfg: &FactorConfig) -> Result<GridCell> {
    let n_fact = NFactorization::of(n)?;
    let mut engine = BoundEngine::new(n_fact.clone());
    let (q_lower, q_upper) = q_range(&mut engine, bound, omega)?;
    let qs = if q_lower <= q_upper {
        prime_powers_in(q_lower, q_upper)
    } else {
        Vec::new()
    };
    let mut cell = GridCell {
        n,
        omega,
        status: if qs.is_empty() {
            CellStatus::Empty
        } else {
            CellStatus::IntervalNonempty
        },
        q_lower,
        q_upper,
        interval_size: qs.len(),
        witness_count: 0,
        coprime_witness_count: 0,
        witnesses: Vec::new(),
    };
    if !search || qs.is_empty() {
        return Ok(cell);
    }
    let hits: Vec<u64> = qs
        .par_chunks(4096)
        .map(|chunk| {
            let mut out = Vec::new();
            for &q in chunk {
                let screen = screen_omega_qn_minus_1(&BigUint::from(q), &n_fact, omega, omega, cfg)?;
                if screen == OmegaScreen::Exact(omega) {
                    out.push(q);
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .concat();
    cell.witness_count = hits.len();
    cell.coprime_witness_count = hits.iter().filter(|&&q| q.gcd(&n).is_one()).count();
    cell.witnesses = hits.into_iter().take(WITNESS_SAMPLE).collect();
    if cell.witness_count > 0 {
        cell.status = CellStatus::HasWitness;
    }
    Ok(cell)
}

fn grid(bound: GridBound, search: bool, cfg: &FactorConfig) -> Result<Vec<GridCell>> {
    let cells: Vec<(u64, usize)> = grid_cells().collect();
    cells
        .into_par_iter()
        .map(|(n, omega)| grid_cell(n, omega, bound, search, cfg))
        .collect()
}

/// Cells whose interval `(primorial(ω), 16^ω]` for `q^n` holds a prime power.
pub fn trivial_grid() -> Result<Vec<GridCell>> {
    grid(GridBound::Trivial, false, &FactorConfig::default())
}

/// As [`trivial_grid`] with the hybrid lower bound (the power-of-two bound
/// for `n = 2^a`).
pub fn hybrid_grid(endpoint: Endpoint) -> Result<Vec<GridCell>> {
    grid(GridBound::Hybrid(endpoint), false, &FactorConfig::default())
}

/// The hybrid grid with every non-empty interval searched for witnesses.
pub fn witness_grid(endpoint: Endpoint, cfg: &FactorConfig) -> Result<Vec<GridCell>> {
    grid(GridBound::Hybrid(endpoint), true, cfg)
}

/// Whether a witness must be coprime to `n` to count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessFilter {
    #[default]
    Unrestricted,
    Coprime,
}

/// `(n, ω)` pairs with at least one witness, ascending.
pub fn exception_pairs(cells: &[GridCell], filter: WitnessFilter) -> Vec<(u64, usize)> {
    let mut pairs: Vec<(u64, usize)> = cells
        .iter()
        .filter(|c| match filter {
            WitnessFilter::Unrestricted => c.witness_count > 0,
            WitnessFilter::Coprime => c.coprime_witness_count > 0,
        })
        .map(|c| (c.n, c.omega))
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Rows `ω = 1..=15`, columns `n = 2..=60`; cells outside `n <= 4ω` are 0.
pub fn grid_matrix(cells: &[GridCell]) -> Vec<Vec<u8>> {
    let mut m = vec![vec![0u8; (MAX_N - 1) as usize]; MAX_OMEGA];
    for c in cells {
        m[c.omega - 1][(c.n - 2) as usize] = c.status.code();
    }
    m
}

/// Parses `n omega` pairs, one per line.
pub fn parse_pairs(text: &str) -> Result<Vec<(u64, usize)>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let bad = || Error::InvalidArgument(format!("bad pair line {l:?}"));
            let mut it = l.split_whitespace();
            let n = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let w = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            if it.next().is_some() {
                return Err(bad());
            }
            Ok((n, w))
        })
        .collect()
}
