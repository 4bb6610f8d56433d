//! Lower bounds for `x` given only `ω(x^n - 1)`.
//!
//! Every bound is an exact integer: `x >= (1 + P)^{1/N}` becomes
//! `x >= ceil_nth_root(1 + P, N)`, which is what an integer `x` must satisfy.
//!
//! The hybrid bound is a min over compositions `(k_0, …, k_m)` of `ω` of a
//! max over levels `t` of `ceil_nth_root(1 + ∏_{j<=t} R_j(k_j), N_t)`, where
//! `R_j(k)` is the product of the `k` smallest primes of class `j` and
//! `N_t = ∏_{k<=t} φ_k^{a_k}`. The search is a depth-first branch and bound
//! in lexicographic order; a subtree is cut once some level already forces a
//! root at or above the best bound found so far.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::{ceil_nth_root, product};
use crate::error::{Error, Result};
use crate::partition::{classify_prime, ClassModifier, NFactorization, PrimePartition};
use crate::primes::first_primes;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Trivial,
    Hybrid,
    RamificationDivides,
    RamificationNotDivides,
    Pow2,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Variant::Trivial => "trivial",
            Variant::Hybrid => "hybrid",
            Variant::RamificationDivides => "ramification-divides",
            Variant::RamificationNotDivides => "ramification-not-divides",
            Variant::Pow2 => "pow2",
        };
        f.write_str(s)
    }
}

/// Per-class counts `(k_0, …, k_m)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Composition(pub Vec<usize>);

impl Composition {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(with = "crate::serde_big")]
    pub bound: BigUint,
    pub witness_composition: Option<Composition>,
    pub witness_level: Option<usize>,
    pub variant: Variant,
    pub omega: usize,
    pub n_fact: NFactorization,
}

/// Which prime factor of `n` is conditioned on, and how.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamificationContext {
    /// 1-based index of `φ_α` among the bases.
    pub alpha: usize,
    pub phi_alpha: u64,
    /// Class containing `φ_α`.
    pub tau: usize,
    /// Rank of `φ_α` within its class.
    pub b: usize,
    pub divides: bool,
}

impl RamificationContext {
    pub fn new(n_fact: &NFactorization, phi_alpha: u64, divides: bool) -> Result<Self> {
        let alpha = n_fact.base_index(phi_alpha).ok_or(Error::NotABase(phi_alpha))?;
        let tau = classify_prime(phi_alpha, n_fact)?;
        let mut part = PrimePartition::new(n_fact.clone());
        let b = part.rank_in_class(tau, phi_alpha)?;
        debug_assert!(tau < alpha);
        Ok(RamificationContext {
            alpha,
            phi_alpha,
            tau,
            b,
            divides,
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct HybridOptions {
    /// Require the top class to be non-empty (`k_m >= 1`). For prime `n`
    /// this is the `k != ω` side condition of the single-prime bound.
    pub top_class_nonempty: bool,
    /// Demand `x^N - 1 > P` at the deciding level instead of `>=`: the
    /// result is the least integer strictly above the real min-max.
    pub strict: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pow2Strength {
    /// `2^{a+2} | x^n - 1` for odd `x`: factor `2n`.
    #[default]
    Full,
    /// `2^{a+1} | x^n - 1` for odd `x`: factor `n`.
    Weak,
}

/// Product of the first `count` primes.
pub fn primorial(count: usize) -> BigUint {
    product(&first_primes(count))
}

fn n_exponent(n_fact: &NFactorization) -> Result<u32> {
    n_fact
        .n_u64()
        .and_then(|n| u32::try_from(n).ok())
        .ok_or(Error::ExponentOverflow)
}

/// `ceil((1 + s_1 ⋯ s_ω)^{1/n})`.
pub fn trivial_bound(n_fact: &NFactorization, omega: usize) -> Result<BoundReport> {
    let n = n_exponent(n_fact)?;
    let value = primorial(omega) + 1u32;
    Ok(BoundReport {
        bound: ceil_nth_root(&value, n),
        witness_composition: None,
        witness_level: None,
        variant: Variant::Trivial,
        omega,
        n_fact: n_fact.clone(),
    })
}

/// Bound for `n = 2^a`: the smaller of the odd-`x` branch
/// `ceil((1 + c·n·s_1⋯s_ω)^{1/n})` (c = 2, or 1 for the weak form) and the
/// even-`x` branch `ceil((1 + s_2⋯s_{ω+1})^{1/n})`.
pub fn pow2_bound(a: u32, omega: usize, strength: Pow2Strength) -> Result<BoundReport> {
    pow2_with_offset(a, omega, strength, 1)
}

fn pow2_with_offset(a: u32, omega: usize, strength: Pow2Strength, offset: u32) -> Result<BoundReport> {
    if a == 0 {
        return Err(Error::InvalidArgument("n = 2^a needs a >= 1".into()));
    }
    let n_fact = NFactorization::new(vec![2], vec![a])?;
    let n = n_exponent(&n_fact)?;
    let primes = first_primes(omega + 1);
    let factor: u64 = match strength {
        Pow2Strength::Full => 2 * u64::from(n),
        Pow2Strength::Weak => u64::from(n),
    };
    let odd = ceil_nth_root(&(product(&primes[..omega]) * factor + offset), n);
    let even = ceil_nth_root(&(product(&primes[1..]) + offset), n);
    let (bound, k0) = if odd <= even { (odd, 1) } else { (even, 0) };
    Ok(BoundReport {
        bound,
        witness_composition: Some(Composition(vec![k0, omega - k0.min(omega)])),
        witness_level: Some(1),
        variant: Variant::Pow2,
        omega,
        n_fact,
    })
}

/// Hybrid bound with default options.
pub fn hybrid_bound(n_fact: &NFactorization, omega: usize) -> Result<BoundReport> {
    BoundEngine::new(n_fact.clone()).hybrid(omega, HybridOptions::default())
}

/// Ramification bound conditioned on `ctx`.
pub fn ramification_bound(
    n_fact: &NFactorization,
    omega: usize,
    ctx: &RamificationContext,
) -> Result<BoundReport> {
    BoundEngine::new(n_fact.clone()).ramification(omega, ctx)
}

/// The bound used by the finite-field pipelines: the pow2 bound when `n` is a
/// power of two, the hybrid bound otherwise.
pub fn hybrid_or_pow2(n_fact: &NFactorization, omega: usize) -> Result<BoundReport> {
    match n_fact.pow2_exponent() {
        Some(a) => pow2_bound(a, omega, Pow2Strength::Full),
        None => hybrid_bound(n_fact, omega),
    }
}

/// Every `(k_0, …, k_m)` with non-negative entries summing to `omega`, in
/// lexicographic order.
pub fn enumerate_compositions(omega: usize, m: usize) -> impl Iterator<Item = Composition> {
    let mut next = Some({
        let mut v = vec![0; m + 1];
        v[m] = omega;
        v
    });
    std::iter::from_fn(move || {
        let current = next.take()?;
        // Successor: find the rightmost position before the tail that can grow.
        let mut succ = current.clone();
        let len = succ.len();
        if len >= 2 {
            let mut i = len - 2;
            loop {
                let tail: usize = succ[i + 1..].iter().sum();
                if tail > 0 {
                    succ[i] += 1;
                    for v in succ[i + 1..].iter_mut() {
                        *v = 0;
                    }
                    succ[len - 1] = tail - 1;
                    next = Some(succ);
                    break;
                }
                if i == 0 {
                    break;
                }
                i -= 1;
            }
        }
        Some(Composition(current))
    })
}

/// Per-level products and multipliers for one min-max search.
struct SearchTables {
    /// `products[j][k]`: class-`j` product for count `k`, `None` if infeasible.
    products: Vec<Vec<Option<BigUint>>>,
    /// `N_t` for each level.
    level_exp: Vec<u32>,
    /// Extra factor multiplied into the level-`t` product.
    level_mult: Vec<BigUint>,
    min_count: Vec<usize>,
    /// Added to each level product before taking roots.
    offset: u32,
}

struct Search<'a> {
    tables: &'a SearchTables,
    best: Option<BigUint>,
    thresholds: Vec<BigUint>,
    witness: Option<(Vec<usize>, usize)>,
    counts: Vec<usize>,
}

impl Search<'_> {
    fn set_best(&mut self, bound: BigUint, level: usize) {
        let below = &bound - 1u32;
        self.thresholds = self
            .tables
            .level_exp
            .iter()
            .map(|&e| below.pow(e))
            .collect();
        self.best = Some(bound);
        self.witness = Some((self.counts.clone(), level));
    }

    /// `1 + mult_t · P_t`, or `None` when this level already rules out
    /// beating the current best.
    fn level_value(&self, t: usize, partial: &BigUint) -> Option<BigUint> {
        let v = partial * &self.tables.level_mult[t] + self.tables.offset;
        match &self.best {
            Some(_) if v > self.thresholds[t] => None,
            _ => Some(v),
        }
    }

    fn visit(&mut self, t: usize, remaining: usize, partial: &BigUint, values: &mut Vec<BigUint>) {
        let last = t + 1 == self.tables.products.len();
        let lo = self.tables.min_count[t];
        let hi = remaining;
        let range: Box<dyn Iterator<Item = usize>> = if last {
            Box::new(std::iter::once(remaining))
        } else {
            Box::new(lo..=hi)
        };
        for k in range {
            if k < lo {
                continue;
            }
            let Some(Some(class_prod)) = self.tables.products[t].get(k) else {
                // Counts past a finite class are infeasible; larger k too.
                break;
            };
            let p = partial * class_prod;
            let Some(v) = self.level_value(t, &p) else {
                // Products grow with k, so larger k is cut as well.
                break;
            };
            self.counts[t] = k;
            values.push(v);
            if last {
                self.evaluate_leaf(values);
            } else {
                self.visit(t + 1, remaining - k, &p, values);
            }
            values.pop();
        }
    }

    fn evaluate_leaf(&mut self, values: &[BigUint]) {
        let mut max: Option<(BigUint, usize)> = None;
        for (t, v) in values.iter().enumerate() {
            let r = ceil_nth_root(v, self.tables.level_exp[t]);
            if max.as_ref().is_none_or(|(m, _)| r > *m) {
                max = Some((r, t));
            }
        }
        let (bound, level) = max.expect("at least one level");
        if self.best.as_ref().is_none_or(|b| bound < *b) {
            self.set_best(bound, level);
        }
    }
}

/// Bound computations for a fixed `n`, reusing one prime partition.
#[derive(Clone, Debug)]
pub struct BoundEngine {
    part: PrimePartition,
}

impl BoundEngine {
    pub fn new(n_fact: NFactorization) -> Self {
        BoundEngine {
            part: PrimePartition::new(n_fact),
        }
    }

    pub fn n_fact(&self) -> &NFactorization {
        self.part.n_fact()
    }

    pub fn partition_mut(&mut self) -> &mut PrimePartition {
        &mut self.part
    }

    pub fn trivial(&self, omega: usize) -> Result<BoundReport> {
        trivial_bound(self.part.n_fact(), omega)
    }

    pub fn hybrid_or_pow2(&mut self, omega: usize) -> Result<BoundReport> {
        self.hybrid_or_pow2_with(omega, false)
    }

    /// [`Self::hybrid_or_pow2`], optionally with the strict inequality of
    /// [`HybridOptions::strict`].
    pub fn hybrid_or_pow2_with(&mut self, omega: usize, strict: bool) -> Result<BoundReport> {
        match self.n_fact().pow2_exponent() {
            Some(a) => pow2_with_offset(a, omega, Pow2Strength::Full, if strict { 2 } else { 1 }),
            None => self.hybrid(
                omega,
                HybridOptions {
                    strict,
                    ..HybridOptions::default()
                },
            ),
        }
    }

    fn base_tables(&mut self, omega: usize) -> Result<SearchTables> {
        let m = self.part.n_fact().m();
        let mut products = Vec::with_capacity(m + 1);
        for j in 0..=m {
            products.push(self.part.class_products(j, omega, ClassModifier::None)?);
        }
        let level_exp = (0..=m)
            .map(|t| {
                let e = self.part.n_fact().level_exponent(t)?;
                u32::try_from(e).map_err(|_| Error::ExponentOverflow)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SearchTables {
            products,
            level_exp,
            level_mult: vec![BigUint::one(); m + 1],
            min_count: vec![0; m + 1],
            offset: 1,
        })
    }

    fn run(&self, tables: &SearchTables, omega: usize, variant: Variant) -> Result<BoundReport> {
        let m = tables.products.len() - 1;
        let mut search = Search {
            tables,
            best: None,
            thresholds: Vec::new(),
            witness: None,
            counts: vec![0; m + 1],
        };
        search.visit(0, omega, &BigUint::one(), &mut Vec::with_capacity(m + 1));
        let (Some(bound), Some((counts, level))) = (search.best, search.witness) else {
            return Err(Error::InvalidArgument(format!(
                "no feasible composition of {omega} for n = {}",
                self.part.n_fact()
            )));
        };
        Ok(BoundReport {
            bound,
            witness_composition: Some(Composition(counts)),
            witness_level: Some(level),
            variant,
            omega,
            n_fact: self.part.n_fact().clone(),
        })
    }

    pub fn hybrid(&mut self, omega: usize, opts: HybridOptions) -> Result<BoundReport> {
        let mut tables = self.base_tables(omega)?;
        if opts.strict {
            tables.offset = 2;
        }
        if opts.top_class_nonempty {
            let m = tables.min_count.len() - 1;
            tables.min_count[m] = 1;
        }
        self.run(&tables, omega, Variant::Hybrid)
    }

    pub fn ramification(&mut self, omega: usize, ctx: &RamificationContext) -> Result<BoundReport> {
        let n_fact = self.part.n_fact().clone();
        if n_fact.base_index(ctx.phi_alpha) != Some(ctx.alpha) {
            return Err(Error::NotABase(ctx.phi_alpha));
        }
        let mut tables = self.base_tables(omega)?;
        let (variant, modifier) = if ctx.divides {
            (Variant::RamificationDivides, ClassModifier::Force(ctx.phi_alpha))
        } else {
            (Variant::RamificationNotDivides, ClassModifier::Exclude(ctx.phi_alpha))
        };
        if omega == 0 && ctx.divides {
            return Err(Error::InvalidArgument(
                "a dividing base prime needs omega >= 1".into(),
            ));
        }
        tables.products[ctx.tau] = self.part.class_products(ctx.tau, omega, modifier)?;
        if ctx.divides {
            tables.min_count[ctx.tau] = 1;
            let a_alpha = n_fact.exponents()[ctx.alpha - 1];
            let extra = BigUint::from(ctx.phi_alpha).pow(a_alpha);
            for mult in tables.level_mult.iter_mut().skip(ctx.alpha) {
                *mult = extra.clone();
            }
        }
        self.run(&tables, omega, variant)
    }
}
