//! Prime generation.
//!
//! A segmented sieve of Eratosthenes over `[lo, hi]` backs every prime list
//! in the crate. [`PrimeTable`] keeps the global ascending prime list and
//! doubles its limit on demand.

use std::sync::{OnceLock, RwLock};

const SEGMENT: u64 = 1 << 18;

/// All primes `<= limit`, ascending.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    primes_in_range(2, limit)
}

/// All primes in `[lo, hi]`, ascending, via a segmented sieve.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_prime_in(lo, hi, |p| out.push(p));
    out
}

/// Calls `f` on every prime in `[lo, hi]` in ascending order.
pub fn for_each_prime_in(lo: u64, hi: u64, mut f: impl FnMut(u64)) {
    let lo = lo.max(2);
    if hi < lo {
        return;
    }
    let root = crate::arith::isqrt_u64(hi);
    let base = simple_sieve(root);
    let mut seg_lo = lo;
    let mut marks = vec![false; SEGMENT as usize];
    loop {
        let seg_hi = seg_lo.saturating_add(SEGMENT - 1).min(hi);
        let len = (seg_hi - seg_lo + 1) as usize;
        marks[..len].iter_mut().for_each(|m| *m = true);
        for &p in &base {
            if p * p > seg_hi {
                break;
            }
            let mut start = (seg_lo.div_ceil(p) * p).max(p * p);
            while start <= seg_hi {
                marks[(start - seg_lo) as usize] = false;
                start += p;
            }
        }
        for (i, &is_p) in marks[..len].iter().enumerate() {
            if is_p {
                f(seg_lo + i as u64);
            }
        }
        if seg_hi == hi {
            break;
        }
        seg_lo = seg_hi + 1;
    }
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut is_p = vec![true; n + 1];
    is_p[0] = false;
    is_p[1] = false;
    let mut i = 2;
    while i * i <= n {
        if is_p[i] {
            let mut j = i * i;
            while j <= n {
                is_p[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is_p
        .iter()
        .enumerate()
        .filter_map(|(k, &b)| b.then_some(k as u64))
        .collect()
}

/// Every prime power `p^e` (e >= 1) in `[lo, hi]`, ascending.
pub fn prime_powers_in(lo: u64, hi: u64) -> Vec<u64> {
    let lo = lo.max(2);
    if hi < lo {
        return Vec::new();
    }
    let mut out = primes_in_range(lo, hi);
    let root = crate::arith::isqrt_u64(hi);
    for p in primes_up_to(root) {
        let mut pe = p * p;
        loop {
            if pe >= lo {
                out.push(pe);
            }
            match pe.checked_mul(p) {
                Some(next) if next <= hi => pe = next,
                _ => break,
            }
        }
    }
    out.sort_unstable();
    out
}

/// Returns `Some((p, e))` when `q = p^e` with `p` prime and `e >= 1`.
pub fn as_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut r = q;
            let mut e = 0;
            while r.is_multiple_of(p) {
                r /= p;
                e += 1;
            }
            return (r == 1).then_some((p, e));
        }
        p += 1;
    }
    Some((q, 1))
}

/// Global ascending prime list, grown by doubling.
#[derive(Debug)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn new() -> Self {
        PrimeTable {
            limit: 1 << 12,
            primes: primes_up_to(1 << 12),
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Doubles the sieve limit once.
    pub fn grow(&mut self) {
        let new_limit = self.limit * 2;
        self.primes
            .extend(primes_in_range(self.limit + 1, new_limit));
        self.limit = new_limit;
    }

    /// Makes at least `count` primes available.
    pub fn ensure_count(&mut self, count: usize) {
        while self.primes.len() < count {
            self.grow();
        }
    }
}

impl Default for PrimeTable {
    fn default() -> Self {
        Self::new()
    }
}

fn shared_table() -> &'static RwLock<PrimeTable> {
    static TABLE: OnceLock<RwLock<PrimeTable>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(PrimeTable::new()))
}

/// The `i`-th prime (1-based): `nth_prime(1) == 2`.
pub fn nth_prime(i: usize) -> u64 {
    assert!(i >= 1, "prime index is 1-based");
    {
        let table = shared_table().read().expect("prime table poisoned");
        if let Some(&p) = table.primes().get(i - 1) {
            return p;
        }
    }
    let mut table = shared_table().write().expect("prime table poisoned");
    table.ensure_count(i);
    table.primes()[i - 1]
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    nth_prime(count);
    let table = shared_table().read().expect("prime table poisoned");
    table.primes()[..count].to_vec()
}
