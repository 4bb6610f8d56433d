//! Trial division below 10^5, using multiply-by-inverse divisibility tests so
//! that 128-bit cofactors never go through a hardware division per prime.

use std::sync::OnceLock;

use crate::primes::primes_up_to;

pub const TRIAL_LIMIT: u64 = 100_000;

pub struct OddPrime {
    pub p: u64,
    inv: u128,
    lim: u128,
}

impl OddPrime {
    fn new(p: u64) -> Self {
        let p128 = p as u128;
        let mut inv = p128;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(p128.wrapping_mul(inv)));
        }
        OddPrime {
            p,
            inv,
            lim: u128::MAX / p128,
        }
    }

    /// `Some(n / p)` when `p | n`.
    #[inline]
    pub fn divide(&self, n: u128) -> Option<u128> {
        let q = n.wrapping_mul(self.inv);
        (q <= self.lim).then_some(q)
    }
}

pub fn odd_primes() -> &'static [OddPrime] {
    static TABLE: OnceLock<Vec<OddPrime>> = OnceLock::new();
    TABLE.get_or_init(|| {
        primes_up_to(TRIAL_LIMIT)
            .into_iter()
            .skip(1)
            .map(OddPrime::new)
            .collect()
    })
}

/// Which primes can divide a piece: `base` itself, or primes `≡ 1 (mod modulus)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Admissible {
    pub modulus: u64,
    pub base: u64,
}

impl Admissible {
    pub const ALL: Admissible = Admissible {
        modulus: 1,
        base: 1,
    };

    #[inline]
    pub fn allows(&self, p: u64) -> bool {
        p == self.base || p % self.modulus == 1 || self.modulus == 1
    }
}

/// Strips factors of 2 and of admissible odd primes `p` with `lo < p <= hi`
/// from `n`, appending `(p, multiplicity)`. Stops early once `p^2 > n`, in
/// which case the remaining cofactor is 1 or prime; the return value says
/// whether that happened.
pub fn strip(n: &mut u128, adm: Admissible, lo: u64, hi: u64, found: &mut Vec<(u128, u32)>) -> bool {
    if lo < 2 && hi >= 2 && *n > 0 && (*n).is_multiple_of(2) {
        let e = n.trailing_zeros();
        *n >>= e;
        found.push((2, e));
    }
    let table = odd_primes();
    let start = table.partition_point(|op| op.p <= lo);
    for op in &table[start..] {
        if op.p > hi {
            return false;
        }
        let p = op.p as u128;
        if p * p > *n {
            return true;
        }
        if !adm.allows(op.p) {
            continue;
        }
        if let Some(mut q) = op.divide(*n) {
            let mut e = 1;
            while let Some(q2) = op.divide(q) {
                q = q2;
                e += 1;
            }
            *n = q;
            found.push((p, e));
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisibility_by_inverse() {
        for op in &odd_primes()[..50] {
            for n in 0..2000u128 {
                let expect = (n % op.p as u128 == 0).then(|| n / op.p as u128);
                assert_eq!(op.divide(n), expect);
            }
            let big = u128::MAX - (u128::MAX % op.p as u128);
            assert_eq!(op.divide(big), Some(big / op.p as u128));
        }
    }

    #[test]
    fn strip_small() {
        let mut n = 2u128.pow(3) * 3 * 7u128.pow(2) * 1_000_003;
        let mut found = Vec::new();
        let done = strip(&mut n, Admissible::ALL, 0, TRIAL_LIMIT, &mut found);
        assert!(done);
        assert_eq!(n, 1_000_003);
        assert_eq!(found, vec![(2, 3), (3, 1), (7, 2)]);
    }

    #[test]
    fn strip_respects_congruence() {
        // 11 ≡ 1 (mod 5); 3 is not admissible and must stay.
        let mut n = 3u128 * 11 * 11;
        let mut found = Vec::new();
        let adm = Admissible { modulus: 5, base: 5 };
        strip(&mut n, adm, 0, 100, &mut found);
        assert_eq!(found, vec![(11, 2)]);
        assert_eq!(n, 3);
    }
}
