//! Published reference data, embedded so that runs can be diffed against it
//! from any working directory.

use crate::error::Result;
use crate::line_problem::parse_integer_list;
use crate::sum_problem::parse_pairs;

/// The 647 degree-5 prime powers left after the sieve cascade.
pub const E5: &str = include_str!("../../../fixtures/e5.txt");

/// The 33 `(n, ω)` pairs left by the primitive-element-sum search.
pub const EU_PAIRS: &str = include_str!("../../../fixtures/eu_pairs.txt");

pub fn e5() -> Result<Vec<u64>> {
    parse_integer_list(E5)
}

pub fn eu_pairs() -> Result<Vec<(u64, usize)>> {
    parse_pairs(EU_PAIRS)
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixtures_parse() {
        let e5 = super::e5().unwrap();
        assert_eq!(e5.len(), 647);
        assert_eq!(e5.last(), Some(&62791));
        assert!(e5.windows(2).all(|w| w[0] < w[1]));
        let pairs = super::eu_pairs().unwrap();
        assert_eq!(pairs.len(), 33);
        assert!(pairs.iter().all(|&(n, w)| n <= 4 * w as u64 && w <= 15));
    }
}
