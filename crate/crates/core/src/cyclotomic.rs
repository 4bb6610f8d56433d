//! Prime-index cyclotomic values and the tower factorization of `x^n - 1`.
//!
//! With `x_k = x^{∏_{r<k} φ_r^{a_r}}`, the integer `x^n - 1` splits as
//! `(x - 1) · ∏_i ∏_{j=1}^{a_i} Φ_{φ_i}(x_i^{φ_i^{j-1}})`. Two factors of the
//! split share a prime only if that prime divides `n`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::partition::NFactorization;

/// `Φ_φ(y) = 1 + y + … + y^{φ-1}` for prime `φ` and `y >= 1`.
pub fn phi_eval(phi: u64, y: &BigUint) -> BigUint {
    assert!(!y.is_zero(), "cyclotomic argument must be positive");
    if y.is_one() {
        return BigUint::from(phi);
    }
    let exp = u32::try_from(phi).expect("cyclotomic index fits in u32");
    let numerator = y.pow(exp) - 1u32;
    let denominator = y - 1u32;
    let (quot, rem) = numerator.div_rem(&denominator);
    assert!(rem.is_zero(), "y^φ - 1 is divisible by y - 1");
    quot
}

/// One factor of the split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitFactor {
    /// `None` for the leading `x - 1`, otherwise the prime index `φ_i`.
    pub base: Option<u64>,
    /// `j` in `Φ_{φ_i}(x_i^{φ_i^{j-1}})`; 0 for `x - 1`.
    pub level: u32,
    pub value: BigUint,
}

#[derive(Clone, Debug)]
pub struct CyclotomicSplit {
    pub base_value: BigUint,
    pub n_fact: NFactorization,
    /// `x_1, …, x_{m+1}`; `x_1 = x` and `x_{m+1} = x^n`.
    pub tower: Vec<BigUint>,
    pub factors: Vec<SplitFactor>,
}

impl CyclotomicSplit {
    pub fn product(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, f| acc * &f.value)
    }

    pub fn values(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|f| &f.value)
    }
}

/// Splits `x^n - 1` into `1 + Σ a_i` pairwise almost-coprime factors.
pub fn split_xn_minus_1(x: &BigUint, n_fact: &NFactorization) -> Result<CyclotomicSplit> {
    if *x < BigUint::from(2u32) {
        return Err(Error::InvalidArgument("split needs x >= 2".into()));
    }
    let m = n_fact.m();
    let mut tower = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let e = n_fact.level_exponent(k)?;
        let e = u32::try_from(e).map_err(|_| Error::ExponentOverflow)?;
        tower.push(x.pow(e));
    }
    let mut factors = vec![SplitFactor {
        base: None,
        level: 0,
        value: x - 1u32,
    }];
    for (i, (&phi, &a)) in n_fact.bases().iter().zip(n_fact.exponents()).enumerate() {
        let phi_u32 = u32::try_from(phi).map_err(|_| Error::ExponentOverflow)?;
        let mut y = tower[i].clone();
        for j in 1..=a {
            factors.push(SplitFactor {
                base: Some(phi),
                level: j,
                value: phi_eval(phi, &y),
            });
            y = y.pow(phi_u32);
        }
    }
    let split = CyclotomicSplit {
        base_value: x.clone(),
        n_fact: n_fact.clone(),
        tower,
        factors,
    };
    debug_assert_eq!(split.product(), split.tower[m].clone() - 1u32);
    Ok(split)
}

/// Whether the base prime `phi` of `n` divides `x^n - 1`.
pub fn ramified_divides(phi: u64, x: &BigUint, n_fact: &NFactorization) -> Result<bool> {
    if n_fact.base_index(phi).is_none() {
        return Err(Error::NotABase(phi));
    }
    let modulus = BigUint::from(phi);
    Ok(x.modpow(n_fact.n(), &modulus).is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn values(x: u64, n: u64) -> Vec<BigUint> {
        let split = split_xn_minus_1(&big(x), &NFactorization::of(n).unwrap()).unwrap();
        split.factors.into_iter().map(|f| f.value).collect()
    }

    #[test]
    fn phi_eval_examples() {
        assert_eq!(phi_eval(3, &big(1)), big(3));
        assert_eq!(phi_eval(3, &big(2)), big(7));
        assert_eq!(phi_eval(5, &big(2)), big(31));
    }

    #[test]
    fn split_examples() {
        assert_eq!(values(2, 3), vec![big(1), big(7)]);
        assert_eq!(values(3, 4), vec![big(2), big(4), big(10)]);
        assert_eq!(values(2, 6), vec![big(1), big(3), big(21)]);
    }

    #[test]
    fn split_tower_and_count() {
        let nf = NFactorization::of(360).unwrap();
        let split = split_xn_minus_1(&big(7), &nf).unwrap();
        assert_eq!(split.factors.len(), 1 + 3 + 2 + 1);
        assert_eq!(split.tower[0], big(7));
        assert_eq!(split.tower[1], big(7).pow(8));
        assert_eq!(split.tower[3], big(7).pow(360));
        assert_eq!(split.product(), big(7).pow(360) - 1u32);
    }

    #[test]
    fn ramified_divisibility() {
        let three = NFactorization::of(3).unwrap();
        assert!(ramified_divides(3, &big(4), &three).unwrap());
        assert!(!ramified_divides(3, &big(5), &three).unwrap());
        assert!(ramified_divides(2, &big(3), &NFactorization::of(4).unwrap()).unwrap());
        assert!(matches!(
            ramified_divides(5, &big(4), &three),
            Err(Error::NotABase(5))
        ));
    }

    #[test]
    fn split_rejects_small_base() {
        assert!(split_xn_minus_1(&big(1), &NFactorization::of(3).unwrap()).is_err());
    }
}
