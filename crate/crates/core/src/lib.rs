//! Lower bounds for an integer `x` from the number of distinct prime factors
//! of `x^n - 1`, and the finite-field existence pipelines built on them.

pub mod arith;
pub mod bounds;
pub mod cyclotomic;
pub mod error;
pub mod factor;
pub mod fixtures;
pub mod line_problem;
pub mod partition;
pub mod pipeline;
pub mod primes;
pub mod sieves;
pub mod sum_problem;

pub use error::{Error, Result};

pub(crate) mod serde_big {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
