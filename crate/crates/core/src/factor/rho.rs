//! Pollard rho with Brent's cycle finding and batched gcds.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::modular::ModRing;

const BATCH: u64 = 128;

/// Outcome of a rho run on an odd composite modulus.
pub enum RhoResult<I> {
    Factor(I),
    /// The iteration budget ran out before a split was found.
    Exhausted,
}

/// Finds a nontrivial factor of the ring modulus, which must be an odd
/// composite that is not a prime power of a tiny prime. `budget` counts
/// polynomial evaluations and is decremented in place.
pub fn brent<R>(ring: &R, rng: &mut ChaCha8Rng, budget: &mut u64) -> RhoResult<R::Int>
where
    R: ModRing,
    R::Int: PartialEq + From<u8>,
{
    let one_int = R::Int::from(1u8);
    let modulus = ring.modulus();
    loop {
        let c = ring.from_u64(rng.gen_range(1..u64::MAX));
        let f = |v: &R::E| ring.add(&ring.square(v), &c);
        let mut y = ring.from_u64(rng.gen());
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut q = ring.one();
        let mut g = one_int.clone();
        let mut r = 1u64;
        while g == one_int {
            x = y.clone();
            if *budget < r {
                *budget = 0;
                return RhoResult::Exhausted;
            }
            *budget -= r;
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one_int {
                ys = y.clone();
                let steps = BATCH.min(r - k);
                if *budget < steps {
                    *budget = 0;
                    return RhoResult::Exhausted;
                }
                *budget -= steps;
                for _ in 0..steps {
                    y = f(&y);
                    q = ring.mul(&q, &ring.sub(&x, &y));
                }
                g = ring.gcd_modulus(&q);
                k += steps;
            }
            r *= 2;
        }
        if g == modulus {
            // The batch overshot; replay it one step at a time.
            loop {
                if *budget == 0 {
                    return RhoResult::Exhausted;
                }
                *budget -= 1;
                ys = f(&ys);
                g = ring.gcd_modulus(&ring.sub(&x, &ys));
                if g != one_int {
                    break;
                }
            }
        }
        if g != modulus {
            return RhoResult::Factor(g);
        }
    }
}
