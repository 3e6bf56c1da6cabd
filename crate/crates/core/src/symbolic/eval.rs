use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::rational::RationalFunction;
use super::variable::{Q, Variable};

const MAX_ATTEMPTS: u64 = 8;

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic sample value of `v` for a given seed and attempt.
///
/// Values are rationals `n/d` with `|n| < 10^6` and `0 < d < 512`, so the
/// probability of landing on a pole of a low-degree function is negligible.
pub fn sample_value(v: Variable, seed: u64, attempt: u64) -> Q {
    let key = mix(seed ^ mix(v.stable_key()) ^ mix(attempt.wrapping_mul(0x5851_f42d_4c95_7f2d)));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    let num: i64 = rng.gen_range(-999_999..=999_999);
    let den: i64 = rng.gen_range(1..512);
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Evaluates `f` at a pseudo-random point derived from `seed`.
///
/// A point that hits a pole is resampled; after the attempts run out the
/// result is `None`. This is a fast pre-check only: a nonzero value
/// disproves an identity, a zero value proves nothing.
pub fn random_eval(f: &RationalFunction, seed: u64) -> Option<Q> {
    (0..MAX_ATTEMPTS).find_map(|attempt| f.eval(&|v| sample_value(v, seed, attempt)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::linear::LinearForm;

    #[test]
    fn deterministic_and_variable_dependent() {
        let x = Variable::X { vertex: 1, slot: 1 };
        assert_eq!(sample_value(x, 7, 0), sample_value(x, 7, 0));
        assert_ne!(sample_value(x, 7, 0), sample_value(Variable::Hbar, 7, 0));
        let f = RationalFunction::reciprocal(&(LinearForm::var(x) - LinearForm::hbar()));
        assert!(random_eval(&f, 1).is_some());
    }
}
