//! Seeded, splittable randomness.
//!
//! Each Monte Carlo trial gets its own ChaCha stream derived from
//! `(seed, trial)`, so results do not depend on how trials are scheduled
//! across threads.

use crate::rational::Rational;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Stream { rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    pub fn bit(&mut self) -> bool {
        self.rng.next_u32() & 1 == 1
    }

    /// Returns `true` with probability exactly `p` (clamped to `[0, 1]`).
    ///
    /// Compares a lazily drawn uniform binary expansion against the binary
    /// expansion of `p`; the expected number of random bits is two.
    pub fn bernoulli(&mut self, p: &Rational) -> bool {
        if !p.is_positive() {
            return false;
        }
        if p >= &Rational::one() {
            return true;
        }
        let two = BigInt::from(2);
        let mut num = p.numer().clone();
        let den = p.denom().clone();
        loop {
            // Next binary digit of p.
            num *= &two;
            let digit = num >= den;
            if digit {
                num -= &den;
            }
            let draw = self.bit();
            if draw != digit {
                return digit && !draw;
            }
            if num.is_zero() {
                // Remaining digits of p are all zero; the draw can only tie or exceed.
                return false;
            }
        }
    }
}
