//! Parallel seeded trials. Trial `t` always uses stream `t` of the seed, so
//! results are independent of the thread count.

use crate::emulation::BitDistribution;
use crate::extended::{play_extended_game, ExtendedOutcome};
use crate::protocol::{run_trial, PartyBehavior, Setup};
use crate::rational::{to_f64, Rational};
use crate::rng::Stream;
use rayon::prelude::*;

/// How many runs ended at each table index.
pub fn output_counts(setup: &Setup, parties: [&dyn PartyBehavior; 2], seed: u64, trials: u64) -> Vec<u64> {
    let size = 1usize << setup.k();
    (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; size],
            |mut acc, t| {
                let tr = run_trial(setup, parties, seed, t);
                // a run with split outputs is counted at the first party's index
                acc[tr.ell[0].value() as usize] += 1;
                acc
            },
        )
        .reduce(|| vec![0u64; size], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect())
}

/// Total variation between empirical counts and an exact distribution.
pub fn total_variation(counts: &[u64], exact: &BitDistribution) -> f64 {
    let n: u64 = counts.iter().sum();
    counts.iter().zip(exact.probs()).map(|(&c, p)| (c as f64 / n as f64 - to_f64(p)).abs()).sum::<f64>() / 2.0
}

/// Plays `trials` extended games and returns the outcomes in trial order.
pub fn play_many(setup: &Setup, parties: [&dyn PartyBehavior; 2], seed: u64, trials: u64) -> Vec<ExtendedOutcome> {
    (0..trials).into_par_iter().map(|t| play_extended_game(setup, parties, &mut Stream::new(seed, t)).0).collect()
}

/// Sample mean and half-width of a normal 95% interval.
pub fn mean_and_half_width(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.collect();
    let n = v.len() as f64;
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * (var / n).sqrt())
}

pub fn payoff_stats(outcomes: &[ExtendedOutcome], player: usize) -> (f64, f64) {
    mean_and_half_width(outcomes.iter().map(|o| to_f64(&o.payoffs[player])))
}

pub fn exact_mean(values: &[Rational]) -> Rational {
    values.iter().sum::<Rational>() / Rational::from_integer((values.len() as i64).into())
}
