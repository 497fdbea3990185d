//! Shared fixtures for the criterion benches.

use ce_sampler::battery::{random_ce, random_game};
use ce_sampler::lp::{solve_ce, CeObjective};
use ce_sampler::protocol::{PreferenceRule, Setup};
use ce_sampler::rational::frac;
use ce_sampler::rng::Stream;
use ce_sampler::{Game, JointDistribution};

/// A normalized random game with a random correlated equilibrium.
pub fn random_instance(seed: u64) -> (Game, JointDistribution) {
    let mut rng = Stream::new(seed, 0);
    let game = random_game(&mut rng);
    let p = random_ce(&game, &mut rng).expect("battery games have equilibria");
    (game.normalize(), p)
}

/// Battle of the Sexes with its fair equilibrium, `epsilon = 1/10`.
pub fn bos_setup(delta_den: i64) -> Setup {
    let g = Game::battle_of_the_sexes();
    let p = solve_ce(&g, CeObjective::MaxFair).expect("BoS has a fair CE");
    Setup::new(&g, &p, frac(1, 10), frac(1, delta_den), PreferenceRule::default()).expect("valid parameters")
}

pub fn setup_for(game: &Game, p: &JointDistribution, delta_den: i64) -> Setup {
    Setup::new(game, p, frac(1, 10), frac(1, delta_den), PreferenceRule::default()).expect("valid parameters")
}
