//! Seeded random instances for the exact checks: games from 2x2 to 4x4 with
//! integer utilities, and correlated equilibria drawn from the interior of
//! the polytope as random mixtures of optimal vertices.

use crate::error::Result;
use crate::game::{Game, JointDistribution};
use crate::lp::solve_ce_with_objective;
use crate::rational::{frac, int, Rational};
use crate::rng::Stream;

pub const DELTAS: [(i64, i64); 2] = [(1, 2), (1, 8)];
pub const EPSILONS: [(i64, i64); 2] = [(1, 10), (1, 100)];

/// Largest utility drawn; a wide range makes exact ties between
/// conditional expectations rare.
pub const MAX_UTILITY: u64 = 100;

#[derive(Debug, Clone)]
pub struct Instance {
    pub index: usize,
    /// Normalized to `[0, 1]`.
    pub game: Game,
    pub p: JointDistribution,
    pub delta: Rational,
    pub epsilon: Rational,
}

fn below(rng: &mut Stream, n: u64) -> u64 {
    rng.next_u64() % n
}

/// Random game with utilities in `0..=MAX_UTILITY`, not yet normalized.
pub fn random_game(rng: &mut Stream) -> Game {
    let rows = 2 + below(rng, 3) as usize;
    let cols = 2 + below(rng, 3) as usize;
    let mut matrix = || -> Vec<Vec<Rational>> {
        (0..rows).map(|_| (0..cols).map(|_| int(below(rng, MAX_UTILITY + 1) as i64)).collect()).collect()
    };
    let (u1, u2) = (matrix(), matrix());
    let labels = |n: usize| (0..n).map(|i| i.to_string()).collect();
    Game::new(labels(rows), labels(cols), u1, u2).expect("consistent dimensions")
}

/// A point of the CE polytope: a random convex mixture of up to three
/// vertices, each optimal for a random linear objective.
pub fn random_ce(game: &Game, rng: &mut Stream) -> Result<JointDistribution> {
    let n = game.num_cells();
    let mut point: Option<JointDistribution> = None;
    let mut weight_so_far = 0i64;
    for _ in 0..3 {
        let objective = (0..n).map(|_| int(below(rng, 11) as i64 - 5)).collect();
        let vertex = solve_ce_with_objective(game, objective)?;
        let w = 1 + below(rng, 4) as i64;
        point = Some(match point {
            None => vertex,
            // keep the running point's share proportional to its weight
            Some(acc) => acc.mix(&vertex, &frac(weight_so_far, weight_so_far + w))?,
        });
        weight_so_far += w;
    }
    Ok(point.expect("three vertices drawn"))
}

/// `games` random games, each paired with every `(delta, epsilon)`
/// combination. Deterministic in `seed`.
pub fn instances(seed: u64, games: usize) -> Result<Vec<Instance>> {
    let mut out = Vec::with_capacity(games * DELTAS.len() * EPSILONS.len());
    for g in 0..games {
        let mut rng = Stream::new(seed, g as u64);
        let raw = random_game(&mut rng);
        let p = random_ce(&raw, &mut rng)?;
        let game = raw.normalize();
        for &(dn, dd) in &DELTAS {
            for &(en, ed) in &EPSILONS {
                out.push(Instance {
                    index: g,
                    game: game.clone(),
                    p: p.clone(),
                    delta: frac(dn, dd),
                    epsilon: frac(en, ed),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::check_ce;

    #[test]
    fn instances_are_equilibria_and_reproducible() {
        let a = instances(3, 6).unwrap();
        assert_eq!(a.len(), 24);
        for inst in &a {
            assert!(inst.game.is_normalized());
            assert!(check_ce(&inst.game, &inst.p));
            assert!((2..=4).contains(&inst.game.rows()) && (2..=4).contains(&inst.game.cols()));
        }
        let b = instances(3, 6).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.p == y.p && x.game == y.game));
    }
}
