use super::{simplex_solve, Constraint, ConstraintKind, LpProblem, Relation};
use crate::error::Result;
use crate::game::{Game, JointDistribution, JointStrategy, Player};
use crate::rational::Rational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

/// Which correlated equilibrium to select.
///
/// Every mode finishes with a lexicographic refinement: the probability of
/// each joint strategy, in row-major order, is maximized subject to all
/// earlier choices. That makes the output unique and deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CeObjective {
    /// Maximize total expected payoff.
    MaxTotalLex,
    /// Maximize the smaller of the two expected payoffs, then the total.
    MaxFair,
    /// Lexicographically first point of the polytope.
    Feasible,
}

impl FromStr for CeObjective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max-total-lex" => Ok(CeObjective::MaxTotalLex),
            "max-fair" => Ok(CeObjective::MaxFair),
            "feasible" => Ok(CeObjective::Feasible),
            other => Err(format!("unknown objective `{other}` (expected max-fair, max-total-lex or feasible)")),
        }
    }
}

impl std::fmt::Display for CeObjective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CeObjective::MaxTotalLex => "max-total-lex",
            CeObjective::MaxFair => "max-fair",
            CeObjective::Feasible => "feasible",
        })
    }
}

fn unit(len: usize, at: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); len];
    v[at] = Rational::one();
    v
}

/// Rows shared by every CE program over `num_vars >= |S|` variables: the
/// incentive constraints, nonnegativity of each cell, and normalization.
fn polytope_rows(game: &Game, num_vars: usize) -> Vec<Constraint> {
    let n = game.num_cells();
    let mut rows = Vec::new();
    for player in Player::BOTH {
        let own = game.num_strategies(player);
        let other = game.num_strategies(player.other());
        let cell = |mine: usize, theirs: usize| match player {
            Player::One => JointStrategy::new(mine, theirs),
            Player::Two => JointStrategy::new(theirs, mine),
        };
        for from in 0..own {
            for to in (0..own).filter(|&t| t != from) {
                let mut coeffs = vec![Rational::zero(); num_vars];
                for theirs in 0..other {
                    let s = cell(from, theirs);
                    coeffs[game.cell_index(s)] = game.utility(player, s) - game.utility(player, cell(to, theirs));
                }
                rows.push(Constraint {
                    coeffs,
                    relation: Relation::Ge,
                    rhs: Rational::zero(),
                    kind: ConstraintKind::Deviation { player, from, to },
                });
            }
        }
    }
    for var in 0..n {
        rows.push(Constraint {
            coeffs: unit(num_vars, var),
            relation: Relation::Ge,
            rhs: Rational::zero(),
            kind: ConstraintKind::NonNegativity { var },
        });
    }
    let mut ones = vec![Rational::one(); n];
    ones.resize(num_vars, Rational::zero());
    rows.push(Constraint {
        coeffs: ones,
        relation: Relation::Eq,
        rhs: Rational::one(),
        kind: ConstraintKind::Normalization,
    });
    rows
}

fn total_payoff(game: &Game, num_vars: usize) -> Vec<Rational> {
    let mut c: Vec<Rational> =
        game.utilities(Player::One).iter().zip(game.utilities(Player::Two)).map(|(a, b)| a + b).collect();
    c.resize(num_vars, Rational::zero());
    c
}

fn lex_tail(n: usize, num_vars: usize) -> impl Iterator<Item = Vec<Rational>> {
    (0..n).map(move |i| unit(num_vars, i))
}

/// The LP whose feasible region (restricted to the first `|S|` variables) is
/// the correlated-equilibrium polytope of `game`.
pub fn build_ce_lp(game: &Game, objective: CeObjective) -> LpProblem {
    let n = game.num_cells();
    match objective {
        CeObjective::Feasible => {
            LpProblem { num_vars: n, constraints: polytope_rows(game, n), objectives: lex_tail(n, n).collect() }
        }
        CeObjective::MaxTotalLex => LpProblem {
            num_vars: n,
            constraints: polytope_rows(game, n),
            objectives: std::iter::once(total_payoff(game, n)).chain(lex_tail(n, n)).collect(),
        },
        CeObjective::MaxFair => {
            // Variable n is t' = t - m >= 0, where m is the smallest utility
            // in the game, so that t' <= E[u_i - m] needs no free variable.
            let num_vars = n + 1;
            let mut constraints = polytope_rows(game, num_vars);
            let floor = game
                .utilities(Player::One)
                .iter()
                .chain(game.utilities(Player::Two))
                .min()
                .cloned()
                .unwrap_or_else(Rational::zero);
            for player in Player::BOTH {
                let mut coeffs: Vec<Rational> = game.utilities(player).iter().map(|u| &floor - u).collect();
                coeffs.push(Rational::one());
                constraints.push(Constraint {
                    coeffs,
                    relation: Relation::Le,
                    rhs: Rational::zero(),
                    kind: ConstraintKind::Epigraph { player },
                });
            }
            let objectives = std::iter::once(unit(num_vars, n))
                .chain(std::iter::once(total_payoff(game, num_vars)))
                .chain(lex_tail(n, num_vars))
                .collect();
            LpProblem { num_vars, constraints, objectives }
        }
    }
}

/// CE program maximizing an arbitrary linear functional of the cell
/// probabilities, followed by the usual lexicographic refinement.
pub fn build_ce_lp_with(game: &Game, primary: Vec<Rational>) -> LpProblem {
    let n = game.num_cells();
    assert_eq!(primary.len(), n, "one coefficient per joint strategy");
    LpProblem {
        num_vars: n,
        constraints: polytope_rows(game, n),
        objectives: std::iter::once(primary).chain(lex_tail(n, n)).collect(),
    }
}

fn to_distribution(game: &Game, lp: &LpProblem) -> Result<JointDistribution> {
    let solution = simplex_solve(lp)?;
    let mut values = solution.values;
    values.truncate(game.num_cells());
    JointDistribution::for_game(game, values)
}

/// Computes a correlated equilibrium of `game` selected by `objective`.
pub fn solve_ce(game: &Game, objective: CeObjective) -> Result<JointDistribution> {
    to_distribution(game, &build_ce_lp(game, objective))
}

pub fn solve_ce_with_objective(game: &Game, primary: Vec<Rational>) -> Result<JointDistribution> {
    to_distribution(game, &build_ce_lp_with(game, primary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{check_ce, expected_utility};
    use crate::rational::{frac, int};

    fn diag(game: &Game, a: Rational, b: Rational) -> JointDistribution {
        JointDistribution::from_entries(game, &[(JointStrategy::new(0, 0), a), (JointStrategy::new(1, 1), b)]).unwrap()
    }

    #[test]
    fn constraint_counts() {
        let g = Game::battle_of_the_sexes();
        let lp = build_ce_lp(&g, CeObjective::Feasible);
        assert_eq!(lp.num_vars, 4);
        assert_eq!(lp.count(|k| matches!(k, ConstraintKind::Deviation { .. })), 4);
        assert_eq!(lp.count(|k| matches!(k, ConstraintKind::NonNegativity { .. })), 4);
        assert_eq!(lp.count(|k| matches!(k, ConstraintKind::Normalization)), 1);
        assert_eq!(lp.constraints.len(), 2 + 2 + 4 + 1);

        let single = Game::from_pairs(&["x"], &["y"], &[&[(1, 1)]]).unwrap();
        let lp = build_ce_lp(&single, CeObjective::MaxTotalLex);
        assert_eq!(lp.num_vars, 1);
        assert_eq!(lp.count(|k| matches!(k, ConstraintKind::Deviation { .. })), 0);
        assert_eq!(simplex_solve(&lp).unwrap().values, vec![int(1)]);

        let g = Game::from_pairs(&["a", "b", "c"], &["x", "y"], &[&[(0, 0); 2], &[(0, 0); 2], &[(0, 0); 2]]).unwrap();
        assert_eq!(build_ce_lp(&g, CeObjective::Feasible).constraints.len(), 3 * 2 + 2 + 6 + 1);
    }

    #[test]
    fn bos_fair_equilibrium() {
        let g = Game::battle_of_the_sexes();
        let p = solve_ce(&g, CeObjective::MaxFair).unwrap();
        assert_eq!(p, diag(&g, frac(1, 2), frac(1, 2)));
        assert_eq!(expected_utility(&g, &p, Player::One), int(3));
        assert_eq!(expected_utility(&g, &p, Player::Two), int(3));
    }

    #[test]
    fn bos_max_total_prefers_first_cell() {
        let g = Game::battle_of_the_sexes();
        let p = solve_ce(&g, CeObjective::MaxTotalLex).unwrap();
        assert_eq!(p, JointDistribution::point_mass(&g, JointStrategy::new(0, 0)));
        let lp = build_ce_lp(&g, CeObjective::MaxTotalLex);
        assert_eq!(simplex_solve(&lp).unwrap().objective_values[0], int(6));
    }

    #[test]
    fn coin_flip_fair_equilibrium() {
        let g = Game::coin_flip();
        assert_eq!(solve_ce(&g, CeObjective::MaxFair).unwrap(), diag(&g, frac(1, 2), frac(1, 2)));
    }

    #[test]
    fn bos_polytope_contains_the_known_equilibria() {
        let g = Game::battle_of_the_sexes();
        for p in [diag(&g, int(1), int(0)), diag(&g, int(0), int(1)), diag(&g, frac(1, 2), frac(1, 2))] {
            let lp = build_ce_lp(&g, CeObjective::Feasible);
            for row in &lp.constraints {
                let lhs: Rational = row.coeffs.iter().zip(p.probs()).map(|(a, x)| a * x).sum();
                let ok = match row.relation {
                    Relation::Ge => lhs >= row.rhs,
                    Relation::Le => lhs <= row.rhs,
                    Relation::Eq => lhs == row.rhs,
                };
                assert!(ok, "{row:?}");
            }
        }
    }

    #[test]
    fn every_objective_yields_an_equilibrium() {
        let g = Game::from_pairs(
            &["a", "b", "c"],
            &["x", "y", "z"],
            &[&[(3, 1), (0, 2), (5, 0)], &[(1, 4), (2, 2), (0, 1)], &[(2, 0), (1, 3), (4, 4)]],
        )
        .unwrap();
        for objective in [CeObjective::MaxFair, CeObjective::MaxTotalLex, CeObjective::Feasible] {
            let p = solve_ce(&g, objective).unwrap();
            assert!(check_ce(&g, &p), "{objective}");
            assert_eq!(p, solve_ce(&g, objective).unwrap());
        }
    }

    #[test]
    fn objective_names_round_trip() {
        for o in [CeObjective::MaxFair, CeObjective::MaxTotalLex, CeObjective::Feasible] {
            assert_eq!(o.to_string().parse::<CeObjective>().unwrap(), o);
        }
        assert!("best".parse::<CeObjective>().is_err());
    }
}
