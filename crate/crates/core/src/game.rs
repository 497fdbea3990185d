//! Finite two-player strategic games and the equilibrium checks used
//! throughout the crate.
//!
//! Joint strategies are enumerated in row-major order: `(s1, s2)` has cell
//! index `s1 * cols + s2`. Every dense per-cell vector in the crate uses
//! that order.

use crate::error::{Error, Result};
use crate::rational::{int, Rational};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::One, Player::Two];

    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn other(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    /// `1` or `2`, as players are numbered on the command line.
    pub fn from_number(n: u8) -> Option<Player> {
        match n {
            1 => Some(Player::One),
            2 => Some(Player::Two),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "player {}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JointStrategy {
    pub s1: usize,
    pub s2: usize,
}

impl JointStrategy {
    pub fn new(s1: usize, s2: usize) -> Self {
        JointStrategy { s1, s2 }
    }

    /// The component belonging to `player`.
    pub fn of(self, player: Player) -> usize {
        match player {
            Player::One => self.s1,
            Player::Two => self.s2,
        }
    }

    /// Replaces `player`'s component.
    pub fn with(self, player: Player, strategy: usize) -> Self {
        match player {
            Player::One => JointStrategy { s1: strategy, ..self },
            Player::Two => JointStrategy { s2: strategy, ..self },
        }
    }
}

impl fmt::Display for JointStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.s1, self.s2)
    }
}

/// A bimatrix game with exact rational utilities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    labels: [Vec<String>; 2],
    utilities: [Vec<Rational>; 2],
    normalized: bool,
}

impl Game {
    /// Builds a game from per-player utility matrices indexed `[s1][s2]`.
    ///
    /// The normalized flag is set when every utility already lies in `[0, 1]`.
    pub fn new(
        labels1: Vec<String>,
        labels2: Vec<String>,
        u1: Vec<Vec<Rational>>,
        u2: Vec<Vec<Rational>>,
    ) -> Result<Game> {
        let rows = labels1.len();
        let cols = labels2.len();
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch {
                field: "strategies".into(),
                detail: "each player needs at least one strategy".into(),
            });
        }
        let flatten = |name: &str, m: Vec<Vec<Rational>>| -> Result<Vec<Rational>> {
            if m.len() != rows {
                return Err(Error::DimensionMismatch {
                    field: name.into(),
                    detail: format!("expected {rows} rows, found {}", m.len()),
                });
            }
            let mut flat = Vec::with_capacity(rows * cols);
            for (r, row) in m.into_iter().enumerate() {
                if row.len() != cols {
                    return Err(Error::DimensionMismatch {
                        field: format!("{name}[{r}]"),
                        detail: format!("expected {cols} entries, found {}", row.len()),
                    });
                }
                flat.extend(row);
            }
            Ok(flat)
        };
        let u1 = flatten("u1", u1)?;
        let u2 = flatten("u2", u2)?;
        let normalized = u1.iter().chain(&u2).all(crate::rational::is_probability);
        Ok(Game { labels: [labels1, labels2], utilities: [u1, u2], normalized })
    }

    /// Convenience constructor from integer payoff pairs `(u1, u2)` per cell.
    pub fn from_pairs(labels1: &[&str], labels2: &[&str], cells: &[&[(i64, i64)]]) -> Result<Game> {
        let u1 = cells.iter().map(|row| row.iter().map(|c| int(c.0)).collect()).collect();
        let u2 = cells.iter().map(|row| row.iter().map(|c| int(c.1)).collect()).collect();
        Game::new(
            labels1.iter().map(|s| s.to_string()).collect(),
            labels2.iter().map(|s| s.to_string()).collect(),
            u1,
            u2,
        )
    }

    /// Battle of the Sexes with payoffs (4,2) / (2,4) on the diagonal.
    pub fn battle_of_the_sexes() -> Game {
        Game::from_pairs(&["A", "B"], &["A", "B"], &[&[(4, 2), (0, 0)], &[(0, 0), (2, 4)]]).expect("static game")
    }

    /// The coordination game whose only fair welfare-1 correlated equilibrium
    /// is a fair coin over the diagonal.
    pub fn coin_flip() -> Game {
        Game::from_pairs(&["0", "1"], &["0", "1"], &[&[(1, 0), (0, 0)], &[(0, 0), (0, 1)]]).expect("static game")
    }

    pub fn rows(&self) -> usize {
        self.labels[0].len()
    }

    pub fn cols(&self) -> usize {
        self.labels[1].len()
    }

    pub fn num_strategies(&self, player: Player) -> usize {
        self.labels[player.index()].len()
    }

    /// |S|, the number of joint strategies.
    pub fn num_cells(&self) -> usize {
        self.rows() * self.cols()
    }

    /// Total number of utility entries across both players.
    pub fn size(&self) -> usize {
        2 * self.num_cells()
    }

    pub fn labels(&self, player: Player) -> &[String] {
        &self.labels[player.index()]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn cell_index(&self, s: JointStrategy) -> usize {
        debug_assert!(s.s1 < self.rows() && s.s2 < self.cols());
        s.s1 * self.cols() + s.s2
    }

    pub fn joint(&self, cell: usize) -> JointStrategy {
        JointStrategy::new(cell / self.cols(), cell % self.cols())
    }

    pub fn contains(&self, s: JointStrategy) -> bool {
        s.s1 < self.rows() && s.s2 < self.cols()
    }

    /// All joint strategies in row-major order.
    pub fn joint_strategies(&self) -> impl Iterator<Item = JointStrategy> + '_ {
        (0..self.num_cells()).map(move |c| self.joint(c))
    }

    pub fn utility(&self, player: Player, s: JointStrategy) -> &Rational {
        &self.utilities[player.index()][self.cell_index(s)]
    }

    /// Row-major utility vector of one player.
    pub fn utilities(&self, player: Player) -> &[Rational] {
        &self.utilities[player.index()]
    }

    pub fn utility_matrix(&self, player: Player) -> Vec<Vec<Rational>> {
        self.utilities[player.index()].chunks(self.cols()).map(|r| r.to_vec()).collect()
    }

    /// Rescales each player's utilities affinely onto `[0, 1]`; a player whose
    /// utilities are all equal is mapped to all zeros.
    pub fn normalize(&self) -> Game {
        let utilities = self.utilities.clone().map(|u| {
            let min = u.iter().min().cloned().unwrap_or_else(Rational::zero);
            let max = u.iter().max().cloned().unwrap_or_else(Rational::zero);
            let range = &max - &min;
            if range.is_zero() {
                vec![Rational::zero(); u.len()]
            } else {
                u.iter().map(|x| (x - &min) / &range).collect()
            }
        });
        Game { labels: self.labels.clone(), utilities, normalized: true }
    }

    pub fn has_constant_player(&self) -> bool {
        self.utilities.iter().any(|u| u.iter().all(|x| x == &u[0]))
    }

    /// Both players' utilities are identical.
    pub fn is_common_interest(&self) -> bool {
        self.utilities[0] == self.utilities[1]
    }
}

/// Exact probability vector over joint strategies, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    probs: Vec<Rational>,
}

impl JointDistribution {
    pub fn new(rows: usize, cols: usize, probs: Vec<Rational>) -> Result<Self> {
        if probs.len() != rows * cols || probs.is_empty() {
            return Err(Error::DimensionMismatch {
                field: "probs".into(),
                detail: format!("expected {} entries, found {}", rows * cols, probs.len()),
            });
        }
        if let Some(neg) = probs.iter().find(|p| p.is_negative()) {
            return Err(Error::InvalidDistribution(format!("negative probability {neg}")));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}, not 1")));
        }
        Ok(JointDistribution { rows, cols, probs })
    }

    pub fn for_game(game: &Game, probs: Vec<Rational>) -> Result<Self> {
        Self::new(game.rows(), game.cols(), probs)
    }

    pub fn point_mass(game: &Game, s: JointStrategy) -> Self {
        let mut probs = vec![Rational::zero(); game.num_cells()];
        probs[game.cell_index(s)] = Rational::one();
        JointDistribution { rows: game.rows(), cols: game.cols(), probs }
    }

    pub fn uniform(game: &Game) -> Self {
        let n = game.num_cells();
        let p = Rational::new(1.into(), (n as i64).into());
        JointDistribution { rows: game.rows(), cols: game.cols(), probs: vec![p; n] }
    }

    /// Builds a distribution from sparse `(strategy, probability)` pairs.
    pub fn from_entries(game: &Game, entries: &[(JointStrategy, Rational)]) -> Result<Self> {
        let mut probs = vec![Rational::zero(); game.num_cells()];
        for (s, p) in entries {
            if !game.contains(*s) {
                return Err(Error::InvalidDistribution(format!("joint strategy {s} outside the game")));
            }
            probs[game.cell_index(*s)] += p;
        }
        Self::for_game(game, probs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn prob(&self, s: JointStrategy) -> &Rational {
        &self.probs[s.s1 * self.cols + s.s2]
    }

    pub fn fits(&self, game: &Game) -> bool {
        self.rows == game.rows() && self.cols == game.cols()
    }

    /// Joint strategies with positive probability, row-major.
    pub fn support(&self) -> impl Iterator<Item = (JointStrategy, &Rational)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(move |(c, p)| (JointStrategy::new(c / self.cols, c % self.cols), p))
    }

    /// Convex combination `weight * self + (1 - weight) * other`.
    pub fn mix(&self, other: &JointDistribution, weight: &Rational) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch { field: "probs".into(), detail: "shapes differ".into() });
        }
        let rest = Rational::one() - weight;
        let probs = self.probs.iter().zip(&other.probs).map(|(a, b)| weight * a + &rest * b).collect();
        Self::new(self.rows, self.cols, probs)
    }

    /// L1 distance between two distributions of the same shape.
    pub fn l1_distance(&self, other: &JointDistribution) -> Rational {
        self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum()
    }
}

/// Independent mixed strategies, one per player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductDistribution {
    pub p1: Vec<Rational>,
    pub p2: Vec<Rational>,
}

impl ProductDistribution {
    pub fn new(p1: Vec<Rational>, p2: Vec<Rational>) -> Result<Self> {
        for (name, v) in [("p1", &p1), ("p2", &p2)] {
            if v.is_empty() || v.iter().any(|x| x.is_negative()) || !v.iter().sum::<Rational>().is_one() {
                return Err(Error::InvalidDistribution(format!("{name} is not a probability vector")));
            }
        }
        Ok(ProductDistribution { p1, p2 })
    }

    pub fn marginal(&self, player: Player) -> &[Rational] {
        match player {
            Player::One => &self.p1,
            Player::Two => &self.p2,
        }
    }

    pub fn to_joint(&self) -> JointDistribution {
        let probs = self.p1.iter().flat_map(|a| self.p2.iter().map(move |b| a * b)).collect();
        JointDistribution { rows: self.p1.len(), cols: self.p2.len(), probs }
    }
}

/// Exact expected utility of `player` when the joint strategy is drawn from `dist`.
pub fn expected_utility(game: &Game, dist: &JointDistribution, player: Player) -> Rational {
    debug_assert!(dist.fits(game));
    dist.probs.iter().zip(game.utilities(player)).map(|(p, u)| p * u).sum()
}

/// Pure Nash check: no unilateral deviation strictly improves either player.
pub fn check_pure_ne(game: &Game, s: JointStrategy) -> bool {
    Player::BOTH.iter().all(|&player| {
        let current = game.utility(player, s);
        (0..game.num_strategies(player)).all(|alt| game.utility(player, s.with(player, alt)) <= current)
    })
}

/// Expected utility of each of `player`'s pure strategies against the
/// opponent's marginal.
fn pure_strategy_values(game: &Game, dist: &ProductDistribution, player: Player) -> Vec<Rational> {
    let opponent = dist.marginal(player.other());
    (0..game.num_strategies(player))
        .map(|own| {
            opponent
                .iter()
                .enumerate()
                .map(|(theirs, q)| {
                    let s = JointStrategy::new(own, theirs);
                    let s = if player == Player::One { s } else { JointStrategy::new(theirs, own) };
                    q * game.utility(player, s)
                })
                .sum()
        })
        .collect()
}

/// Mixed Nash check: every strategy in a player's support is within
/// `tolerance` of that player's best response.
pub fn check_mixed_ne(game: &Game, dist: &ProductDistribution, tolerance: &Rational) -> bool {
    if dist.p1.len() != game.rows() || dist.p2.len() != game.cols() {
        return false;
    }
    Player::BOTH.iter().all(|&player| {
        let values = pure_strategy_values(game, dist, player);
        let best = values.iter().max().expect("non-empty strategy set");
        dist.marginal(player).iter().zip(&values).filter(|(p, _)| !p.is_zero()).all(|(_, v)| best - v <= *tolerance)
    })
}

/// For each recommended strategy of `player`, the gain from the best
/// replacement, weighted by the probability of that recommendation.
fn per_signal_gains(game: &Game, p: &JointDistribution, player: Player) -> Vec<Rational> {
    let own_count = game.num_strategies(player);
    let other_count = game.num_strategies(player.other());
    let cell = |own: usize, theirs: usize| match player {
        Player::One => JointStrategy::new(own, theirs),
        Player::Two => JointStrategy::new(theirs, own),
    };
    (0..own_count)
        .map(|signal| {
            let payoff_if = |play: usize| -> Rational {
                (0..other_count)
                    .map(|theirs| p.prob(cell(signal, theirs)) * game.utility(player, cell(play, theirs)))
                    .sum()
            };
            let obey = payoff_if(signal);
            (0..own_count).map(|alt| payoff_if(alt) - &obey).max().expect("non-empty strategy set")
        })
        .collect()
}

/// Largest gain `player` can obtain from any deviation function applied to
/// recommendations drawn from `p`. Always nonnegative.
pub fn max_ce_deviation_gain(game: &Game, p: &JointDistribution, player: Player) -> Rational {
    per_signal_gains(game, p, player).into_iter().sum()
}

/// Exact correlated-equilibrium check.
pub fn check_ce(game: &Game, p: &JointDistribution) -> bool {
    Player::BOTH.iter().all(|&player| per_signal_gains(game, p, player).iter().all(Zero::is_zero))
}

/// Average-case ε-correlated-equilibrium check.
pub fn check_epsilon_ce(game: &Game, p: &JointDistribution, epsilon: &Rational) -> bool {
    Player::BOTH.iter().all(|&player| &max_ce_deviation_gain(game, p, player) <= epsilon)
}
