use crate::emulation::{conditional_expected_utility, Bit, BitPrefix, MultisetEmulation};
use crate::game::{Game, Player};
use crate::rational::{half, Rational};
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Announced preference for the next coin: `Plus` prefers bit 0, `Minus`
/// prefers bit 1. A zero difference counts as `Plus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PreferenceSign {
    Plus,
    Minus,
}

impl PreferenceSign {
    pub fn of(difference: &Rational) -> Self {
        if difference.is_negative() {
            PreferenceSign::Minus
        } else {
            PreferenceSign::Plus
        }
    }

    pub fn from_bit(bit: Bit) -> Self {
        if bit == 0 {
            PreferenceSign::Plus
        } else {
            PreferenceSign::Minus
        }
    }

    pub fn value(self) -> i8 {
        match self {
            PreferenceSign::Plus => 1,
            PreferenceSign::Minus => -1,
        }
    }

    pub fn preferred_bit(self) -> Bit {
        match self {
            PreferenceSign::Plus => 0,
            PreferenceSign::Minus => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            PreferenceSign::Plus => PreferenceSign::Minus,
            PreferenceSign::Minus => PreferenceSign::Plus,
        }
    }
}

impl fmt::Display for PreferenceSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PreferenceSign::Plus => "+1",
            PreferenceSign::Minus => "-1",
        })
    }
}

/// Which conditional expectation a player compares when announcing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreferenceRule {
    /// Expected utility under the honest protocol's own output distribution
    /// conditioned on the prefix. Well defined by backward induction, since
    /// the honest continuation below a prefix depends only on later rounds.
    #[default]
    HonestContinuation,
    /// Plain average over the table block selected by the prefix.
    BlockMean,
}

impl FromStr for PreferenceRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "honest-continuation" => Ok(PreferenceRule::HonestContinuation),
            "block-mean" => Ok(PreferenceRule::BlockMean),
            other => Err(format!("unknown preference rule `{other}`")),
        }
    }
}

impl fmt::Display for PreferenceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PreferenceRule::HonestContinuation => "honest-continuation",
            PreferenceRule::BlockMean => "block-mean",
        })
    }
}

/// Honest continuation values `E_{p_h}[u_i | prefix]` of both players,
/// computed by recursion over the subtree.
pub fn honest_continuation(em: &MultisetEmulation, game: &Game, prefix: BitPrefix) -> [Rational; 2] {
    if prefix.len() == em.k() {
        let s = em.entry(prefix.value());
        return [game.utility(Player::One, s).clone(), game.utility(Player::Two, s).clone()];
    }
    let zero = honest_continuation(em, game, prefix.push(0));
    let one = honest_continuation(em, game, prefix.push(1));
    let signs = [0, 1].map(|i| PreferenceSign::of(&(&zero[i] - &one[i])));
    if signs[0] == signs[1] {
        if signs[0] == PreferenceSign::Plus {
            zero
        } else {
            one
        }
    } else {
        [0, 1].map(|i| (&zero[i] + &one[i]) * half())
    }
}

/// Sign of player's conditional utility difference between extending
/// `prefix` with 0 and with 1, under `rule`.
pub fn compute_preference(
    em: &MultisetEmulation,
    game: &Game,
    prefix: BitPrefix,
    player: Player,
    rule: PreferenceRule,
) -> PreferenceSign {
    assert!(prefix.len() < em.k(), "no round left after this prefix");
    match rule {
        PreferenceRule::BlockMean => {
            let zero = conditional_expected_utility(em, game, prefix, 0, player);
            let one = conditional_expected_utility(em, game, prefix, 1, player);
            PreferenceSign::of(&(zero - one))
        }
        PreferenceRule::HonestContinuation => {
            let i = player.index();
            let zero = &honest_continuation(em, game, prefix.push(0))[i];
            let one = &honest_continuation(em, game, prefix.push(1))[i];
            PreferenceSign::of(&(zero - one))
        }
    }
}

/// Heap index of a prefix: the root is 1, children of `n` are `2n` and `2n+1`.
pub fn node_index(prefix: BitPrefix) -> usize {
    (1usize << prefix.len()) | prefix.value() as usize
}

/// Both players' truthful preferences at every internal node, and the honest
/// continuation values at every node, precomputed bottom-up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceTable {
    k: usize,
    rule: PreferenceRule,
    signs: Vec<[PreferenceSign; 2]>,
    honest_values: Vec<[Rational; 2]>,
}

impl PreferenceTable {
    pub fn build(em: &MultisetEmulation, game: &Game, rule: PreferenceRule) -> Self {
        let k = em.k();
        let nodes = 1usize << (k + 1);
        let mut signs = vec![[PreferenceSign::Plus; 2]; nodes];
        let mut honest_values: Vec<[Rational; 2]> = vec![[Rational::default(), Rational::default()]; nodes];
        for (ell, s) in em.table().iter().enumerate() {
            honest_values[(1 << k) | ell] =
                [game.utility(Player::One, *s).clone(), game.utility(Player::Two, *s).clone()];
        }
        for depth in (0..k).rev() {
            for value in 0..(1u64 << depth) {
                let prefix = BitPrefix::from_value(value, depth);
                let node = node_index(prefix);
                let (zero, one) = (&honest_values[2 * node], &honest_values[2 * node + 1]);
                let node_signs = match rule {
                    PreferenceRule::HonestContinuation => [0, 1].map(|i| PreferenceSign::of(&(&zero[i] - &one[i]))),
                    PreferenceRule::BlockMean => Player::BOTH.map(|p| compute_preference(em, game, prefix, p, rule)),
                };
                let value = if node_signs[0] == node_signs[1] {
                    if node_signs[0] == PreferenceSign::Plus {
                        zero.clone()
                    } else {
                        one.clone()
                    }
                } else {
                    [0, 1].map(|i| (&zero[i] + &one[i]) * half())
                };
                signs[node] = node_signs;
                honest_values[node] = value;
            }
        }
        PreferenceTable { k, rule, signs, honest_values }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rule(&self) -> PreferenceRule {
        self.rule
    }

    pub fn sign(&self, prefix: BitPrefix, player: Player) -> PreferenceSign {
        assert!(prefix.len() < self.k);
        self.signs[node_index(prefix)][player.index()]
    }

    /// `E_{p_h}[u_player | prefix]`.
    pub fn honest_value(&self, prefix: BitPrefix, player: Player) -> &Rational {
        &self.honest_values[node_index(prefix)][player.index()]
    }

    /// Whether honest players agree at `prefix`.
    pub fn agree(&self, prefix: BitPrefix) -> bool {
        let [a, b] = self.signs[node_index(prefix)];
        a == b
    }
}
