//! Emulating a correlated distribution by a uniform draw from `2^k` indexed
//! copies of joint strategies, so that it can be sampled one coin at a time.

mod bits;

pub use bits::{l1_distance, Bit, BitDistribution, BitPrefix};

use crate::error::{Error, Result};
use crate::game::{Game, JointDistribution, JointStrategy, Player};
use crate::rational::{int, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Largest `k` accepted; tables beyond `2^24` entries are not desk scale.
pub const MAX_ROUNDS: usize = 24;

/// `2^k` joint strategies; index `ell` (first coin most significant) selects
/// `table[ell]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultisetEmulation {
    k: usize,
    table: Vec<JointStrategy>,
    counts: Vec<u64>,
    source: JointDistribution,
    delta: Rational,
}

/// Number of coin rounds for a game with `cells` joint strategies: the least
/// `k >= 1` with `2^k >= cells / delta`.
pub fn rounds_for(cells: usize, delta: &Rational) -> Result<usize> {
    if !delta.is_positive() {
        return Err(Error::param("delta", format!("must be positive, got {delta}")));
    }
    let target = int(cells as i64) / delta;
    let mut k = 1;
    while int(1i64 << k) < target {
        k += 1;
        if k > MAX_ROUNDS {
            return Err(Error::param("delta", format!("{delta} needs more than {MAX_ROUNDS} rounds")));
        }
    }
    Ok(k)
}

/// Hamilton apportionment of `total` seats by `weights` (which sum to 1);
/// ties on the remainder go to the lower index.
fn largest_remainder(weights: &[Rational], total: u64) -> Vec<u64> {
    let total_big = BigInt::from(total);
    let mut counts = Vec::with_capacity(weights.len());
    let mut remainders = Vec::with_capacity(weights.len());
    for (i, w) in weights.iter().enumerate() {
        let scaled = w * Rational::from_integer(total_big.clone());
        let (floor, rem) = scaled.numer().div_mod_floor(scaled.denom());
        counts.push(floor.to_u64().expect("count fits u64"));
        remainders.push((Rational::new(rem, scaled.denom().clone()), i));
    }
    let assigned: u64 = counts.iter().sum();
    let mut leftover = total - assigned;
    remainders.sort_by(|(ra, ia), (rb, ib)| rb.cmp(ra).then(ia.cmp(ib)));
    for (rem, i) in remainders {
        if leftover == 0 {
            break;
        }
        if rem.is_zero() {
            // Only reachable when weights do not sum to 1.
            continue;
        }
        counts[i] += 1;
        leftover -= 1;
    }
    counts
}

impl MultisetEmulation {
    /// Emulates `p` with copies laid out contiguously in row-major order.
    pub fn new(p: &JointDistribution, delta: &Rational) -> Result<Self> {
        let order: Vec<usize> = (0..p.probs().len()).collect();
        Self::with_order(p, delta, &order)
    }

    /// Like [`MultisetEmulation::new`] but lays the copies out following
    /// `order`, a permutation of the row-major cell indices. Copy counts do
    /// not depend on the order.
    pub fn with_order(p: &JointDistribution, delta: &Rational, order: &[usize]) -> Result<Self> {
        let cells = p.probs().len();
        let mut seen = vec![false; cells];
        if order.len() != cells || order.iter().any(|&c| c >= cells || std::mem::replace(&mut seen[c], true)) {
            return Err(Error::param("order", "must be a permutation of the joint strategies"));
        }
        let k = rounds_for(cells, delta)?;
        let counts = largest_remainder(p.probs(), 1u64 << k);
        let mut table = Vec::with_capacity(1usize << k);
        for &c in order {
            let s = JointStrategy::new(c / p.cols(), c % p.cols());
            table.extend(std::iter::repeat_n(s, counts[c] as usize));
        }
        debug_assert_eq!(table.len(), 1usize << k);
        Ok(MultisetEmulation { k, table, counts, source: p.clone(), delta: delta.clone() })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn table(&self) -> &[JointStrategy] {
        &self.table
    }

    pub fn entry(&self, ell: u64) -> JointStrategy {
        self.table[ell as usize]
    }

    /// Copies of each joint strategy, row-major.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn source(&self) -> &JointDistribution {
        &self.source
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    /// The uniform distribution over the table, as a distribution over joint strategies.
    pub fn induced(&self) -> JointDistribution {
        let k = Rational::from_integer(BigInt::from(self.len()));
        let probs = self.counts.iter().map(|&c| Rational::from_integer(c.into()) / &k).collect();
        JointDistribution::new(self.source.rows(), self.source.cols(), probs).expect("counts sum to 2^k")
    }

    pub fn approximation_error(&self) -> Rational {
        self.induced().l1_distance(&self.source)
    }

    /// Table slice selected by a prefix.
    pub fn block(&self, prefix: BitPrefix) -> &[JointStrategy] {
        assert!(prefix.len() <= self.k, "prefix longer than k");
        let width = 1usize << (self.k - prefix.len());
        let start = prefix.value() as usize * width;
        &self.table[start..start + width]
    }

    /// Mean utility of `player` over the block selected by `prefix`.
    pub fn block_mean(&self, game: &Game, prefix: BitPrefix, player: Player) -> Rational {
        let block = self.block(prefix);
        let sum: Rational = block.iter().map(|s| game.utility(player, *s)).sum();
        sum / int(block.len() as i64)
    }

    /// Pushes a distribution over table indices forward to joint strategies.
    pub fn to_joint(&self, d: &BitDistribution) -> JointDistribution {
        assert_eq!(d.bits(), self.k);
        let mut probs = vec![Rational::zero(); self.source.probs().len()];
        for (ell, s) in self.table.iter().enumerate() {
            probs[s.s1 * self.source.cols() + s.s2] += &d.probs()[ell];
        }
        JointDistribution::new(self.source.rows(), self.source.cols(), probs).expect("pushforward of a distribution")
    }

    /// Exact expected utility of `player` when the table index is drawn from `d`.
    pub fn expected_utility(&self, game: &Game, d: &BitDistribution, player: Player) -> Rational {
        self.table.iter().zip(d.probs()).map(|(s, p)| p * game.utility(player, *s)).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(EmulationDump { k: self.k, table: self.table.iter().map(|s| s.to_string()).collect() })
            .expect("plain data")
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct EmulationDump {
    k: usize,
    table: Vec<String>,
}

/// Average utility of `player` over the table entries whose index starts
/// with `prefix` followed by `next_bit`.
pub fn conditional_expected_utility(
    em: &MultisetEmulation,
    game: &Game,
    prefix: BitPrefix,
    next_bit: Bit,
    player: Player,
) -> Rational {
    assert!(prefix.len() < em.k(), "prefix must leave at least one round");
    em.block_mean(game, prefix.push(next_bit), player)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use proptest::prelude::*;

    fn bos_fair() -> (Game, JointDistribution) {
        let g = Game::battle_of_the_sexes();
        let p = JointDistribution::from_entries(
            &g,
            &[(JointStrategy::new(0, 0), frac(1, 2)), (JointStrategy::new(1, 1), frac(1, 2))],
        )
        .unwrap();
        (g, p)
    }

    #[test]
    fn bos_fair_table() {
        let (g, p) = bos_fair();
        let em = MultisetEmulation::new(&p, &frac(1, 2)).unwrap();
        assert_eq!(em.k(), 3);
        let aa = JointStrategy::new(0, 0);
        let bb = JointStrategy::new(1, 1);
        assert_eq!(em.table(), &[aa, aa, aa, aa, bb, bb, bb, bb]);
        assert_eq!(em.approximation_error(), int(0));
        let root = BitPrefix::empty();
        assert_eq!(conditional_expected_utility(&em, &g, root, 0, Player::One), int(4));
        assert_eq!(conditional_expected_utility(&em, &g, root, 1, Player::One), int(2));
        assert_eq!(
            em.to_json(),
            serde_json::json!({"k": 3, "table": ["0,0","0,0","0,0","0,0","1,1","1,1","1,1","1,1"]})
        );
    }

    #[test]
    fn dyadic_distribution_is_exact() {
        let g = Game::from_pairs(&["a"], &["x", "y"], &[&[(1, 0), (0, 1)]]).unwrap();
        let p = JointDistribution::for_game(&g, vec![frac(3, 4), frac(1, 4)]).unwrap();
        let em = MultisetEmulation::new(&p, &frac(1, 2)).unwrap();
        assert_eq!(em.len(), 4);
        assert_eq!(em.counts(), &[3, 1]);
        assert_eq!(em.approximation_error(), int(0));

        let g4 = Game::battle_of_the_sexes();
        let em = MultisetEmulation::new(&JointDistribution::uniform(&g4), &int(1)).unwrap();
        assert_eq!(em.len(), 4);
        assert_eq!(em.approximation_error(), int(0));
    }

    #[test]
    fn last_round_condition_is_a_single_entry() {
        let g = Game::from_pairs(&["a", "b"], &["x", "y"], &[&[(3, 1), (0, 2)], &[(1, 4), (2, 2)]]).unwrap();
        let p = JointDistribution::for_game(&g, vec![frac(1, 3), frac(1, 6), frac(1, 5), frac(3, 10)]).unwrap();
        let em = MultisetEmulation::new(&p, &frac(1, 3)).unwrap();
        let k = em.k();
        for v in 0..(1u64 << (k - 1)) {
            let prefix = BitPrefix::from_value(v, k - 1);
            for bit in [0, 1] {
                let s = em.entry(v * 2 + bit as u64);
                assert_eq!(conditional_expected_utility(&em, &g, prefix, bit, Player::Two), *g.utility(Player::Two, s));
            }
        }
    }

    #[test]
    fn rounds_and_errors() {
        assert_eq!(rounds_for(4, &frac(1, 2)).unwrap(), 3);
        assert_eq!(rounds_for(4, &frac(1, 8)).unwrap(), 5);
        assert_eq!(rounds_for(9, &frac(1, 2)).unwrap(), 5);
        assert_eq!(rounds_for(1, &int(4)).unwrap(), 1);
        assert!(rounds_for(4, &int(0)).is_err());
        assert!(rounds_for(4, &frac(-1, 2)).is_err());
        let (_, p) = bos_fair();
        assert!(MultisetEmulation::new(&p, &int(0)).is_err());
        assert!(MultisetEmulation::with_order(&p, &frac(1, 2), &[0, 1, 1, 3]).is_err());
    }

    #[test]
    fn custom_order_keeps_counts() {
        let (_, p) = bos_fair();
        let em = MultisetEmulation::with_order(&p, &frac(1, 2), &[3, 2, 1, 0]).unwrap();
        assert_eq!(em.entry(0), JointStrategy::new(1, 1));
        assert_eq!(em.counts(), MultisetEmulation::new(&p, &frac(1, 2)).unwrap().counts());
    }

    #[test]
    fn remainder_ties_go_row_major() {
        let thirds = vec![frac(1, 3), frac(1, 3), frac(1, 3)];
        assert_eq!(largest_remainder(&thirds, 4), vec![2, 1, 1]);
        assert_eq!(largest_remainder(&thirds, 8), vec![3, 3, 2]);
    }

    fn arb_joint() -> impl Strategy<Value = JointDistribution> {
        (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
            prop::collection::vec(0u32..50, r * c).prop_filter_map("nonzero", move |w| {
                let total: u32 = w.iter().sum();
                (total > 0).then(|| {
                    JointDistribution::new(r, c, w.iter().map(|&x| frac(x as i64, total as i64)).collect()).unwrap()
                })
            })
        })
    }

    proptest! {
        #[test]
        fn table_is_total_and_close(p in arb_joint(), den in 1i64..=16) {
            let delta = frac(1, den);
            let em = MultisetEmulation::new(&p, &delta).unwrap();
            prop_assert_eq!(em.counts().iter().sum::<u64>(), 1u64 << em.k());
            prop_assert_eq!(em.table().len(), 1usize << em.k());
            let cells = int(p.probs().len() as i64);
            let bound = cells / int(1i64 << em.k());
            prop_assert!(em.approximation_error() <= bound);
            prop_assert!(em.approximation_error() <= delta);
        }

        #[test]
        fn utility_shift_is_bounded_by_delta(p in arb_joint(), den in 1i64..=16, seed in 0u64..1000) {
            let cells = p.probs().len();
            let u = |i: usize, salt: u64| frac(((i as u64 * 7919 + seed * 31 + salt) % 11) as i64, 10);
            let u1: Vec<Vec<Rational>> = (0..p.rows()).map(|r| (0..p.cols()).map(|c| u(r * p.cols() + c, 1)).collect()).collect();
            let u2: Vec<Vec<Rational>> = (0..p.rows()).map(|r| (0..p.cols()).map(|c| u(r * p.cols() + c, 5)).collect()).collect();
            let g = Game::new(
                (0..p.rows()).map(|i| i.to_string()).collect(),
                (0..p.cols()).map(|i| i.to_string()).collect(),
                u1, u2,
            ).unwrap();
            prop_assert!(g.is_normalized());
            let delta = frac(1, den);
            let em = MultisetEmulation::new(&p, &delta).unwrap();
            let tilde = em.induced();
            prop_assert_eq!(tilde.probs().len(), cells);
            for player in Player::BOTH {
                let shift = crate::game::expected_utility(&g, &tilde, player) - crate::game::expected_utility(&g, &p, player);
                prop_assert!(shift.abs() <= delta);
            }
        }
    }
}
