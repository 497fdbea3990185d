//! Exact analysis of the protocol over its round tree: the honest output
//! distribution `p_h`, optimal deviations by one party, and the bounds the
//! protocol is meant to satisfy.

use crate::coin::{CoinPlay, WcfSpec};
use crate::emulation::{Bit, BitDistribution, BitPrefix};
use crate::extended::settle;
use crate::game::{expected_utility, JointStrategy, Player};
use crate::protocol::{
    node_index, AdversaryPolicy, Announcement, NodeAction, PartyBehavior, PreferenceSign, Seat, Setup, WinRequest,
};
use crate::rational::{format_rational, half, int, Rational};
use num_traits::{One, Zero};
use serde_json::json;
use std::borrow::Cow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HonestResolution {
    Agreed(Bit),
    Disagree { p1_preferred: Bit },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundTreeNode {
    pub prefix: BitPrefix,
    pub honest_resolution: HonestResolution,
}

pub fn round_tree_node(setup: &Setup, prefix: BitPrefix) -> RoundTreeNode {
    let prefs = setup.preferences();
    let a1 = prefs.sign(prefix, Player::One).preferred_bit();
    let a2 = prefs.sign(prefix, Player::Two).preferred_bit();
    let honest_resolution =
        if a1 == a2 { HonestResolution::Agreed(a1) } else { HonestResolution::Disagree { p1_preferred: a1 } };
    RoundTreeNode { prefix, honest_resolution }
}

/// Internal nodes in breadth-first order.
pub fn round_tree(setup: &Setup) -> Vec<RoundTreeNode> {
    (0..setup.k())
        .flat_map(|depth| (0..1u64 << depth).map(move |v| BitPrefix::from_value(v, depth)))
        .map(|prefix| round_tree_node(setup, prefix))
        .collect()
}

/// Pushes unit mass down the tree; `split(prefix)` gives the probability of
/// bit 1 at an internal node.
fn push_down(k: usize, mut split: impl FnMut(BitPrefix) -> Rational) -> BitDistribution {
    let mut mass = vec![Rational::zero(); 1 << (k + 1)];
    mass[1] = Rational::one();
    for depth in 0..k {
        for v in 0..1u64 << depth {
            let prefix = BitPrefix::from_value(v, depth);
            let n = node_index(prefix);
            if mass[n].is_zero() {
                continue;
            }
            let one = split(prefix);
            mass[2 * n + 1] = &mass[n] * &one;
            mass[2 * n] = &mass[n] * (Rational::one() - one);
        }
    }
    BitDistribution::new(k, mass.split_off(1 << k))
}

fn bit_probability(bit: Bit) -> Rational {
    if bit == 1 {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// Output distribution over table indices when both parties are honest.
pub fn compute_ph(setup: &Setup) -> BitDistribution {
    push_down(setup.k(), |prefix| match round_tree_node(setup, prefix).honest_resolution {
        HonestResolution::Agreed(b) => bit_probability(b),
        HonestResolution::Disagree { .. } => half(),
    })
}

/// Exact output distribution of a run between two behaviours whose stage 1
/// conduct depends only on the prefix, as for every behaviour in this crate.
pub fn exact_output_distribution(setup: &Setup, parties: [&dyn PartyBehavior; 2]) -> BitDistribution {
    let seats = Player::BOTH.map(|player| Seat { setup, player });
    let bias = setup.config().per_round_bias().clone();
    push_down(setup.k(), |prefix| {
        let signs = [0, 1].map(|i| parties[i].announce(seats[i], prefix));
        if signs[0] == signs[1] {
            return bit_probability(signs[0].preferred_bit());
        }
        let spec = WcfSpec::new(signs[0].preferred_bit(), bias.clone()).expect("validated bias");
        let plays: [CoinPlay; 2] = [0, 1].map(|i| parties[i].coin_play(seats[i], prefix));
        let alice = spec.alice_win_probability(&plays[0], &plays[1]);
        if spec.alice_value() == 1 {
            alice
        } else {
            Rational::one() - alice
        }
    })
}

/// What a deviating party does at one node. The winning probability only
/// matters when the announcement contradicts the honest party's.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactChoice {
    pub announce: PreferenceSign,
    pub win_probability: Rational,
}

/// A deterministic stage 1 strategy for one party, one choice per internal node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversaryPolicyExact {
    pub dishonest: Player,
    k: usize,
    choices: Vec<ExactChoice>,
}

impl AdversaryPolicyExact {
    /// Builds a policy from a choice function over prefixes.
    pub fn from_fn(k: usize, dishonest: Player, mut f: impl FnMut(BitPrefix) -> ExactChoice) -> Self {
        let filler = ExactChoice { announce: PreferenceSign::Plus, win_probability: half() };
        let mut choices = vec![filler; 1 << k];
        for depth in 0..k {
            for v in 0..1u64 << depth {
                let prefix = BitPrefix::from_value(v, depth);
                choices[node_index(prefix)] = f(prefix);
            }
        }
        AdversaryPolicyExact { dishonest, k, choices }
    }

    /// Truthful announcements, winning probability `w` in every disputed round.
    pub fn truthful(setup: &Setup, dishonest: Player, w: Rational) -> Self {
        Self::from_fn(setup.k(), dishonest, |prefix| ExactChoice {
            announce: setup.preferences().sign(prefix, dishonest),
            win_probability: w.clone(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn choice(&self, prefix: BitPrefix) -> &ExactChoice {
        assert!(prefix.len() < self.k);
        &self.choices[node_index(prefix)]
    }

    pub fn is_truthful(&self, setup: &Setup) -> bool {
        round_tree(setup)
            .iter()
            .all(|n| self.choice(n.prefix).announce == setup.preferences().sign(n.prefix, self.dishonest))
    }

    /// The same strategy as a playable script.
    pub fn to_policy(&self) -> AdversaryPolicy {
        let mut nodes = std::collections::BTreeMap::new();
        for depth in 0..self.k {
            for v in 0..1u64 << depth {
                let prefix = BitPrefix::from_value(v, depth);
                let c = self.choice(prefix);
                nodes.insert(
                    prefix,
                    NodeAction {
                        announce: Announcement::Fixed(c.announce),
                        request: WinRequest::Exactly(c.win_probability.clone()),
                    },
                );
            }
        }
        AdversaryPolicy { nodes, ..Default::default() }
    }
}

/// Output distribution when the other party is honest and the coin bias is `epsilon_prime`.
pub fn policy_distribution(setup: &Setup, policy: &AdversaryPolicyExact, epsilon_prime: &Rational) -> BitDistribution {
    assert_eq!(policy.k(), setup.k());
    let honest = policy.dishonest.other();
    let cap = half() + epsilon_prime;
    push_down(setup.k(), |prefix| {
        let b_h = setup.preferences().sign(prefix, honest).preferred_bit();
        let c = policy.choice(prefix);
        if c.announce.preferred_bit() == b_h {
            return bit_probability(b_h);
        }
        let w = crate::rational::clamp(&c.win_probability, &Rational::zero(), &cap);
        // the adversary wins with `w` and its value is `1 - b_h`
        if b_h == 0 {
            w
        } else {
            Rational::one() - w
        }
    })
}

/// Which announcements the optimizing party may make.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnouncementClass {
    Arbitrary,
    Truthful,
}

/// What the deviating party maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Goal {
    /// Its own payoff. With `stage_two` it may also deviate in the game
    /// stage, which gets it 0, so a leaf is worth `max(u, 0)`.
    OwnPayoff { stage_two: bool },
    /// Minus the honest party's payoff, following its suggestion throughout.
    HurtOpponent,
}

#[derive(Debug, Clone)]
pub struct AdversaryOptimum {
    pub value: Rational,
    pub q: BitDistribution,
    pub policy: AdversaryPolicyExact,
}

fn leaf_value(setup: &Setup, dishonest: Player, goal: Goal, ell: u64) -> Rational {
    let s = setup.emulation().entry(ell);
    match goal {
        Goal::OwnPayoff { stage_two: false } => setup.game().utility(dishonest, s).clone(),
        Goal::OwnPayoff { stage_two: true } => setup.game().utility(dishonest, s).clone().max(Rational::zero()),
        Goal::HurtOpponent => -setup.game().utility(dishonest.other(), s).clone(),
    }
}

/// Backward induction over the round tree. At a node where the honest
/// party prefers `b_h`, the deviator can reach any probability in
/// `[0, 1/2 + epsilon_prime]` for bit `1 - b_h`, except that a truthful
/// deviator who also prefers `b_h` cannot dispute it. The optimum is
/// bang-bang; on ties the deviator behaves honestly.
pub fn optimize_adversary(
    setup: &Setup,
    epsilon_prime: &Rational,
    dishonest: Player,
    goal: Goal,
    class: AnnouncementClass,
) -> AdversaryOptimum {
    let k = setup.k();
    let honest = dishonest.other();
    let cap = half() + epsilon_prime;
    let mut value = vec![Rational::zero(); 1 << (k + 1)];
    for ell in 0..1u64 << k {
        value[(1 << k) | ell as usize] = leaf_value(setup, dishonest, goal, ell);
    }
    let mut choices = vec![ExactChoice { announce: PreferenceSign::Plus, win_probability: half() }; 1 << k];
    for depth in (0..k).rev() {
        for v in 0..1u64 << depth {
            let prefix = BitPrefix::from_value(v, depth);
            let n = node_index(prefix);
            let truthful = setup.preferences().sign(prefix, dishonest);
            let b_h = setup.preferences().sign(prefix, honest).preferred_bit();
            let (v_h, v_o) = (&value[2 * n + b_h as usize], &value[2 * n + 1 - b_h as usize]);
            let can_dispute = class == AnnouncementClass::Arbitrary || truthful.preferred_bit() != b_h;
            let (node_value, choice) = if v_o > v_h && can_dispute {
                let val = &cap * v_o + (Rational::one() - &cap) * v_h;
                (val, ExactChoice { announce: PreferenceSign::from_bit(1 - b_h), win_probability: cap.clone() })
            } else if v_o < v_h && truthful.preferred_bit() != b_h {
                // disputed round the deviator would rather lose
                (v_h.clone(), ExactChoice { announce: truthful, win_probability: Rational::zero() })
            } else {
                let val = if truthful.preferred_bit() == b_h { v_h.clone() } else { (v_h + v_o) * half() };
                (val, ExactChoice { announce: truthful, win_probability: half() })
            };
            value[n] = node_value;
            choices[n] = choice;
        }
    }
    let policy = AdversaryPolicyExact { dishonest, k, choices };
    let q = policy_distribution(setup, &policy, epsilon_prime);
    AdversaryOptimum { value: value[1].clone(), q, policy }
}

/// The deviation that maximizes the deviator's payoff in the extended game,
/// with arbitrary announcements.
pub fn compute_worst_case_q(
    setup: &Setup,
    epsilon_prime: &Rational,
    dishonest: Player,
) -> (BitDistribution, AdversaryPolicyExact) {
    let opt = optimize_adversary(
        setup,
        epsilon_prime,
        dishonest,
        Goal::OwnPayoff { stage_two: true },
        AnnouncementClass::Arbitrary,
    );
    (opt.q, opt.policy)
}

/// `E[u_player]` when the table index is drawn from `d`.
pub fn payoff(setup: &Setup, d: &BitDistribution, player: Player) -> Rational {
    setup.emulation().expected_utility(setup.game(), d, player)
}

/// Exact expected payoffs of the whole extended game, stage two and the
/// checks included.
pub fn exact_extended_payoffs(setup: &Setup, parties: [&dyn PartyBehavior; 2]) -> [Rational; 2] {
    let d = exact_output_distribution(setup, parties);
    let seats = Player::BOTH.map(|player| Seat { setup, player });
    let mut total = [Rational::zero(), Rational::zero()];
    for (ell, prob) in d.probs().iter().enumerate() {
        if prob.is_zero() {
            continue;
        }
        let output = setup.emulation().entry(ell as u64);
        let moves = [0, 1].map(|i| parties[i].game_move(seats[i], output));
        let checks = [0, 1].map(|i| parties[i].check_move(seats[i], output, moves[1 - i]));
        let pay = settle(setup.game(), JointStrategy::new(moves[0], moves[1]), checks);
        for i in 0..2 {
            total[i] += prob * &pay[i];
        }
    }
    total
}

/// `||q^m - p_h^m||_1` for `m = 0..=k`.
pub fn l1_per_round(q: &BitDistribution, p_h: &BitDistribution) -> Vec<Rational> {
    (0..=q.bits()).map(|m| q.marginal(m).l1_distance(&p_h.marginal(m))).collect()
}

/// Same setup over the normalized game. Preferences are unchanged by
/// positive rescaling, so only the utilities differ.
pub fn normalized(setup: &Setup) -> Cow<'_, Setup> {
    if setup.game().is_normalized() {
        Cow::Borrowed(setup)
    } else {
        Cow::Owned(Setup::from_parts(&setup.game().normalize(), setup.emulation().clone(), setup.config().clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim1Verdicts {
    /// `||q^m - p_h^m||_1 <= m epsilon / k` for every `m`.
    pub cumulative: bool,
    /// Each round adds at most `epsilon / k`.
    pub per_round: bool,
    /// `||q - p_h||_1 <= epsilon`.
    pub total: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CssVerdicts {
    /// `E_{p_h}[u_i] >= E_p[u_i] - delta` for both players.
    pub property1: bool,
    /// `E_q[u_j] <= E_{p_h}[u_j] + epsilon` for the deviator `j`.
    pub deviator_bound: bool,
    /// `E_q[u_i] >= E_{p_h}[u_i] - epsilon` for the honest party.
    pub honest_bound: bool,
}

#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub dishonest: Player,
    pub epsilon: Rational,
    pub delta: Rational,
    pub k: usize,
    pub per_round_bias: Rational,
    pub p_h: BitDistribution,
    pub q: BitDistribution,
    pub l1_per_round: Vec<Rational>,
    /// On the normalized game.
    pub payoff_p: [Rational; 2],
    pub payoff_ph: [Rational; 2],
    pub payoff_q: [Rational; 2],
    /// Best payoff of the deviator in the extended game, normalized.
    pub deviator_value: Rational,
    pub claim1: Claim1Verdicts,
    pub css: CssVerdicts,
    /// The deviator gains at most `epsilon` over honest play.
    pub epsilon_nash: bool,
}

impl AnalysisReport {
    pub fn all_pass(&self) -> bool {
        let c = &self.claim1;
        let s = &self.css;
        c.cumulative && c.per_round && c.total && s.property1 && s.deviator_bound && s.honest_bound && self.epsilon_nash
    }

    pub fn to_json(&self) -> serde_json::Value {
        let f = format_rational;
        let pair = |p: &[Rational; 2]| json!([f(&p[0]), f(&p[1])]);
        let support = |d: &BitDistribution| {
            let mut m = serde_json::Map::new();
            for (ell, p) in d.probs().iter().enumerate() {
                if !p.is_zero() {
                    m.insert(BitPrefix::from_value(ell as u64, d.bits()).to_string(), json!(f(p)));
                }
            }
            serde_json::Value::Object(m)
        };
        json!({
            "dishonest": self.dishonest.number(),
            "epsilon": f(&self.epsilon),
            "delta": f(&self.delta),
            "k": self.k,
            "per_round_bias": f(&self.per_round_bias),
            "p_h": support(&self.p_h),
            "q": support(&self.q),
            "l1_per_round": self.l1_per_round.iter().map(f).collect::<Vec<_>>(),
            "l1_bounds": (0..=self.k).map(|m| f(&(int(m as i64) * &self.epsilon / int(self.k as i64)))).collect::<Vec<_>>(),
            "normalized_payoffs": {
                "p": pair(&self.payoff_p),
                "p_h": pair(&self.payoff_ph),
                "q": pair(&self.payoff_q),
                "deviator_best": f(&self.deviator_value),
            },
            "verdicts": {
                "claim1_cumulative": self.claim1.cumulative,
                "claim1_per_round": self.claim1.per_round,
                "claim1_total": self.claim1.total,
                "css_property1": self.css.property1,
                "css_deviator_bound": self.css.deviator_bound,
                "css_honest_bound": self.css.honest_bound,
                "epsilon_nash": self.epsilon_nash,
            },
        })
    }
}

fn claim1_verdicts(l1: &[Rational], epsilon: &Rational, k: usize) -> Claim1Verdicts {
    let step = epsilon / int(k as i64);
    Claim1Verdicts {
        cumulative: l1.iter().enumerate().all(|(m, d)| d <= &(int(m as i64) * &step)),
        per_round: l1.windows(2).all(|w| &w[1] - &w[0] <= step),
        total: l1.last().is_some_and(|d| d <= epsilon),
    }
}

/// Full exact report against the deviation that is optimal for `dishonest`,
/// with coin bias `epsilon / (2k)`.
pub fn verify_claim1(setup: &Setup, dishonest: Player) -> AnalysisReport {
    let setup = normalized(setup);
    let eps_prime = setup.config().per_round_bias().clone();
    let (q, _) = compute_worst_case_q(&setup, &eps_prime, dishonest);
    report_for(&setup, dishonest, q)
}

/// Report for a given stage 1 deviation.
pub fn verify_claim1_for(setup: &Setup, policy: &AdversaryPolicyExact) -> AnalysisReport {
    let setup = normalized(setup);
    let q = policy_distribution(&setup, policy, setup.config().per_round_bias());
    report_for(&setup, policy.dishonest, q)
}

fn report_for(setup: &Setup, dishonest: Player, q: BitDistribution) -> AnalysisReport {
    let cfg = setup.config();
    let p_h = compute_ph(setup);
    let l1 = l1_per_round(&q, &p_h);
    let claim1 = claim1_verdicts(&l1, cfg.epsilon(), cfg.k());
    let payoff_p = Player::BOTH.map(|p| expected_utility(setup.game(), setup.emulation().source(), p));
    let payoff_ph = Player::BOTH.map(|p| payoff(setup, &p_h, p));
    let payoff_q = Player::BOTH.map(|p| payoff(setup, &q, p));
    let (j, i) = (dishonest.index(), dishonest.other().index());
    let css = CssVerdicts {
        property1: (0..2).all(|x| payoff_ph[x] >= &payoff_p[x] - cfg.delta()),
        deviator_bound: payoff_q[j] <= &payoff_ph[j] + cfg.epsilon(),
        honest_bound: payoff_q[i] >= &payoff_ph[i] - cfg.epsilon(),
    };
    let best = optimize_adversary(
        setup,
        cfg.per_round_bias(),
        dishonest,
        Goal::OwnPayoff { stage_two: true },
        AnnouncementClass::Arbitrary,
    );
    let epsilon_nash = best.value <= &payoff_ph[j] + cfg.epsilon();
    AnalysisReport {
        dishonest,
        epsilon: cfg.epsilon().clone(),
        delta: cfg.delta().clone(),
        k: cfg.k(),
        per_round_bias: cfg.per_round_bias().clone(),
        p_h,
        q,
        l1_per_round: l1,
        payoff_p,
        payoff_ph,
        payoff_q,
        deviator_value: best.value,
        claim1,
        css,
        epsilon_nash,
    }
}

/// Both deviators' CSS checks on the normalized game.
pub fn verify_css_properties(setup: &Setup) -> [CssVerdicts; 2] {
    Player::BOTH.map(|j| verify_claim1(setup, j).css)
}

/// Gap between the best deviation with arbitrary announcements and the best
/// with truthful ones. Zero means lying never helps.
pub fn wlog_gap(setup: &Setup, epsilon_prime: &Rational, dishonest: Player) -> Rational {
    let goal = Goal::OwnPayoff { stage_two: true };
    let all = optimize_adversary(setup, epsilon_prime, dishonest, goal, AnnouncementClass::Arbitrary);
    let truthful = optimize_adversary(setup, epsilon_prime, dishonest, goal, AnnouncementClass::Truthful);
    all.value - truthful.value
}

/// Whether, for both players, restricting the deviator to truthful
/// announcements leaves its optimum unchanged.
pub fn test_wlog_honest_announcement(setup: &Setup, epsilon: &Rational) -> bool {
    let eps_prime = epsilon / int(2 * setup.k() as i64);
    Player::BOTH.iter().all(|&p| wlog_gap(setup, &eps_prime, p).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Game, JointDistribution, JointStrategy};
    use crate::protocol::{Honest, PreferenceRule, Scripted};
    use crate::rational::frac;

    fn bos(eps: Rational) -> Setup {
        let g = Game::battle_of_the_sexes();
        let p = JointDistribution::from_entries(
            &g,
            &[(JointStrategy::new(0, 0), frac(1, 2)), (JointStrategy::new(1, 1), frac(1, 2))],
        )
        .unwrap();
        Setup::new(&g, &p, eps, frac(1, 2), PreferenceRule::default()).unwrap()
    }

    /// Path enumeration: probability of each leaf as a product along its path.
    fn ph_by_paths(setup: &Setup) -> Vec<Rational> {
        let k = setup.k();
        (0..1u64 << k)
            .map(|ell| {
                let leaf = BitPrefix::from_value(ell, k);
                (1..=k).fold(Rational::one(), |acc, j| {
                    let node = round_tree_node(setup, leaf.truncate(j - 1));
                    acc * match node.honest_resolution {
                        HonestResolution::Agreed(b) if b == leaf.bit(j) => Rational::one(),
                        HonestResolution::Agreed(_) => Rational::zero(),
                        HonestResolution::Disagree { .. } => half(),
                    }
                })
            })
            .collect()
    }

    #[test]
    fn bos_ph() {
        let s = bos(frac(1, 10));
        let p_h = compute_ph(&s);
        let mut expected = vec![Rational::zero(); 8];
        expected[0b000] = half();
        expected[0b100] = half();
        assert_eq!(p_h.probs(), &expected[..]);
        assert_eq!(ph_by_paths(&s), expected);
        assert_eq!(exact_output_distribution(&s, [&Honest, &Honest]), p_h);
        assert_eq!(round_tree(&s).len(), 7);
        assert_eq!(round_tree(&s)[0].honest_resolution, HonestResolution::Disagree { p1_preferred: 0 });
    }

    #[test]
    fn bos_worst_case() {
        let s = bos(frac(1, 10));
        let eps_p = frac(1, 60);
        let (q, policy) = compute_worst_case_q(&s, &eps_p, Player::One);
        assert_eq!(q.prob(0b000), &(half() + &eps_p));
        assert_eq!(q.prob(0b100), &(half() - &eps_p));
        assert_eq!(payoff(&s, &q, Player::One), int(3) + int(2) * &eps_p);
        assert!(policy.is_truthful(&s));
        // the optimum is the greedy script
        assert_eq!(exact_output_distribution(&s, [&Scripted::greedy(), &Honest]), q);
        assert_eq!(exact_output_distribution(&s, [&Scripted::new(policy.to_policy(), "opt"), &Honest]), q);
        let (q2, _) = compute_worst_case_q(&s, &eps_p, Player::Two);
        assert_eq!(q2.prob(0b100), &(half() + &eps_p));
        assert!(test_wlog_honest_announcement(&s, &frac(1, 10)));
    }

    #[test]
    fn bos_report() {
        let s = bos(frac(1, 10));
        let r = verify_claim1(&s, Player::One);
        assert!(r.all_pass());
        assert_eq!(r.l1_per_round[0], int(0));
        // 2 eps' = eps / k
        assert_eq!(r.l1_per_round[3], frac(1, 30));
        // normalized payoffs 1 and 1/2 on the two leaves: eps' * (1 - 1/2)
        assert_eq!(&r.payoff_q[0] - &r.payoff_ph[0], frac(1, 120));
        assert_eq!(r.payoff_ph, r.payoff_p);
        let json = r.to_json();
        assert_eq!(json["l1_per_round"], json!(["0", "1/30", "1/30", "1/30"]));
    }

    #[test]
    fn zero_bias_reproduces_ph() {
        let s = bos(frac(1, 10));
        for p in Player::BOTH {
            let (q, _) = compute_worst_case_q(&s, &Rational::zero(), p);
            assert_eq!(q, compute_ph(&s));
        }
    }

    #[test]
    fn point_mass_cannot_be_steered() {
        let g = Game::battle_of_the_sexes();
        let p = JointDistribution::point_mass(&g, JointStrategy::new(0, 1));
        let s = Setup::new(&g, &p, frac(1, 10), frac(1, 2), PreferenceRule::default()).unwrap();
        let p_h = compute_ph(&s);
        assert_eq!(p_h, BitDistribution::point_mass(3, 0));
        for player in Player::BOTH {
            assert_eq!(compute_worst_case_q(&s, &frac(1, 60), player).0, p_h);
        }
        assert!(test_wlog_honest_announcement(&s, &frac(1, 10)));
    }

    #[test]
    fn common_interest_always_agrees() {
        let g = Game::from_pairs(&["a", "b"], &["x", "y"], &[&[(3, 3), (1, 1)], &[(0, 0), (2, 2)]]).unwrap();
        let p = JointDistribution::for_game(&g, vec![frac(1, 4), frac(1, 4), frac(1, 4), frac(1, 4)]).unwrap();
        let s = Setup::new(&g, &p, frac(1, 10), frac(1, 8), PreferenceRule::default()).unwrap();
        assert!(round_tree(&s).iter().all(|n| matches!(n.honest_resolution, HonestResolution::Agreed(_))));
        let p_h = compute_ph(&s);
        assert_eq!(p_h.probs().iter().filter(|x| !x.is_zero()).count(), 1);
        assert_eq!(payoff(&s, &p_h, Player::One), int(3));
    }

    #[test]
    fn dp_dominates_scripted_policies() {
        let g =
            Game::from_pairs(&["a", "b", "c"], &["x", "y"], &[&[(5, 1), (0, 3)], &[(2, 4), (4, 0)], &[(1, 1), (3, 5)]])
                .unwrap();
        let p = JointDistribution::for_game(
            &g,
            vec![frac(1, 5), frac(1, 10), frac(1, 5), frac(1, 5), frac(1, 10), frac(1, 5)],
        )
        .unwrap();
        let s = Setup::new(&g, &p, frac(1, 10), frac(1, 4), PreferenceRule::default()).unwrap();
        let eps_p = s.config().per_round_bias().clone();
        let goal = Goal::OwnPayoff { stage_two: false };
        let opt = optimize_adversary(&s, &eps_p, Player::One, goal, AnnouncementClass::Arbitrary);
        assert_eq!(opt.value, payoff(&s, &opt.q, Player::One));
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            seed >> 33
        };
        for _ in 0..200 {
            let policy = AdversaryPolicyExact::from_fn(s.k(), Player::One, |_| ExactChoice {
                announce: if next() % 2 == 0 { PreferenceSign::Plus } else { PreferenceSign::Minus },
                win_probability: frac((next() % 13) as i64, 12),
            });
            let q = policy_distribution(&s, &policy, &eps_p);
            assert_eq!(q.total(), int(1));
            assert!(payoff(&s, &q, Player::One) <= opt.value);
            let played = exact_output_distribution(&s, [&Scripted::new(policy.to_policy(), "r"), &Honest]);
            assert_eq!(played, q);
        }
    }
}
