//! The sampling protocol: `k` rounds in which both parties announce which
//! value of the next index bit they prefer, settle agreements directly and
//! disputes by a weak coin flip, and finally read the joint strategy at the
//! agreed index of the shared emulation table.

mod behavior;
mod preference;

pub use behavior::{
    AdversaryPolicy, Announcement, Honest, NodeAction, PartyBehavior, Scripted, Seat, StageTwo, WinRequest,
};
pub use preference::{
    compute_preference, honest_continuation, node_index, PreferenceRule, PreferenceSign, PreferenceTable,
};

use crate::coin::{flip, CoinPlay, WcfSpec};
use crate::emulation::{rounds_for, Bit, BitPrefix, MultisetEmulation};
use crate::error::{Error, Result};
use crate::extended::Check;
use crate::game::{Game, JointDistribution, JointStrategy, Player};
use crate::rational::{format_rational, half, int, Rational};
use crate::rng::Stream;
use num_traits::Signed;
use serde::Serialize;
use serde_json::json;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolConfig {
    epsilon: Rational,
    delta: Rational,
    k: usize,
    per_round_bias: Rational,
    rule: PreferenceRule,
}

impl ProtocolConfig {
    pub fn new(epsilon: Rational, delta: Rational, k: usize, rule: PreferenceRule) -> Result<Self> {
        if !epsilon.is_positive() {
            return Err(Error::param("epsilon", format!("must be positive, got {epsilon}")));
        }
        if !delta.is_positive() {
            return Err(Error::param("delta", format!("must be positive, got {delta}")));
        }
        if k == 0 {
            return Err(Error::param("k", "need at least one round"));
        }
        let per_round_bias = &epsilon / int(2 * k as i64);
        if per_round_bias >= half() {
            return Err(Error::param(
                "epsilon",
                format!("{epsilon} gives a coin bias of at least 1/2 over {k} rounds"),
            ));
        }
        Ok(ProtocolConfig { epsilon, delta, k, per_round_bias, rule })
    }

    /// Config for a game with `cells` joint strategies, with `k` chosen from `delta`.
    pub fn for_cells(cells: usize, epsilon: Rational, delta: Rational, rule: PreferenceRule) -> Result<Self> {
        let k = rounds_for(cells, &delta)?;
        Self::new(epsilon, delta, k, rule)
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `epsilon / (2k)`, the bias of every coin flip.
    pub fn per_round_bias(&self) -> &Rational {
        &self.per_round_bias
    }

    pub fn max_win_probability(&self) -> Rational {
        half() + &self.per_round_bias
    }

    pub fn rule(&self) -> PreferenceRule {
        self.rule
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "epsilon": format_rational(&self.epsilon),
            "delta": format_rational(&self.delta),
            "k": self.k,
            "per_round_bias": format_rational(&self.per_round_bias),
            "preference_rule": self.rule.to_string(),
        })
    }
}

/// Everything both parties compute locally before the first round.
#[derive(Debug, Clone)]
pub struct Setup {
    game: Game,
    emulation: MultisetEmulation,
    config: ProtocolConfig,
    preferences: PreferenceTable,
}

impl Setup {
    pub fn new(
        game: &Game,
        p: &JointDistribution,
        epsilon: Rational,
        delta: Rational,
        rule: PreferenceRule,
    ) -> Result<Self> {
        let emulation = emulate_for(game, p, &delta)?;
        let config = ProtocolConfig::new(epsilon, delta, emulation.k(), rule)?;
        Ok(Self::from_parts(game, emulation, config))
    }

    pub fn from_parts(game: &Game, emulation: MultisetEmulation, config: ProtocolConfig) -> Self {
        assert_eq!(emulation.k(), config.k(), "emulation and config disagree on k");
        let preferences = PreferenceTable::build(&emulation, game, config.rule());
        Setup { game: game.clone(), emulation, config, preferences }
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn emulation(&self) -> &MultisetEmulation {
        &self.emulation
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    pub fn preferences(&self) -> &PreferenceTable {
        &self.preferences
    }

    pub fn k(&self) -> usize {
        self.config.k()
    }
}

fn emulate_for(game: &Game, p: &JointDistribution, delta: &Rational) -> Result<MultisetEmulation> {
    if !p.fits(game) {
        return Err(Error::DimensionMismatch {
            field: "p".into(),
            detail: format!("distribution is {}x{}, game is {}x{}", p.rows(), p.cols(), game.rows(), game.cols()),
        });
    }
    MultisetEmulation::new(p, delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MessageKind {
    Preference { round: usize, sign: i8 },
    CoinResult { round: usize, bit: Bit },
    GameMove { strategy: usize },
    CheckMove { check: Check },
}

impl MessageKind {
    fn round(&self) -> Option<usize> {
        match self {
            MessageKind::Preference { round, .. } | MessageKind::CoinResult { round, .. } => Some(*round),
            _ => None,
        }
    }

    fn slot(&self) -> u8 {
        match self {
            MessageKind::Preference { .. } => 0,
            MessageKind::CoinResult { .. } => 1,
            MessageKind::GameMove { .. } => 2,
            MessageKind::CheckMove { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Message {
    pub sender: Player,
    pub kind: MessageKind,
}

/// Synchronous, lossless channel. Rejects messages that would break the
/// per-sender ordering.
#[derive(Debug, Clone, Default)]
pub struct Channel {
    log: Vec<Message>,
}

impl Channel {
    pub fn send(&mut self, sender: Player, kind: MessageKind) {
        let last = self.log.iter().rev().find(|m| m.sender == sender);
        if let Some(prev) = last {
            let ordered = match (prev.kind.round(), kind.round()) {
                (Some(a), Some(b)) => a < b || (a == b && prev.kind.slot() < kind.slot()),
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => prev.kind.slot() < kind.slot(),
            };
            assert!(ordered, "out of order message from {sender}: {kind:?} after {:?}", prev.kind);
        }
        self.log.push(Message { sender, kind });
    }

    pub fn last_from(&self, sender: Player) -> Option<&Message> {
        self.log.iter().rev().find(|m| m.sender == sender)
    }

    pub fn messages(&self) -> &[Message] {
        &self.log
    }

    pub fn into_messages(self) -> Vec<Message> {
        self.log
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Resolution {
    Agreed,
    CoinFlipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    pub round: usize,
    pub announced: [PreferenceSign; 2],
    pub resolution: Resolution,
    pub coins: [Bit; 2],
}

#[derive(Debug, Clone)]
pub struct Transcript {
    pub config: ProtocolConfig,
    pub rounds: Vec<RoundRecord>,
    pub messages: Vec<Message>,
    /// Each party's index `c_i^1 .. c_i^k`.
    pub ell: [BitPrefix; 2],
    pub outputs: [JointStrategy; 2],
}

impl Transcript {
    /// The common output, or `None` when the parties disagree.
    pub fn output(&self) -> Option<JointStrategy> {
        (self.outputs[0] == self.outputs[1]).then_some(self.outputs[0])
    }

    /// One JSON object per message followed by a summary record.
    pub fn to_json_lines(&self, game: &Game, payoffs: Option<&[Rational; 2]>) -> String {
        let mut out = String::new();
        for m in &self.messages {
            let mut v = serde_json::to_value(m.kind).expect("plain data");
            v["sender"] = json!(m.sender.number());
            if let MessageKind::Preference { sign, .. } = m.kind {
                v["sign"] = json!(if sign > 0 { "+1" } else { "-1" });
            }
            out.push_str(&v.to_string());
            out.push('\n');
        }
        let output = match self.output() {
            Some(s) => json!([game.labels(Player::One)[s.s1], game.labels(Player::Two)[s.s2]]),
            None => serde_json::Value::Null,
        };
        let ell = if self.ell[0] == self.ell[1] {
            json!(self.ell[0].to_string())
        } else {
            json!(self.ell.map(|e| e.to_string()))
        };
        let payoffs = payoffs.map(|p| json!([format_rational(&p[0]), format_rational(&p[1])]));
        out.push_str(&json!({"kind": "summary", "ell": ell, "output": output, "payoffs": payoffs}).to_string());
        out.push('\n');
        out
    }
}

/// Plays round `round` (one-based) after the coins in `prefixes`.
pub fn run_round(
    setup: &Setup,
    round: usize,
    prefixes: [BitPrefix; 2],
    parties: [&dyn PartyBehavior; 2],
    channel: &mut Channel,
    rng: &mut Stream,
) -> RoundRecord {
    assert!(round >= 1 && round <= setup.k(), "round {round} outside 1..={}", setup.k());
    let seats = Player::BOTH.map(|player| Seat { setup, player });
    for player in Player::BOTH {
        let i = player.index();
        let sign = parties[i].announce(seats[i], prefixes[i]);
        channel.send(player, MessageKind::Preference { round, sign: sign.value() });
    }
    let announced = Player::BOTH.map(|p| match channel.last_from(p).map(|m| m.kind) {
        Some(MessageKind::Preference { sign, .. }) => {
            if sign > 0 {
                PreferenceSign::Plus
            } else {
                PreferenceSign::Minus
            }
        }
        other => unreachable!("expected a preference, found {other:?}"),
    });
    let (resolution, coins) = if announced[0] == announced[1] {
        let bit = announced[0].preferred_bit();
        (Resolution::Agreed, [bit, bit])
    } else {
        let spec = WcfSpec::new(announced[0].preferred_bit(), setup.config().per_round_bias().clone())
            .expect("bias validated by the config");
        let plays: [CoinPlay; 2] = [0, 1].map(|i| parties[i].coin_play(seats[i], prefixes[i]));
        let outcome = flip(&spec, &plays[0], &plays[1], rng);
        (Resolution::CoinFlipped, [outcome.c_alice, outcome.c_bob])
    };
    for player in Player::BOTH {
        channel.send(player, MessageKind::CoinResult { round, bit: coins[player.index()] });
    }
    RoundRecord { round, announced, resolution, coins }
}

/// Runs the `k` rounds and reads off both outputs.
pub fn run_protocol(setup: &Setup, parties: [&dyn PartyBehavior; 2], rng: &mut Stream) -> Transcript {
    let mut channel = Channel::default();
    let (rounds, ell) = run_stage_one(setup, parties, &mut channel, rng);
    let outputs = ell.map(|e| setup.emulation().entry(e.value()));
    Transcript { config: setup.config().clone(), rounds, messages: channel.into_messages(), ell, outputs }
}

pub(crate) fn run_stage_one(
    setup: &Setup,
    parties: [&dyn PartyBehavior; 2],
    channel: &mut Channel,
    rng: &mut Stream,
) -> (Vec<RoundRecord>, [BitPrefix; 2]) {
    let mut prefixes = [BitPrefix::empty(); 2];
    let mut rounds = Vec::with_capacity(setup.k());
    for round in 1..=setup.k() {
        let record = run_round(setup, round, prefixes, parties, channel, rng);
        prefixes = [0, 1].map(|i| prefixes[i].push(record.coins[i]));
        rounds.push(record);
    }
    (rounds, prefixes)
}

/// Trial `trial` of a seeded experiment; each trial owns its random stream.
pub fn run_trial(setup: &Setup, parties: [&dyn PartyBehavior; 2], seed: u64, trial: u64) -> Transcript {
    run_protocol(setup, parties, &mut Stream::new(seed, trial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn bos_setup(rule: PreferenceRule) -> Setup {
        let g = Game::battle_of_the_sexes();
        let p = JointDistribution::from_entries(
            &g,
            &[(JointStrategy::new(0, 0), frac(1, 2)), (JointStrategy::new(1, 1), frac(1, 2))],
        )
        .unwrap();
        Setup::new(&g, &p, frac(1, 10), frac(1, 2), rule).unwrap()
    }

    #[test]
    fn bos_preferences() {
        for rule in [PreferenceRule::HonestContinuation, PreferenceRule::BlockMean] {
            let s = bos_setup(rule);
            let root = BitPrefix::empty();
            assert_eq!(s.preferences().sign(root, Player::One), PreferenceSign::Plus);
            assert_eq!(s.preferences().sign(root, Player::Two), PreferenceSign::Minus);
            for prefix in ["0", "1", "00", "11"] {
                let prefix = BitPrefix::parse(prefix).unwrap();
                assert!(s.preferences().agree(prefix));
                assert_eq!(s.preferences().sign(prefix, Player::One), PreferenceSign::Plus);
            }
            assert_eq!(s.preferences().honest_value(root, Player::One), &int(3));
        }
    }

    #[test]
    fn config_validation() {
        let r = PreferenceRule::default();
        assert!(ProtocolConfig::new(int(0), frac(1, 2), 3, r).is_err());
        assert!(ProtocolConfig::new(frac(1, 10), int(0), 3, r).is_err());
        assert!(ProtocolConfig::new(frac(1, 10), frac(1, 2), 0, r).is_err());
        assert!(ProtocolConfig::new(int(3), frac(1, 2), 3, r).is_err());
        let c = ProtocolConfig::new(frac(1, 10), frac(1, 2), 3, r).unwrap();
        assert_eq!(c.per_round_bias(), &frac(1, 60));
        assert_eq!(c.max_win_probability(), frac(31, 60));
    }

    #[test]
    fn honest_run_shape() {
        let s = bos_setup(PreferenceRule::default());
        let t = run_trial(&s, [&Honest, &Honest], 1, 0);
        assert_eq!(t.rounds.len(), 3);
        assert_eq!(t.rounds[0].resolution, Resolution::CoinFlipped);
        assert!(t.rounds[1..].iter().all(|r| r.resolution == Resolution::Agreed && r.coins == [0, 0]));
        assert_eq!(t.ell[0], t.ell[1]);
        let out = t.output().unwrap();
        assert!(out == JointStrategy::new(0, 0) || out == JointStrategy::new(1, 1));
        // 2 preferences and 2 coin results per round
        assert_eq!(t.messages.len(), 12);
        let lines = t.to_json_lines(s.game(), None);
        assert_eq!(lines.lines().count(), 13);
        let first: serde_json::Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
        assert_eq!(first, json!({"kind": "preference", "round": 1, "sign": "+1", "sender": 1}));
        let summary: serde_json::Value = serde_json::from_str(lines.lines().last().unwrap()).unwrap();
        assert_eq!(summary["kind"], "summary");
        assert_eq!(summary["ell"].as_str().unwrap().len(), 3);
    }

    #[test]
    fn agreed_rounds_follow_the_sign() {
        let g = Game::battle_of_the_sexes();
        let p = JointDistribution::point_mass(&g, JointStrategy::new(1, 1));
        let s = Setup::new(&g, &p, frac(1, 10), frac(1, 2), PreferenceRule::default()).unwrap();
        for trial in 0..20 {
            let t = run_trial(&s, [&Honest, &Honest], 5, trial);
            assert!(t.rounds.iter().all(|r| r.resolution == Resolution::Agreed));
            assert_eq!(t.output(), Some(JointStrategy::new(1, 1)));
        }
    }

    #[test]
    fn lying_forces_a_coin_flip() {
        let s = bos_setup(PreferenceRule::default());
        let liar = Scripted::new(
            AdversaryPolicy {
                nodes: [(
                    BitPrefix::parse("0").unwrap(),
                    NodeAction { announce: Announcement::Fixed(PreferenceSign::Minus), request: WinRequest::Max },
                )]
                .into(),
                ..Default::default()
            },
            "liar",
        );
        let mut flipped = 0;
        for trial in 0..200 {
            let t = run_trial(&s, [&liar, &Honest], 2, trial);
            if t.rounds[0].coins[0] == 0 {
                assert_eq!(t.rounds[1].resolution, Resolution::CoinFlipped);
                flipped += 1;
            }
        }
        assert!(flipped > 50);
    }

    #[test]
    fn runs_are_reproducible() {
        let s = bos_setup(PreferenceRule::default());
        let greedy = Scripted::greedy();
        for trial in 0..10 {
            let a = run_trial(&s, [&greedy, &Honest], 77, trial);
            let b = run_trial(&s, [&greedy, &Honest], 77, trial);
            assert_eq!(a.rounds, b.rounds);
            assert_eq!(a.to_json_lines(s.game(), None), b.to_json_lines(s.game(), None));
        }
    }

    #[test]
    #[should_panic(expected = "out of order")]
    fn channel_rejects_repeated_rounds() {
        let mut c = Channel::default();
        c.send(Player::One, MessageKind::Preference { round: 2, sign: 1 });
        c.send(Player::One, MessageKind::Preference { round: 1, sign: 1 });
    }
}
