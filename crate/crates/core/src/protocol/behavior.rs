use super::{PreferenceSign, Setup};
use crate::coin::{CheaterRequest, CoinPlay};
use crate::emulation::BitPrefix;
use crate::error::{Error, Result};
use crate::extended::Check;
use crate::game::{JointStrategy, Player};
use crate::rational::{format_rational, parse_rational, Rational};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// What a party sees when asked to act: the shared setup and its own seat.
#[derive(Debug, Clone, Copy)]
pub struct Seat<'a> {
    pub setup: &'a Setup,
    pub player: Player,
}

impl Seat<'_> {
    pub fn truthful_sign(&self, prefix: BitPrefix) -> PreferenceSign {
        self.setup.preferences().sign(prefix, self.player)
    }
}

/// A party's strategy in the extended game.
pub trait PartyBehavior: Send + Sync + fmt::Debug {
    fn announce(&self, seat: Seat<'_>, prefix: BitPrefix) -> PreferenceSign;

    /// Conduct in the coin flip of a disagreeing round.
    fn coin_play(&self, seat: Seat<'_>, prefix: BitPrefix) -> CoinPlay;

    /// Stage 2 move given the party's own protocol output.
    fn game_move(&self, seat: Seat<'_>, output: JointStrategy) -> usize;

    /// Stage 3 check given the party's output and the opponent's stage 2 move.
    fn check_move(&self, seat: Seat<'_>, output: JointStrategy, opponent_move: usize) -> Check;

    fn name(&self) -> String;
}

/// The equilibrium strategy: truthful announcements, an honest coin, the
/// suggested move, and `Accept` exactly when the opponent played its
/// suggested move.
#[derive(Debug, Clone, Copy, Default)]
pub struct Honest;

impl PartyBehavior for Honest {
    fn announce(&self, seat: Seat<'_>, prefix: BitPrefix) -> PreferenceSign {
        seat.truthful_sign(prefix)
    }

    fn coin_play(&self, _: Seat<'_>, _: BitPrefix) -> CoinPlay {
        CoinPlay::Honest
    }

    fn game_move(&self, seat: Seat<'_>, output: JointStrategy) -> usize {
        output.of(seat.player)
    }

    fn check_move(&self, seat: Seat<'_>, output: JointStrategy, opponent_move: usize) -> Check {
        honest_check(seat.player, output, opponent_move)
    }

    fn name(&self) -> String {
        "honest".into()
    }
}

fn honest_check(player: Player, output: JointStrategy, opponent_move: usize) -> Check {
    if output.of(player.other()) == opponent_move {
        Check::Accept
    } else {
        Check::Reject
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Announcement {
    #[default]
    Truthful,
    Fixed(PreferenceSign),
}

impl fmt::Display for Announcement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Announcement::Truthful => f.write_str("truthful"),
            Announcement::Fixed(s) => s.fmt(f),
        }
    }
}

impl std::str::FromStr for Announcement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "truthful" => Ok(Announcement::Truthful),
            "+1" | "1" | "+" => Ok(Announcement::Fixed(PreferenceSign::Plus)),
            "-1" | "-" => Ok(Announcement::Fixed(PreferenceSign::Minus)),
            other => Err(format!("announcement must be truthful, +1 or -1, got `{other}`")),
        }
    }
}

/// Winning probability asked of the coin flip when the round is disputed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum WinRequest {
    #[default]
    Honest,
    /// `1/2 + bias`, whatever the bias is.
    Max,
    Exactly(Rational),
}

impl fmt::Display for WinRequest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WinRequest::Honest => f.write_str("honest"),
            WinRequest::Max => f.write_str("max"),
            WinRequest::Exactly(w) => f.write_str(&format_rational(w)),
        }
    }
}

impl std::str::FromStr for WinRequest {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "honest" => Ok(WinRequest::Honest),
            "max" => Ok(WinRequest::Max),
            other => parse_rational(other)
                .map(WinRequest::Exactly)
                .map_err(|e| format!("request must be honest, max or a probability: {e}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NodeAction {
    pub announce: Announcement,
    pub request: WinRequest,
}

/// Stage 2 conduct of a scripted party.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageTwo {
    #[default]
    Follow,
    Play(usize),
}

/// A deviating strategy described per node of the round tree, with a
/// default for nodes not listed. Checks are always honest.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AdversaryPolicy {
    pub default: NodeAction,
    pub nodes: BTreeMap<BitPrefix, NodeAction>,
    pub stage2: StageTwo,
}

impl AdversaryPolicy {
    /// Truthful announcements and the largest allowed winning probability in
    /// every disputed round.
    pub fn greedy() -> Self {
        AdversaryPolicy {
            default: NodeAction { announce: Announcement::Truthful, request: WinRequest::Max },
            ..Default::default()
        }
    }

    pub fn action(&self, prefix: BitPrefix) -> &NodeAction {
        self.nodes.get(&prefix).unwrap_or(&self.default)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawPolicy =
            serde_json::from_str(text).map_err(|e| Error::param("policy", format!("malformed policy: {e}")))?;
        raw.try_into()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(RawPolicy::from(self)).expect("plain data")
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAction {
    #[serde(default)]
    announce: Option<String>,
    #[serde(default)]
    request: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolicy {
    #[serde(default)]
    default: RawAction,
    #[serde(default)]
    nodes: BTreeMap<String, RawAction>,
    #[serde(default)]
    stage2: StageTwo,
}

impl RawAction {
    fn parse(&self, fallback: &NodeAction) -> Result<NodeAction> {
        let announce = match &self.announce {
            Some(s) => s.parse().map_err(|e: String| Error::param("announce", e))?,
            None => fallback.announce,
        };
        let request = match &self.request {
            Some(s) => s.parse().map_err(|e: String| Error::param("request", e))?,
            None => fallback.request.clone(),
        };
        if let WinRequest::Exactly(w) = &request {
            if !crate::rational::is_probability(w) {
                return Err(Error::param("request", format!("{w} is not a probability")));
            }
        }
        Ok(NodeAction { announce, request })
    }
}

impl TryFrom<RawPolicy> for AdversaryPolicy {
    type Error = Error;

    fn try_from(raw: RawPolicy) -> Result<Self> {
        let default = raw.default.parse(&NodeAction::default())?;
        let mut nodes = BTreeMap::new();
        for (key, action) in &raw.nodes {
            let prefix =
                BitPrefix::parse(key).ok_or_else(|| Error::param("nodes", format!("`{key}` is not a bit string")))?;
            nodes.insert(prefix, action.parse(&default)?);
        }
        Ok(AdversaryPolicy { default, nodes, stage2: raw.stage2 })
    }
}

impl From<&AdversaryPolicy> for RawPolicy {
    fn from(p: &AdversaryPolicy) -> Self {
        let raw =
            |a: &NodeAction| RawAction { announce: Some(a.announce.to_string()), request: Some(a.request.to_string()) };
        RawPolicy {
            default: raw(&p.default),
            nodes: p.nodes.iter().map(|(k, a)| (k.to_string(), raw(a))).collect(),
            stage2: p.stage2,
        }
    }
}

/// Plays an [`AdversaryPolicy`].
#[derive(Debug, Clone)]
pub struct Scripted {
    pub policy: AdversaryPolicy,
    pub label: String,
}

impl Scripted {
    pub fn new(policy: AdversaryPolicy, label: impl Into<String>) -> Self {
        Scripted { policy, label: label.into() }
    }

    pub fn greedy() -> Self {
        Scripted::new(AdversaryPolicy::greedy(), "greedy")
    }
}

impl PartyBehavior for Scripted {
    fn announce(&self, seat: Seat<'_>, prefix: BitPrefix) -> PreferenceSign {
        match self.policy.action(prefix).announce {
            Announcement::Truthful => seat.truthful_sign(prefix),
            Announcement::Fixed(s) => s,
        }
    }

    fn coin_play(&self, seat: Seat<'_>, prefix: BitPrefix) -> CoinPlay {
        match &self.policy.action(prefix).request {
            WinRequest::Honest => CoinPlay::Honest,
            WinRequest::Max => CoinPlay::Cheat(CheaterRequest::new(seat.setup.config().max_win_probability())),
            WinRequest::Exactly(w) => CoinPlay::Cheat(CheaterRequest::new(w.clone())),
        }
    }

    fn game_move(&self, seat: Seat<'_>, output: JointStrategy) -> usize {
        match self.policy.stage2 {
            StageTwo::Follow => output.of(seat.player),
            StageTwo::Play(s) => s,
        }
    }

    fn check_move(&self, seat: Seat<'_>, output: JointStrategy, opponent_move: usize) -> Check {
        honest_check(seat.player, output, opponent_move)
    }

    fn name(&self) -> String {
        self.label.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn policy_json_round_trip() {
        let text = r#"{
            "default": {"request": "max"},
            "nodes": {"": {"announce": "-1", "request": "0"}, "01": {"announce": "+1"}},
            "stage2": {"play": 1}
        }"#;
        let p = AdversaryPolicy::from_json(text).unwrap();
        assert_eq!(p.default, NodeAction { announce: Announcement::Truthful, request: WinRequest::Max });
        let root = p.action(BitPrefix::empty());
        assert_eq!(root.announce, Announcement::Fixed(PreferenceSign::Minus));
        assert_eq!(root.request, WinRequest::Exactly(frac(0, 1)));
        // unspecified fields inherit the default
        assert_eq!(p.action(BitPrefix::parse("01").unwrap()).request, WinRequest::Max);
        assert_eq!(p.action(BitPrefix::parse("11").unwrap()), &p.default);
        assert_eq!(p.stage2, StageTwo::Play(1));
        let again = AdversaryPolicy::from_json(&p.to_json().to_string()).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn policy_json_errors() {
        assert!(AdversaryPolicy::from_json("{").is_err());
        assert!(AdversaryPolicy::from_json(r#"{"nodes": {"2": {}}}"#).is_err());
        assert!(AdversaryPolicy::from_json(r#"{"default": {"request": "3/2"}}"#).is_err());
        assert!(AdversaryPolicy::from_json(r#"{"default": {"announce": "maybe"}}"#).is_err());
        assert!(AdversaryPolicy::from_json(r#"{"bogus": 1}"#).is_err());
        assert_eq!(AdversaryPolicy::from_json("{}").unwrap(), AdversaryPolicy::default());
    }
}
