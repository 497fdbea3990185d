//! Ideal weak coin flipping.
//!
//! `WCF(a, bias)` is modelled as a trusted functionality rather than a
//! simulated quantum protocol. Alice wins when the coin equals `a`, Bob when
//! it equals `1 - a`. Honest parties get a fair coin; a cheater facing an
//! honest opponent may pick any winning probability in `[0, 1/2 + bias]`,
//! which includes losing on purpose. Parties never abort, so both always see
//! the same outcome.

use crate::emulation::Bit;
use crate::error::{Error, Result};
use crate::rational::{clamp, half, Rational};
use crate::rng::Stream;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Alice,
    Bob,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WcfSpec {
    alice_value: Bit,
    bias: Rational,
}

impl WcfSpec {
    pub fn new(alice_value: Bit, bias: Rational) -> Result<Self> {
        if alice_value > 1 {
            return Err(Error::param("alice_value", "must be 0 or 1"));
        }
        if bias.is_negative() || bias >= half() {
            return Err(Error::param("bias", format!("must lie in [0, 1/2), got {bias}")));
        }
        Ok(WcfSpec { alice_value, bias })
    }

    pub fn alice_value(&self) -> Bit {
        self.alice_value
    }

    pub fn bias(&self) -> &Rational {
        &self.bias
    }

    pub fn winning_value(&self, role: Role) -> Bit {
        match role {
            Role::Alice => self.alice_value,
            Role::Bob => 1 - self.alice_value,
        }
    }

    /// `1/2 + bias`, the most a cheater can win with.
    pub fn max_win_probability(&self) -> Rational {
        half() + &self.bias
    }

    /// Probability that a cheater requesting `request` wins against an honest party.
    pub fn cheater_win_probability(&self, request: &CheaterRequest) -> Rational {
        clamp(&request.win_probability, &Rational::zero(), &self.max_win_probability())
    }

    /// Exact probability that the coin lands on Alice's value.
    ///
    /// If both parties cheat the requested advantages are added and the
    /// result clamped to `[0, 1]`; that case lies outside the security
    /// guarantee and is only defined so that every run has an outcome.
    pub fn alice_win_probability(&self, alice: &CoinPlay, bob: &CoinPlay) -> Rational {
        match (alice, bob) {
            (CoinPlay::Honest, CoinPlay::Honest) => half(),
            (CoinPlay::Cheat(r), CoinPlay::Honest) => self.cheater_win_probability(r),
            (CoinPlay::Honest, CoinPlay::Cheat(r)) => Rational::one() - self.cheater_win_probability(r),
            (CoinPlay::Cheat(a), CoinPlay::Cheat(b)) => {
                let combined = self.cheater_win_probability(a) - self.cheater_win_probability(b) + half();
                clamp(&combined, &Rational::zero(), &Rational::one())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheaterRequest {
    #[serde(with = "crate::rational::serde_str")]
    pub win_probability: Rational,
}

impl CheaterRequest {
    pub fn new(win_probability: Rational) -> Self {
        CheaterRequest { win_probability }
    }
}

/// How one party engages with a coin flip.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoinPlay {
    Honest,
    Cheat(CheaterRequest),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WcfOutcome {
    pub c_alice: Bit,
    pub c_bob: Bit,
    /// `None` when the parties disagree.
    pub resolved: Option<Bit>,
}

impl WcfOutcome {
    fn agreed(bit: Bit) -> Self {
        WcfOutcome { c_alice: bit, c_bob: bit, resolved: Some(bit) }
    }

    pub fn winner(&self, spec: &WcfSpec) -> Option<Role> {
        self.resolved.map(|c| if c == spec.alice_value { Role::Alice } else { Role::Bob })
    }
}

/// General entry point: draws the coin given both parties' conduct.
pub fn flip(spec: &WcfSpec, alice: &CoinPlay, bob: &CoinPlay, rng: &mut Stream) -> WcfOutcome {
    let alice_wins = rng.bernoulli(&spec.alice_win_probability(alice, bob));
    WcfOutcome::agreed(if alice_wins { spec.alice_value } else { 1 - spec.alice_value })
}

pub fn run_honest(spec: &WcfSpec, rng: &mut Stream) -> WcfOutcome {
    flip(spec, &CoinPlay::Honest, &CoinPlay::Honest, rng)
}

pub fn run_with_cheater(spec: &WcfSpec, cheater: Role, request: &CheaterRequest, rng: &mut Stream) -> WcfOutcome {
    let cheat = CoinPlay::Cheat(request.clone());
    match cheater {
        Role::Alice => flip(spec, &cheat, &CoinPlay::Honest, rng),
        Role::Bob => flip(spec, &CoinPlay::Honest, &cheat, rng),
    }
}
