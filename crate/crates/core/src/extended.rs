//! The three-stage extended game: the sampling protocol, a move in the
//! original game, then a public Accept/Reject check in which any Reject
//! zeroes both payoffs.

use crate::error::Result;
use crate::game::{Game, JointStrategy, Player};
use crate::protocol::{run_stage_one, Channel, MessageKind, PartyBehavior, Seat, Setup, Transcript};
use crate::rational::Rational;
use crate::rng::Stream;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Check {
    #[serde(rename = "A")]
    Accept,
    #[serde(rename = "R")]
    Reject,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::Accept => "Accept",
            Check::Reject => "Reject",
        })
    }
}

pub fn settle(game: &Game, stage2: JointStrategy, checks: [Check; 2]) -> [Rational; 2] {
    if checks.contains(&Check::Reject) {
        [Rational::zero(), Rational::zero()]
    } else {
        Player::BOTH.map(|p| game.utility(p, stage2).clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedOutcome {
    pub stage2: JointStrategy,
    pub checks: [Check; 2],
    pub payoffs: [Rational; 2],
}

/// Plays all three stages. Checks are made in turn, Player 1 first.
pub fn play_extended_game(
    setup: &Setup,
    parties: [&dyn PartyBehavior; 2],
    rng: &mut Stream,
) -> (ExtendedOutcome, Transcript) {
    let mut channel = Channel::default();
    let (rounds, ell) = run_stage_one(setup, parties, &mut channel, rng);
    let outputs = ell.map(|e| setup.emulation().entry(e.value()));
    let seats = Player::BOTH.map(|player| Seat { setup, player });

    let moves = [0, 1].map(|i| parties[i].game_move(seats[i], outputs[i]));
    for player in Player::BOTH {
        channel.send(player, MessageKind::GameMove { strategy: moves[player.index()] });
    }
    let mut checks = [Check::Accept; 2];
    for player in Player::BOTH {
        let i = player.index();
        checks[i] = parties[i].check_move(seats[i], outputs[i], moves[1 - i]);
        channel.send(player, MessageKind::CheckMove { check: checks[i] });
    }
    let stage2 = JointStrategy::new(moves[0], moves[1]);
    let payoffs = settle(setup.game(), stage2, checks);
    let transcript =
        Transcript { config: setup.config().clone(), rounds, messages: channel.into_messages(), ell, outputs };
    (ExtendedOutcome { stage2, checks, payoffs }, transcript)
}

/// The normal form of the last two stages: each strategy of the original
/// game is paired with Accept and with Reject. Accept variants come first.
pub fn augmented_normal_form(game: &Game) -> Result<Game> {
    let labels = |p: Player| -> Vec<String> {
        [Check::Accept, Check::Reject]
            .iter()
            .flat_map(|c| game.labels(p).iter().map(move |s| format!("({s},{c})")))
            .collect()
    };
    let (r, c) = (game.rows(), game.cols());
    let split = |index: usize, n: usize| (index % n, if index < n { Check::Accept } else { Check::Reject });
    let cell = |i: usize, j: usize| {
        let ((s1, c1), (s2, c2)) = (split(i, r), split(j, c));
        settle(game, JointStrategy::new(s1, s2), [c1, c2])
    };
    let matrix = |p: usize| -> Vec<Vec<Rational>> {
        (0..2 * r).map(|i| (0..2 * c).map(|j| cell(i, j)[p].clone()).collect()).collect()
    };
    let (u1, u2) = (matrix(0), matrix(1));
    Game::new(labels(Player::One), labels(Player::Two), u1, u2)
}
