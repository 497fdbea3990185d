pub mod acceptance;
pub mod analysis;
pub mod battery;
pub mod coin;
pub mod emulation;
pub mod error;
pub mod extended;
pub mod format;
pub mod game;
pub mod lp;
pub mod montecarlo;
pub mod protocol;
pub mod rational;
pub mod rng;

pub use error::{Error, Result};
pub use game::{Game, JointDistribution, JointStrategy, Player, ProductDistribution};
pub use rational::Rational;
