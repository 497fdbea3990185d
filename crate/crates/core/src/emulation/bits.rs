use crate::rational::Rational;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub type Bit = u8;

/// The coin outcomes `c^1 .. c^m` fixed so far; `c^1` is the most
/// significant bit of `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitPrefix {
    len: usize,
    value: u64,
}

impl BitPrefix {
    pub const MAX_LEN: usize = 63;

    pub fn empty() -> Self {
        BitPrefix::default()
    }

    pub fn from_value(value: u64, len: usize) -> Self {
        assert!(len <= Self::MAX_LEN && (len == 63 || value >> len == 0), "value wider than prefix");
        BitPrefix { len, value }
    }

    pub fn from_bits(bits: &[Bit]) -> Self {
        bits.iter().fold(BitPrefix::empty(), |p, &b| p.push(b))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn push(self, bit: Bit) -> Self {
        debug_assert!(bit <= 1);
        assert!(self.len < Self::MAX_LEN, "prefix too long");
        BitPrefix { len: self.len + 1, value: (self.value << 1) | bit as u64 }
    }

    /// `c^j`, one-based like the round numbers.
    pub fn bit(&self, j: usize) -> Bit {
        assert!(j >= 1 && j <= self.len);
        ((self.value >> (self.len - j)) & 1) as Bit
    }

    pub fn bits(&self) -> Vec<Bit> {
        (1..=self.len).map(|j| self.bit(j)).collect()
    }

    /// The first `m` bits.
    pub fn truncate(&self, m: usize) -> Self {
        assert!(m <= self.len);
        BitPrefix { len: m, value: self.value >> (self.len - m) }
    }

    /// Parses strings such as `"0110"`; the empty string is the empty prefix.
    pub fn parse(s: &str) -> Option<Self> {
        let mut p = BitPrefix::empty();
        for c in s.chars() {
            p = p.push(match c {
                '0' => 0,
                '1' => 1,
                _ => return None,
            });
        }
        Some(p)
    }
}

impl fmt::Display for BitPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// An exact distribution over `{0,1}^bits`, indexed by the integer value of
/// the bitstring (first bit most significant).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitDistribution {
    bits: usize,
    probs: Vec<Rational>,
}

impl BitDistribution {
    pub fn new(bits: usize, probs: Vec<Rational>) -> Self {
        assert_eq!(probs.len(), 1usize << bits, "need 2^bits probabilities");
        debug_assert!(probs.iter().all(|p| !p.is_negative()));
        BitDistribution { bits, probs }
    }

    pub fn point_mass(bits: usize, at: u64) -> Self {
        let mut probs = vec![Rational::zero(); 1usize << bits];
        probs[at as usize] = Rational::one();
        BitDistribution { bits, probs }
    }

    pub fn uniform(bits: usize) -> Self {
        let n = 1usize << bits;
        BitDistribution { bits, probs: vec![Rational::new(1.into(), (n as i64).into()); n] }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn prob(&self, ell: u64) -> &Rational {
        &self.probs[ell as usize]
    }

    pub fn total(&self) -> Rational {
        self.probs.iter().sum()
    }

    /// Distribution of the first `m` bits. `marginal(0)` is the single
    /// entry `[total mass]`.
    pub fn marginal(&self, m: usize) -> BitDistribution {
        assert!(m <= self.bits, "marginal over more bits than available");
        let group = 1usize << (self.bits - m);
        let probs = self.probs.chunks(group).map(|c| c.iter().sum()).collect();
        BitDistribution { bits: m, probs }
    }

    pub fn l1_distance(&self, other: &BitDistribution) -> Rational {
        l1_distance(&self.probs, &other.probs)
    }
}

/// `sum |a_i - b_i|` over a common support universe.
pub fn l1_distance(a: &[Rational], b: &[Rational]) -> Rational {
    assert_eq!(a.len(), b.len(), "distributions over different universes");
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}
