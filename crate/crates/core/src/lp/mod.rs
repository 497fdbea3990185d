//! Linear programming over exact rationals and the correlated-equilibrium LP.

mod ce;
pub mod polytope;
mod simplex;

pub use ce::{build_ce_lp, build_ce_lp_with, solve_ce, solve_ce_with_objective, CeObjective};
pub use simplex::simplex_solve;

use crate::game::Player;
use crate::rational::Rational;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn flipped(self) -> Relation {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }
}

/// Where a row of the LP came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Obeying a recommendation of `from` is no worse than playing `to`.
    Deviation {
        player: Player,
        from: usize,
        to: usize,
    },
    NonNegativity {
        var: usize,
    },
    Normalization,
    /// Epigraph row of the max-min objective: `t <= E[u_player]`.
    Epigraph {
        player: Player,
    },
    /// Caller-supplied rows, e.g. payoff targets in uniqueness checks.
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
    pub kind: ConstraintKind,
}

impl Constraint {
    /// True for rows like `a * x_j >= b` with `a > 0, b <= 0`, which the
    /// implicit bound `x_j >= 0` already enforces.
    pub fn implied_by_nonnegativity(&self) -> bool {
        let mut nonzero = self.coeffs.iter().filter(|c| !c.is_zero());
        let (Some(a), None) = (nonzero.next(), nonzero.next()) else {
            return false;
        };
        match self.relation {
            Relation::Ge => a.is_positive() && !self.rhs.is_positive(),
            Relation::Le => a.is_negative() && !self.rhs.is_negative(),
            Relation::Eq => false,
        }
    }
}

/// `max objectives[0], then objectives[1], ...` subject to `constraints`,
/// with every variable implicitly nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
    pub objectives: Vec<Vec<Rational>>,
}

impl LpProblem {
    pub fn count(&self, pred: impl Fn(&ConstraintKind) -> bool) -> usize {
        self.constraints.iter().filter(|c| pred(&c.kind)).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub values: Vec<Rational>,
    /// Optimal value of each objective, in priority order.
    pub objective_values: Vec<Rational>,
}
