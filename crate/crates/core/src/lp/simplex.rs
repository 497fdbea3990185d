//! Dense two-phase tableau simplex over exact rationals.
//!
//! Pivoting follows Bland's rule (lowest eligible column enters, ties in the
//! ratio test leave by lowest basic-variable index), so every run terminates
//! and is reproducible even on degenerate polytopes.
//!
//! Objectives are maximized lexicographically on a single tableau: once
//! objective `k` is optimal, only columns whose reduced cost is zero for all
//! of objectives `0..=k` may enter afterwards, which keeps the solution on the
//! optimal face of every earlier objective.

use super::{LpProblem, LpSolution, Relation};
use crate::error::{Error, Result};
use crate::rational::Rational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Original,
    Slack,
    Artificial,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    kinds: Vec<Column>,
    /// Reduced-cost rows of objectives already optimized (and the current one last).
    cost_rows: Vec<Vec<Rational>>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.kinds.len()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = Rational::one() / &self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.rhs[row] *= &inv;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.rows.len() {
            if i == row || self.rows[i][col].is_zero() {
                continue;
            }
            let factor = self.rows[i][col].clone();
            for (v, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        for cost in self.cost_rows.iter_mut() {
            if cost[col].is_zero() {
                continue;
            }
            let factor = cost[col].clone();
            for (v, p) in cost.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Reduced costs `c_j - c_B B^-1 A_j` for a fresh objective.
    fn reduced_costs(&self, objective: &[Rational]) -> Vec<Rational> {
        let mut cost: Vec<Rational> =
            (0..self.width()).map(|j| objective.get(j).cloned().unwrap_or_else(Rational::zero)).collect();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = objective.get(b).cloned().unwrap_or_else(Rational::zero);
            if cb.is_zero() {
                continue;
            }
            for (v, a) in cost.iter_mut().zip(row) {
                if !a.is_zero() {
                    *v -= &cb * a;
                }
            }
        }
        cost
    }

    /// Runs Bland pivots on the last cost row until optimal. `frozen` is the
    /// number of leading cost rows whose optimal face must be preserved.
    fn optimize(&mut self, frozen: usize) -> Result<()> {
        loop {
            let current = self.cost_rows.last().expect("objective installed");
            let entering = (0..self.width()).find(|&j| {
                self.kinds[j] != Column::Artificial
                    && current[j].is_positive()
                    && self.cost_rows[..frozen].iter().all(|r| r[j].is_zero())
            });
            let Some(col) = entering else {
                return Ok(());
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &row[col];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((row, _)) = best else {
                return Err(Error::Unbounded);
            };
            self.pivot(row, col);
        }
    }

    fn value_of(&self, objective: &[Rational]) -> Rational {
        self.basis.iter().zip(&self.rhs).filter_map(|(&b, v)| objective.get(b).map(|c| c * v)).sum()
    }
}

/// Maximizes the objectives of `lp` lexicographically over `x >= 0`.
pub fn simplex_solve(lp: &LpProblem) -> Result<LpSolution> {
    let n = lp.num_vars;
    // Rows implied by the implicit bounds x >= 0 carry no information.
    let rows: Vec<_> = lp.constraints.iter().filter(|c| !c.implied_by_nonnegativity()).collect();

    let mut kinds = vec![Column::Original; n];
    let mut matrix: Vec<Vec<Rational>> = Vec::with_capacity(rows.len());
    let mut rhs = Vec::with_capacity(rows.len());
    let mut pending_basis = Vec::with_capacity(rows.len());
    let mut extra_columns: Vec<(usize, Rational, Column)> = Vec::new();

    for (i, c) in rows.iter().enumerate() {
        let (mut coeffs, mut b, mut rel) = (c.coeffs.clone(), c.rhs.clone(), c.relation);
        coeffs.resize(n, Rational::zero());
        if b.is_negative() {
            coeffs.iter_mut().for_each(|v| *v = -v.clone());
            b = -b;
            rel = rel.flipped();
        }
        match rel {
            Relation::Le => {
                extra_columns.push((i, Rational::one(), Column::Slack));
                pending_basis.push(kinds.len() + extra_columns.len() - 1);
            }
            Relation::Ge => {
                if b.is_zero() {
                    // -a.x <= 0 has a feasible slack basis.
                    coeffs.iter_mut().for_each(|v| *v = -v.clone());
                    extra_columns.push((i, Rational::one(), Column::Slack));
                    pending_basis.push(kinds.len() + extra_columns.len() - 1);
                } else {
                    extra_columns.push((i, -Rational::one(), Column::Slack));
                    extra_columns.push((i, Rational::one(), Column::Artificial));
                    pending_basis.push(kinds.len() + extra_columns.len() - 1);
                }
            }
            Relation::Eq => {
                extra_columns.push((i, Rational::one(), Column::Artificial));
                pending_basis.push(kinds.len() + extra_columns.len() - 1);
            }
        }
        matrix.push(coeffs);
        rhs.push(b);
    }

    let width = n + extra_columns.len();
    for row in matrix.iter_mut() {
        row.resize(width, Rational::zero());
    }
    for (offset, (row, coeff, kind)) in extra_columns.into_iter().enumerate() {
        matrix[row][n + offset] = coeff;
        kinds.push(kind);
    }

    let mut t = Tableau { rows: matrix, rhs, basis: pending_basis, kinds, cost_rows: Vec::new() };

    // Phase 1: maximize -(sum of artificials).
    if t.kinds.contains(&Column::Artificial) {
        let phase1: Vec<Rational> = t
            .kinds
            .iter()
            .map(|k| if *k == Column::Artificial { -Rational::one() } else { Rational::zero() })
            .collect();
        let cost = t.reduced_costs(&phase1);
        t.cost_rows.push(cost);
        t.optimize(0)?;
        if !t.value_of(&phase1).is_zero() {
            return Err(Error::Infeasible);
        }
        t.cost_rows.clear();
        drive_out_artificials(&mut t);
    }

    let mut objective_values = Vec::with_capacity(lp.objectives.len());
    for (k, objective) in lp.objectives.iter().enumerate() {
        let cost = t.reduced_costs(objective);
        t.cost_rows.push(cost);
        t.optimize(k)?;
        objective_values.push(t.value_of(objective));
    }

    let mut values = vec![Rational::zero(); n];
    for (&b, v) in t.basis.iter().zip(&t.rhs) {
        if b < n {
            values[b] = v.clone();
        }
    }
    Ok(LpSolution { values, objective_values })
}

/// Pivots zero-valued artificials out of the basis; rows where that is
/// impossible are linearly dependent and get dropped.
fn drive_out_artificials(t: &mut Tableau) {
    let mut i = 0;
    while i < t.rows.len() {
        if t.kinds[t.basis[i]] != Column::Artificial {
            i += 1;
            continue;
        }
        let col = (0..t.width()).find(|&j| t.kinds[j] != Column::Artificial && !t.rows[i][j].is_zero());
        match col {
            Some(col) => {
                t.pivot(i, col);
                i += 1;
            }
            None => {
                t.rows.remove(i);
                t.rhs.remove(i);
                t.basis.remove(i);
            }
        }
    }
}
