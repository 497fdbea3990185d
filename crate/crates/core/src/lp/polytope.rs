//! Exact vertex enumeration and coordinate ranges for small polytopes.
//!
//! These are brute-force routes used to cross-check the simplex solver and to
//! certify uniqueness claims; they are only practical for a handful of
//! variables.

use super::{simplex_solve, Constraint, LpProblem, Relation};
use crate::error::{Error, Result};
use crate::rational::Rational;
use num_traits::{One, Signed, Zero};

/// Largest number of candidate active sets [`enumerate_vertices`] will try.
pub const MAX_ACTIVE_SETS: u128 = 2_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Reduced row echelon form of `[a | b]`; returns the unique solution when
/// the system is consistent and has full column rank.
fn unique_solution(mut rows: Vec<(Vec<Rational>, Rational)>, n: usize) -> Option<Vec<Rational>> {
    let mut pivot_row = 0;
    for col in 0..n {
        let found = (pivot_row..rows.len()).find(|&r| !rows[r].0[col].is_zero())?;
        rows.swap(pivot_row, found);
        let inv = Rational::one() / &rows[pivot_row].0[col];
        let (ref mut coeffs, ref mut rhs) = rows[pivot_row];
        coeffs.iter_mut().for_each(|v| *v *= &inv);
        *rhs *= &inv;
        let (pc, pr) = rows[pivot_row].clone();
        for (r, (coeffs, rhs)) in rows.iter_mut().enumerate() {
            if r == pivot_row || coeffs[col].is_zero() {
                continue;
            }
            let f = coeffs[col].clone();
            coeffs.iter_mut().zip(&pc).for_each(|(v, p)| *v -= &f * p);
            *rhs -= &f * &pr;
        }
        pivot_row += 1;
    }
    // Leftover rows must read 0 = 0.
    if rows[pivot_row..].iter().any(|(_, rhs)| !rhs.is_zero()) {
        return None;
    }
    Some(rows[..n].iter().map(|(_, rhs)| rhs.clone()).collect())
}

fn rank(rows: &[Vec<Rational>], n: usize) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut r = 0;
    for col in 0..n {
        let Some(found) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, found);
        let pivot = m[r].clone();
        for row in m.iter_mut().skip(r + 1) {
            if row[col].is_zero() {
                continue;
            }
            let f = &row[col] / &pivot[col];
            row.iter_mut().zip(&pivot).for_each(|(v, p)| *v -= &f * p);
        }
        r += 1;
    }
    r
}

fn satisfies(c: &Constraint, x: &[Rational]) -> bool {
    let lhs: Rational = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
    match c.relation {
        Relation::Le => lhs <= c.rhs,
        Relation::Ge => lhs >= c.rhs,
        Relation::Eq => lhs == c.rhs,
    }
}

/// All vertices of `{x >= 0 : constraints}` in discovery order. The
/// polytope must be bounded for the result to describe it completely.
pub fn enumerate_vertices(lp: &LpProblem) -> Result<Vec<Vec<Rational>>> {
    let n = lp.num_vars;
    let pad = |c: &Constraint| {
        let mut coeffs = c.coeffs.clone();
        coeffs.resize(n, Rational::zero());
        coeffs
    };
    let equalities: Vec<(Vec<Rational>, Rational)> =
        lp.constraints.iter().filter(|c| c.relation == Relation::Eq).map(|c| (pad(c), c.rhs.clone())).collect();
    let mut inequalities: Vec<(Vec<Rational>, Rational)> = lp
        .constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq && !c.implied_by_nonnegativity())
        .map(|c| (pad(c), c.rhs.clone()))
        .collect();
    for j in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        inequalities.push((e, Rational::zero()));
    }

    let eq_rank = rank(&equalities.iter().map(|(a, _)| a.clone()).collect::<Vec<_>>(), n);
    let pick = n - eq_rank.min(n);
    let candidates = binomial(inequalities.len(), pick);
    if candidates > MAX_ACTIVE_SETS {
        return Err(Error::param(
            "lp",
            format!("{candidates} active sets exceed the enumeration limit of {MAX_ACTIVE_SETS}"),
        ));
    }

    let mut vertices: Vec<Vec<Rational>> = Vec::new();
    if candidates == 0 {
        return Ok(vertices);
    }
    let mut subset: Vec<usize> = (0..pick).collect();
    loop {
        let mut system = equalities.clone();
        system.extend(subset.iter().map(|&i| inequalities[i].clone()));
        if let Some(x) = unique_solution(system, n) {
            let feasible = x.iter().all(|v| !v.is_negative()) && lp.constraints.iter().all(|c| satisfies(c, &x));
            if feasible && !vertices.contains(&x) {
                vertices.push(x);
            }
        }
        // Next combination in lexicographic order.
        let mut i = pick;
        loop {
            if i == 0 {
                return Ok(vertices);
            }
            i -= 1;
            if subset[i] < inequalities.len() - pick + i {
                break;
            }
        }
        subset[i] += 1;
        for j in i + 1..pick {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Minimum and maximum of every variable over the feasible region.
pub fn coordinate_ranges(lp: &LpProblem) -> Result<Vec<(Rational, Rational)>> {
    (0..lp.num_vars)
        .map(|j| {
            let mut e = vec![Rational::zero(); lp.num_vars];
            e[j] = Rational::one();
            let neg: Vec<Rational> = e.iter().map(|v| -v.clone()).collect();
            let hi = simplex_solve(&LpProblem { objectives: vec![e], ..lp.clone() })?.objective_values[0].clone();
            let lo = -simplex_solve(&LpProblem { objectives: vec![neg], ..lp.clone() })?.objective_values[0].clone();
            Ok((lo, hi))
        })
        .collect()
}
