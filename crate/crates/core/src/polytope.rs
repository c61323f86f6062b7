//! Vertex enumeration for bounded polytopes.
//!
//! Brute force over candidate active sets: every equality row is active, and
//! each choice of `n - rank(equalities)` inequality rows (including the
//! implicit `x_j >= 0` bounds) is solved exactly. Solutions that are unique
//! and feasible are vertices. Fine for the small systems this crate builds.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::combinatorics::Combinations;
use crate::lp::{LinearProgram, LpError, LpOutcome, Polytope, Relation};
use crate::rational::Rational;

struct Row {
    coefficients: Vec<Rational>,
    bound: Rational,
}

/// Extreme points of `polytope` in lexicographic order.
pub fn enumerate_vertices(polytope: &Polytope) -> Result<Vec<Vec<Rational>>, LpError> {
    let n = polytope.dimension();
    if polytope.feasible_point().is_none() {
        return Ok(Vec::new());
    }
    ensure_bounded(polytope)?;

    let mut equalities = Vec::new();
    let mut inequalities = Vec::new();
    for c in polytope.constraints() {
        let row = Row { coefficients: c.coefficients.clone(), bound: c.bound.clone() };
        if c.relation == Relation::Eq {
            equalities.push(row);
        } else {
            inequalities.push(row);
        }
    }
    for var in 0..n {
        if polytope.is_nonnegative(var) {
            let mut coefficients = vec![Rational::zero(); n];
            coefficients[var] = Rational::one();
            inequalities.push(Row { coefficients, bound: Rational::zero() });
        }
    }

    let eq_refs: Vec<&Row> = equalities.iter().collect();
    let rank = rank_of(&eq_refs, n);
    let needed = n - rank;
    let mut found = BTreeSet::new();
    if needed > inequalities.len() {
        return Ok(Vec::new());
    }
    for combo in Combinations::new(inequalities.len(), needed) {
        let mut system: Vec<&Row> = eq_refs.clone();
        system.extend(combo.iter().map(|&i| &inequalities[i]));
        if let Some(point) = solve_unique(&system, n) {
            if polytope.contains(&point) {
                found.insert(point);
            }
        }
    }
    Ok(found.into_iter().collect())
}

fn ensure_bounded(polytope: &Polytope) -> Result<(), LpError> {
    let n = polytope.dimension();
    for var in 0..n {
        for sign in [1i64, -1] {
            if sign == -1 && polytope.is_nonnegative(var) {
                continue;
            }
            let mut objective = vec![Rational::zero(); n];
            objective[var] = Rational::from_integer(sign.into());
            let lp = LinearProgram::new(polytope.clone(), objective)?;
            if lp.solve() == LpOutcome::Unbounded {
                return Err(LpError::UnboundedPolytope);
            }
        }
    }
    Ok(())
}

fn rank_of(rows: &[&Row], n: usize) -> usize {
    let mut matrix: Vec<Vec<Rational>> = rows.iter().map(|r| r.coefficients.clone()).collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..matrix.len()).find(|&i| !matrix[i][col].is_zero()) else {
            continue;
        };
        matrix.swap(rank, p);
        let pivot = matrix[rank][col].clone();
        for i in rank + 1..matrix.len() {
            if matrix[i][col].is_zero() {
                continue;
            }
            let factor = &matrix[i][col] / &pivot;
            for j in col..n {
                let delta = &factor * &matrix[rank][j];
                matrix[i][j] -= delta;
            }
        }
        rank += 1;
    }
    rank
}

/// The unique solution of the (possibly overdetermined) system, if any.
fn solve_unique(rows: &[&Row], n: usize) -> Option<Vec<Rational>> {
    let mut matrix: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| {
            let mut line = r.coefficients.clone();
            line.push(r.bound.clone());
            line
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..n {
        let p = (pivot_row..matrix.len()).find(|&i| !matrix[i][col].is_zero())?;
        matrix.swap(pivot_row, p);
        let pivot = matrix[pivot_row][col].clone();
        for entry in matrix[pivot_row].iter_mut() {
            *entry /= &pivot;
        }
        for i in 0..matrix.len() {
            if i == pivot_row || matrix[i][col].is_zero() {
                continue;
            }
            let factor = matrix[i][col].clone();
            for j in col..=n {
                let delta = &factor * &matrix[pivot_row][j];
                matrix[i][j] -= delta;
            }
        }
        pivot_row += 1;
    }
    // Leftover rows must be consistent (0 = 0).
    if matrix[pivot_row..].iter().any(|line| !line[n].is_zero()) {
        return None;
    }
    Some(matrix[..n].iter().map(|line| line[n].clone()).collect())
}
