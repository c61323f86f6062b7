//! Independent reference computations. Nothing here calls the crate's
//! solvers; payoffs are written out from the model definitions.

#![allow(dead_code)]

use commitgap::rational::{int, rat, Rational};
use commitgap::{LinearProgram, Polytope, Relation};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Points of the probability simplex over `n` actions with coordinates in
/// multiples of `1/denominator`.
pub fn simplex_grid(n: usize, denominator: i64) -> Vec<Vec<Rational>> {
    fn rec(n: usize, left: i64, den: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<Rational>>) {
        if n == 1 {
            prefix.push(left);
            out.push(prefix.iter().map(|&k| rat(k, den)).collect());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(n - 1, left - k, den, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, denominator, denominator, &mut Vec::new(), &mut out);
    out
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).fold(Rational::zero(), |s, v| s + v)
}

/// Two-type evidence game with actions 1, 2, 3.
pub struct TwoTypeGame {
    pub mu: Rational,
    pub u1: Vec<Rational>,
    pub u2: Vec<Rational>,
    pub v1: Vec<Rational>,
    pub v2: Vec<Rational>,
}

impl TwoTypeGame {
    pub fn new(epsilon: &Rational, mu: &Rational) -> Self {
        let u1 = vec![int(1), int(2), int(3)];
        let u2 = vec![int(0), int(1) - epsilon, int(1)];
        let psi = [int(1), int(2), int(2)];
        let v1 = u1.iter().zip(&psi).map(|(u, p)| u + p).collect();
        let v2 = u2.iter().zip(&psi).map(|(u, p)| int(-3) * u + p).collect();
        TwoTypeGame { mu: mu.clone(), u1, u2, v1, v2 }
    }

    /// Value with the second type breaking ties in the principal's favour.
    pub fn preferred_value(&self, row1: &[Rational], row2: &[Rational]) -> Rational {
        let stay = dot(&self.u2, row1);
        let leave = dot(&self.u2, row2);
        let on_m1 = dot(&self.v2, row1);
        let on_m2 = dot(&self.v2, row2);
        let second = if stay > leave {
            on_m1
        } else if leave > stay {
            on_m2
        } else {
            on_m1.max(on_m2)
        };
        &self.mu * dot(&self.v1, row1) + (int(1) - &self.mu) * second
    }

    /// Best value over a grid of mechanisms.
    pub fn grid_commitment_value(&self, denominator: i64) -> Rational {
        let rows = simplex_grid(3, denominator);
        let mut best: Option<Rational> = None;
        for r1 in &rows {
            for r2 in &rows {
                let v = self.preferred_value(r1, r2);
                if best.as_ref().is_none_or(|b| v > *b) {
                    best = Some(v);
                }
            }
        }
        best.unwrap()
    }

    /// Best principal value over grid points that are equilibria: the
    /// agent best-replies and each on-path row only uses actions that are
    /// optimal against that message's traffic.
    pub fn grid_equilibrium_value(&self, denominator: i64) -> Rational {
        let rows = simplex_grid(3, denominator);
        let sigmas: Vec<Rational> = (0..=denominator).map(|k| rat(k, denominator)).collect();
        let one = int(1);
        let optimal_row = |row: &[Rational], payoff: &[Rational]| -> bool {
            let best = payoff.iter().max().unwrap();
            row.iter().zip(payoff).all(|(p, v)| p.is_zero() || v == best)
        };
        let mut best: Option<Rational> = None;
        for r1 in &rows {
            for r2 in &rows {
                let stay = dot(&self.u2, r1);
                let leave = dot(&self.u2, r2);
                for s in &sigmas {
                    if (s > &int(0) && leave < stay) || (s < &one && stay < leave) {
                        continue;
                    }
                    let w1 = self.mu.clone();
                    let w2 = (&one - &self.mu) * (&one - s);
                    let at_m1: Vec<Rational> = self.v1.iter().zip(&self.v2).map(|(a, b)| &w1 * a + &w2 * b).collect();
                    if !(w1.is_zero() && w2.is_zero()) && !optimal_row(r1, &at_m1) {
                        continue;
                    }
                    let w3 = (&one - &self.mu) * s;
                    if !w3.is_zero() && !optimal_row(r2, &self.v2) {
                        continue;
                    }
                    let value = &self.mu * dot(&self.v1, r1)
                        + (&one - &self.mu) * ((&one - s) * dot(&self.v2, r1) + s * dot(&self.v2, r2));
                    if best.as_ref().is_none_or(|b| value > *b) {
                        best = Some(value);
                    }
                }
            }
        }
        best.unwrap()
    }
}

/// Principal's value from one investment-game type facing best action
/// `a` (the largest action it can obtain), with the principal's preferred
/// investment choice.
pub fn investment_type_value(theta: &Rational, a: &Rational) -> Rational {
    let half_square = a * a / int(2);
    if theta > &int(0) {
        let boost = if a >= &int(0) { int(2) } else { int(1) };
        theta * a * boost - half_square
    } else {
        theta * a - half_square
    }
}

/// Value of a deterministic investment-game mechanism with two
/// productivities, equal shares and evidence probability `p`:
/// `certs[i]` is the action after certifying productivity `i`, `empty` the
/// action after the empty message.
pub fn investment_value(thetas: &[Rational], p: &Rational, certs: &[Rational], empty: &Rational) -> Rational {
    let share = rat(1, thetas.len() as i64);
    let mut total = Rational::zero();
    for (theta, cert) in thetas.iter().zip(certs) {
        let with = cert.max(empty).clone();
        total += &share * p * investment_type_value(theta, &with);
        total += &share * (int(1) - p) * investment_type_value(theta, empty);
    }
    total
}

/// A random LP that is bounded: non-negative variables, a cap on their sum
/// and up to `max_rows - 1` random rows with small integer data.
pub fn random_bounded_lp(seed: u64, max_vars: usize, max_rows: usize) -> LinearProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_vars);
    let rows = rng.gen_range(1..=max_rows);
    let mut region = Polytope::with_dimension(n);
    region.add_constraint(vec![int(1); n], Relation::Le, int(rng.gen_range(1..=10))).unwrap();
    for _ in 1..rows {
        let coefficients = (0..n).map(|_| int(rng.gen_range(-4..=4))).collect();
        let relation = match rng.gen_range(0..6) {
            0 => Relation::Eq,
            1 | 2 => Relation::Ge,
            _ => Relation::Le,
        };
        region.add_constraint(coefficients, relation, int(rng.gen_range(-3..=8))).unwrap();
    }
    let objective = (0..n).map(|_| rat(rng.gen_range(-6..=6), rng.gen_range(1..=3))).collect();
    LinearProgram::new(region, objective).unwrap()
}
