//! The commitment benchmark `V* = max_mech V(mech)`.
//!
//! `V(mech)` is attained by a pure selection of best replies, so the outer
//! maximisation splits into one LP per pure agent profile: maximise the
//! principal's payoff over mechanisms under which that profile is a best
//! reply for every type.

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::game::{Game, Mechanism, PureProfile, Reply};
use crate::lp::{LinearProgram, LpOutcome, Polytope, Relation};
use crate::rational::Rational;

/// Index of the variable `mech(action | message)` in mechanism LPs.
pub(crate) fn mech_var(game: &Game, message: usize, action: usize) -> usize {
    message * game.num_actions() + action
}

pub(crate) fn mechanism_from_point(game: &Game, point: &[Rational]) -> Mechanism {
    Mechanism::new(
        (0..game.num_messages())
            .map(|m| (0..game.num_actions()).map(|a| point[mech_var(game, m, a)].clone()).collect())
            .collect(),
    )
}

/// Mechanism variables with every row constrained to the simplex.
pub(crate) fn mechanism_region(game: &Game) -> Polytope {
    let names = (0..game.num_messages())
        .flat_map(|m| (0..game.num_actions()).map(move |a| (m, a)))
        .map(|(m, a)| format!("mech[{}][{}]", game.messages[m], game.actions[a]))
        .collect::<Vec<_>>();
    let mut region = Polytope::new(names);
    for m in 0..game.num_messages() {
        let terms: Vec<(usize, Rational)> =
            (0..game.num_actions()).map(|a| (mech_var(game, m, a), Rational::one())).collect();
        region.add_sparse(&terms, Relation::Eq, Rational::one()).expect("indices in range");
    }
    region
}

/// Terms of `u(ty, reply) - u(ty, other)` as a linear form in mechanism
/// variables.
pub(crate) fn payoff_difference_terms(game: &Game, ty: usize, reply: Reply, other: Reply) -> Vec<(usize, Rational)> {
    let mut terms = Vec::with_capacity(2 * game.num_actions());
    for a in 0..game.num_actions() {
        terms.push((mech_var(game, reply.message, a), game.agent_payoff[ty][reply.hidden][a].clone()));
        terms.push((mech_var(game, other.message, a), -&game.agent_payoff[ty][other.hidden][a]));
    }
    terms
}

/// Requires `reply` to be weakly optimal for `ty`.
pub(crate) fn add_incentive_constraints(game: &Game, region: &mut Polytope, ty: usize, reply: Reply) {
    for other in game.feasible_replies(ty) {
        if other == reply {
            continue;
        }
        let terms = payoff_difference_terms(game, ty, reply, other);
        region.add_sparse(&terms, Relation::Ge, Rational::zero()).expect("indices in range");
    }
}

/// Objective coefficients of the principal's value when types follow `profile`.
pub(crate) fn profile_objective(game: &Game, profile: &PureProfile) -> Vec<Rational> {
    let mut objective = vec![Rational::zero(); game.num_messages() * game.num_actions()];
    for (t, reply) in profile.0.iter().enumerate() {
        let prior = game.prior(t);
        if prior.is_zero() {
            continue;
        }
        for a in 0..game.num_actions() {
            objective[mech_var(game, reply.message, a)] += prior * &game.principal_payoff[t][reply.hidden][a];
        }
    }
    objective
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProfileOutcome {
    Optimal { value: Rational, mechanism: Mechanism },
    Infeasible,
}

impl ProfileOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            ProfileOutcome::Optimal { value, .. } => Some(value),
            ProfileOutcome::Infeasible => None,
        }
    }
}

/// Best mechanism that keeps `profile` incentive compatible.
pub fn commitment_lp(game: &Game, profile: &PureProfile) -> ProfileOutcome {
    let mut region = mechanism_region(game);
    for (t, &reply) in profile.0.iter().enumerate() {
        add_incentive_constraints(game, &mut region, t, reply);
    }
    let lp = LinearProgram::new(region, profile_objective(game, profile)).expect("objective sized to region");
    match lp.solve() {
        LpOutcome::Optimal { value, point } => {
            ProfileOutcome::Optimal { value, mechanism: mechanism_from_point(game, &point) }
        }
        LpOutcome::Infeasible => ProfileOutcome::Infeasible,
        LpOutcome::Unbounded => unreachable!("mechanism region is a product of simplices"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitmentSolution {
    pub v_star: Rational,
    pub mech_star: Mechanism,
    pub profile_star: PureProfile,
    /// Every pure profile with its LP outcome, in profile order.
    pub table: Vec<(PureProfile, ProfileOutcome)>,
}

/// Solves every profile LP (in parallel) and keeps the first maximiser in
/// profile order.
pub fn solve_commitment(game: &Game) -> CommitmentSolution {
    let profiles: Vec<PureProfile> = game.pure_profiles().collect();
    let outcomes: Vec<ProfileOutcome> = profiles.par_iter().map(|p| commitment_lp(game, p)).collect();

    if game.num_hidden() == 1 {
        // A constant mechanism makes every message equivalent, so every
        // profile is implementable.
        debug_assert!(outcomes.iter().all(|o| matches!(o, ProfileOutcome::Optimal { .. })));
    }

    let mut best: Option<usize> = None;
    for (i, outcome) in outcomes.iter().enumerate() {
        if let Some(v) = outcome.value() {
            if best.is_none_or(|b| v > outcomes[b].value().expect("best is optimal")) {
                best = Some(i);
            }
        }
    }
    let best = best.expect("some profile is a best reply to any mechanism");
    let ProfileOutcome::Optimal { value, mechanism } = outcomes[best].clone() else { unreachable!() };
    CommitmentSolution {
        v_star: value,
        mech_star: mechanism,
        profile_star: profiles[best].clone(),
        table: profiles.into_iter().zip(outcomes).collect(),
    }
}
