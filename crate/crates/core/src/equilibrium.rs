//! Best outcome without commitment.
//!
//! An equilibrium is a pair `(mech, strategy)` where every type only plays
//! best replies to `mech`, and every message that is sent with positive
//! probability is answered by actions that maximise the principal's payoff
//! against the induced traffic. Rows for messages nobody sends are free:
//! they never enter the principal's payoff and only matter through the
//! agent's incentives.
//!
//! Two searches are provided:
//!
//! * **full**: support enumeration. For a support profile (candidate agent
//!   supports per type, candidate action supports per message) the agent
//!   conditions are linear in the mechanism and the principal conditions are
//!   linear in the strategy. On that product the principal's payoff depends
//!   on the strategy only, so the best equilibrium with the given supports
//!   is one LP over strategies plus a feasibility check over mechanisms.
//! * **pure**: one LP per pure agent profile with on-path rows restricted to
//!   the principal's exact argmax sets.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::combinatorics::{nonempty_subset_count, nonempty_subsets, saturating_product, Odometer};
use crate::commitment::{
    add_incentive_constraints, mech_var, mechanism_from_point, mechanism_region, payoff_difference_terms,
    profile_objective, solve_commitment, CommitmentSolution,
};
use crate::game::{AgentStrategy, Game, Mechanism, PureProfile, Reply};
use crate::lp::{LinearProgram, LpError, LpOutcome, Polytope, Relation};
use crate::polytope::enumerate_vertices;
use crate::rational::Rational;
use crate::response::{best_replies, principal_value};

pub const DEFAULT_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Full,
    Pure,
    /// Full when the support count fits the budget, pure otherwise.
    Auto,
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMode::Full => "full",
            SearchMode::Pure => "pure",
            SearchMode::Auto => "auto",
        })
    }
}

impl std::str::FromStr for SearchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(SearchMode::Full),
            "pure" => Ok(SearchMode::Pure),
            "auto" => Ok(SearchMode::Auto),
            other => Err(format!("unknown mode `{other}` (expected full, pure or auto)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EquilibriumError {
    #[error("no equilibrium with a pure agent strategy found; the full search needs {count} support profiles (budget {budget})")]
    NotFound { count: u128, budget: u128 },
}

/// Candidate supports: replies each type may use, actions each message's
/// row may use. Both are upper bounds on the actual supports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportProfile {
    pub agent: Vec<Vec<Reply>>,
    pub principal: Vec<Vec<usize>>,
}

impl SupportProfile {
    /// Messages sent by some type with positive prior under these supports.
    pub fn on_path(&self, game: &Game) -> Vec<bool> {
        let mut on_path = vec![false; game.num_messages()];
        for (t, replies) in self.agent.iter().enumerate() {
            if game.prior(t).is_positive() {
                for r in replies {
                    on_path[r.message] = true;
                }
            }
        }
        on_path
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumSolution {
    pub best_value: Rational,
    pub mechanism: Mechanism,
    pub strategy: AgentStrategy,
    /// The search that produced the answer.
    pub mode: SearchMode,
    /// True when the full enumeration finished, so `best_value` is the best
    /// equilibrium value and not just a lower bound.
    pub complete: bool,
    /// Nominal number of support profiles of the full search.
    pub support_count: u128,
}

/// Nominal size of the full support enumeration.
pub fn full_support_count(game: &Game) -> u128 {
    let agent = (0..game.num_types()).map(|t| nonempty_subset_count(game.feasible_replies(t).len()));
    let principal = (0..game.num_messages()).map(|_| nonempty_subset_count(game.num_actions()));
    saturating_product(agent.chain(principal))
}

/// Independent equilibrium check by direct evaluation.
pub fn verify_equilibrium(game: &Game, mech: &Mechanism, strategy: &AgentStrategy) -> bool {
    if !mech.check(game).is_empty() || !strategy.check(game).is_empty() {
        return false;
    }
    for t in 0..game.num_types() {
        let best = best_replies(game, mech, t);
        if strategy.support(t).iter().any(|r| !best.contains(r)) {
            return false;
        }
    }
    for m in 0..game.num_messages() {
        let mut traffic = Rational::zero();
        let mut payoff = vec![Rational::zero(); game.num_actions()];
        for t in 0..game.num_types() {
            for x in 0..game.num_hidden() {
                let weight = game.prior(t) * &strategy.probs[t][m][x];
                if weight.is_zero() {
                    continue;
                }
                for (a, p) in payoff.iter_mut().enumerate() {
                    *p += &weight * &game.principal_payoff[t][x][a];
                }
                traffic += weight;
            }
        }
        if traffic.is_zero() {
            continue;
        }
        let top = payoff.iter().max().expect("at least one action");
        if (0..game.num_actions()).any(|a| mech.rows[m][a].is_positive() && payoff[a] != *top) {
            return false;
        }
    }
    true
}

/// Mechanisms under which every reply in `support.agent[t]` is a best reply
/// for `t`, with rows restricted to `support.principal`.
pub fn agent_polytope(game: &Game, support: &SupportProfile) -> Polytope {
    let mut region = mechanism_region(game);
    for (m, allowed) in support.principal.iter().enumerate() {
        for a in 0..game.num_actions() {
            if !allowed.contains(&a) {
                region
                    .add_sparse(&[(mech_var(game, m, a), Rational::one())], Relation::Eq, Rational::zero())
                    .expect("index in range");
            }
        }
    }
    for (t, replies) in support.agent.iter().enumerate() {
        let Some((&anchor, rest)) = replies.split_first() else {
            continue;
        };
        for &r in rest {
            let terms = payoff_difference_terms(game, t, anchor, r);
            region.add_sparse(&terms, Relation::Eq, Rational::zero()).expect("index in range");
        }
        for other in game.feasible_replies(t) {
            if replies.contains(&other) {
                continue;
            }
            let terms = payoff_difference_terms(game, t, anchor, other);
            region.add_sparse(&terms, Relation::Ge, Rational::zero()).expect("index in range");
        }
    }
    region
}

/// Variables of [`principal_polytope`]: one per (type, reply) in the agent
/// supports, type-major.
pub fn strategy_variables(support: &SupportProfile) -> Vec<(usize, Reply)> {
    support.agent.iter().enumerate().flat_map(|(t, replies)| replies.iter().map(move |&r| (t, r))).collect()
}

pub fn strategy_from_point(game: &Game, support: &SupportProfile, point: &[Rational]) -> AgentStrategy {
    let mut s = AgentStrategy::zeros(game);
    for ((t, r), p) in strategy_variables(support).into_iter().zip(point) {
        s.probs[t][r.message][r.hidden] = p.clone();
    }
    s
}

/// Agent strategies supported on `support.agent` against which every action
/// in `support.principal[m]` is optimal for each message `m` with traffic.
pub fn principal_polytope(game: &Game, support: &SupportProfile) -> Polytope {
    let vars = strategy_variables(support);
    let mut region = Polytope::new(vars.iter().map(|(t, r)| {
        format!("s[{}][{}][{}]", game.types[*t].id, game.messages[r.message], game.hidden_actions[r.hidden])
    }));
    for t in 0..game.num_types() {
        let terms: Vec<(usize, Rational)> =
            vars.iter().enumerate().filter(|(_, (vt, _))| *vt == t).map(|(i, _)| (i, Rational::one())).collect();
        region.add_sparse(&terms, Relation::Eq, Rational::one()).expect("index in range");
    }
    for (m, allowed) in support.principal.iter().enumerate() {
        let senders: Vec<(usize, usize, Reply)> = vars
            .iter()
            .enumerate()
            .filter(|(_, (t, r))| r.message == m && game.prior(*t).is_positive())
            .map(|(i, (t, r))| (i, *t, *r))
            .collect();
        if senders.is_empty() {
            continue;
        }
        for &a in allowed {
            for other in 0..game.num_actions() {
                if other == a {
                    continue;
                }
                let terms: Vec<(usize, Rational)> = senders
                    .iter()
                    .map(|&(i, t, r)| {
                        let v = &game.principal_payoff[t][r.hidden];
                        (i, game.prior(t) * (&v[a] - &v[other]))
                    })
                    .collect();
                region.add_sparse(&terms, Relation::Ge, Rational::zero()).expect("index in range");
            }
        }
    }
    region
}

/// Principal payoff as a linear function of the strategy variables, valid
/// on the principal polytope (any allowed action of an on-path row gives the
/// same payoff there).
fn support_objective(game: &Game, support: &SupportProfile) -> Vec<Rational> {
    strategy_variables(support)
        .iter()
        .map(|&(t, r)| {
            let a = support.principal[r.message][0];
            game.prior(t) * &game.principal_payoff[t][r.hidden][a]
        })
        .collect()
}

/// Best equilibrium value with the given supports, with a witness.
pub fn solve_support(game: &Game, support: &SupportProfile) -> Option<(Rational, Mechanism, AgentStrategy)> {
    let lp = LinearProgram::new(principal_polytope(game, support), support_objective(game, support))
        .expect("objective sized to region");
    let LpOutcome::Optimal { value, point } = lp.solve() else {
        return None;
    };
    let mech_point = agent_polytope(game, support).feasible_point()?;
    Some((value, mechanism_from_point(game, &mech_point), strategy_from_point(game, support, &point)))
}

/// Bilinear maximisation of `principal_value` over all vertex pairs of the
/// two support polytopes. Exponentially slower than [`solve_support`]; kept
/// as an independent cross-check.
pub fn bilinear_vertex_max(
    game: &Game,
    support: &SupportProfile,
) -> Result<Option<(Rational, Mechanism, AgentStrategy)>, LpError> {
    let mech_vertices = enumerate_vertices(&agent_polytope(game, support))?;
    let strategy_vertices = enumerate_vertices(&principal_polytope(game, support))?;
    let mut best: Option<(Rational, Mechanism, AgentStrategy)> = None;
    for mv in &mech_vertices {
        let mech = mechanism_from_point(game, mv);
        for sv in &strategy_vertices {
            let strategy = strategy_from_point(game, support, sv);
            let value = principal_value(game, &mech, &strategy);
            if best.as_ref().is_none_or(|(b, _, _)| value > *b) {
                best = Some((value, mech.clone(), strategy));
            }
        }
    }
    Ok(best)
}

struct Candidate {
    value: Rational,
    mechanism: Mechanism,
    strategy: AgentStrategy,
}

/// Best equilibrium in which the agent plays a pure profile. For each
/// profile the posterior payoffs of on-path messages are fixed, so the
/// value is known up front and one feasibility LP decides it.
fn pure_search(game: &Game, stop_at: Option<&Rational>) -> Option<Candidate> {
    let mut best: Option<Candidate> = None;
    for profile in game.pure_profiles() {
        let mut weights: Vec<Option<Vec<Rational>>> = vec![None; game.num_messages()];
        for (t, r) in profile.0.iter().enumerate() {
            let prior = game.prior(t);
            if prior.is_zero() {
                continue;
            }
            let row = weights[r.message].get_or_insert_with(|| vec![Rational::zero(); game.num_actions()]);
            for (a, w) in row.iter_mut().enumerate() {
                *w += prior * &game.principal_payoff[t][r.hidden][a];
            }
        }
        let value: Rational = weights.iter().flatten().map(|w| w.iter().max().expect("actions").clone()).sum();
        if best.as_ref().is_some_and(|b| value <= b.value) {
            continue;
        }

        let mut region = mechanism_region(game);
        for (m, w) in weights.iter().enumerate() {
            let Some(w) = w else { continue };
            let top = w.iter().max().expect("actions");
            for a in 0..game.num_actions() {
                if w[a] != *top {
                    region
                        .add_sparse(&[(mech_var(game, m, a), Rational::one())], Relation::Eq, Rational::zero())
                        .expect("index in range");
                }
            }
        }
        for (t, &r) in profile.0.iter().enumerate() {
            add_incentive_constraints(game, &mut region, t, r);
        }
        let lp = LinearProgram::new(region, profile_objective(game, &profile)).expect("sized");
        if let LpOutcome::Optimal { value: lp_value, point } = lp.solve() {
            debug_assert_eq!(lp_value, value);
            best = Some(Candidate {
                value,
                mechanism: mechanism_from_point(game, &point),
                strategy: profile.to_strategy(game),
            });
            if stop_at.is_some_and(|s| best.as_ref().expect("just set").value >= *s) {
                break;
            }
        }
    }
    best
}

/// Optimistic value of an agent support: every type gets its best payoff
/// for the principal over its candidate replies.
fn agent_support_bound(game: &Game, agent: &[Vec<Reply>], action_choice: impl Fn(usize) -> Vec<usize>) -> Rational {
    let mut bound = Rational::zero();
    for (t, replies) in agent.iter().enumerate() {
        let prior = game.prior(t);
        if prior.is_zero() {
            continue;
        }
        let best = replies
            .iter()
            .flat_map(|r| action_choice(r.message).into_iter().map(move |a| (r, a)))
            .map(|(r, a)| game.principal_payoff[t][r.hidden][a].clone())
            .max()
            .expect("nonempty support");
        bound += prior * best;
    }
    bound
}

/// True when some allowed action on message `m` is strictly beaten by a
/// single other action for every sender, which forces zero traffic.
fn has_dominated_action(game: &Game, agent: &[Vec<Reply>], m: usize, allowed: &[usize]) -> bool {
    let senders: Vec<(usize, usize)> = agent
        .iter()
        .enumerate()
        .filter(|(t, _)| game.prior(*t).is_positive())
        .flat_map(|(t, rs)| rs.iter().filter(|r| r.message == m).map(move |r| (t, r.hidden)))
        .collect();
    allowed.iter().any(|&a| {
        (0..game.num_actions()).any(|b| {
            b != a && senders.iter().all(|&(t, x)| game.principal_payoff[t][x][b] > game.principal_payoff[t][x][a])
        })
    })
}

/// Support enumeration, seeded with `seed` as the incumbent and stopping as
/// soon as `ceiling` is reached. Profiles are visited in a fixed order and
/// only strict improvements replace the incumbent.
fn full_search(game: &Game, seed: Option<Candidate>, ceiling: &Rational) -> Option<Candidate> {
    let mut best = seed;
    if best.as_ref().is_some_and(|b| b.value >= *ceiling) {
        return best;
    }
    let all_actions: Vec<usize> = (0..game.num_actions()).collect();
    let action_subsets = nonempty_subsets(&all_actions);
    let agent_options: Vec<Vec<Vec<Reply>>> = (0..game.num_types())
        .map(|t| {
            let replies = game.feasible_replies(t);
            if game.prior(t).is_zero() {
                // Any best reply will do for a type that carries no weight.
                replies.into_iter().map(|r| vec![r]).collect()
            } else {
                nonempty_subsets(&replies)
            }
        })
        .collect();

    for agent_index in Odometer::new(agent_options.iter().map(Vec::len).collect()) {
        let agent: Vec<Vec<Reply>> =
            agent_index.iter().enumerate().map(|(t, &i)| agent_options[t][i].clone()).collect();
        let improves = |value: &Rational, best: &Option<Candidate>| best.as_ref().is_none_or(|b| *value > b.value);
        if !improves(&agent_support_bound(game, &agent, |_| all_actions.clone()), &best) {
            continue;
        }
        let relaxed =
            SupportProfile { agent: agent.clone(), principal: vec![all_actions.clone(); game.num_messages()] };
        if agent_polytope(game, &relaxed).feasible_point().is_none() {
            continue;
        }
        let on_path = relaxed.on_path(game);
        let path_messages: Vec<usize> = (0..game.num_messages()).filter(|&m| on_path[m]).collect();

        for choice in Odometer::new(vec![action_subsets.len(); path_messages.len()]) {
            let mut principal = vec![all_actions.clone(); game.num_messages()];
            for (&m, &c) in path_messages.iter().zip(&choice) {
                principal[m] = action_subsets[c].clone();
            }
            if path_messages.iter().any(|&m| has_dominated_action(game, &agent, m, &principal[m])) {
                continue;
            }
            if !improves(&agent_support_bound(game, &agent, |m| vec![principal[m][0]]), &best) {
                continue;
            }
            let support = SupportProfile { agent: agent.clone(), principal };
            let lp = LinearProgram::new(principal_polytope(game, &support), support_objective(game, &support))
                .expect("sized");
            let LpOutcome::Optimal { value, point } = lp.solve() else {
                continue;
            };
            if !improves(&value, &best) {
                continue;
            }
            let Some(mech_point) = agent_polytope(game, &support).feasible_point() else {
                continue;
            };
            best = Some(Candidate {
                value,
                mechanism: mechanism_from_point(game, &mech_point),
                strategy: strategy_from_point(game, &support, &point),
            });
            if best.as_ref().is_some_and(|b| b.value >= *ceiling) {
                return best;
            }
        }
    }
    best
}

/// Best equilibrium value for the principal.
///
/// `ceiling` is an upper bound on every equilibrium value (the commitment
/// value works); the search stops once it is attained.
pub fn best_equilibrium_bounded(
    game: &Game,
    mode: SearchMode,
    budget: u128,
    ceiling: &Rational,
) -> Result<EquilibriumSolution, EquilibriumError> {
    let support_count = full_support_count(game);
    let run_full = match mode {
        SearchMode::Full | SearchMode::Auto => support_count <= budget,
        SearchMode::Pure => false,
    };
    let pure = pure_search(game, Some(ceiling));
    let (candidate, used, complete) = if run_full {
        let best = full_search(game, pure, ceiling).expect("finite games have an equilibrium");
        (best, SearchMode::Full, true)
    } else {
        let Some(best) = pure else {
            return Err(EquilibriumError::NotFound { count: support_count, budget });
        };
        // A pure equilibrium attaining the ceiling is provably optimal.
        let complete = best.value >= *ceiling;
        (best, SearchMode::Pure, complete)
    };
    Ok(EquilibriumSolution {
        best_value: candidate.value,
        mechanism: candidate.mechanism,
        strategy: candidate.strategy,
        mode: used,
        complete,
        support_count,
    })
}

pub fn best_equilibrium(game: &Game, mode: SearchMode, budget: u128) -> Result<EquilibriumSolution, EquilibriumError> {
    let ceiling = solve_commitment(game).v_star;
    best_equilibrium_bounded(game, mode, budget, &ceiling)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NoValueOfCommitment,
    CommitmentHasValue,
    /// Positive gap, but the equilibrium search was not exhaustive.
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NoValueOfCommitment => "no_value_of_commitment",
            Verdict::CommitmentHasValue => "commitment_has_value",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapReport {
    pub v_star: Rational,
    pub best_equilibrium_value: Rational,
    pub gap: Rational,
    pub verdict: Verdict,
    pub commitment: CommitmentSolution,
    pub equilibrium: EquilibriumSolution,
}

impl GapReport {
    pub fn complete(&self) -> bool {
        self.equilibrium.complete
    }
}

pub fn commitment_gap(game: &Game, mode: SearchMode, budget: u128) -> Result<GapReport, EquilibriumError> {
    let commitment = solve_commitment(game);
    let equilibrium = best_equilibrium_bounded(game, mode, budget, &commitment.v_star)?;
    Ok(gap_report(commitment, equilibrium))
}

pub fn gap_report(commitment: CommitmentSolution, equilibrium: EquilibriumSolution) -> GapReport {
    let gap = &commitment.v_star - &equilibrium.best_value;
    let verdict = if gap.is_zero() {
        Verdict::NoValueOfCommitment
    } else if equilibrium.complete {
        Verdict::CommitmentHasValue
    } else {
        Verdict::Inconclusive
    };
    GapReport {
        v_star: commitment.v_star.clone(),
        best_equilibrium_value: equilibrium.best_value.clone(),
        gap,
        verdict,
        commitment,
        equilibrium,
    }
}

/// Pure profile of a strategy that is pure, if it is.
pub fn as_pure_profile(game: &Game, strategy: &AgentStrategy) -> Option<PureProfile> {
    (0..game.num_types())
        .map(|t| match strategy.support(t).as_slice() {
            [r] => Some(*r),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()
        .map(PureProfile)
}
