//! Expected payoffs, the agent's best-reply correspondence and the
//! principal's value function with principal-preferred tie-breaking.

use num_traits::Zero;

use crate::game::{AgentStrategy, Game, Mechanism, PureProfile, Reply};
use crate::rational::{dot, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResponseError {
    #[error("type {ty} cannot send message {message}")]
    InfeasibleMessage { ty: usize, message: usize },
}

/// Agent's expected utility from `reply` under `mech`.
pub fn agent_payoff(game: &Game, mech: &Mechanism, ty: usize, reply: Reply) -> Result<Rational, ResponseError> {
    if !game.can_send(ty, reply.message) {
        return Err(ResponseError::InfeasibleMessage { ty, message: reply.message });
    }
    Ok(agent_payoff_unchecked(game, mech, ty, reply))
}

pub(crate) fn agent_payoff_unchecked(game: &Game, mech: &Mechanism, ty: usize, reply: Reply) -> Rational {
    dot(&mech.rows[reply.message], &game.agent_payoff[ty][reply.hidden])
}

/// Principal's expected payoff from type `ty` playing `reply`, not weighted
/// by the prior.
pub fn contribution(game: &Game, mech: &Mechanism, ty: usize, reply: Reply) -> Rational {
    dot(&mech.rows[reply.message], &game.principal_payoff[ty][reply.hidden])
}

/// Per type, the feasible replies maximising the agent's expected utility,
/// in (message, hidden action) order.
pub fn best_reply_sets(game: &Game, mech: &Mechanism) -> Vec<Vec<Reply>> {
    (0..game.num_types()).map(|t| best_replies(game, mech, t)).collect()
}

pub fn best_replies(game: &Game, mech: &Mechanism, ty: usize) -> Vec<Reply> {
    let scored: Vec<(Reply, Rational)> = game
        .feasible_replies(ty)
        .into_iter()
        .map(|r| {
            let u = agent_payoff_unchecked(game, mech, ty, r);
            (r, u)
        })
        .collect();
    let Some(best) = scored.iter().map(|(_, u)| u).max().cloned() else {
        return Vec::new();
    };
    scored.into_iter().filter(|(_, u)| *u == best).map(|(r, _)| r).collect()
}

/// `v(mech, strategy)`: the principal's ex-ante expected payoff.
pub fn principal_value(game: &Game, mech: &Mechanism, strategy: &AgentStrategy) -> Rational {
    let mut total = Rational::zero();
    for t in 0..game.num_types() {
        let prior = game.prior(t);
        if prior.is_zero() {
            continue;
        }
        for reply in game.feasible_replies(t) {
            let p = strategy.prob(t, reply);
            if p.is_zero() {
                continue;
            }
            total += prior * p * contribution(game, mech, t, reply);
        }
    }
    total
}

/// The best reply of `ty` the principal likes most (first in reply order on
/// ties), together with its contribution.
pub fn preferred_reply(game: &Game, mech: &Mechanism, ty: usize) -> (Reply, Rational) {
    let mut best: Option<(Reply, Rational)> = None;
    for r in best_replies(game, mech, ty) {
        let c = contribution(game, mech, ty, r);
        if best.as_ref().is_none_or(|(_, b)| c > *b) {
            best = Some((r, c));
        }
    }
    best.expect("valid games have a feasible reply for every type")
}

/// `V(mech)`: the principal's value when every type plays its
/// principal-preferred best reply, and the selection that attains it.
/// Zero-prior types are assigned their first feasible reply.
pub fn preferred_value(game: &Game, mech: &Mechanism) -> (Rational, PureProfile) {
    let mut value = Rational::zero();
    let mut selection = Vec::with_capacity(game.num_types());
    for t in 0..game.num_types() {
        let prior = game.prior(t);
        if prior.is_zero() {
            selection.push(game.feasible_replies(t)[0]);
            continue;
        }
        let (reply, c) = preferred_reply(game, mech, t);
        value += prior * c;
        selection.push(reply);
    }
    (value, PureProfile(selection))
}

/// Lowest and highest principal value over the agent's best replies,
/// i.e. the range of `v(mech, sigma)` for `sigma` in `BR(mech)`.
pub fn value_range_over_best_replies(game: &Game, mech: &Mechanism) -> (Rational, Rational) {
    let sets = best_reply_sets(game, mech);
    value_range(game, mech, &sets)
}

/// Same as [`value_range_over_best_replies`] for explicit reply sets,
/// measuring contributions under `mech`.
pub fn value_range(game: &Game, mech: &Mechanism, sets: &[Vec<Reply>]) -> (Rational, Rational) {
    let mut low = Rational::zero();
    let mut high = Rational::zero();
    for (t, set) in sets.iter().enumerate() {
        let prior = game.prior(t);
        if prior.is_zero() || set.is_empty() {
            continue;
        }
        let contributions: Vec<Rational> = set.iter().map(|&r| contribution(game, mech, t, r)).collect();
        low += prior * contributions.iter().min().expect("nonempty");
        high += prior * contributions.iter().max().expect("nonempty");
    }
    (low, high)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::scenarios::{build_example1, build_example2, Example1Params};

    fn witness(game: &Game) -> Mechanism {
        let _ = game;
        Mechanism::new(vec![vec![rat(3, 10), int(0), rat(7, 10)], vec![int(0), int(1), int(0)]])
    }

    #[test]
    fn example2_ic_line() {
        let g = build_example2(&rat(3, 10), &rat(2, 5)).unwrap();
        let mech = witness(&g);
        assert_eq!(agent_payoff(&g, &mech, 1, Reply::new(0, 0)).unwrap(), rat(7, 10));
        assert_eq!(agent_payoff(&g, &mech, 1, Reply::new(1, 0)).unwrap(), rat(7, 10));
        assert_eq!(
            agent_payoff(&g, &mech, 0, Reply::new(1, 0)),
            Err(ResponseError::InfeasibleMessage { ty: 0, message: 1 })
        );
    }

    #[test]
    fn zero_payoffs_give_zero() {
        let mut g = build_example2(&rat(3, 10), &rat(2, 5)).unwrap();
        g = crate::scenarios::constant_game(&g, &int(0));
        let mech = witness(&g);
        assert_eq!(agent_payoff(&g, &mech, 1, Reply::new(0, 0)).unwrap(), int(0));
        let s = PureProfile(vec![Reply::new(0, 0), Reply::new(1, 0)]).to_strategy(&g);
        assert_eq!(principal_value(&g, &mech, &s), int(0));
    }

    #[test]
    fn example2_best_replies() {
        let g = build_example2(&rat(3, 10), &rat(2, 5)).unwrap();
        let sets = best_reply_sets(&g, &witness(&g));
        assert_eq!(sets[0], vec![Reply::new(0, 0)]);
        assert_eq!(sets[1], vec![Reply::new(0, 0), Reply::new(1, 0)]);

        let all_low = Mechanism::constant(&g, 0);
        assert_eq!(best_reply_sets(&g, &all_low)[1], vec![Reply::new(0, 0), Reply::new(1, 0)]);
    }

    #[test]
    fn example2_principal_values() {
        let g = build_example2(&rat(3, 10), &rat(2, 5)).unwrap();
        let mech = witness(&g);
        let separate = PureProfile(vec![Reply::new(0, 0), Reply::new(1, 0)]).to_strategy(&g);
        let pool = PureProfile(vec![Reply::new(0, 0), Reply::new(0, 0)]).to_strategy(&g);
        assert_eq!(principal_value(&g, &mech, &separate), rat(79, 50));
        assert_eq!(principal_value(&g, &mech, &pool), rat(7, 5));
    }

    #[test]
    fn example2_preferred_value() {
        let g = build_example2(&rat(3, 10), &rat(2, 5)).unwrap();
        let (v, sel) = preferred_value(&g, &witness(&g));
        assert_eq!(v, rat(79, 50));
        assert_eq!(sel.reply(1), Reply::new(1, 0));

        let (v, _) = preferred_value(&g, &Mechanism::constant(&g, 1));
        assert_eq!(v, rat(77, 50));
    }

    #[test]
    fn example1_best_reply_with_hidden_action() {
        let g = build_example1(&Example1Params::default()).unwrap();
        // cert(-1/2) -> 0, cert(1/2) -> 1/2, none -> 1
        let grid_index =
            |a: Rational| g.actions.iter().position(|x| *x == crate::rational::format_rational(&a)).unwrap();
        let mech = Mechanism::deterministic(&g, &[grid_index(int(0)), grid_index(rat(1, 2)), grid_index(int(1))]);
        // type (1/2, e1) is index 2
        assert_eq!(best_replies(&g, &mech, 2), vec![Reply::new(2, 0), Reply::new(2, 1)]);
    }

    #[test]
    fn single_type_unique_reply() {
        let g = crate::game::Game {
            types: vec![crate::game::AgentType { id: "t".into(), prior: int(1), evidence: vec![0] }],
            messages: vec!["m".into()],
            hidden_actions: vec!["x".into()],
            actions: vec!["a".into(), "b".into()],
            agent_payoff: vec![vec![vec![int(1), int(0)]]],
            principal_payoff: vec![vec![vec![int(3), int(-1)]]],
        };
        let mech = Mechanism::new(vec![vec![rat(1, 4), rat(3, 4)]]);
        let (v, sel) = preferred_value(&g, &mech);
        assert_eq!(v, principal_value(&g, &mech, &sel.to_strategy(&g)));
        assert_eq!(v, int(0));
    }
}
