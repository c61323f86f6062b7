//! Bundled scenarios: the evidence game with two types and three actions,
//! the Dye-evidence investment game on a discretised action grid, and seeded
//! random games for property tests.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{AgentType, Game};
use crate::rational::{format_rational, int, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    #[error("{name} = {value} is outside {range}")]
    OutOfRange { name: &'static str, value: String, range: &'static str },
    #[error("grid step {0} does not divide the action interval [-2, 2]")]
    GridStep(String),
    #[error("productivity list is empty or has duplicates")]
    Productivities,
    #[error("dimension `{0}` must be at least 1")]
    Dimension(&'static str),
}

fn open_unit(name: &'static str, value: &Rational) -> Result<(), ScenarioError> {
    if value.is_positive() && *value < Rational::one() {
        Ok(())
    } else {
        Err(ScenarioError::OutOfRange { name, value: format_rational(value), range: "(0, 1)" })
    }
}

/// Two types, two messages, three actions. Type `t1` can only send `m1`;
/// `t2` can send either. Agent utilities are `(1, 2, 3)` for `t1` and
/// `(0, 1 - epsilon, 1)` for `t2`; the principal's payoff is
/// `weight(t) * u(a, t) + bonus(a)` with weights `1, -3` and bonuses `1, 2, 2`.
/// `mu` is the prior on `t1`.
pub fn build_example2(epsilon: &Rational, mu: &Rational) -> Result<Game, ScenarioError> {
    open_unit("epsilon", epsilon)?;
    open_unit("mu", mu)?;

    let weight = [int(1), int(-3)];
    let bonus = [int(1), int(2), int(2)];
    let agent = [vec![int(1), int(2), int(3)], vec![int(0), Rational::one() - epsilon, int(1)]];
    let principal: Vec<Vec<Rational>> =
        agent.iter().zip(&weight).map(|(u, w)| u.iter().zip(&bonus).map(|(ua, b)| w * ua + b).collect()).collect();

    Ok(Game {
        types: vec![
            AgentType { id: "t1".into(), prior: mu.clone(), evidence: vec![0] },
            AgentType { id: "t2".into(), prior: Rational::one() - mu, evidence: vec![0, 1] },
        ],
        messages: vec!["m1".into(), "m2".into()],
        hidden_actions: vec!["x0".into()],
        actions: vec!["a1".into(), "a2".into(), "a3".into()],
        agent_payoff: agent.into_iter().map(|row| vec![row]).collect(),
        principal_payoff: principal.into_iter().map(|row| vec![row]).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example1Params {
    pub grid_step: Rational,
    pub productivities: Vec<Rational>,
    pub evidence_prob: Rational,
}

impl Default for Example1Params {
    fn default() -> Self {
        Self { grid_step: rat(1, 4), productivities: vec![rat(-1, 2), rat(1, 2)], evidence_prob: rat(1, 2) }
    }
}

/// The action grid `{-2, -2 + step, ..., 2}`.
pub fn example1_action_grid(step: &Rational) -> Result<Vec<Rational>, ScenarioError> {
    let steps = Rational::from_integer(4.into()) / step;
    if !step.is_positive() || !steps.is_integer() {
        return Err(ScenarioError::GridStep(format_rational(step)));
    }
    let n: usize = steps.to_integer().try_into().map_err(|_| ScenarioError::GridStep(format_rational(step)))?;
    Ok((0..=n).map(|k| int(-2) + step * Rational::from_integer(BigInt::from(k))).collect())
}

/// Agent payoff in the investment game: `x*a + (1-x)*(a/2 if a < 0 else a)`.
pub fn example1_agent_utility(action: &Rational, invest: bool) -> Rational {
    if invest || !action.is_negative() {
        action.clone()
    } else {
        action / int(2)
    }
}

/// Principal payoff in the investment game: `theta*(1+x)*a - a^2/2`.
pub fn example1_principal_utility(theta: &Rational, action: &Rational, invest: bool) -> Rational {
    let boost = if invest { int(2) } else { int(1) };
    theta * boost * action - action * action / int(2)
}

/// Dye-evidence investment game. Types are productivity x {has evidence,
/// no evidence}; evidence types can send their own certificate or the empty
/// message, the rest only the empty message. Hidden action: invest (`x1`)
/// or not (`x0`). Messages are ordered certificates first, empty message last.
pub fn build_example1(params: &Example1Params) -> Result<Game, ScenarioError> {
    let grid = example1_action_grid(&params.grid_step)?;
    let thetas = &params.productivities;
    let distinct: std::collections::BTreeSet<_> = thetas.iter().collect();
    if thetas.is_empty() || distinct.len() != thetas.len() {
        return Err(ScenarioError::Productivities);
    }
    for theta in thetas {
        if *theta < int(-1) || *theta > int(1) {
            return Err(ScenarioError::OutOfRange {
                name: "productivity",
                value: format_rational(theta),
                range: "[-1, 1]",
            });
        }
    }
    let p = &params.evidence_prob;
    if p.is_negative() || *p > Rational::one() {
        return Err(ScenarioError::OutOfRange { name: "evidence_prob", value: format_rational(p), range: "[0, 1]" });
    }

    let share = Rational::new(BigInt::one(), BigInt::from(thetas.len()));
    let empty = thetas.len();
    let mut messages: Vec<String> = thetas.iter().map(|t| format!("cert({})", format_rational(t))).collect();
    messages.push("none".into());

    let mut types = Vec::new();
    let mut agent_payoff = Vec::new();
    let mut principal_payoff = Vec::new();
    for (i, theta) in thetas.iter().enumerate() {
        for has_evidence in [true, false] {
            let (tag, prior, evidence) = if has_evidence {
                ("e1", &share * p, vec![i, empty])
            } else {
                ("e0", &share * (Rational::one() - p), vec![empty])
            };
            types.push(AgentType { id: format!("({},{tag})", format_rational(theta)), prior, evidence });
            agent_payoff.push(
                [false, true].iter().map(|&x| grid.iter().map(|a| example1_agent_utility(a, x)).collect()).collect(),
            );
            principal_payoff.push(
                [false, true]
                    .iter()
                    .map(|&x| grid.iter().map(|a| example1_principal_utility(theta, a, x)).collect())
                    .collect(),
            );
        }
    }

    Ok(Game {
        types,
        messages,
        hidden_actions: vec!["x0".into(), "x1".into()],
        actions: grid.iter().map(format_rational).collect(),
        agent_payoff,
        principal_payoff,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomGameParams {
    pub seed: u64,
    pub types: usize,
    pub messages: usize,
    pub actions: usize,
    pub common_interest: bool,
}

/// Seeded random game with a single hidden action. Payoffs are `k/4` for
/// `k` in `-8..=8`; priors are positive integer weights normalised exactly;
/// evidence sets are uniformly random nonempty subsets of the messages.
pub fn random_game(params: &RandomGameParams) -> Result<Game, ScenarioError> {
    for (name, value) in [("types", params.types), ("messages", params.messages), ("actions", params.actions)] {
        if value == 0 {
            return Err(ScenarioError::Dimension(name));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let quarter = |rng: &mut ChaCha8Rng| rat(rng.gen_range(-8..=8), 4);

    let weights: Vec<i64> = (0..params.types).map(|_| rng.gen_range(1..=8)).collect();
    let total: i64 = weights.iter().sum();
    let mut types = Vec::with_capacity(params.types);
    for (t, w) in weights.iter().enumerate() {
        let mask = rng.gen_range(1u64..(1u64 << params.messages));
        let evidence = (0..params.messages).filter(|m| mask & (1 << m) != 0).collect();
        types.push(AgentType { id: format!("t{}", t + 1), prior: rat(*w, total), evidence });
    }
    let agent: Vec<Vec<Vec<Rational>>> =
        (0..params.types).map(|_| vec![(0..params.actions).map(|_| quarter(&mut rng)).collect()]).collect();
    let principal = if params.common_interest {
        agent.clone()
    } else {
        (0..params.types).map(|_| vec![(0..params.actions).map(|_| quarter(&mut rng)).collect()]).collect()
    };

    Ok(Game {
        types,
        messages: (1..=params.messages).map(|m| format!("m{m}")).collect(),
        hidden_actions: vec!["x0".into()],
        actions: (1..=params.actions).map(|a| format!("a{a}")).collect(),
        agent_payoff: agent,
        principal_payoff: principal,
    })
}

/// Every entry of both tensors equal to `value`.
pub fn constant_game(template: &Game, value: &Rational) -> Game {
    let mut g = template.clone();
    for tensor in [&mut g.agent_payoff, &mut g.principal_payoff] {
        for v in tensor.iter_mut().flatten().flatten() {
            *v = value.clone();
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example2_payoffs() {
        let g = build_example2(&rat(3, 10), &rat(2, 5)).unwrap();
        assert_eq!(g.agent_payoff[1][0], vec![int(0), rat(7, 10), int(1)]);
        assert_eq!(g.principal_payoff[1][0], vec![int(1), rat(-1, 10), int(-1)]);
        assert_eq!(g.principal_payoff[0][0], vec![int(2), int(4), int(5)]);
        assert_eq!(g.principal_payoff[0][0][2], int(5));
        assert_eq!(g.principal_payoff[1][0][0], int(1));
        assert_eq!(g.types[1].prior, rat(3, 5));
    }

    #[test]
    fn example2_matches_weight_plus_bonus_identity() {
        let eps = rat(31, 100);
        let g = build_example2(&eps, &rat(1, 3)).unwrap();
        let weight = [int(1), int(-3)];
        let bonus = [int(1), int(2), int(2)];
        for t in 0..2 {
            for a in 0..3 {
                assert_eq!(g.principal_payoff[t][0][a], &weight[t] * &g.agent_payoff[t][0][a] + &bonus[a]);
            }
        }
    }

    #[test]
    fn example2_range_checks() {
        assert!(build_example2(&int(0), &rat(1, 2)).is_err());
        assert!(build_example2(&rat(1, 2), &int(1)).is_err());
    }

    #[test]
    fn example1_utilities() {
        assert_eq!(example1_agent_utility(&int(-2), false), int(-1));
        assert_eq!(example1_principal_utility(&rat(1, 2), &int(1), true), rat(1, 2));
        assert_eq!(example1_agent_utility(&int(0), false), int(0));
        assert_eq!(example1_agent_utility(&int(0), true), int(0));
    }

    #[test]
    fn example1_structure() {
        let g = build_example1(&Example1Params::default()).unwrap();
        assert!(g.validate().is_empty());
        assert_eq!(g.num_actions(), 17);
        assert_eq!(g.num_types(), 4);
        assert_eq!(g.messages, vec!["cert(-1/2)", "cert(1/2)", "none"]);
        assert_eq!(g.types[0].evidence, vec![0, 2]);
        assert_eq!(g.types[1].evidence, vec![2]);
        assert!(g.types.iter().all(|t| t.prior == rat(1, 4)));
    }

    #[test]
    fn example1_indirect_utility_is_increasing() {
        let grid = example1_action_grid(&rat(1, 4)).unwrap();
        let indirect: Vec<Rational> = grid
            .iter()
            .map(|a| std::cmp::max(example1_agent_utility(a, false), example1_agent_utility(a, true)))
            .collect();
        for (a, u) in grid.iter().zip(&indirect) {
            let expected = if a.is_negative() { a / int(2) } else { a.clone() };
            assert_eq!(*u, expected);
        }
        assert!(indirect.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn example1_rejects_bad_grid() {
        let params = Example1Params { grid_step: rat(3, 10), ..Default::default() };
        assert!(matches!(build_example1(&params), Err(ScenarioError::GridStep(_))));
        assert_eq!(example1_action_grid(&int(1)).unwrap().len(), 5);
    }

    #[test]
    fn random_games_are_deterministic_and_valid() {
        let params = RandomGameParams { seed: 11, types: 3, messages: 3, actions: 3, common_interest: false };
        let a = random_game(&params).unwrap();
        let b = random_game(&params).unwrap();
        assert_eq!(a, b);
        assert!(a.validate().is_empty());
        for v in a.agent_payoff.iter().flatten().flatten() {
            assert!(*v >= int(-2) && *v <= int(2));
            assert!((v * int(4)).is_integer());
        }
    }

    #[test]
    fn common_interest_copies_agent_payoffs() {
        let params = RandomGameParams { seed: 3, types: 2, messages: 2, actions: 4, common_interest: true };
        let g = random_game(&params).unwrap();
        assert_eq!(g.agent_payoff, g.principal_payoff);
    }

    #[test]
    fn random_game_rejects_zero_dims() {
        let params = RandomGameParams { seed: 0, types: 0, messages: 1, actions: 1, common_interest: false };
        assert_eq!(random_game(&params), Err(ScenarioError::Dimension("types")));
    }
}
