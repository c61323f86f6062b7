//! Finite principal-agent games with evidence.
//!
//! The agent has a private type, picks a message it can back with evidence
//! and a hidden action; the principal maps each message to a lottery over its
//! own actions. Payoff tensors are indexed `[type][hidden action][action]`.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{format_rational, sum, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentType {
    pub id: String,
    pub prior: Rational,
    /// Indices into [`Game::messages`] this type can send, ascending.
    pub evidence: Vec<usize>,
}

/// Payoff tensor indexed `[type][hidden][action]`.
pub type PayoffTensor = Vec<Vec<Vec<Rational>>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    pub types: Vec<AgentType>,
    pub messages: Vec<String>,
    pub hidden_actions: Vec<String>,
    pub actions: Vec<String>,
    pub agent_payoff: PayoffTensor,
    pub principal_payoff: PayoffTensor,
}

/// One agent choice: a message together with a hidden action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Reply {
    pub message: usize,
    pub hidden: usize,
}

impl Reply {
    pub fn new(message: usize, hidden: usize) -> Self {
        Self { message, hidden }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub reason: String,
}

impl Violation {
    fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self { field: field.into(), reason: reason.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.reason)
    }
}

impl Game {
    pub fn num_types(&self) -> usize {
        self.types.len()
    }

    pub fn num_messages(&self) -> usize {
        self.messages.len()
    }

    pub fn num_hidden(&self) -> usize {
        self.hidden_actions.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn prior(&self, ty: usize) -> &Rational {
        &self.types[ty].prior
    }

    pub fn can_send(&self, ty: usize, message: usize) -> bool {
        self.types[ty].evidence.contains(&message)
    }

    /// Evidence-feasible replies of `ty`, ordered by (message, hidden action).
    pub fn feasible_replies(&self, ty: usize) -> Vec<Reply> {
        self.types[ty].evidence.iter().flat_map(|&m| (0..self.num_hidden()).map(move |x| Reply::new(m, x))).collect()
    }

    pub fn agent_utility(&self, ty: usize, hidden: usize, action: usize) -> &Rational {
        &self.agent_payoff[ty][hidden][action]
    }

    pub fn principal_utility(&self, ty: usize, hidden: usize, action: usize) -> &Rational {
        &self.principal_payoff[ty][hidden][action]
    }

    pub fn type_index(&self, id: &str) -> Option<usize> {
        self.types.iter().position(|t| t.id == id)
    }

    pub fn message_index(&self, id: &str) -> Option<usize> {
        self.messages.iter().position(|m| m == id)
    }

    /// Checks every structural invariant; an empty list means the game is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.types.is_empty() {
            out.push(Violation::new("types", "no agent types"));
        }
        if self.messages.is_empty() {
            out.push(Violation::new("messages", "no messages"));
        }
        if self.hidden_actions.is_empty() {
            out.push(Violation::new("hidden_actions", "no hidden actions"));
        }
        if self.actions.is_empty() {
            out.push(Violation::new("actions", "no principal actions"));
        }
        check_unique(&mut out, "types", self.types.iter().map(|t| t.id.as_str()));
        check_unique(&mut out, "messages", self.messages.iter().map(String::as_str));
        check_unique(&mut out, "hidden_actions", self.hidden_actions.iter().map(String::as_str));
        check_unique(&mut out, "actions", self.actions.iter().map(String::as_str));

        for t in &self.types {
            if t.prior.is_negative() {
                out.push(Violation::new(
                    format!("types.{}.prior", t.id),
                    format!("negative prior {}", format_rational(&t.prior)),
                ));
            }
            if t.evidence.is_empty() {
                out.push(Violation::new(format!("types.{}.evidence", t.id), "empty evidence set"));
            }
            for &m in &t.evidence {
                if m >= self.num_messages() {
                    out.push(Violation::new(
                        format!("types.{}.evidence", t.id),
                        format!("message index {m} is not a declared message"),
                    ));
                }
            }
            if t.evidence.windows(2).any(|w| w[0] >= w[1]) {
                out.push(Violation::new(
                    format!("types.{}.evidence", t.id),
                    "evidence must list distinct messages in declaration order",
                ));
            }
        }
        if !self.types.is_empty() {
            let total = sum(self.types.iter().map(|t| &t.prior));
            if !total.is_one() {
                out.push(Violation::new("prior", format!("prior sums to {}", format_rational(&total))));
            }
        }

        for (name, tensor) in [("agent_payoff", &self.agent_payoff), ("principal_payoff", &self.principal_payoff)] {
            if tensor.len() != self.num_types() {
                out.push(Violation::new(
                    name,
                    format!("has {} type entries, expected {}", tensor.len(), self.num_types()),
                ));
                continue;
            }
            for (ty, by_hidden) in tensor.iter().enumerate() {
                let id = &self.types[ty].id;
                if by_hidden.len() != self.num_hidden() {
                    out.push(Violation::new(
                        format!("{name}.{id}"),
                        format!("has {} hidden-action entries, expected {}", by_hidden.len(), self.num_hidden()),
                    ));
                    continue;
                }
                for (x, row) in by_hidden.iter().enumerate() {
                    if row.len() != self.num_actions() {
                        out.push(Violation::new(
                            format!("{name}.{id}.{}", self.hidden_actions[x]),
                            format!("has {} action entries, expected {}", row.len(), self.num_actions()),
                        ));
                    }
                }
            }
        }
        out
    }

    /// Every evidence-feasible pure agent profile, in lexicographic order of
    /// per-type reply indices (first type varies slowest).
    pub fn pure_profiles(&self) -> PureProfiles {
        let options: Vec<Vec<Reply>> = (0..self.num_types()).map(|t| self.feasible_replies(t)).collect();
        PureProfiles::new(options)
    }

    pub fn pure_profile_count(&self) -> u128 {
        (0..self.num_types()).map(|t| (self.types[t].evidence.len() * self.num_hidden()) as u128).product()
    }
}

fn check_unique<'a>(out: &mut Vec<Violation>, field: &str, ids: impl Iterator<Item = &'a str>) {
    let mut seen = std::collections::HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            out.push(Violation::new(field, format!("duplicate id `{id}`")));
        }
    }
}

/// Iterator over pure profiles; see [`Game::pure_profiles`].
pub struct PureProfiles {
    options: Vec<Vec<Reply>>,
    cursor: Option<Vec<usize>>,
}

impl PureProfiles {
    fn new(options: Vec<Vec<Reply>>) -> Self {
        let cursor = if options.iter().all(|o| !o.is_empty()) { Some(vec![0; options.len()]) } else { None };
        Self { options, cursor }
    }
}

impl Iterator for PureProfiles {
    type Item = PureProfile;

    fn next(&mut self) -> Option<PureProfile> {
        let cursor = self.cursor.as_mut()?;
        let profile = PureProfile(cursor.iter().zip(&self.options).map(|(&i, o)| o[i]).collect());
        let mut i = cursor.len();
        loop {
            if i == 0 {
                self.cursor = None;
                break;
            }
            i -= 1;
            cursor[i] += 1;
            if cursor[i] < self.options[i].len() {
                break;
            }
            cursor[i] = 0;
        }
        Some(profile)
    }
}

/// One reply per type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PureProfile(pub Vec<Reply>);

impl PureProfile {
    pub fn reply(&self, ty: usize) -> Reply {
        self.0[ty]
    }

    pub fn is_feasible(&self, game: &Game) -> bool {
        self.0.len() == game.num_types()
            && self.0.iter().enumerate().all(|(t, r)| game.can_send(t, r.message) && r.hidden < game.num_hidden())
    }

    pub fn to_strategy(&self, game: &Game) -> AgentStrategy {
        let mut s = AgentStrategy::zeros(game);
        for (t, r) in self.0.iter().enumerate() {
            s.probs[t][r.message][r.hidden] = Rational::one();
        }
        s
    }
}

/// A lottery over principal actions for every message.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mechanism {
    /// `rows[message][action]`.
    pub rows: Vec<Vec<Rational>>,
}

impl Mechanism {
    pub fn new(rows: Vec<Vec<Rational>>) -> Self {
        Self { rows }
    }

    /// Every message mapped to `action` with certainty.
    pub fn constant(game: &Game, action: usize) -> Self {
        Self::deterministic(game, &vec![action; game.num_messages()])
    }

    pub fn deterministic(game: &Game, actions: &[usize]) -> Self {
        let rows = actions
            .iter()
            .map(|&a| {
                let mut row = vec![Rational::zero(); game.num_actions()];
                row[a] = Rational::one();
                row
            })
            .collect();
        Self { rows }
    }

    pub fn uniform(game: &Game) -> Self {
        let p = Rational::new(1.into(), (game.num_actions() as i64).into());
        Self { rows: vec![vec![p; game.num_actions()]; game.num_messages()] }
    }

    pub fn prob(&self, message: usize, action: usize) -> &Rational {
        &self.rows[message][action]
    }

    pub fn check(&self, game: &Game) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.rows.len() != game.num_messages() {
            out.push(Violation::new(
                "mechanism",
                format!("has {} rows, expected {}", self.rows.len(), game.num_messages()),
            ));
            return out;
        }
        for (m, row) in self.rows.iter().enumerate() {
            let field = format!("mechanism.{}", game.messages[m]);
            if row.len() != game.num_actions() {
                out.push(Violation::new(field, "wrong number of actions"));
                continue;
            }
            if row.iter().any(Signed::is_negative) {
                out.push(Violation::new(field.clone(), "negative probability"));
            }
            let total = sum(row);
            if !total.is_one() {
                out.push(Violation::new(field, format!("row sums to {}", format_rational(&total))));
            }
        }
        out
    }

    /// Max-norm distance between two mechanisms of equal shape.
    pub fn distance(&self, other: &Mechanism) -> Rational {
        crate::rational::max_abs(
            self.rows
                .iter()
                .zip(&other.rows)
                .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y))
                .collect::<Vec<_>>()
                .iter(),
        )
    }
}

/// Mixed agent strategy, `probs[type][message][hidden]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentStrategy {
    pub probs: Vec<Vec<Vec<Rational>>>,
}

impl AgentStrategy {
    pub fn zeros(game: &Game) -> Self {
        Self { probs: vec![vec![vec![Rational::zero(); game.num_hidden()]; game.num_messages()]; game.num_types()] }
    }

    pub fn prob(&self, ty: usize, reply: Reply) -> &Rational {
        &self.probs[ty][reply.message][reply.hidden]
    }

    /// Replies played with positive probability by `ty`.
    pub fn support(&self, ty: usize) -> Vec<Reply> {
        let mut out = Vec::new();
        for (m, by_hidden) in self.probs[ty].iter().enumerate() {
            for (x, p) in by_hidden.iter().enumerate() {
                if p.is_positive() {
                    out.push(Reply::new(m, x));
                }
            }
        }
        out
    }

    pub fn check(&self, game: &Game) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.probs.len() != game.num_types() {
            out.push(Violation::new("strategy", "wrong number of types"));
            return out;
        }
        for (t, by_message) in self.probs.iter().enumerate() {
            let field = format!("strategy.{}", game.types[t].id);
            if by_message.len() != game.num_messages() || by_message.iter().any(|r| r.len() != game.num_hidden()) {
                out.push(Violation::new(field, "wrong shape"));
                continue;
            }
            let mut total = Rational::zero();
            for (m, by_hidden) in by_message.iter().enumerate() {
                for p in by_hidden {
                    if p.is_negative() {
                        out.push(Violation::new(field.clone(), "negative probability"));
                    }
                    if p.is_positive() && !game.can_send(t, m) {
                        out.push(Violation::new(field.clone(), format!("sends {} without evidence", game.messages[m])));
                    }
                    total += p;
                }
            }
            if !total.is_one() {
                out.push(Violation::new(field, format!("sums to {}", format_rational(&total))));
            }
        }
        out
    }
}
