//! JSON game files.
//!
//! ```json
//! { "types": [{"id": "t1", "prior": "2/5", "evidence": ["m1"]}],
//!   "messages": ["m1", "m2"], "hidden_actions": ["x0"], "actions": ["a1", "a2"],
//!   "agent_payoff": {"t1": {"x0": {"a1": "1", "a2": "2"}}},
//!   "principal_payoff": {"t1": {"x0": {"a1": "0", "a2": "-1/2"}}} }
//! ```
//!
//! Rationals are `"p/q"` strings; plain JSON integers are accepted too.
//! `hidden_actions` defaults to `["x0"]`. Unknown fields are rejected.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::game::{AgentType, Game, PayoffTensor, Violation};
use crate::rational::{format_rational, parse_rational, Rational, RationalParseError};

#[derive(Debug, thiserror::Error)]
pub enum GameFileError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{field}: {reason}")]
    Field { field: String, reason: String },
    #[error("invalid game: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

impl GameFileError {
    fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::Field { field: field.into(), reason: reason.into() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum RationalText {
    Int(i64),
    Text(String),
}

impl RationalText {
    fn parse(&self, field: &str) -> Result<Rational, GameFileError> {
        match self {
            RationalText::Int(i) => Ok(crate::rational::int(*i)),
            RationalText::Text(s) => {
                parse_rational(s).map_err(|e: RationalParseError| GameFileError::field(field, e.to_string()))
            }
        }
    }
}

type PayoffDoc = IndexMap<String, IndexMap<String, IndexMap<String, RationalText>>>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TypeDoc {
    id: String,
    prior: RationalText,
    evidence: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameDoc {
    types: Vec<TypeDoc>,
    messages: Vec<String>,
    #[serde(default = "default_hidden")]
    hidden_actions: Vec<String>,
    actions: Vec<String>,
    agent_payoff: PayoffDoc,
    principal_payoff: PayoffDoc,
}

fn default_hidden() -> Vec<String> {
    vec!["x0".into()]
}

/// Parses a game file without checking the semantic invariants (priors,
/// evidence sets). Use [`load_game`] to also validate.
pub fn parse_game(text: &str) -> Result<Game, GameFileError> {
    let doc: GameDoc = serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        let message = full.strip_suffix(&suffix).unwrap_or(&full).to_string();
        GameFileError::Syntax { line: e.line(), column: e.column(), message }
    })?;

    let mut types = Vec::with_capacity(doc.types.len());
    for t in &doc.types {
        let prior = t.prior.parse(&format!("types.{}.prior", t.id))?;
        let mut evidence = Vec::with_capacity(t.evidence.len());
        for m in &t.evidence {
            let idx = doc.messages.iter().position(|x| x == m).ok_or_else(|| {
                GameFileError::field(format!("types.{}.evidence", t.id), format!("unknown message `{m}`"))
            })?;
            evidence.push(idx);
        }
        evidence.sort_unstable();
        types.push(AgentType { id: t.id.clone(), prior, evidence });
    }

    let agent_payoff = payoff_tensor("agent_payoff", &doc.agent_payoff, &doc)?;
    let principal_payoff = payoff_tensor("principal_payoff", &doc.principal_payoff, &doc)?;

    Ok(Game {
        types,
        messages: doc.messages,
        hidden_actions: doc.hidden_actions,
        actions: doc.actions,
        agent_payoff,
        principal_payoff,
    })
}

fn payoff_tensor(name: &str, payoffs: &PayoffDoc, doc: &GameDoc) -> Result<PayoffTensor, GameFileError> {
    for key in payoffs.keys() {
        if !doc.types.iter().any(|t| &t.id == key) {
            return Err(GameFileError::field(format!("{name}.{key}"), "unknown type"));
        }
    }
    let mut tensor = Vec::with_capacity(doc.types.len());
    for t in &doc.types {
        let by_hidden = payoffs
            .get(&t.id)
            .ok_or_else(|| GameFileError::field(format!("{name}.{}", t.id), "missing payoffs for type"))?;
        for key in by_hidden.keys() {
            if !doc.hidden_actions.contains(key) {
                return Err(GameFileError::field(format!("{name}.{}.{key}", t.id), "unknown hidden action"));
            }
        }
        let mut rows = Vec::with_capacity(doc.hidden_actions.len());
        for x in &doc.hidden_actions {
            let by_action = by_hidden.get(x).ok_or_else(|| {
                GameFileError::field(format!("{name}.{}.{x}", t.id), "missing payoffs for hidden action")
            })?;
            for key in by_action.keys() {
                if !doc.actions.contains(key) {
                    return Err(GameFileError::field(format!("{name}.{}.{x}.{key}", t.id), "unknown action"));
                }
            }
            let mut row = Vec::with_capacity(doc.actions.len());
            for a in &doc.actions {
                let field = format!("{name}.{}.{x}.{a}", t.id);
                let value = by_action.get(a).ok_or_else(|| GameFileError::field(&field, "missing payoff"))?;
                row.push(value.parse(&field)?);
            }
            rows.push(row);
        }
        tensor.push(rows);
    }
    Ok(tensor)
}

/// Parses and validates.
pub fn load_game(text: &str) -> Result<Game, GameFileError> {
    let game = parse_game(text)?;
    let violations = game.validate();
    if violations.is_empty() {
        Ok(game)
    } else {
        Err(GameFileError::Invalid(violations))
    }
}

/// Pretty-printed JSON; `load_game(&save_game(g)) == g` for valid games.
pub fn save_game(game: &Game) -> String {
    let payoffs = |tensor: &PayoffTensor| -> PayoffDoc {
        game.types
            .iter()
            .zip(tensor)
            .map(|(t, by_hidden)| {
                let inner = game
                    .hidden_actions
                    .iter()
                    .zip(by_hidden)
                    .map(|(x, row)| {
                        let cells = game
                            .actions
                            .iter()
                            .zip(row)
                            .map(|(a, v)| (a.clone(), RationalText::Text(format_rational(v))))
                            .collect();
                        (x.clone(), cells)
                    })
                    .collect();
                (t.id.clone(), inner)
            })
            .collect()
    };
    let doc = GameDoc {
        types: game
            .types
            .iter()
            .map(|t| TypeDoc {
                id: t.id.clone(),
                prior: RationalText::Text(format_rational(&t.prior)),
                evidence: t.evidence.iter().map(|&m| game.messages[m].clone()).collect(),
            })
            .collect(),
        messages: game.messages.clone(),
        hidden_actions: game.hidden_actions.clone(),
        actions: game.actions.clone(),
        agent_payoff: payoffs(&game.agent_payoff),
        principal_payoff: payoffs(&game.principal_payoff),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("game document serializes");
    text.push('\n');
    text
}
