//! Machine-readable report. Keys appear in a fixed order, rationals are
//! exact strings, and parts a command did not compute are `null`.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::commitment::CommitmentSolution;
use crate::diagnostics::{DiagnosticsReport, Direction, StablePreferred};
use crate::equilibrium::{EquilibriumSolution, GapReport};
use crate::game::{AgentStrategy, Game, Mechanism, PureProfile, Reply};
use crate::rational::format_rational;

pub type MechanismJson = IndexMap<String, IndexMap<String, String>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplyJson {
    pub message: String,
    pub hidden: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedReplyJson {
    pub message: String,
    pub hidden: String,
    pub prob: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableJson {
    pub holds: bool,
    /// False when the sampled fallback produced the verdict.
    pub exact: bool,
    pub witness_direction: Option<MechanismJson>,
    pub witness_pattern: Option<IndexMap<String, Vec<ReplyJson>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuityJson {
    pub radius: String,
    pub max_deviation: String,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitmentWitness {
    pub mechanism: MechanismJson,
    pub profile: IndexMap<String, ReplyJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquilibriumWitness {
    pub mechanism: MechanismJson,
    pub strategy: IndexMap<String, Vec<WeightedReplyJson>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witnesses {
    pub commitment: Option<CommitmentWitness>,
    pub equilibrium: Option<EquilibriumWitness>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub v_star: Option<String>,
    pub best_equilibrium: Option<String>,
    pub gap: Option<String>,
    pub verdict: Option<String>,
    pub aligned: Option<bool>,
    pub stable_preferred: Option<StableJson>,
    pub continuity: Option<Vec<ContinuityJson>>,
    pub complete: Option<bool>,
    pub mode: Option<String>,
    pub witnesses: Witnesses,
    pub implication_violations: Option<Vec<String>>,
}

fn mechanism_json(game: &Game, rows: &[Vec<crate::rational::Rational>]) -> MechanismJson {
    game.messages
        .iter()
        .zip(rows)
        .map(|(m, row)| {
            let row = game.actions.iter().zip(row).map(|(a, p)| (a.clone(), format_rational(p))).collect();
            (m.clone(), row)
        })
        .collect()
}

fn reply_json(game: &Game, reply: Reply) -> ReplyJson {
    ReplyJson { message: game.messages[reply.message].clone(), hidden: game.hidden_actions[reply.hidden].clone() }
}

fn profile_json(game: &Game, profile: &PureProfile) -> IndexMap<String, ReplyJson> {
    game.types.iter().zip(&profile.0).map(|(t, &r)| (t.id.clone(), reply_json(game, r))).collect()
}

fn strategy_json(game: &Game, strategy: &AgentStrategy) -> IndexMap<String, Vec<WeightedReplyJson>> {
    (0..game.num_types())
        .map(|t| {
            let replies = strategy
                .support(t)
                .into_iter()
                .map(|r| {
                    let ReplyJson { message, hidden } = reply_json(game, r);
                    WeightedReplyJson { message, hidden, prob: format_rational(strategy.prob(t, r)) }
                })
                .collect();
            (game.types[t].id.clone(), replies)
        })
        .collect()
}

fn commitment_witness(game: &Game, solution: &CommitmentSolution) -> CommitmentWitness {
    CommitmentWitness {
        mechanism: mechanism_json(game, &solution.mech_star.rows),
        profile: profile_json(game, &solution.profile_star),
    }
}

fn equilibrium_witness(game: &Game, mechanism: &Mechanism, strategy: &AgentStrategy) -> EquilibriumWitness {
    EquilibriumWitness { mechanism: mechanism_json(game, &mechanism.rows), strategy: strategy_json(game, strategy) }
}

fn direction_json(game: &Game, direction: &Direction) -> MechanismJson {
    mechanism_json(game, &direction.rows)
}

impl Report {
    pub fn from_commitment(game: &Game, solution: &CommitmentSolution) -> Self {
        Report {
            v_star: Some(format_rational(&solution.v_star)),
            witnesses: Witnesses { commitment: Some(commitment_witness(game, solution)), equilibrium: None },
            ..Default::default()
        }
    }

    pub fn from_equilibrium(game: &Game, solution: &EquilibriumSolution) -> Self {
        Report {
            best_equilibrium: Some(format_rational(&solution.best_value)),
            complete: Some(solution.complete),
            mode: Some(solution.mode.to_string()),
            witnesses: Witnesses {
                commitment: None,
                equilibrium: Some(equilibrium_witness(game, &solution.mechanism, &solution.strategy)),
            },
            ..Default::default()
        }
    }

    pub fn from_gap(game: &Game, gap: &GapReport) -> Self {
        Report {
            v_star: Some(format_rational(&gap.v_star)),
            best_equilibrium: Some(format_rational(&gap.best_equilibrium_value)),
            gap: Some(format_rational(&gap.gap)),
            verdict: Some(gap.verdict.as_str().to_string()),
            complete: Some(gap.complete()),
            mode: Some(gap.equilibrium.mode.to_string()),
            witnesses: Witnesses {
                commitment: Some(commitment_witness(game, &gap.commitment)),
                equilibrium: Some(equilibrium_witness(game, &gap.equilibrium.mechanism, &gap.equilibrium.strategy)),
            },
            ..Default::default()
        }
    }

    pub fn from_diagnostics(game: &Game, report: &DiagnosticsReport) -> Self {
        let stable = match &report.stable_preferred {
            StablePreferred::Holds => {
                StableJson { holds: true, exact: report.stable_exact, witness_direction: None, witness_pattern: None }
            }
            StablePreferred::Fails(failure) => StableJson {
                holds: false,
                exact: report.stable_exact,
                witness_direction: Some(direction_json(game, &failure.direction)),
                witness_pattern: Some(
                    game.types
                        .iter()
                        .zip(&failure.pattern)
                        .map(|(t, set)| (t.id.clone(), set.iter().map(|&r| reply_json(game, r)).collect()))
                        .collect(),
                ),
            },
        };
        Report {
            aligned: Some(report.alignment.aligned),
            stable_preferred: Some(stable),
            continuity: Some(
                report
                    .continuity
                    .iter()
                    .map(|row| ContinuityJson {
                        radius: format_rational(&row.radius),
                        max_deviation: format_rational(&row.max_deviation),
                        samples: row.samples,
                    })
                    .collect(),
            ),
            implication_violations: Some(report.implication_violations.clone()),
            ..Report::from_gap(game, &report.gap)
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn emit_report(report: &Report) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}
