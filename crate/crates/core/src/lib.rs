//! Exact analysis of the value of commitment in finite principal-agent games.
//!
//! The principal commits to a [`Mechanism`] (a lottery over its actions for
//! every message); each agent type answers with a best reply. The crate
//! computes the commitment value `V*`, the best value the principal can
//! reach without commitment (an equilibrium in which it best-replies to the
//! agent), their gap, and three sufficient conditions for the gap to vanish:
//! alignment, continuity of the value function and stable preferred
//! strategies. All arithmetic is exact over rationals.

pub mod cli;
mod combinatorics;
pub mod commitment;
pub mod diagnostics;
pub mod equilibrium;
pub mod format;
pub mod game;
pub mod lp;
pub mod polytope;
pub mod rational;
pub mod report;
pub mod response;
pub mod scenarios;

pub use commitment::{commitment_lp, solve_commitment, CommitmentSolution, ProfileOutcome};
pub use diagnostics::{diagnose, DiagnoseOptions, DiagnosticsReport, StablePreferred};
pub use equilibrium::{
    best_equilibrium, commitment_gap, verify_equilibrium, EquilibriumSolution, GapReport, SearchMode, Verdict,
};
pub use format::{load_game, parse_game, save_game, GameFileError};
pub use game::{AgentStrategy, AgentType, Game, Mechanism, PureProfile, Reply, Violation};
pub use lp::{lp_solve, LinearProgram, LpOutcome, Polytope, Relation};
pub use polytope::enumerate_vertices;
pub use rational::{parse_rational, Rational};
pub use response::{agent_payoff, best_reply_sets, preferred_value, principal_value};
