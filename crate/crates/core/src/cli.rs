//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 internal invariant violation,
//! 4 equilibrium budget exceeded without `--allow-incomplete`.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::commitment::solve_commitment;
use crate::diagnostics::{
    diagnose, DiagnoseOptions, DiagnosticsReport, SampledVerdict, StablePreferred, DEFAULT_PATTERN_BUDGET,
};
use crate::equilibrium::{
    best_equilibrium_bounded, full_support_count, gap_report, verify_equilibrium, EquilibriumSolution, GapReport,
    SearchMode, DEFAULT_BUDGET,
};
use crate::format::{load_game, save_game};
use crate::game::{Game, Mechanism, Reply};
use crate::rational::{display_with_decimal, parse_rational, Rational};
use crate::report::{emit_report, Report};
use crate::response::preferred_value;
use crate::scenarios::{build_example1, build_example2, random_game, Example1Params, RandomGameParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "commitgap", version, about = "Exact value-of-commitment analysis for principal-agent games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a game file and print its dimensions.
    Validate {
        /// Game file, or `-` for stdin.
        file: PathBuf,
    },
    /// Commitment value and an optimal mechanism.
    Commitment {
        file: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Best equilibrium for the principal without commitment.
    Equilibrium {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Commitment value minus the best equilibrium value.
    Gap {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Alignment, continuity and stable-preferred checks at the commitment optimum, plus the gap.
    Diagnose {
        file: PathBuf,
        /// Comma-separated perturbation radii.
        #[arg(long, value_delimiter = ',', value_parser = rational_arg, default_value = "1/10,1/100,1/1000")]
        radii: Vec<Rational>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum number of best-reply refinement patterns for the exact stability test.
        #[arg(long, default_value_t = DEFAULT_PATTERN_BUDGET)]
        pattern_budget: u128,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print a bundled scenario as a game file.
    Demo {
        #[command(subcommand)]
        scenario: Demo,
    },
    /// Print a seeded random game.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        types: usize,
        #[arg(long)]
        messages: usize,
        #[arg(long)]
        actions: usize,
        /// Give the principal the agent's payoffs.
        #[arg(long)]
        common_interest: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Demo {
    /// Two types with partial evidence; commitment strictly helps.
    Example2 {
        #[arg(long, value_parser = rational_arg)]
        epsilon: Rational,
        #[arg(long, value_parser = rational_arg)]
        mu: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evidence with a hidden investment, on a discrete action grid.
    Example1 {
        #[arg(long, value_parser = rational_arg, default_value = "1/4")]
        grid_step: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = SearchMode::Auto)]
    pub mode: SearchMode,
    /// Maximum number of support profiles for the full search.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
    /// Accept a pure-strategy result when the full search is over budget.
    #[arg(long)]
    pub allow_incomplete: bool,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Also write the machine-readable report here.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

fn rational_arg(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Invariant(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => EXIT_INVALID,
            Failure::Invariant(_) => EXIT_INVARIANT,
            Failure::Budget(_) => EXIT_BUDGET,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Invariant(m) | Failure::Budget(m) => m,
        }
    }
}

type Outcome = Result<(), Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, stdin, stdout) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            let _ = writeln!(stderr, "error: {}", failure.message());
            failure.code()
        }
    }
}

fn execute(command: Command, stdin: &mut dyn Read, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Validate { file } => validate(&file, stdin, out),
        Command::Commitment { file, output } => {
            let game = read_game(&file, stdin)?;
            let solution = solve_commitment(&game);
            check_commitment(&game, &solution.mech_star, &solution.v_star)?;
            line(out, format!("v_star  {}", display_with_decimal(&solution.v_star)))?;
            line(out, format!("profiles solved  {}", solution.table.len()))?;
            write_mechanism(out, &game, "optimal mechanism", &solution.mech_star)?;
            let selection: Vec<String> = solution
                .profile_star
                .0
                .iter()
                .enumerate()
                .map(|(t, &r)| format!("{} -> {}", game.types[t].id, reply_label(&game, r)))
                .collect();
            line(out, format!("agent replies  {}", selection.join(", ")))?;
            write_json(&output, &Report::from_commitment(&game, &solution))
        }
        Command::Equilibrium { file, search, output } => {
            let game = read_game(&file, stdin)?;
            let v_star = solve_commitment(&game).v_star;
            let solution = equilibrium(&game, &search, &v_star)?;
            write_equilibrium(out, &game, &solution)?;
            write_json(&output, &Report::from_equilibrium(&game, &solution))
        }
        Command::Gap { file, search, output } => {
            let game = read_game(&file, stdin)?;
            let commitment = solve_commitment(&game);
            check_commitment(&game, &commitment.mech_star, &commitment.v_star)?;
            let eq = equilibrium(&game, &search, &commitment.v_star)?;
            let gap = gap_report(commitment, eq);
            write_gap(out, &game, &gap)?;
            write_json(&output, &Report::from_gap(&game, &gap))
        }
        Command::Diagnose { file, radii, samples, seed, pattern_budget, search, output } => {
            let game = read_game(&file, stdin)?;
            if radii.iter().any(|r| r < &Rational::from_integer(0.into())) {
                return Err(Failure::Invalid("radii must be non-negative".into()));
            }
            check_budget(&game, &search)?;
            let options =
                DiagnoseOptions { radii, samples, seed, mode: search.mode, budget: search.budget, pattern_budget };
            let report = diagnose(&game, &options).map_err(|e| Failure::Budget(e.to_string()))?;
            check_commitment(&game, &report.at_mech, &report.v_star)?;
            check_witness(&game, &report.gap.equilibrium)?;
            write_diagnostics(out, &game, &report)?;
            write_json(&output, &Report::from_diagnostics(&game, &report))?;
            if report.implication_violations.is_empty() {
                Ok(())
            } else {
                Err(Failure::Invariant(format!("implication violations: {}", report.implication_violations.join("; "))))
            }
        }
        Command::Demo { scenario } => {
            let (game, target) = match scenario {
                Demo::Example2 { epsilon, mu, out } => (build_example2(&epsilon, &mu), out),
                Demo::Example1 { grid_step, out } => {
                    (build_example1(&Example1Params { grid_step, ..Example1Params::default() }), out)
                }
            };
            let game = game.map_err(|e| Failure::Invalid(e.to_string()))?;
            emit_game(out, &game, target.as_deref())
        }
        Command::Random { seed, types, messages, actions, common_interest, out: target } => {
            let params = RandomGameParams { seed, types, messages, actions, common_interest };
            let game = random_game(&params).map_err(|e| Failure::Invalid(e.to_string()))?;
            emit_game(out, &game, target.as_deref())
        }
    }
}

fn io_failure(e: io::Error) -> Failure {
    Failure::Invalid(format!("i/o error: {e}"))
}

fn line(out: &mut dyn Write, text: String) -> Outcome {
    writeln!(out, "{text}").map_err(io_failure)
}

fn read_text(file: &Path, stdin: &mut dyn Read) -> Result<String, Failure> {
    if file == Path::new("-") {
        let mut text = String::new();
        stdin.read_to_string(&mut text).map_err(io_failure)?;
        Ok(text)
    } else {
        fs::read_to_string(file).map_err(|e| Failure::Invalid(format!("{}: {e}", file.display())))
    }
}

fn read_game(file: &Path, stdin: &mut dyn Read) -> Result<Game, Failure> {
    let text = read_text(file, stdin)?;
    load_game(&text).map_err(|e| Failure::Invalid(e.to_string()))
}

fn validate(file: &Path, stdin: &mut dyn Read, out: &mut dyn Write) -> Outcome {
    let text = read_text(file, stdin)?;
    match load_game(&text) {
        Ok(game) => line(
            out,
            format!(
                "valid: {} types, {} messages, {} hidden actions, {} actions, {} pure agent profiles",
                game.num_types(),
                game.num_messages(),
                game.num_hidden(),
                game.num_actions(),
                game.pure_profile_count()
            ),
        ),
        Err(crate::format::GameFileError::Invalid(violations)) => {
            for v in &violations {
                line(out, format!("violation: {v}"))?;
            }
            Err(Failure::Invalid(format!("{} violation(s)", violations.len())))
        }
        Err(e) => Err(Failure::Invalid(e.to_string())),
    }
}

fn emit_game(out: &mut dyn Write, game: &Game, target: Option<&Path>) -> Outcome {
    let text = save_game(game);
    match target {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(io_failure),
    }
}

fn write_json(output: &OutputArgs, report: &Report) -> Outcome {
    if let Some(path) = &output.json {
        fs::write(path, emit_report(report)).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn check_budget(game: &Game, search: &SearchArgs) -> Outcome {
    let count = full_support_count(game);
    if search.mode != SearchMode::Pure && count > search.budget && !search.allow_incomplete {
        return Err(Failure::Budget(format!(
            "full equilibrium search needs {count} support profiles, budget is {}; \
             raise --budget, use --mode pure or pass --allow-incomplete",
            search.budget
        )));
    }
    Ok(())
}

fn equilibrium(game: &Game, search: &SearchArgs, v_star: &Rational) -> Result<EquilibriumSolution, Failure> {
    check_budget(game, search)?;
    let solution = best_equilibrium_bounded(game, search.mode, search.budget, v_star)
        .map_err(|e| Failure::Budget(e.to_string()))?;
    check_witness(game, &solution)?;
    Ok(solution)
}

fn check_commitment(game: &Game, mech: &Mechanism, v_star: &Rational) -> Outcome {
    if !mech.check(game).is_empty() || preferred_value(game, mech).0 != *v_star {
        return Err(Failure::Invariant("commitment witness does not attain the reported value".into()));
    }
    Ok(())
}

fn check_witness(game: &Game, solution: &EquilibriumSolution) -> Outcome {
    if !verify_equilibrium(game, &solution.mechanism, &solution.strategy) {
        return Err(Failure::Invariant("equilibrium witness failed verification".into()));
    }
    Ok(())
}

fn reply_label(game: &Game, reply: Reply) -> String {
    if game.num_hidden() == 1 {
        game.messages[reply.message].clone()
    } else {
        format!("{}/{}", game.messages[reply.message], game.hidden_actions[reply.hidden])
    }
}

fn write_mechanism(out: &mut dyn Write, game: &Game, title: &str, mech: &Mechanism) -> Outcome {
    line(out, format!("{title}:"))?;
    for (m, row) in game.messages.iter().zip(&mech.rows) {
        let support: Vec<String> = game
            .actions
            .iter()
            .zip(row)
            .filter(|(_, p)| *p != &Rational::from_integer(0.into()))
            .map(|(a, p)| format!("{a}: {}", display_with_decimal(p)))
            .collect();
        line(out, format!("  {m}  {}", support.join(", ")))?;
    }
    Ok(())
}

fn write_equilibrium(out: &mut dyn Write, game: &Game, solution: &EquilibriumSolution) -> Outcome {
    line(out, format!("best equilibrium  {}", display_with_decimal(&solution.best_value)))?;
    line(
        out,
        format!(
            "search  {} ({}), {} support profiles in the full space",
            solution.mode,
            if solution.complete { "complete" } else { "incomplete" },
            solution.support_count
        ),
    )?;
    write_mechanism(out, game, "equilibrium mechanism", &solution.mechanism)?;
    line(out, "agent strategy:".into())?;
    for t in 0..game.num_types() {
        let parts: Vec<String> = solution
            .strategy
            .support(t)
            .into_iter()
            .map(|r| format!("{}: {}", reply_label(game, r), display_with_decimal(solution.strategy.prob(t, r))))
            .collect();
        line(out, format!("  {}  {}", game.types[t].id, parts.join(", ")))?;
    }
    Ok(())
}

fn write_gap(out: &mut dyn Write, game: &Game, gap: &GapReport) -> Outcome {
    line(out, format!("v_star  {}", display_with_decimal(&gap.v_star)))?;
    write_equilibrium(out, game, &gap.equilibrium)?;
    line(out, format!("gap  {}", display_with_decimal(&gap.gap)))?;
    line(out, format!("verdict  {}", gap.verdict))
}

fn write_diagnostics(out: &mut dyn Write, game: &Game, report: &DiagnosticsReport) -> Outcome {
    write_mechanism(out, game, "commitment optimum", &report.at_mech)?;
    line(out, format!("v_star  {}", display_with_decimal(&report.v_star)))?;
    line(out, format!("aligned  {}", report.alignment.aligned))?;
    for t in &report.alignment.per_type {
        let parts: Vec<String> = t
            .replies
            .iter()
            .map(|(r, c)| format!("{} -> {}", reply_label(game, *r), display_with_decimal(c)))
            .collect();
        line(out, format!("  {}  {}", game.types[t.ty].id, parts.join(", ")))?;
    }
    line(out, "continuity:".into())?;
    for row in &report.continuity {
        line(
            out,
            format!(
                "  radius {}  max deviation {}  ({} directions)",
                display_with_decimal(&row.radius),
                display_with_decimal(&row.max_deviation),
                row.samples
            ),
        )?;
    }
    let method = if report.stable_exact { "exact" } else { "sampled" };
    match &report.stable_preferred {
        StablePreferred::Holds => line(out, format!("stable preferred strategies  hold ({method})"))?,
        StablePreferred::Fails(failure) => {
            line(out, format!("stable preferred strategies  fail ({method})"))?;
            let (low, high) = &failure.attainable;
            line(out, format!("  attainable value {} .. {}", display_with_decimal(low), display_with_decimal(high)))?;
            let direction = Mechanism::new(failure.direction.rows.clone());
            line(out, "  witness direction:".into())?;
            for (m, row) in game.messages.iter().zip(&direction.rows) {
                let parts: Vec<String> = row.iter().map(crate::rational::format_rational).collect();
                line(out, format!("    {m}  [{}]", parts.join(", ")))?;
            }
        }
    }
    if let SampledVerdict::Fails { attainable, .. } = &report.stable_sampled {
        line(out, format!("  sampled counterexample attains {}", display_with_decimal(&attainable.1)))?;
    }
    write_gap(out, game, &report.gap)?;
    for v in &report.implication_violations {
        line(out, format!("implication violation: {v}"))?;
    }
    Ok(())
}
