//! Acceptance checks, one line per criterion. Run with
//! `cargo test -p commitgap --test acceptance`.

mod common;

use std::time::{Duration, Instant};

use commitgap::cli::{run, EXIT_OK};
use commitgap::diagnostics::{
    continuity_probe, diagnose, is_aligned, perturb, stable_preferred_exact, DiagnoseOptions, StablePreferred,
    DEFAULT_PATTERN_BUDGET,
};
use commitgap::equilibrium::{best_equilibrium, commitment_gap, SearchMode, Verdict, DEFAULT_BUDGET};
use commitgap::rational::{format_rational, int, rat, Rational};
use commitgap::scenarios::{
    build_example1, build_example2, example1_action_grid, random_game, Example1Params, RandomGameParams,
};
use commitgap::{
    best_reply_sets, enumerate_vertices, lp_solve, preferred_value, solve_commitment, verify_equilibrium, LpOutcome,
    Mechanism,
};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn two_type_baseline() -> (Rational, Rational) {
    (rat(3, 10), rat(2, 5))
}

fn criterion_1() -> Check {
    let (eps, mu) = two_type_baseline();
    let game = build_example2(&eps, &mu).map_err(|e| e.to_string())?;
    let gap = commitment_gap(&game, SearchMode::Full, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(gap.v_star == rat(79, 50), || format!("v_star {}", format_rational(&gap.v_star)))?;
    ensure(gap.best_equilibrium_value == rat(77, 50), || {
        format!("equilibrium {}", format_rational(&gap.best_equilibrium_value))
    })?;
    ensure(gap.gap == rat(1, 25), || format!("gap {}", format_rational(&gap.gap)))?;
    ensure(gap.verdict == Verdict::CommitmentHasValue, || format!("verdict {}", gap.verdict))?;
    ensure(gap.complete(), || "search incomplete".into())?;
    let oracle = common::TwoTypeGame::new(&eps, &mu);
    let grid = oracle.grid_commitment_value(10);
    ensure(grid == gap.v_star, || format!("grid maximum {}", format_rational(&grid)))?;
    Ok("v_star 79/50, equilibrium 77/50, gap 1/25; grid search agrees".into())
}

fn criterion_2() -> Check {
    let mu = rat(2, 5);
    let one = int(1);
    let mut gaps = Vec::new();
    for eps in [rat(1, 4), rat(3, 10), rat(31, 100)] {
        // Pooling on the middle action is ex-ante optimal at this prior.
        let middle = int(4) * &mu + (&one - &mu) * (int(-1) + int(3) * &eps);
        ensure(middle >= int(2) * &mu + (&one - &mu), || {
            format!("prior outside window for {}", format_rational(&eps))
        })?;
        ensure(middle >= int(5) * &mu - (&one - &mu), || {
            format!("prior outside window for {}", format_rational(&eps))
        })?;
        let game = build_example2(&eps, &mu).map_err(|e| e.to_string())?;
        let gap = commitment_gap(&game, SearchMode::Full, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        ensure(gap.complete() && gap.gap.is_positive(), || {
            format!("epsilon {}: gap {}", format_rational(&eps), format_rational(&gap.gap))
        })?;
        // Difference of the separating and pooling values.
        let expected = &mu * (&one - int(3) * &eps);
        ensure(gap.gap == expected, || {
            format!("epsilon {}: expected {}", format_rational(&eps), format_rational(&expected))
        })?;
        gaps.push(format!("{}: {}", format_rational(&eps), format_rational(&gap.gap)));
    }
    Ok(format!("positive gaps ({})", gaps.join(", ")))
}

fn criterion_3() -> Check {
    let (eps, mu) = two_type_baseline();
    let game = build_example2(&eps, &mu).map_err(|e| e.to_string())?;
    let solution = solve_commitment(&game);
    let mech = &solution.mech_star;
    ensure(!is_aligned(&game, mech).aligned, || "reported aligned".into())?;
    let verdict =
        stable_preferred_exact(&game, mech, &solution.v_star, DEFAULT_PATTERN_BUDGET).map_err(|e| e.to_string())?;
    let StablePreferred::Fails(failure) = verdict else {
        return Err("stable preferred strategies reported to hold".into());
    };
    let d = &failure.direction;
    // The witness must be a feasible direction whose small steps produce
    // exactly the reported best replies, which cannot reach v_star.
    for (row, drow) in mech.rows.iter().zip(&d.rows) {
        ensure(drow.iter().fold(Rational::zero(), |s, x| s + x).is_zero(), || "row does not sum to zero".into())?;
        ensure(row.iter().zip(drow).all(|(p, x)| !p.is_zero() || !x.is_negative()), || "infeasible direction".into())?;
    }
    let moved = perturb(mech, d, &rat(1, 1000));
    ensure(best_reply_sets(&game, &moved) == failure.pattern, || "pattern not reproduced".into())?;
    let rows = continuity_probe(&game, mech, &[rat(1, 100)], 0, 0, std::slice::from_ref(d));
    let deviation = &rows[0].max_deviation;
    ensure(*deviation >= rat(15, 100), || format!("deviation {}", format_rational(deviation)))?;
    Ok(format!("not aligned; stable fails; deviation at 1/100 is {}", format_rational(deviation)))
}

fn criterion_4() -> Check {
    let params = Example1Params::default();
    let game = build_example1(&params).map_err(|e| e.to_string())?;
    let grid = example1_action_grid(&params.grid_step).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let trials = 150;
    for i in 0..trials {
        let picks: Vec<usize> = (0..game.num_messages()).map(|_| rng.gen_range(0..grid.len())).collect();
        let mech = Mechanism::deterministic(&game, &picks);
        let expected = common::investment_value(
            &params.productivities,
            &params.evidence_prob,
            &[grid[picks[0]].clone(), grid[picks[1]].clone()],
            &grid[picks[2]],
        );
        let got = preferred_value(&game, &mech).0;
        ensure(got == expected, || {
            format!("trial {i}: {} vs formula {}", format_rational(&got), format_rational(&expected))
        })?;
    }
    Ok(format!("{trials} mechanisms match the closed-form values exactly"))
}

fn criterion_5() -> Check {
    for seed in 0..20u64 {
        let types = 1 + (seed % 3) as usize;
        let game = random_game(&RandomGameParams { seed, types, messages: 3, actions: 3, common_interest: true })
            .map_err(|e| e.to_string())?;
        let report =
            diagnose(&game, &DiagnoseOptions { samples: 50, seed, ..Default::default() }).map_err(|e| e.to_string())?;
        ensure(report.alignment.aligned, || format!("seed {seed}: not aligned"))?;
        ensure(report.stable_exact && report.stable_preferred.holds(), || format!("seed {seed}: not stable"))?;
        ensure(report.gap.gap.is_zero(), || format!("seed {seed}: gap {}", format_rational(&report.gap.gap)))?;
        ensure(report.implication_violations.is_empty(), || {
            format!("seed {seed}: {:?}", report.implication_violations)
        })?;
    }
    Ok("20 common-interest games: aligned, stable, zero gap".into())
}

fn criterion_6() -> Check {
    let mut positive = 0;
    for seed in 0..50u64 {
        let game = random_game(&RandomGameParams { seed, types: 3, messages: 3, actions: 3, common_interest: false })
            .map_err(|e| e.to_string())?;
        let gap = commitment_gap(&game, SearchMode::Full, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        let full = &gap.equilibrium;
        ensure(full.complete, || format!("seed {seed}: incomplete"))?;
        ensure(!gap.gap.is_negative(), || format!("seed {seed}: negative gap"))?;
        ensure(verify_equilibrium(&game, &full.mechanism, &full.strategy), || {
            format!("seed {seed}: bad full witness")
        })?;
        if let Ok(pure) = best_equilibrium(&game, SearchMode::Pure, DEFAULT_BUDGET) {
            ensure(verify_equilibrium(&game, &pure.mechanism, &pure.strategy), || {
                format!("seed {seed}: bad pure witness")
            })?;
            ensure(pure.best_value <= full.best_value, || format!("seed {seed}: pure above full"))?;
        }
        ensure(full.best_value <= gap.v_star, || format!("seed {seed}: equilibrium above v_star"))?;
        if gap.gap.is_positive() {
            positive += 1;
            let verdict = stable_preferred_exact(&game, &gap.commitment.mech_star, &gap.v_star, DEFAULT_PATTERN_BUDGET)
                .map_err(|e| e.to_string())?;
            ensure(!verdict.holds(), || format!("seed {seed}: positive gap but stable"))?;
        }
    }
    Ok(format!("50 games consistent ({positive} with positive gap)"))
}

fn criterion_7() -> Check {
    let mut optimal = 0;
    for seed in 0..100u64 {
        let lp = common::random_bounded_lp(seed, 6, 8);
        let best = enumerate_vertices(lp.region())
            .map_err(|e| e.to_string())?
            .iter()
            .map(|v| v.iter().zip(lp.objective()).map(|(x, c)| x * c).fold(Rational::zero(), |s, t| s + t))
            .max();
        match (lp_solve(&lp), best) {
            (LpOutcome::Optimal { value, .. }, Some(b)) if value == b => optimal += 1,
            (LpOutcome::Infeasible, None) => {}
            (outcome, best) => return Err(format!("seed {seed}: {outcome:?} vs vertex maximum {best:?}")),
        }
    }
    Ok(format!("100 LPs agree with vertex enumeration ({optimal} feasible)"))
}

fn criterion_8() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let game_path = dir.path().join("game.json");
    let report_path = dir.path().join("report.json");
    let (mut sink_out, mut sink_err) = (Vec::new(), Vec::new());
    let code = run(
        ["commitgap", "demo", "example1", "--grid-step", "1", "--out", game_path.to_str().unwrap()],
        &mut std::io::empty(),
        &mut sink_out,
        &mut sink_err,
    );
    ensure(code == EXIT_OK, || format!("demo exit {code}"))?;
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        ["commitgap", "gap", game_path.to_str().unwrap(), "--mode", "pure", "--json", report_path.to_str().unwrap()],
        &mut std::io::empty(),
        &mut out,
        &mut err,
    );
    ensure(code == EXIT_OK, || format!("gap exit {code}: {}", String::from_utf8_lossy(&err)))?;
    let text = String::from_utf8_lossy(&out);
    for key in ["v_star", "best equilibrium", "gap"] {
        ensure(text.lines().any(|l| l.starts_with(key)), || format!("missing {key}"))?;
    }
    let report = std::fs::read_to_string(&report_path).map_err(|e| e.to_string())?;
    let fixture = include_str!("fixtures/example1_grid1_pure.json");
    ensure(report == fixture, || "report differs from archived fixture".into())?;
    let value: serde_json::Value = serde_json::from_str(&report).map_err(|e| e.to_string())?;
    Ok(format!(
        "v_star {}, equilibrium {}, gap {}; matches fixture",
        value["v_star"].as_str().unwrap_or("?"),
        value["best_equilibrium"].as_str().unwrap_or("?"),
        value["gap"].as_str().unwrap_or("?")
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("two-type game end to end", criterion_1, Duration::from_secs(5)),
        ("two-type parameter sweep", criterion_2, Duration::from_secs(30)),
        ("two-type diagnostics at the optimum", criterion_3, Duration::from_secs(30)),
        ("investment game closed-form values", criterion_4, Duration::from_secs(10)),
        ("alignment chain on common-interest games", criterion_5, Duration::from_secs(120)),
        ("consistency on random games", criterion_6, Duration::from_secs(600)),
        ("LP against vertex enumeration", criterion_7, Duration::from_secs(60)),
        ("investment game gap report", criterion_8, Duration::from_secs(60)),
    ];
    let mut failures = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (status, detail) = match result {
            Ok(detail) if elapsed <= *limit => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("{detail}; took longer than {limit:?}")),
            Err(why) => ("FAIL", why),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!("criterion {}: {status} [{:.2}s] {name}: {detail}", i + 1, elapsed.as_secs_f64());
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
}
