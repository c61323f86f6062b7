mod common;

use commitgap::diagnostics::{diagnose, perturb, sample_directions, DiagnoseOptions};
use commitgap::equilibrium::{best_equilibrium, commitment_gap, SearchMode, DEFAULT_BUDGET};
use commitgap::rational::{format_rational, parse_rational, rat, Rational};
use commitgap::report::{emit_report, Report};
use commitgap::scenarios::{random_game, RandomGameParams};
use commitgap::{
    agent_payoff, best_reply_sets, enumerate_vertices, load_game, save_game, solve_commitment, verify_equilibrium,
    Game, LpOutcome, Mechanism,
};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn small_game(seed: u64, types: usize, common_interest: bool) -> Game {
    random_game(&RandomGameParams { seed, types, messages: 2, actions: 3, common_interest }).unwrap()
}

fn rational() -> impl Strategy<Value = Rational> {
    (-1000i64..1000, 1i64..200).prop_map(|(n, d)| rat(n, d))
}

/// Relabels messages by `perm_m` and actions by `perm_a`.
fn relabel(game: &Game, perm_m: &[usize], perm_a: &[usize]) -> Game {
    let mut g = game.clone();
    g.messages = perm_m.iter().map(|&m| game.messages[m].clone()).collect();
    g.actions = perm_a.iter().map(|&a| game.actions[a].clone()).collect();
    let inverse_m: Vec<usize> = (0..perm_m.len()).map(|i| perm_m.iter().position(|&m| m == i).unwrap()).collect();
    for (t, ty) in g.types.iter_mut().enumerate() {
        let mut ev: Vec<usize> = game.types[t].evidence.iter().map(|&m| inverse_m[m]).collect();
        ev.sort();
        ty.evidence = ev;
    }
    for tensor in [&mut g.agent_payoff, &mut g.principal_payoff] {
        for by_hidden in tensor.iter_mut() {
            for row in by_hidden.iter_mut() {
                *row = perm_a.iter().map(|&a| row[a].clone()).collect();
            }
        }
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn rational_text_round_trips(r in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn rational_field_laws(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &(&b + &c), &a * &b + &a * &c);
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a);
        }
    }

    #[test]
    fn lp_matches_vertex_maximum(seed in any::<u64>()) {
        let lp = common::random_bounded_lp(seed, 5, 7);
        let best = enumerate_vertices(lp.region())
            .unwrap()
            .iter()
            .map(|v| v.iter().zip(lp.objective()).map(|(x, c)| x * c).fold(Rational::zero(), |s, t| s + t))
            .max();
        match lp.solve() {
            LpOutcome::Optimal { value, point } => {
                prop_assert!(lp.region().contains(&point));
                prop_assert_eq!(Some(value), best);
            }
            LpOutcome::Infeasible => prop_assert_eq!(best, None),
            LpOutcome::Unbounded => prop_assert!(false, "bounded by construction"),
        }
    }

    #[test]
    fn game_file_round_trips(seed in any::<u64>(), types in 1usize..4) {
        let g = small_game(seed, types, false);
        prop_assert_eq!(load_game(&save_game(&g)).unwrap(), g);
    }

    #[test]
    fn agent_payoff_is_linear(seed in any::<u64>(), k in 0i64..=8) {
        let g = small_game(seed, 2, false);
        let a = Mechanism::uniform(&g);
        let b = Mechanism::constant(&g, (seed % 3) as usize);
        let lambda = rat(k, 8);
        let one_minus = rat(1, 1) - &lambda;
        let mix = Mechanism::new(
            a.rows.iter().zip(&b.rows)
                .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| &lambda * x + &one_minus * y).collect())
                .collect(),
        );
        for t in 0..g.num_types() {
            for r in g.feasible_replies(t) {
                let lhs = agent_payoff(&g, &mix, t, r).unwrap();
                let rhs = &lambda * agent_payoff(&g, &a, t, r).unwrap() + &one_minus * agent_payoff(&g, &b, t, r).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn best_replies_are_upper_hemicontinuous(seed in any::<u64>(), dir_seed in any::<u64>()) {
        let g = small_game(seed, 3, false);
        let mech = Mechanism::uniform(&g);
        // Smallest positive gap between a best reply and any other reply.
        let mut gap: Option<Rational> = None;
        for t in 0..g.num_types() {
            let payoffs: Vec<Rational> = g.feasible_replies(t).iter().map(|&r| agent_payoff(&g, &mech, t, r).unwrap()).collect();
            let best = payoffs.iter().max().unwrap().clone();
            for p in &payoffs {
                let d = &best - p;
                if d.is_positive() && gap.as_ref().is_none_or(|g| d < *g) {
                    gap = Some(d);
                }
            }
        }
        // Payoffs are at most 2 in magnitude over 3 actions, so each
        // expected payoff moves by at most 6 * radius.
        let radius = gap.map(|g| g / rat(24, 1)).unwrap_or_else(|| rat(1, 10));
        let before = best_reply_sets(&g, &mech);
        for d in sample_directions(&g, &mech, 5, dir_seed) {
            let after = best_reply_sets(&g, &perturb(&mech, &d, &radius));
            for (t, set) in after.iter().enumerate() {
                prop_assert!(set.iter().all(|r| before[t].contains(r)));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn equilibrium_values_are_ordered(seed in any::<u64>(), types in 1usize..4) {
        let g = small_game(seed, types, false);
        let v_star = solve_commitment(&g).v_star;
        let full = best_equilibrium(&g, SearchMode::Full, DEFAULT_BUDGET).unwrap();
        prop_assert!(full.complete);
        prop_assert!(verify_equilibrium(&g, &full.mechanism, &full.strategy));
        prop_assert!(full.best_value <= v_star);
        if let Ok(pure) = best_equilibrium(&g, SearchMode::Pure, DEFAULT_BUDGET) {
            prop_assert!(verify_equilibrium(&g, &pure.mechanism, &pure.strategy));
            prop_assert!(pure.best_value <= full.best_value);
        }
    }

    #[test]
    fn verdicts_survive_relabeling(seed in any::<u64>(), flip_m in any::<bool>(), rot in 0usize..3) {
        let g = small_game(seed, 2, false);
        let perm_m: Vec<usize> = if flip_m { vec![1, 0] } else { vec![0, 1] };
        let perm_a: Vec<usize> = (0..3).map(|a| (a + rot) % 3).collect();
        let h = relabel(&g, &perm_m, &perm_a);
        let opts = DiagnoseOptions { samples: 10, ..Default::default() };
        let a = diagnose(&g, &opts).unwrap();
        let b = diagnose(&h, &opts).unwrap();
        prop_assert_eq!(&a.v_star, &b.v_star);
        prop_assert_eq!(&a.gap.gap, &b.gap.gap);
        prop_assert_eq!(a.gap.verdict, b.gap.verdict);
        // Alignment and stability depend on which optimum is picked; the
        // gap implication must hold either way.
        prop_assert!(a.implication_violations.is_empty());
        prop_assert!(b.implication_violations.is_empty());
    }

    #[test]
    fn reports_round_trip_and_repeat(seed in any::<u64>()) {
        let g = small_game(seed, 2, false);
        let opts = DiagnoseOptions { samples: 10, seed, ..Default::default() };
        let first = emit_report(&Report::from_diagnostics(&g, &diagnose(&g, &opts).unwrap()));
        let second = emit_report(&Report::from_diagnostics(&g, &diagnose(&g, &opts).unwrap()));
        prop_assert_eq!(&first, &second);

        let value: serde_json::Value = serde_json::from_str(&first).unwrap();
        let gap = commitment_gap(&g, SearchMode::Auto, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(parse_rational(value["v_star"].as_str().unwrap()).unwrap(), gap.v_star);
        prop_assert_eq!(parse_rational(value["gap"].as_str().unwrap()).unwrap(), gap.gap);
        for row in value["continuity"].as_array().unwrap() {
            prop_assert!(parse_rational(row["radius"].as_str().unwrap()).is_ok());
            prop_assert!(parse_rational(row["max_deviation"].as_str().unwrap()).is_ok());
        }
        let back: Report = serde_json::from_str(&first).unwrap();
        prop_assert_eq!(emit_report(&back), first);
    }
}

#[test]
fn relabel_keeps_replies_consistent() {
    let g = small_game(3, 2, false);
    let h = relabel(&g, &[1, 0], &[2, 0, 1]);
    assert!(h.validate().is_empty());
    assert_eq!(g.feasible_replies(0).len(), h.feasible_replies(0).len());
}
