//! Sufficient conditions for commitment to be worthless, checked at a
//! mechanism (normally the commitment optimum):
//!
//! * **alignment**: the principal is indifferent across every type's best
//!   replies;
//! * **continuity** of the value function `V`, probed along sampled and
//!   explicit directions;
//! * **stable preferred strategies**: for every nearby mechanism some
//!   still-feasible best reply gives the anchor value when evaluated at the
//!   anchor mechanism.
//!
//! Alignment implies stable preferred strategies, and stable preferred
//! strategies imply a zero commitment gap. [`diagnose`] reports any
//! computed outcome that contradicts those implications.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::{nonempty_subset_count, nonempty_subsets, saturating_product, Odometer};
use crate::commitment::{mech_var, payoff_difference_terms, solve_commitment};
use crate::equilibrium::{
    best_equilibrium_bounded, gap_report, EquilibriumError, GapReport, SearchMode, DEFAULT_BUDGET,
};
use crate::game::{Game, Mechanism, Reply};
use crate::lp::{LinearProgram, LpOutcome, Polytope, Relation};
use crate::rational::{int, max_abs, rat, Rational};
use crate::response::{best_reply_sets, contribution, preferred_value, value_range};

pub const DEFAULT_PATTERN_BUDGET: u128 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeAlignment {
    pub ty: usize,
    /// Best replies with the principal's (unweighted) payoff from each.
    pub replies: Vec<(Reply, Rational)>,
    pub indifferent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub aligned: bool,
    pub per_type: Vec<TypeAlignment>,
}

/// Whether the principal is indifferent among each type's best replies.
/// Zero-prior types are reported but do not affect the verdict.
pub fn is_aligned(game: &Game, mech: &Mechanism) -> Alignment {
    let per_type: Vec<TypeAlignment> = best_reply_sets(game, mech)
        .into_iter()
        .enumerate()
        .map(|(ty, set)| {
            let replies: Vec<(Reply, Rational)> = set.iter().map(|&r| (r, contribution(game, mech, ty, r))).collect();
            let indifferent = replies.windows(2).all(|w| w[0].1 == w[1].1);
            TypeAlignment { ty, replies, indifferent }
        })
        .collect();
    let aligned = per_type.iter().all(|t| t.indifferent || game.prior(t.ty).is_zero());
    Alignment { aligned, per_type }
}

/// A perturbation direction for a mechanism: every row sums to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Direction {
    pub rows: Vec<Vec<Rational>>,
}

impl Direction {
    pub fn norm(&self) -> Rational {
        max_abs(self.rows.iter().flatten())
    }
}

/// `mech + t * dir` with `t` chosen so the step has max-norm `radius`,
/// shortened if needed to stay inside the simplices.
pub fn perturb(mech: &Mechanism, dir: &Direction, radius: &Rational) -> Mechanism {
    let norm = dir.norm();
    if norm.is_zero() || radius.is_zero() {
        return mech.clone();
    }
    let mut step = radius / norm;
    for (row, drow) in mech.rows.iter().zip(&dir.rows) {
        for (p, d) in row.iter().zip(drow) {
            if d.is_negative() {
                let limit = p / -d;
                if limit < step {
                    step = limit;
                }
            }
        }
    }
    Mechanism::new(
        mech.rows
            .iter()
            .zip(&dir.rows)
            .map(|(row, drow)| row.iter().zip(drow).map(|(p, d)| p + &step * d).collect())
            .collect(),
    )
}

/// Seeded directions toward random rational points of the mechanism space
/// (weights `k/64`, `k` in `0..=64`, normalised per row).
pub fn sample_directions(game: &Game, mech: &Mechanism, samples: usize, seed: u64) -> Vec<Direction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let rows = mech
                .rows
                .iter()
                .map(|row| {
                    let mut weights: Vec<i64> = (0..game.num_actions()).map(|_| rng.gen_range(0..=64)).collect();
                    let total: i64 = weights.iter().sum();
                    if total == 0 {
                        weights = vec![1; game.num_actions()];
                    }
                    let total: i64 = weights.iter().sum();
                    row.iter().zip(&weights).map(|(p, &w)| rat(w, total) - p).collect()
                })
                .collect();
            Direction { rows }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuityRow {
    pub radius: Rational,
    pub max_deviation: Rational,
    pub samples: usize,
}

/// Largest `|V(mech') - V(mech)|` over perturbations of each radius along
/// seeded random directions and the `explicit` ones.
pub fn continuity_probe(
    game: &Game,
    mech: &Mechanism,
    radii: &[Rational],
    samples: usize,
    seed: u64,
    explicit: &[Direction],
) -> Vec<ContinuityRow> {
    let anchor = preferred_value(game, mech).0;
    let mut directions = sample_directions(game, mech, samples, seed);
    directions.extend_from_slice(explicit);
    radii
        .iter()
        .map(|radius| {
            let max_deviation = directions
                .iter()
                .map(|d| (preferred_value(game, &perturb(mech, d, radius)).0 - &anchor).abs())
                .max()
                .unwrap_or_else(Rational::zero);
            ContinuityRow { radius: radius.clone(), max_deviation, samples: directions.len() }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampledVerdict {
    Holds { samples: usize },
    Fails { perturbed: Mechanism, attainable: (Rational, Rational) },
}

/// Checks the stable-preferred condition at sampled mechanisms within
/// `radius`: the best replies at the perturbed mechanism, valued at the
/// anchor `mech`, must be able to reach `v_star` exactly.
pub fn stable_preferred_sampled(
    game: &Game,
    mech: &Mechanism,
    v_star: &Rational,
    radius: &Rational,
    samples: usize,
    seed: u64,
    explicit: &[Direction],
) -> SampledVerdict {
    let mut directions = explicit.to_vec();
    directions.extend(sample_directions(game, mech, samples, seed));
    for d in &directions {
        let perturbed = perturb(mech, d, radius);
        let sets = best_reply_sets(game, &perturbed);
        let (low, high) = value_range(game, mech, &sets);
        if low > *v_star || high < *v_star {
            return SampledVerdict::Fails { perturbed, attainable: (low, high) };
        }
    }
    SampledVerdict::Holds { samples: directions.len() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableFailure {
    /// Direction along which the best replies collapse to `pattern` for
    /// every small enough step.
    pub direction: Direction,
    pub pattern: Vec<Vec<Reply>>,
    /// Range of the anchor-valued payoff over the surviving replies.
    pub attainable: (Rational, Rational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StablePreferred {
    Holds,
    Fails(Box<StableFailure>),
}

impl StablePreferred {
    pub fn holds(&self) -> bool {
        matches!(self, StablePreferred::Holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{count} best-reply refinement patterns exceed the budget of {budget}")]
pub struct PatternBudgetExceeded {
    pub count: u128,
    pub budget: u128,
}

/// Exact stable-preferred test.
///
/// Agent payoffs are linear in the mechanism, so after a small step along
/// `d` the best replies of a type are exactly those current best replies
/// with the largest slope along `d`. Each joint choice of surviving subsets
/// is checked for realisability with a margin LP; the condition fails iff
/// some realisable choice cannot reach `v_star`.
pub fn stable_preferred_exact(
    game: &Game,
    mech: &Mechanism,
    v_star: &Rational,
    pattern_budget: u128,
) -> Result<StablePreferred, PatternBudgetExceeded> {
    let sets = best_reply_sets(game, mech);
    let active: Vec<usize> = (0..game.num_types()).filter(|&t| game.prior(t).is_positive()).collect();
    let count = saturating_product(active.iter().map(|&t| nonempty_subset_count(sets[t].len())));
    if count > pattern_budget {
        return Err(PatternBudgetExceeded { count, budget: pattern_budget });
    }
    let options: Vec<Vec<Vec<Reply>>> = active.iter().map(|&t| nonempty_subsets(&sets[t])).collect();

    for choice in Odometer::new(options.iter().map(Vec::len).collect()) {
        let mut pattern = sets.clone();
        for (k, &t) in active.iter().enumerate() {
            pattern[t] = options[k][choice[k]].clone();
        }
        let (low, high) = value_range(game, mech, &pattern);
        if low <= *v_star && *v_star <= high {
            continue;
        }
        if let Some(direction) = realize_pattern(game, mech, &sets, &pattern, &active) {
            return Ok(StablePreferred::Fails(Box::new(StableFailure { direction, pattern, attainable: (low, high) })));
        }
    }
    Ok(StablePreferred::Holds)
}

/// A direction `d` under which, for small steps, the best replies of each
/// active type become exactly `pattern[t]`, or `None` if no such direction
/// exists.
fn realize_pattern(
    game: &Game,
    mech: &Mechanism,
    sets: &[Vec<Reply>],
    pattern: &[Vec<Reply>],
    active: &[usize],
) -> Option<Direction> {
    let n = game.num_messages() * game.num_actions();
    let margin = n;
    let mut region = Polytope::new(
        (0..game.num_messages())
            .flat_map(|m| (0..game.num_actions()).map(move |a| format!("d[{m}][{a}]")))
            .chain(std::iter::once("margin".to_string())),
    );
    for var in 0..=n {
        region.set_free(var).expect("in range");
    }
    for m in 0..game.num_messages() {
        let terms: Vec<(usize, Rational)> = (0..game.num_actions()).map(|a| (mech_var(game, m, a), int(1))).collect();
        region.add_sparse(&terms, Relation::Eq, Rational::zero()).expect("in range");
        for a in 0..game.num_actions() {
            let var = mech_var(game, m, a);
            let lower = if mech.rows[m][a].is_zero() { int(0) } else { int(-1) };
            region.add_sparse(&[(var, int(1))], Relation::Ge, lower).expect("in range");
            region.add_sparse(&[(var, int(1))], Relation::Le, int(1)).expect("in range");
        }
    }
    region.add_sparse(&[(margin, int(1))], Relation::Le, int(1)).expect("in range");
    for &t in active {
        let kept = &pattern[t];
        let anchor = kept[0];
        for &r in &kept[1..] {
            let terms = payoff_difference_terms(game, t, anchor, r);
            region.add_sparse(&terms, Relation::Eq, Rational::zero()).expect("in range");
        }
        for &q in sets[t].iter().filter(|q| !kept.contains(q)) {
            let mut terms = payoff_difference_terms(game, t, anchor, q);
            terms.push((margin, int(-1)));
            region.add_sparse(&terms, Relation::Ge, Rational::zero()).expect("in range");
        }
    }
    let mut objective = vec![Rational::zero(); n + 1];
    objective[margin] = int(1);
    let lp = LinearProgram::new(region, objective).expect("sized");
    match lp.solve() {
        LpOutcome::Optimal { value, point } if value.is_positive() => Some(Direction {
            rows: (0..game.num_messages())
                .map(|m| (0..game.num_actions()).map(|a| point[mech_var(game, m, a)].clone()).collect())
                .collect(),
        }),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagnoseOptions {
    pub radii: Vec<Rational>,
    pub samples: usize,
    pub seed: u64,
    pub mode: SearchMode,
    pub budget: u128,
    pub pattern_budget: u128,
}

impl Default for DiagnoseOptions {
    fn default() -> Self {
        Self {
            radii: vec![rat(1, 10), rat(1, 100), rat(1, 1000)],
            samples: 200,
            seed: 0,
            mode: SearchMode::Auto,
            budget: DEFAULT_BUDGET,
            pattern_budget: DEFAULT_PATTERN_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagnosticsReport {
    pub at_mech: Mechanism,
    pub v_star: Rational,
    pub alignment: Alignment,
    pub continuity: Vec<ContinuityRow>,
    pub stable_preferred: StablePreferred,
    /// False when the pattern budget forced the sampled test instead.
    pub stable_exact: bool,
    pub stable_sampled: SampledVerdict,
    pub gap: GapReport,
    pub implication_violations: Vec<String>,
}

/// Solves for the commitment optimum and runs every check there, plus the
/// commitment gap.
pub fn diagnose(game: &Game, options: &DiagnoseOptions) -> Result<DiagnosticsReport, EquilibriumError> {
    let commitment = solve_commitment(game);
    let mech = commitment.mech_star.clone();
    let v_star = commitment.v_star.clone();
    let equilibrium = best_equilibrium_bounded(game, options.mode, options.budget, &v_star)?;
    let gap = gap_report(commitment, equilibrium);

    let alignment = is_aligned(game, &mech);
    let smallest = options.radii.iter().filter(|r| r.is_positive()).min().cloned().unwrap_or_else(|| rat(1, 1000));

    let (stable_preferred, stable_exact, explicit) =
        match stable_preferred_exact(game, &mech, &v_star, options.pattern_budget) {
            Ok(StablePreferred::Fails(failure)) => {
                let direction = failure.direction.clone();
                (StablePreferred::Fails(failure), true, vec![direction])
            }
            Ok(StablePreferred::Holds) => (StablePreferred::Holds, true, Vec::new()),
            Err(_) => {
                let verdict =
                    stable_preferred_sampled(game, &mech, &v_star, &smallest, options.samples, options.seed, &[]);
                let fallback = match verdict {
                    SampledVerdict::Holds { .. } => StablePreferred::Holds,
                    SampledVerdict::Fails { ref perturbed, ref attainable } => {
                        let direction = Direction {
                            rows: perturbed
                                .rows
                                .iter()
                                .zip(&mech.rows)
                                .map(|(p, q)| p.iter().zip(q).map(|(x, y)| x - y).collect())
                                .collect(),
                        };
                        StablePreferred::Fails(Box::new(StableFailure {
                            direction,
                            pattern: best_reply_sets(game, perturbed),
                            attainable: attainable.clone(),
                        }))
                    }
                };
                (fallback, false, Vec::new())
            }
        };
    let stable_sampled =
        stable_preferred_sampled(game, &mech, &v_star, &smallest, options.samples, options.seed, &explicit);
    let continuity = continuity_probe(game, &mech, &options.radii, options.samples, options.seed, &explicit);

    let mut implication_violations = Vec::new();
    if stable_exact {
        if alignment.aligned && !stable_preferred.holds() {
            implication_violations.push("aligned at the optimum but stable preferred strategies fail".to_string());
        }
        if stable_preferred.holds() && !gap.gap.is_zero() && gap.complete() {
            implication_violations.push(format!(
                "stable preferred strategies hold but the commitment gap is {}",
                crate::rational::format_rational(&gap.gap)
            ));
        }
    }

    Ok(DiagnosticsReport {
        at_mech: mech,
        v_star,
        alignment,
        continuity,
        stable_preferred,
        stable_exact,
        stable_sampled,
        gap,
        implication_violations,
    })
}
