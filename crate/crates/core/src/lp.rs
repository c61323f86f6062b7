//! Exact linear programming over [`Rational`].
//!
//! A dense two-phase primal simplex with Bland's rule. Equality rows get an
//! artificial column directly instead of being split into two inequalities.
//! Variables are non-negative unless marked free; free variables are split
//! into a positive and a negative part internally.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub bound: Rational,
}

impl Constraint {
    pub fn lhs(&self, point: &[Rational]) -> Rational {
        crate::rational::dot(&self.coefficients, point)
    }

    pub fn is_satisfied(&self, point: &[Rational]) -> bool {
        self.relation.holds(&self.lhs(point), &self.bound)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("constraint has {found} coefficients, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("variable index {index} out of range for {len} variables")]
    VariableIndex { index: usize, len: usize },
    #[error("polytope is unbounded")]
    UnboundedPolytope,
}

/// A constraint system `{x : A x (<=|=|>=) b, x_j >= 0 for non-free j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    variables: Vec<String>,
    nonnegative: Vec<bool>,
    constraints: Vec<Constraint>,
}

impl Polytope {
    /// All variables start out non-negative.
    pub fn new<S: Into<String>>(variables: impl IntoIterator<Item = S>) -> Self {
        let variables: Vec<String> = variables.into_iter().map(Into::into).collect();
        let nonnegative = vec![true; variables.len()];
        Self { variables, nonnegative, constraints: Vec::new() }
    }

    pub fn with_dimension(n: usize) -> Self {
        Self::new((0..n).map(|i| format!("x{i}")))
    }

    pub fn dimension(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn is_nonnegative(&self, var: usize) -> bool {
        self.nonnegative[var]
    }

    pub fn set_free(&mut self, var: usize) -> Result<(), LpError> {
        self.check_index(var)?;
        self.nonnegative[var] = false;
        Ok(())
    }

    pub fn add_constraint(
        &mut self,
        coefficients: Vec<Rational>,
        relation: Relation,
        bound: Rational,
    ) -> Result<(), LpError> {
        if coefficients.len() != self.dimension() {
            return Err(LpError::Dimension { expected: self.dimension(), found: coefficients.len() });
        }
        self.constraints.push(Constraint { coefficients, relation, bound });
        Ok(())
    }

    /// Adds a constraint given as `(variable, coefficient)` pairs; repeated
    /// indices accumulate.
    pub fn add_sparse(
        &mut self,
        terms: &[(usize, Rational)],
        relation: Relation,
        bound: Rational,
    ) -> Result<(), LpError> {
        let mut coefficients = vec![Rational::zero(); self.dimension()];
        for (var, coef) in terms {
            self.check_index(*var)?;
            coefficients[*var] += coef;
        }
        self.add_constraint(coefficients, relation, bound)
    }

    fn check_index(&self, var: usize) -> Result<(), LpError> {
        if var >= self.dimension() {
            return Err(LpError::VariableIndex { index: var, len: self.dimension() });
        }
        Ok(())
    }

    pub fn contains(&self, point: &[Rational]) -> bool {
        point.len() == self.dimension()
            && point.iter().zip(&self.nonnegative).all(|(x, nonneg)| !nonneg || !x.is_negative())
            && self.constraints.iter().all(|c| c.is_satisfied(point))
    }

    /// Some point of the polytope, if it is nonempty.
    pub fn feasible_point(&self) -> Option<Vec<Rational>> {
        let lp = LinearProgram::new(self.clone(), vec![Rational::zero(); self.dimension()])
            .expect("objective sized to dimension");
        match lp.solve() {
            LpOutcome::Optimal { point, .. } => Some(point),
            LpOutcome::Infeasible => None,
            LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
        }
    }
}

/// Maximise `objective . x` over a [`Polytope`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    region: Polytope,
    objective: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(region: Polytope, objective: Vec<Rational>) -> Result<Self, LpError> {
        if objective.len() != region.dimension() {
            return Err(LpError::Dimension { expected: region.dimension(), found: objective.len() });
        }
        Ok(Self { region, objective })
    }

    pub fn region(&self) -> &Polytope {
        &self.region
    }

    pub fn region_mut(&mut self) -> &mut Polytope {
        &mut self.region
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn solve(&self) -> LpOutcome {
        lp_solve(self)
    }
}

/// Solves `lp` exactly. Deterministic: the pivot rule is Bland's rule.
pub fn lp_solve(lp: &LinearProgram) -> LpOutcome {
    let mut tableau = Tableau::build(&lp.region);
    if !tableau.phase_one() {
        return LpOutcome::Infeasible;
    }
    let cost = tableau.column_costs(&lp.objective);
    if !tableau.optimize(&cost, false) {
        return LpOutcome::Unbounded;
    }
    let point = tableau.primal_point(lp.region.dimension());
    let value = crate::rational::dot(&lp.objective, &point);
    LpOutcome::Optimal { value, point }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    /// Positive part of an original variable.
    Plus(usize),
    /// Negative part of a free original variable.
    Minus(usize),
    Slack,
    Artificial,
}

struct Tableau {
    /// `rows[i]` holds the constraint row followed by the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    kinds: Vec<ColumnKind>,
}

impl Tableau {
    fn build(region: &Polytope) -> Self {
        let mut kinds = Vec::new();
        let mut var_columns = Vec::with_capacity(region.dimension());
        for var in 0..region.dimension() {
            let plus = kinds.len();
            kinds.push(ColumnKind::Plus(var));
            let minus = if region.nonnegative[var] {
                None
            } else {
                kinds.push(ColumnKind::Minus(var));
                Some(kinds.len() - 1)
            };
            var_columns.push((plus, minus));
        }

        // Normalise each row to a non-negative right-hand side first, then
        // lay out slack and artificial columns.
        struct Row {
            coefficients: Vec<Rational>,
            relation: Relation,
            bound: Rational,
        }
        let normalized: Vec<Row> = region
            .constraints
            .iter()
            .map(|c| {
                if c.bound.is_negative() {
                    Row {
                        coefficients: c.coefficients.iter().map(|a| -a).collect(),
                        relation: c.relation.flipped(),
                        bound: -&c.bound,
                    }
                } else {
                    Row { coefficients: c.coefficients.clone(), relation: c.relation, bound: c.bound.clone() }
                }
            })
            .collect();

        let mut extra: Vec<(usize, Option<usize>, Option<usize>)> = Vec::new();
        for (i, row) in normalized.iter().enumerate() {
            let (slack, artificial) = match row.relation {
                Relation::Le => {
                    kinds.push(ColumnKind::Slack);
                    (Some(kinds.len() - 1), None)
                }
                Relation::Ge => {
                    kinds.push(ColumnKind::Slack);
                    let s = kinds.len() - 1;
                    kinds.push(ColumnKind::Artificial);
                    (Some(s), Some(kinds.len() - 1))
                }
                Relation::Eq => {
                    kinds.push(ColumnKind::Artificial);
                    (None, Some(kinds.len() - 1))
                }
            };
            extra.push((i, slack, artificial));
        }

        let width = kinds.len();
        let mut rows = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        for (row, (_, slack, artificial)) in normalized.iter().zip(extra) {
            let mut line = vec![Rational::zero(); width + 1];
            for (var, coef) in row.coefficients.iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                let (plus, minus) = var_columns[var];
                line[plus] = coef.clone();
                if let Some(minus) = minus {
                    line[minus] = -coef;
                }
            }
            match (row.relation, slack, artificial) {
                (Relation::Le, Some(s), None) => {
                    line[s] = Rational::from_integer(1.into());
                    basis.push(s);
                }
                (Relation::Ge, Some(s), Some(a)) => {
                    line[s] = Rational::from_integer((-1).into());
                    line[a] = Rational::from_integer(1.into());
                    basis.push(a);
                }
                (Relation::Eq, None, Some(a)) => {
                    line[a] = Rational::from_integer(1.into());
                    basis.push(a);
                }
                _ => unreachable!(),
            }
            line[width] = row.bound.clone();
            rows.push(line);
        }
        Self { rows, basis, kinds }
    }

    fn width(&self) -> usize {
        self.kinds.len()
    }

    fn rhs(&self, row: usize) -> &Rational {
        &self.rows[row][self.width()]
    }

    fn column_costs(&self, objective: &[Rational]) -> Vec<Rational> {
        self.kinds
            .iter()
            .map(|kind| match kind {
                ColumnKind::Plus(v) => objective[*v].clone(),
                ColumnKind::Minus(v) => -&objective[*v],
                _ => Rational::zero(),
            })
            .collect()
    }

    /// Minimises the sum of artificials, then drives any zero-valued
    /// artificial out of the basis (dropping redundant rows). Returns false
    /// when the region is empty.
    fn phase_one(&mut self) -> bool {
        if !self.kinds.contains(&ColumnKind::Artificial) {
            return true;
        }
        let cost: Vec<Rational> = self
            .kinds
            .iter()
            .map(|k| if *k == ColumnKind::Artificial { Rational::from_integer((-1).into()) } else { Rational::zero() })
            .collect();
        let bounded = self.optimize(&cost, true);
        debug_assert!(bounded, "phase one objective is bounded above by zero");
        let infeasibility: Rational = self
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &col)| self.kinds[col] == ColumnKind::Artificial)
            .fold(Rational::zero(), |acc, (row, _)| acc + self.rhs(row));
        if !infeasibility.is_zero() {
            return false;
        }

        let mut row = 0;
        while row < self.rows.len() {
            if self.kinds[self.basis[row]] != ColumnKind::Artificial {
                row += 1;
                continue;
            }
            let replacement = (0..self.width())
                .find(|&col| self.kinds[col] != ColumnKind::Artificial && !self.rows[row][col].is_zero());
            match replacement {
                Some(col) => {
                    self.pivot(row, col, None);
                    row += 1;
                }
                None => {
                    self.rows.remove(row);
                    self.basis.remove(row);
                }
            }
        }
        true
    }

    /// Maximises `cost . columns` from the current basic feasible solution.
    /// Returns false when unbounded.
    fn optimize(&mut self, cost: &[Rational], allow_artificial: bool) -> bool {
        let width = self.width();
        let mut reduced: Vec<Rational> = cost.to_vec();
        for (row, &col) in self.basis.iter().enumerate() {
            let cb = &cost[col];
            if cb.is_zero() {
                continue;
            }
            for (j, entry) in self.rows[row][..width].iter().enumerate() {
                if !entry.is_zero() {
                    reduced[j] -= cb * entry;
                }
            }
        }

        loop {
            let entering = (0..width)
                .find(|&j| (allow_artificial || self.kinds[j] != ColumnKind::Artificial) && reduced[j].is_positive());
            let Some(col) = entering else {
                return true;
            };

            let mut leaving: Option<(usize, Rational)> = None;
            for row in 0..self.rows.len() {
                let a = &self.rows[row][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(row) / a;
                let better = match &leaving {
                    None => true,
                    Some((best_row, best)) => {
                        ratio < *best || (ratio == *best && self.basis[row] < self.basis[*best_row])
                    }
                };
                if better {
                    leaving = Some((row, ratio));
                }
            }
            let Some((row, _)) = leaving else {
                return false;
            };
            self.pivot(row, col, Some(&mut reduced));
        }
    }

    fn pivot(&mut self, row: usize, col: usize, reduced: Option<&mut Vec<Rational>>) {
        let width = self.width();
        let pivot = self.rows[row][col].clone();
        for entry in self.rows[row].iter_mut() {
            if !entry.is_zero() {
                *entry /= &pivot;
            }
        }
        let pivot_row = self.rows[row].clone();
        let support: Vec<usize> = (0..=width).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, line) in self.rows.iter_mut().enumerate() {
            if i == row || line[col].is_zero() {
                continue;
            }
            let factor = line[col].clone();
            for &j in &support {
                line[j] -= &factor * &pivot_row[j];
            }
        }
        if let Some(reduced) = reduced {
            let factor = reduced[col].clone();
            if !factor.is_zero() {
                for &j in &support {
                    if j < width {
                        reduced[j] -= &factor * &pivot_row[j];
                    }
                }
            }
        }
        self.basis[row] = col;
    }

    fn primal_point(&self, dimension: usize) -> Vec<Rational> {
        let mut point = vec![Rational::zero(); dimension];
        for (row, &col) in self.basis.iter().enumerate() {
            match self.kinds[col] {
                ColumnKind::Plus(v) => point[v] += self.rhs(row),
                ColumnKind::Minus(v) => point[v] -= self.rhs(row),
                _ => {}
            }
        }
        point
    }
}
