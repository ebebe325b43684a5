//! Exact rational linear programming.
//!
//! A dense two-phase simplex over [`BigRational`] with Bland's rule. Every
//! solve returns a certificate that re-verifies by exact arithmetic: an
//! optimal dual vector whose bound matches the primal optimum, or a Farkas
//! combination of the constraints that proves infeasibility.
//!
//! Multiplier convention for a constraint `a·x (rel) b`: `y ≥ 0` for `≤`,
//! `y ≤ 0` for `≥`, free for `=`. With that convention every feasible `x`
//! satisfies `Σ y_k (a_k·x) ≤ Σ y_k b_k`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{check_dim, Error, Result};

pub type Rational = BigRational;

/// Shorthand for `n / d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }

    fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    fn multiplier_sign_ok(self, y: &Rational) -> bool {
        match self {
            Relation::Le => !y.is_negative(),
            Relation::Ge => !y.is_positive(),
            Relation::Eq => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub bound: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraintSystem {
    variable_count: usize,
    constraints: Vec<Constraint>,
    nonnegative: Vec<bool>,
}

impl LinearConstraintSystem {
    /// A system with no constraints whose variables are all sign-free.
    pub fn new(variable_count: usize) -> Self {
        Self {
            variable_count,
            constraints: Vec::new(),
            nonnegative: vec![false; variable_count],
        }
    }

    /// A system with no constraints whose variables are all `≥ 0`.
    pub fn nonnegative(variable_count: usize) -> Self {
        Self {
            variable_count,
            constraints: Vec::new(),
            nonnegative: vec![true; variable_count],
        }
    }

    pub fn set_nonnegative(&mut self, var: usize, nonnegative: bool) -> &mut Self {
        self.nonnegative[var] = nonnegative;
        self
    }

    pub fn add(
        &mut self,
        coefficients: Vec<Rational>,
        relation: Relation,
        bound: Rational,
    ) -> Result<&mut Self> {
        check_dim(self.variable_count, coefficients.len())?;
        self.constraints.push(Constraint {
            coefficients,
            relation,
            bound,
        });
        Ok(self)
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn is_nonnegative(&self, var: usize) -> bool {
        self.nonnegative[var]
    }

    /// Exact check that `x` satisfies every constraint and sign restriction.
    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        if x.len() != self.variable_count {
            return false;
        }
        let signs = x
            .iter()
            .zip(&self.nonnegative)
            .all(|(v, &nn)| !nn || !v.is_negative());
        signs
            && self
                .constraints
                .iter()
                .all(|c| c.relation.holds(&dot(&c.coefficients, x), &c.bound))
    }

    /// `Σ y_k a_k` and `Σ y_k b_k`, or `None` if a multiplier has the wrong sign.
    fn combine(&self, y: &[Rational]) -> Option<(Vec<Rational>, Rational)> {
        if y.len() != self.constraints.len() {
            return None;
        }
        let mut lhs = vec![Rational::zero(); self.variable_count];
        let mut rhs = Rational::zero();
        for (c, yk) in self.constraints.iter().zip(y) {
            if !c.relation.multiplier_sign_ok(yk) {
                return None;
            }
            if yk.is_zero() {
                continue;
            }
            for (l, a) in lhs.iter_mut().zip(&c.coefficients) {
                *l += yk * a;
            }
            rhs += yk * &c.bound;
        }
        Some((lhs, rhs))
    }

    /// Exact check of a Farkas certificate: the combination `Σ y_k a_k` is
    /// `≥ 0` on sign-restricted variables, `= 0` on free ones, while
    /// `Σ y_k b_k < 0`.
    pub fn verify_farkas(&self, y: &[Rational]) -> bool {
        let Some((lhs, rhs)) = self.combine(y) else {
            return false;
        };
        rhs.is_negative()
            && lhs.iter().zip(&self.nonnegative).all(|(l, &nn)| {
                if nn {
                    !l.is_negative()
                } else {
                    l.is_zero()
                }
            })
    }

    /// Exact check that `y` is dual feasible for `max objective·x` and proves
    /// the upper bound `value`.
    pub fn verify_dual_bound(&self, objective: &[Rational], y: &[Rational], value: &Rational) -> bool {
        if objective.len() != self.variable_count {
            return false;
        }
        let Some((lhs, rhs)) = self.combine(y) else {
            return false;
        };
        &rhs == value
            && lhs
                .iter()
                .zip(objective)
                .zip(&self.nonnegative)
                .all(|((l, c), &nn)| if nn { l >= c } else { l == c })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        optimum: Rational,
        point: Vec<Rational>,
        /// Optimal dual multipliers, one per constraint.
        dual: Vec<Rational>,
    },
    /// `point + t·ray` is feasible for every `t ≥ 0` and the objective grows along `ray`.
    Unbounded {
        point: Vec<Rational>,
        ray: Vec<Rational>,
    },
    Infeasible {
        farkas: Vec<Rational>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible(Vec<Rational>),
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Maximizes `objective·x` over `system`.
pub fn maximize(objective: &[Rational], system: &LinearConstraintSystem) -> Result<LpOutcome> {
    check_dim(system.variable_count, objective.len())?;
    let outcome = Tableau::build(system).solve(objective);
    check_outcome(objective, system, &outcome)?;
    Ok(outcome)
}

pub fn feasible(system: &LinearConstraintSystem) -> Result<Feasibility> {
    let zero = vec![Rational::zero(); system.variable_count];
    match maximize(&zero, system)? {
        LpOutcome::Optimal { point, .. } => Ok(Feasibility::Feasible(point)),
        LpOutcome::Infeasible { farkas } => Ok(Feasibility::Infeasible(farkas)),
        LpOutcome::Unbounded { .. } => unreachable!("a zero objective cannot be unbounded"),
    }
}

fn check_outcome(objective: &[Rational], system: &LinearConstraintSystem, outcome: &LpOutcome) -> Result<()> {
    let ok = match outcome {
        LpOutcome::Optimal { optimum, point, dual } => {
            system.is_satisfied_by(point)
                && &dot(objective, point) == optimum
                && system.verify_dual_bound(objective, dual, optimum)
        }
        LpOutcome::Infeasible { farkas } => system.verify_farkas(farkas),
        LpOutcome::Unbounded { point, ray } => {
            let mut shifted: Vec<Rational> = point.iter().zip(ray).map(|(p, r)| p + r).collect();
            let ok_unit = system.is_satisfied_by(&shifted);
            for (s, r) in shifted.iter_mut().zip(ray) {
                *s += r;
            }
            system.is_satisfied_by(point)
                && ok_unit
                && system.is_satisfied_by(&shifted)
                && dot(objective, ray).is_positive()
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Certificate(format!("simplex outcome failed verification: {outcome:?}")))
    }
}

/// Where an original variable lives in the standard-form tableau.
#[derive(Clone, Copy)]
enum VarColumns {
    NonNeg(usize),
    Split(usize, usize),
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    columns: usize,
    artificial_start: usize,
    var_columns: Vec<VarColumns>,
    /// Column that was basic for each row in the starting identity basis.
    initial_basic: Vec<usize>,
    /// `+1` or `-1`: the factor applied to each row so that its bound is non-negative.
    row_sign: Vec<Rational>,
}

enum Phase {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn build(system: &LinearConstraintSystem) -> Self {
        let mut var_columns = Vec::with_capacity(system.variable_count);
        let mut next = 0;
        for &nn in &system.nonnegative {
            if nn {
                var_columns.push(VarColumns::NonNeg(next));
                next += 1;
            } else {
                var_columns.push(VarColumns::Split(next, next + 1));
                next += 2;
            }
        }
        let structural = next;
        let m = system.constraints.len();

        let mut relations = Vec::with_capacity(m);
        let mut row_sign = Vec::with_capacity(m);
        for c in &system.constraints {
            if c.bound.is_negative() {
                relations.push(c.relation.flipped());
                row_sign.push(-Rational::one());
            } else {
                relations.push(c.relation);
                row_sign.push(Rational::one());
            }
        }
        let slack_count = relations.iter().filter(|r| **r != Relation::Eq).count();
        let artificial_count = relations.iter().filter(|r| **r != Relation::Le).count();
        let artificial_start = structural + slack_count;
        let columns = artificial_start + artificial_count;

        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack = structural;
        let mut artificial = artificial_start;
        for (k, c) in system.constraints.iter().enumerate() {
            let sign = &row_sign[k];
            let mut row = vec![Rational::zero(); columns];
            for (j, a) in c.coefficients.iter().enumerate() {
                match var_columns[j] {
                    VarColumns::NonNeg(p) => row[p] = sign * a,
                    VarColumns::Split(p, q) => {
                        row[p] = sign * a;
                        row[q] = -(sign * a);
                    }
                }
            }
            match relations[k] {
                Relation::Le => {
                    row[slack] = Rational::one();
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Rational::one();
                    slack += 1;
                    row[artificial] = Rational::one();
                    basis.push(artificial);
                    artificial += 1;
                }
                Relation::Eq => {
                    row[artificial] = Rational::one();
                    basis.push(artificial);
                    artificial += 1;
                }
            }
            rows.push(row);
            rhs.push(sign * &c.bound);
        }
        let initial_basic = basis.clone();
        Self {
            rows,
            rhs,
            basis,
            columns,
            artificial_start,
            var_columns,
            initial_basic,
            row_sign,
        }
    }

    fn is_artificial(&self, col: usize) -> bool {
        col >= self.artificial_start
    }

    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut d: Vec<Rational> = cost.iter().map(|c| -c).collect();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (dj, a) in d.iter_mut().zip(row) {
                if !a.is_zero() {
                    *dj += cb * a;
                }
            }
        }
        d
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for a in self.rows[r].iter_mut() {
            if !a.is_zero() {
                *a *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (a, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *a -= &f * p;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Primal simplex for `max cost·x` with Bland's rule; artificial columns
    /// only enter when `allow_artificial` is set.
    fn run(&mut self, cost: &[Rational], allow_artificial: bool) -> Phase {
        loop {
            let d = self.reduced_costs(cost);
            let entering = (0..self.columns).find(|&j| {
                (allow_artificial || !self.is_artificial(j))
                    && d[j].is_negative()
                    && !self.basis.contains(&j)
            });
            let Some(col) = entering else {
                return Phase::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = &row[col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, col),
                None => return Phase::Unbounded(col),
            }
        }
    }

    fn basic_solution(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.columns];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.rhs[i].clone();
        }
        x
    }

    fn to_original(&self, x: &[Rational]) -> Vec<Rational> {
        self.var_columns
            .iter()
            .map(|vc| match *vc {
                VarColumns::NonNeg(p) => x[p].clone(),
                VarColumns::Split(p, q) => &x[p] - &x[q],
            })
            .collect()
    }

    /// Row multipliers `c_B B⁻¹`, read off the starting identity columns and
    /// mapped back to the orientation of the original constraints.
    fn duals(&self, cost: &[Rational]) -> Vec<Rational> {
        let d = self.reduced_costs(cost);
        self.initial_basic
            .iter()
            .zip(&self.row_sign)
            .map(|(&col, sign)| (&d[col] + &cost[col]) * sign)
            .collect()
    }

    fn solve(mut self, objective: &[Rational]) -> LpOutcome {
        let mut phase_one = vec![Rational::zero(); self.columns];
        for c in phase_one.iter_mut().skip(self.artificial_start) {
            *c = -Rational::one();
        }
        if let Phase::Unbounded(_) = self.run(&phase_one, true) {
            unreachable!("phase one objective is bounded above by zero");
        }
        let infeasibility: Rational = self
            .basis
            .iter()
            .zip(&self.rhs)
            .filter(|(b, _)| self.is_artificial(**b))
            .map(|(_, v)| v.clone())
            .sum();
        if infeasibility.is_positive() {
            return LpOutcome::Infeasible {
                farkas: self.duals(&phase_one),
            };
        }

        // Drive zero-level artificials out of the basis where a structural pivot exists.
        for r in 0..self.rows.len() {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            if let Some(c) = (0..self.artificial_start).find(|&j| !self.rows[r][j].is_zero()) {
                self.pivot(r, c);
            }
        }

        let mut cost = vec![Rational::zero(); self.columns];
        for (vc, c) in self.var_columns.iter().zip(objective) {
            match *vc {
                VarColumns::NonNeg(p) => cost[p] = c.clone(),
                VarColumns::Split(p, q) => {
                    cost[p] = c.clone();
                    cost[q] = -c;
                }
            }
        }
        match self.run(&cost, false) {
            Phase::Optimal => {
                let x = self.basic_solution();
                let point = self.to_original(&x);
                LpOutcome::Optimal {
                    optimum: dot(objective, &point),
                    point,
                    dual: self.duals(&cost),
                }
            }
            Phase::Unbounded(col) => {
                let x = self.basic_solution();
                let mut direction = vec![Rational::zero(); self.columns];
                direction[col] = Rational::one();
                for (i, &b) in self.basis.iter().enumerate() {
                    direction[b] = -&self.rows[i][col];
                }
                LpOutcome::Unbounded {
                    point: self.to_original(&x),
                    ray: self.to_original(&direction),
                }
            }
        }
    }
}
