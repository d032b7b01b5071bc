//! Exact rational linear programming: dense two-phase simplex with Bland's
//! anti-cycling rule, feasibility witnesses, and Farkas infeasibility
//! certificates that replay in exact arithmetic.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintOp {
    Eq,
    Le,
    Ge,
}

/// One linear constraint a·x (op) rhs over nonnegative variables.
#[derive(Clone, Debug)]
pub struct LpConstraint {
    pub coeffs: Vec<Rat>,
    pub op: ConstraintOp,
    pub rhs: Rat,
}

/// A rational LP over variables x ≥ 0, with optional minimization objective.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub constraints: Vec<LpConstraint>,
    /// Minimize c·x when present; pure feasibility otherwise.
    pub objective: Option<Vec<Rat>>,
}

/// Farkas certificate: multipliers per original constraint proving that no
/// nonnegative solution exists. Valid iff `verify` returns Ok(true).
#[derive(Clone, Debug)]
pub struct FarkasCertificate {
    pub row_multipliers: Vec<Rat>,
}

#[derive(Clone, Debug)]
pub enum LpResult {
    Feasible { witness: Vec<Rat>, objective: Option<Rat> },
    Infeasible(FarkasCertificate),
    Unbounded,
}

impl LinearProgram {
    pub fn feasibility(num_vars: usize) -> LinearProgram {
        LinearProgram { num_vars, constraints: Vec::new(), objective: None }
    }

    pub fn add(&mut self, coeffs: Vec<Rat>, op: ConstraintOp, rhs: Rat) {
        debug_assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(LpConstraint { coeffs, op, rhs });
    }

    fn check_shape(&self) -> Result<()> {
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != self.num_vars {
                return Err(Error::Validation(format!(
                    "constraint {i} has {} coefficients, expected {}",
                    c.coeffs.len(),
                    self.num_vars
                )));
            }
        }
        if let Some(obj) = &self.objective {
            if obj.len() != self.num_vars {
                return Err(Error::Validation("objective length mismatch".into()));
            }
        }
        Ok(())
    }

    /// Evaluate a·x for constraint `i` at point `x`.
    pub fn eval_row(&self, i: usize, x: &[Rat]) -> Rat {
        self.constraints[i]
            .coeffs
            .iter()
            .zip(x.iter())
            .map(|(a, v)| a * v)
            .fold(Rat::zero(), |acc, t| acc + t)
    }

    /// Exact check that `x` is feasible.
    pub fn is_feasible_point(&self, x: &[Rat]) -> bool {
        if x.len() != self.num_vars || x.iter().any(|v| v.is_negative()) {
            return false;
        }
        self.constraints.iter().enumerate().all(|(i, c)| {
            let lhs = self.eval_row(i, x);
            match c.op {
                ConstraintOp::Eq => lhs == c.rhs,
                ConstraintOp::Le => lhs <= c.rhs,
                ConstraintOp::Ge => lhs >= c.rhs,
            }
        })
    }
}

impl FarkasCertificate {
    /// Replay the certificate against the LP: multipliers have the right signs,
    /// the combined constraint has nonpositive coefficients on every variable,
    /// and the combined right-hand side is strictly positive — so a·x (ops) rhs
    /// with x ≥ 0 is impossible.
    pub fn verify(&self, lp: &LinearProgram) -> Result<bool> {
        if self.row_multipliers.len() != lp.constraints.len() {
            return Err(Error::Validation("certificate length mismatch".into()));
        }
        for (c, y) in lp.constraints.iter().zip(&self.row_multipliers) {
            match c.op {
                ConstraintOp::Eq => {}
                ConstraintOp::Le => {
                    if y.is_positive() {
                        return Ok(false);
                    }
                }
                ConstraintOp::Ge => {
                    if y.is_negative() {
                        return Ok(false);
                    }
                }
            }
        }
        for j in 0..lp.num_vars {
            let combined: Rat = lp
                .constraints
                .iter()
                .zip(&self.row_multipliers)
                .map(|(c, y)| &c.coeffs[j] * y)
                .fold(Rat::zero(), |acc, t| acc + t);
            if combined.is_positive() {
                return Ok(false);
            }
        }
        let rhs: Rat = lp
            .constraints
            .iter()
            .zip(&self.row_multipliers)
            .map(|(c, y)| &c.rhs * y)
            .fold(Rat::zero(), |acc, t| acc + t);
        Ok(rhs.is_positive())
    }
}

struct Tableau {
    /// m × (num_cols + 1) body; last column is the rhs.
    rows: Vec<Vec<Rat>>,
    /// Reduced-cost row, length num_cols + 1 (last entry = −objective value).
    cost: Vec<Rat>,
    basis: Vec<usize>,
    num_cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rat {
        &self.rows[i][self.num_cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v = &*v / &pivot;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let factor = r[col].clone();
            for (v, pv) in r.iter_mut().zip(&pivot_row) {
                *v = &*v - &(&factor * pv);
            }
        }
        if !self.cost[col].is_zero() {
            let factor = self.cost[col].clone();
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v = &*v - &(&factor * pv);
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule: smallest eligible entering column, leaving row by minimum
    /// ratio with ties broken by smallest basic variable index.
    fn bland_step(&mut self, allowed: &dyn Fn(usize) -> bool) -> BlandStep {
        let entering = (0..self.num_cols).find(|&j| allowed(j) && self.cost[j].is_negative());
        let col = match entering {
            Some(c) => c,
            None => return BlandStep::Optimal,
        };
        let mut best: Option<(usize, Rat)> = None;
        for i in 0..self.rows.len() {
            if !self.rows[i][col].is_positive() {
                continue;
            }
            let ratio = self.rhs(i) / &self.rows[i][col];
            let better = match &best {
                None => true,
                Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
            };
            if better {
                best = Some((i, ratio));
            }
        }
        match best {
            Some((row, _)) => {
                self.pivot(row, col);
                BlandStep::Pivoted
            }
            None => BlandStep::Unbounded,
        }
    }
}

enum BlandStep {
    Pivoted,
    Optimal,
    Unbounded,
}

/// Solve the LP exactly. Feasible results carry an exact witness (and the
/// optimal objective value when an objective is present); infeasible results
/// carry a Farkas certificate, verified before being returned.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpResult> {
    lp.check_shape()?;
    let m = lp.constraints.len();
    let n = lp.num_vars;
    let num_slack = lp
        .constraints
        .iter()
        .filter(|c| c.op != ConstraintOp::Eq)
        .count();
    let num_cols = n + num_slack + m;
    let art_base = n + num_slack;

    // Standard form rows: structural | slack | artificial | rhs,
    // with rows flipped so every rhs is nonnegative.
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut flips: Vec<bool> = Vec::with_capacity(m);
    let mut slack_idx = 0usize;
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut row = vec![Rat::zero(); num_cols + 1];
        row[..n].clone_from_slice(&c.coeffs);
        if c.op != ConstraintOp::Eq {
            row[n + slack_idx] = match c.op {
                ConstraintOp::Le => Rat::one(),
                ConstraintOp::Ge => -Rat::one(),
                ConstraintOp::Eq => unreachable!(),
            };
            slack_idx += 1;
        }
        row[num_cols] = c.rhs.clone();
        let flip = c.rhs.is_negative();
        if flip {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        row[art_base + i] = Rat::one();
        rows.push(row);
        flips.push(flip);
    }

    // Phase-1 cost row: minimize the sum of artificials. Reduced costs start
    // as c_j − Σ_i row_ij for structural/slack columns (c_j = 0 there).
    let mut cost = vec![Rat::zero(); num_cols + 1];
    for j in 0..=num_cols {
        let mut s = Rat::zero();
        for row in &rows {
            s += &row[j];
        }
        if j < art_base {
            cost[j] = -s;
        } else if j < num_cols {
            cost[j] = Rat::one() - s; // equals zero: artificials are basic
        } else {
            cost[j] = -s; // −(phase-1 objective value)
        }
    }

    let mut t = Tableau { rows, cost, basis: (art_base..num_cols).collect(), num_cols };

    loop {
        match t.bland_step(&|_| true) {
            BlandStep::Pivoted => {}
            BlandStep::Optimal => break,
            BlandStep::Unbounded => {
                // Phase-1 objective is bounded below by zero.
                return Err(Error::Validation("phase-1 simplex reported unbounded".into()));
            }
        }
    }

    let phase1_value = -t.cost[num_cols].clone();
    if phase1_value.is_positive() {
        // y_i = 1 − reduced cost of artificial i, mapped back through row flips.
        let mut y = Vec::with_capacity(m);
        for i in 0..m {
            let yi = Rat::one() - t.cost[art_base + i].clone();
            y.push(if flips[i] { -yi } else { yi });
        }
        let cert = FarkasCertificate { row_multipliers: y };
        if !cert.verify(lp)? {
            return Err(Error::Validation("internal: Farkas certificate failed replay".into()));
        }
        return Ok(LpResult::Infeasible(cert));
    }

    // Drive any residual (degenerate) artificials out of the basis.
    for i in 0..m {
        if t.basis[i] >= art_base {
            if let Some(col) = (0..art_base).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, col);
            }
            // Otherwise the row is redundant; the artificial stays basic at 0.
        }
    }

    let witness_from = |t: &Tableau| -> Vec<Rat> {
        let mut x = vec![Rat::zero(); n];
        for (i, &b) in t.basis.iter().enumerate() {
            if b < n {
                x[b] = t.rhs(i).clone();
            }
        }
        x
    };

    let objective = match &lp.objective {
        None => {
            let x = witness_from(&t);
            debug_assert!(lp.is_feasible_point(&x));
            return Ok(LpResult::Feasible { witness: x, objective: None });
        }
        Some(c) => c,
    };

    // Phase 2: rebuild the reduced-cost row for the real objective and
    // minimize, banning artificial columns from entering.
    let mut full_cost = vec![Rat::zero(); num_cols + 1];
    full_cost[..n].clone_from_slice(objective);
    let mut cost_row = full_cost.clone();
    for (i, &b) in t.basis.iter().enumerate() {
        let cb = full_cost[b].clone();
        if cb.is_zero() {
            continue;
        }
        for j in 0..=num_cols {
            cost_row[j] = &cost_row[j] - &(&cb * &t.rows[i][j]);
        }
    }
    t.cost = cost_row;

    loop {
        match t.bland_step(&|j| j < art_base) {
            BlandStep::Pivoted => {}
            BlandStep::Optimal => break,
            BlandStep::Unbounded => return Ok(LpResult::Unbounded),
        }
    }

    let x = witness_from(&t);
    debug_assert!(lp.is_feasible_point(&x));
    let value = objective
        .iter()
        .zip(&x)
        .map(|(c, v)| c * v)
        .fold(Rat::zero(), |acc, v| acc + v);
    Ok(LpResult::Feasible { witness: x, objective: Some(value) })
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num.into(), den.into())
}
