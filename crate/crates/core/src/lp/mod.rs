//! Linear programs with bounded variables.
//!
//! ```text
//! minimize    c·x
//! subject to  a_i·x  {<=, =, >=}  b_i     for every row i
//!             lo_j <= x_j <= hi_j         (either side may be infinite)
//! ```
//!
//! Solved by a dense two-phase primal simplex that keeps nonbasic variables
//! at either of their bounds. Dantzig pricing is used until the method
//! stalls on degenerate pivots, after which Bland's lowest-index rule takes
//! over for the remainder of the phase. Every choice is index-ordered, so a
//! given problem always produces the same iterate sequence.

mod simplex;
pub mod text;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    /// Sparse row: `(variable index, coefficient)`. Repeated indices add up.
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates this row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
    pub constraints: Vec<Constraint>,
    pub var_names: Vec<String>,
}

impl LpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    /// Adds a variable and returns its index.
    pub fn add_var(&mut self, name: impl Into<String>, lo: f64, hi: f64, cost: f64) -> usize {
        self.objective.push(cost);
        self.bounds.push((lo, hi));
        self.var_names.push(name.into());
        self.objective.len() - 1
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> usize {
        self.constraints.push(Constraint { terms, relation, rhs });
        self.constraints.len() - 1
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest row violation scaled by `1 + |rhs|` and largest bound
    /// violation, in that order.
    pub fn max_violation(&self, x: &[f64]) -> (f64, f64) {
        let rows = self
            .constraints
            .iter()
            .map(|c| c.violation(x) / (1.0 + c.rhs.abs()))
            .fold(0.0, f64::max);
        let bounds = self
            .bounds
            .iter()
            .zip(x)
            .map(|(&(lo, hi), &v)| (lo - v).max(v - hi).max(0.0))
            .fold(0.0, f64::max);
        (rows, bounds)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        if self.bounds.len() != n || self.var_names.len() != n {
            return Err(Error::Dimension(format!(
                "{n} objective coefficients, {} bounds, {} names",
                self.bounds.len(),
                self.var_names.len()
            )));
        }
        if let Some(j) = self.objective.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("objective coefficient {j} is not finite")));
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::InvalidInput(format!(
                    "variable {} has bounds [{lo}, {hi}]",
                    self.var_names[j]
                )));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(Error::InvalidInput(format!("row {i} has non-finite rhs")));
            }
            for &(j, a) in &c.terms {
                if j >= n {
                    return Err(Error::Dimension(format!("row {i} references variable {j} of {n}")));
                }
                if !a.is_finite() {
                    return Err(Error::InvalidInput(format!("row {i} has a non-finite coefficient")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpOptions {
    pub feas_tol: f64,
    pub max_iterations: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            feas_tol: 1e-7,
            max_iterations: 50_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
    /// Row multipliers of the final basis (`>= 0` on `>=` rows, `<= 0` on
    /// `<=` rows at optimality). Empty unless the status is optimal.
    pub duals: Vec<f64>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

pub fn solve_lp(problem: &LpProblem, options: &LpOptions) -> Result<LpSolution> {
    problem.validate()?;
    Ok(simplex::solve(problem, &problem.bounds, options))
}

/// Solves `problem` with its variable bounds replaced by `bounds`.
pub fn solve_lp_with_bounds(problem: &LpProblem, bounds: &[(f64, f64)], options: &LpOptions) -> Result<LpSolution> {
    if bounds.len() != problem.n_vars() {
        return Err(Error::Dimension(format!(
            "{} bounds supplied for {} variables",
            bounds.len(),
            problem.n_vars()
        )));
    }
    for (j, &(lo, hi)) in bounds.iter().enumerate() {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidInput(format!("variable {j} has bounds [{lo}, {hi}]")));
        }
    }
    Ok(simplex::solve(problem, bounds, options))
}

/// Value of the dual objective implied by row multipliers `y`, using the
/// cheapest bound multipliers for the remaining reduced costs. Returns
/// `None` when `y` cannot be completed to a feasible dual point (a reduced
/// cost pushes against an infinite bound, or a multiplier has the wrong
/// sign beyond `tol`).
pub fn dual_objective(problem: &LpProblem, y: &[f64], tol: f64) -> Option<f64> {
    let mut reduced = problem.objective.clone();
    let mut value = 0.0;
    for (c, &yi) in problem.constraints.iter().zip(y) {
        let sign_ok = match c.relation {
            Relation::Le => yi <= tol,
            Relation::Ge => yi >= -tol,
            Relation::Eq => true,
        };
        if !sign_ok {
            return None;
        }
        value += c.rhs * yi;
        for &(j, a) in &c.terms {
            reduced[j] -= a * yi;
        }
    }
    for (r, &(lo, hi)) in reduced.iter().zip(&problem.bounds) {
        if *r > tol {
            if !lo.is_finite() {
                return None;
            }
            value += r * lo;
        } else if *r < -tol {
            if !hi.is_finite() {
                return None;
            }
            value += r * hi;
        }
    }
    Some(value)
}
