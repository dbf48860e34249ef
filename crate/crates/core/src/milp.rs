//! Branch-and-bound over binary variables on top of [`crate::lp`].
//!
//! Nodes are explored best-first by relaxation bound (ties: deeper first,
//! then creation order). The branching variable is the most fractional
//! binary (ties: lowest index) and the floor child is created first. Both
//! children of a node may be solved concurrently, but they are queued in a
//! fixed order and the incumbent is only touched by the driving loop, so
//! the search is identical in sequential and parallel mode.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::lp::{self, LpOptions, LpProblem, LpSolution, LpStatus};
use crate::par::{self, ExecMode};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MilpProblem {
    pub base: LpProblem,
    pub binary_vars: Vec<usize>,
}

impl MilpProblem {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        for &j in &self.binary_vars {
            let Some(&(lo, hi)) = self.base.bounds.get(j) else {
                return Err(Error::Dimension(format!("binary index {j} out of range")));
            };
            if lo < 0.0 || hi > 1.0 {
                return Err(Error::InvalidInput(format!(
                    "binary {} has bounds [{lo}, {hi}] outside [0, 1]",
                    self.base.var_names[j]
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    NodeLimit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MilpOptions {
    pub int_tol: f64,
    /// Absolute optimality gap at which a node is pruned.
    pub gap_tol: f64,
    pub node_limit: usize,
    pub lp: LpOptions,
    pub exec: ExecMode,
}

impl Default for MilpOptions {
    fn default() -> Self {
        MilpOptions {
            int_tol: 1e-6,
            gap_tol: 0.0,
            node_limit: 200_000,
            lp: LpOptions::default(),
            exec: ExecMode::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub status: MilpStatus,
    /// Empty when no integral point was found.
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub nodes_explored: usize,
    /// Objective of the root relaxation.
    pub root_bound: f64,
}

struct Node {
    id: usize,
    depth: usize,
    bound: f64,
    bounds: Vec<(f64, f64)>,
    x: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap pops the greatest element, so "greater" means "explore first".
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.id.cmp(&self.id))
    }
}

fn relax(problem: &MilpProblem, bounds: &[(f64, f64)], opts: &MilpOptions) -> Result<LpSolution> {
    let s = lp::solve_lp_with_bounds(&problem.base, bounds, &opts.lp)?;
    match s.status {
        LpStatus::Optimal | LpStatus::Infeasible => Ok(s),
        LpStatus::Unbounded => Err(Error::Unbounded("LP relaxation is unbounded".into())),
        LpStatus::IterationLimit => Err(Error::SolverLimit(format!(
            "LP iteration limit ({}) hit inside branch and bound",
            opts.lp.max_iterations
        ))),
    }
}

fn most_fractional(problem: &MilpProblem, x: &[f64], int_tol: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &j in &problem.binary_vars {
        let frac = (x[j] - x[j].round()).abs();
        if frac <= int_tol {
            continue;
        }
        let better = match best {
            None => true,
            Some((bj, bf)) => frac > bf || (frac == bf && j < bj),
        };
        if better {
            best = Some((j, frac));
        }
    }
    best.map(|(j, _)| j)
}

/// Re-solves with every binary fixed at its rounded value so the reported
/// point is exactly integral and the continuous part is consistent with it.
fn polish(problem: &MilpProblem, bounds: &[(f64, f64)], x: &[f64], opts: &MilpOptions) -> Result<Option<LpSolution>> {
    let mut fixed = bounds.to_vec();
    for &j in &problem.binary_vars {
        let v = x[j].round();
        fixed[j] = (v, v);
    }
    let s = relax(problem, &fixed, opts)?;
    Ok(s.is_optimal().then_some(s))
}

pub fn solve_milp(problem: &MilpProblem, options: &MilpOptions) -> Result<MilpSolution> {
    problem.validate()?;
    let prune_eps = |inc: f64| options.gap_tol + 1e-9 * (1.0 + inc.abs());

    let root_bounds = problem.base.bounds.clone();
    let root = relax(problem, &root_bounds, options)?;
    if !root.is_optimal() {
        return Ok(MilpSolution {
            status: MilpStatus::Infeasible,
            x: Vec::new(),
            objective_value: f64::NAN,
            nodes_explored: 1,
            root_bound: f64::NAN,
        });
    }
    let root_bound = root.objective_value;

    let mut heap = BinaryHeap::new();
    let mut next_id = 1usize;
    heap.push(Node {
        id: 0,
        depth: 0,
        bound: root.objective_value,
        bounds: root_bounds,
        x: root.x,
    });
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut nodes = 0usize;

    while let Some(node) = heap.pop() {
        if let Some((inc, _)) = &incumbent {
            if node.bound >= inc - prune_eps(*inc) {
                // Best-first: every remaining node is at least as bad.
                break;
            }
        }
        if nodes >= options.node_limit {
            let (objective_value, x) = incumbent.unwrap_or((f64::NAN, Vec::new()));
            return Ok(MilpSolution {
                status: MilpStatus::NodeLimit,
                x,
                objective_value,
                nodes_explored: nodes,
                root_bound,
            });
        }
        nodes += 1;

        let Some(j) = most_fractional(problem, &node.x, options.int_tol) else {
            if let Some(s) = polish(problem, &node.bounds, &node.x, options)? {
                let better = incumbent.as_ref().is_none_or(|(inc, _)| s.objective_value < *inc);
                if better {
                    incumbent = Some((s.objective_value, s.x));
                }
            }
            continue;
        };

        let mut down = node.bounds.clone();
        down[j] = (down[j].0, 0.0);
        let mut up = node.bounds;
        up[j] = (1.0, up[j].1);
        let (sd, su) = par::join(
            options.exec,
            || relax(problem, &down, options),
            || relax(problem, &up, options),
        );
        for (s, bounds) in [(sd?, down), (su?, up)] {
            let id = next_id;
            next_id += 1;
            if !s.is_optimal() {
                continue;
            }
            if let Some((inc, _)) = &incumbent {
                if s.objective_value >= inc - prune_eps(*inc) {
                    continue;
                }
            }
            heap.push(Node {
                id,
                depth: node.depth + 1,
                bound: s.objective_value,
                bounds,
                x: s.x,
            });
        }
    }

    Ok(match incumbent {
        Some((objective_value, x)) => MilpSolution {
            status: MilpStatus::Optimal,
            x,
            objective_value,
            nodes_explored: nodes,
            root_bound,
        },
        None => MilpSolution {
            status: MilpStatus::Infeasible,
            x: Vec::new(),
            objective_value: f64::NAN,
            nodes_explored: nodes,
            root_bound,
        },
    })
}
