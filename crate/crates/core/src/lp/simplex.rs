//! Dense bounded-variable primal simplex.
//!
//! Internally every variable `z` is nonnegative with an optional finite
//! upper bound. Original variables map onto internal columns by a shift
//! (`x = lo + z`), a mirror (`x = hi - z`) or a split (`x = z+ - z-`).

use super::{LpProblem, LpSolution, LpStatus, Relation};
use crate::lp::LpOptions;

/// Entries with smaller magnitude are never used as pivots.
const PIVOT_TOL: f64 = 1e-9;
/// Reduced-cost threshold for optimality.
const OPT_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots before switching to Bland's rule.
const STALL_LIMIT: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy)]
enum ColMap {
    Shift { col: usize, lo: f64 },
    Mirror { col: usize, hi: f64 },
    Split { pos: usize, neg: usize },
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    IterationLimit,
}

struct Tableau {
    n_cols: usize,
    /// Row-major `m x n_cols`, always equal to `B^-1 A`.
    a: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    d: Vec<f64>,
    barred: Vec<bool>,
}

impl Tableau {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.n_cols..(i + 1) * self.n_cols]
    }

    fn price(&mut self) {
        self.d.copy_from_slice(&self.cost);
        for i in 0..self.m() {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.a[i * self.n_cols..(i + 1) * self.n_cols];
                for (dj, aij) in self.d.iter_mut().zip(row) {
                    *dj -= cb * aij;
                }
            }
        }
        for i in 0..self.m() {
            self.d[self.basis[i]] = 0.0;
        }
    }

    fn value(&self, col: usize, row_of: &[Option<usize>]) -> f64 {
        match self.state[col] {
            VarState::Basic => self.beta[row_of[col].expect("basic column has a row")],
            VarState::Lower => 0.0,
            VarState::Upper => self.upper[col],
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let n = self.n_cols;
        let inv = 1.0 / self.a[r * n + q];
        for v in &mut self.a[r * n..(r + 1) * n] {
            *v *= inv;
        }
        self.a[r * n + q] = 1.0;
        let (head, tail) = self.a.split_at_mut(r * n);
        let (prow, rest) = tail.split_at_mut(n);
        for chunk in head.chunks_exact_mut(n).chain(rest.chunks_exact_mut(n)) {
            let f = chunk[q];
            if f != 0.0 {
                for (v, p) in chunk.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
                chunk[q] = 0.0;
            }
        }
        let f = self.d[q];
        if f != 0.0 {
            for (v, p) in self.d.iter_mut().zip(prow.iter()) {
                *v -= f * p;
            }
            self.d[q] = 0.0;
        }
        let leaving = self.basis[r];
        self.basis[r] = q;
        self.state[q] = VarState::Basic;
        debug_assert_ne!(leaving, q);
    }

    fn choose_entering(&self, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.n_cols {
            if self.barred[j] || self.upper[j] <= 0.0 {
                continue;
            }
            let score = match self.state[j] {
                VarState::Basic => continue,
                VarState::Lower if self.d[j] < -OPT_TOL => -self.d[j],
                VarState::Upper if self.d[j] > OPT_TOL => self.d[j],
                _ => continue,
            };
            if bland {
                return Some(j);
            }
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((j, score));
            }
        }
        best.map(|(j, _)| j)
    }

    fn run(&mut self, iterations: &mut usize, max_iterations: usize) -> PhaseEnd {
        let mut bland = false;
        let mut stall = 0usize;
        loop {
            let Some(q) = self.choose_entering(bland) else {
                return PhaseEnd::Optimal;
            };
            if *iterations >= max_iterations {
                return PhaseEnd::IterationLimit;
            }
            *iterations += 1;

            let dir = if self.state[q] == VarState::Lower { 1.0 } else { -1.0 };
            let n = self.n_cols;
            // (row, step, leaves at upper, |pivot|)
            let mut leave: Option<(usize, f64, bool, f64)> = None;
            for i in 0..self.m() {
                let alpha = dir * self.a[i * n + q];
                let (limit, to_upper) = if alpha > PIVOT_TOL {
                    (self.beta[i] / alpha, false)
                } else if alpha < -PIVOT_TOL && self.upper[self.basis[i]].is_finite() {
                    ((self.upper[self.basis[i]] - self.beta[i]) / -alpha, true)
                } else {
                    continue;
                };
                let limit = limit.max(0.0);
                let better = match leave {
                    None => true,
                    Some((r, best, _, mag)) => {
                        if limit < best - 1e-12 {
                            true
                        } else if limit <= best + 1e-12 {
                            if bland {
                                self.basis[i] < self.basis[r]
                            } else {
                                alpha.abs() > mag
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some((i, limit, to_upper, alpha.abs()));
                }
            }

            let flip = self.upper[q];
            let step = match leave {
                None if flip.is_infinite() => return PhaseEnd::Unbounded,
                None => flip,
                Some((_, t, _, _)) => t.min(flip),
            };
            if step <= 1e-12 {
                stall += 1;
                if stall >= STALL_LIMIT {
                    bland = true;
                }
            } else {
                stall = 0;
            }
            if step != 0.0 {
                for i in 0..self.m() {
                    let aiq = self.a[i * n + q];
                    if aiq != 0.0 {
                        self.beta[i] -= step * dir * aiq;
                    }
                }
            }
            match leave {
                Some((r, t, to_upper, _)) if t < flip => {
                    let entering_value = if dir > 0.0 { step } else { flip - step };
                    let leaving = self.basis[r];
                    self.pivot(r, q);
                    self.beta[r] = entering_value;
                    self.state[leaving] = if to_upper { VarState::Upper } else { VarState::Lower };
                }
                _ => {
                    self.state[q] = if dir > 0.0 { VarState::Upper } else { VarState::Lower };
                }
            }
        }
    }
}

pub(super) fn solve(problem: &LpProblem, bounds: &[(f64, f64)], options: &LpOptions) -> LpSolution {
    let n_vars = problem.n_vars();
    let infeasible = |iterations| LpSolution {
        status: LpStatus::Infeasible,
        x: vec![0.0; n_vars],
        objective_value: f64::NAN,
        iterations,
        duals: Vec::new(),
    };

    // Structural columns.
    let mut maps = Vec::with_capacity(n_vars);
    let mut upper = Vec::new();
    let mut cost = Vec::new();
    for (j, &(lo, hi)) in bounds.iter().enumerate() {
        let c = problem.objective[j];
        if lo.is_finite() {
            maps.push(ColMap::Shift { col: upper.len(), lo });
            upper.push(hi - lo);
            cost.push(c);
        } else if hi.is_finite() {
            maps.push(ColMap::Mirror { col: upper.len(), hi });
            upper.push(f64::INFINITY);
            cost.push(-c);
        } else {
            maps.push(ColMap::Split {
                pos: upper.len(),
                neg: upper.len() + 1,
            });
            upper.extend([f64::INFINITY, f64::INFINITY]);
            cost.extend([c, -c]);
        }
    }
    let n_struct = upper.len();

    // Rows in internal coordinates; empty rows are checked and dropped.
    struct Row {
        orig: usize,
        coeffs: Vec<(usize, f64)>,
        rhs: f64,
        relation: Relation,
    }
    let mut rows = Vec::new();
    for (i, con) in problem.constraints.iter().enumerate() {
        let mut dense_terms: Vec<(usize, f64)> = Vec::with_capacity(con.terms.len());
        let mut rhs = con.rhs;
        for &(j, a) in &con.terms {
            if a == 0.0 {
                continue;
            }
            match maps[j] {
                ColMap::Shift { col, lo } => {
                    rhs -= a * lo;
                    dense_terms.push((col, a));
                }
                ColMap::Mirror { col, hi } => {
                    rhs -= a * hi;
                    dense_terms.push((col, -a));
                }
                ColMap::Split { pos, neg } => {
                    dense_terms.push((pos, a));
                    dense_terms.push((neg, -a));
                }
            }
        }
        dense_terms.sort_by_key(|&(c, _)| c);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(dense_terms.len());
        for (c, a) in dense_terms {
            match merged.last_mut() {
                Some((lc, la)) if *lc == c => *la += a,
                _ => merged.push((c, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        if merged.is_empty() {
            let tol = options.feas_tol * (1.0 + con.rhs.abs());
            let ok = match con.relation {
                Relation::Le => rhs >= -tol,
                Relation::Ge => rhs <= tol,
                Relation::Eq => rhs.abs() <= tol,
            };
            if !ok {
                return infeasible(0);
            }
            continue;
        }
        rows.push(Row {
            orig: i,
            coeffs: merged,
            rhs,
            relation: con.relation,
        });
    }
    let m = rows.len();

    // Slack columns, then artificial columns where no slack can start basic.
    let mut slack_of = vec![None; m];
    for (r, row) in rows.iter().enumerate() {
        if row.relation != Relation::Eq {
            slack_of[r] = Some(upper.len());
            upper.push(f64::INFINITY);
            cost.push(0.0);
        }
    }
    let mut sign = vec![1.0; m];
    let mut init_col = vec![0usize; m];
    let mut art_cols = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        if row.rhs < 0.0 {
            sign[r] = -1.0;
        }
        let slack_coef = match row.relation {
            Relation::Le => sign[r],
            Relation::Ge => -sign[r],
            Relation::Eq => 0.0,
        };
        if slack_coef > 0.0 {
            init_col[r] = slack_of[r].expect("inequality rows carry a slack");
        } else {
            init_col[r] = upper.len();
            art_cols.push(upper.len());
            upper.push(f64::INFINITY);
            cost.push(0.0);
        }
    }
    let n_cols = upper.len();

    let mut a = vec![0.0; m * n_cols];
    let mut beta = vec![0.0; m];
    for (r, row) in rows.iter().enumerate() {
        let base = r * n_cols;
        for &(c, v) in &row.coeffs {
            a[base + c] = sign[r] * v;
        }
        if let Some(s) = slack_of[r] {
            a[base + s] = match row.relation {
                Relation::Le => sign[r],
                _ => -sign[r],
            };
        }
        a[base + init_col[r]] = 1.0;
        beta[r] = sign[r] * row.rhs;
    }
    let mut state = vec![VarState::Lower; n_cols];
    for &c in &init_col {
        state[c] = VarState::Basic;
    }
    let mut is_art = vec![false; n_cols];
    for &c in &art_cols {
        is_art[c] = true;
    }

    let mut tab = Tableau {
        n_cols,
        a,
        beta,
        basis: init_col.clone(),
        state,
        upper,
        cost: vec![0.0; n_cols],
        d: vec![0.0; n_cols],
        barred: vec![false; n_cols],
    };
    let mut iterations = 0usize;

    if !art_cols.is_empty() {
        for &c in &art_cols {
            tab.cost[c] = 1.0;
        }
        tab.price();
        match tab.run(&mut iterations, options.max_iterations) {
            PhaseEnd::Optimal => {}
            PhaseEnd::IterationLimit => {
                return LpSolution {
                    status: LpStatus::IterationLimit,
                    x: vec![0.0; n_vars],
                    objective_value: f64::NAN,
                    iterations,
                    duals: Vec::new(),
                };
            }
            PhaseEnd::Unbounded => unreachable!("phase one objective is bounded below"),
        }
        let scale = 1.0 + rows.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);
        let residual: f64 = (0..m).filter(|&r| is_art[tab.basis[r]]).map(|r| tab.beta[r].max(0.0)).sum();
        if residual > options.feas_tol * scale {
            return infeasible(iterations);
        }
        // Pivot zero-valued artificials out of the basis where possible.
        for r in 0..m {
            if !is_art[tab.basis[r]] {
                continue;
            }
            let row = tab.row(r);
            let mut best: Option<(usize, f64)> = None;
            for (j, &v) in row.iter().enumerate() {
                if is_art[j] || tab.state[j] == VarState::Basic {
                    continue;
                }
                if v.abs() > 1e-7 && best.is_none_or(|(_, b)| v.abs() > b) {
                    best = Some((j, v.abs()));
                }
            }
            if let Some((q, _)) = best {
                let entering_value = if tab.state[q] == VarState::Upper { tab.upper[q] } else { 0.0 };
                let leaving = tab.basis[r];
                tab.pivot(r, q);
                tab.beta[r] = entering_value;
                tab.state[leaving] = VarState::Lower;
            }
        }
        for &c in &art_cols {
            tab.barred[c] = true;
            tab.upper[c] = 0.0;
            tab.cost[c] = 0.0;
        }
    }

    tab.cost[..n_struct].copy_from_slice(&cost[..n_struct]);
    tab.price();
    let status = match tab.run(&mut iterations, options.max_iterations) {
        PhaseEnd::Optimal => LpStatus::Optimal,
        PhaseEnd::Unbounded => LpStatus::Unbounded,
        PhaseEnd::IterationLimit => LpStatus::IterationLimit,
    };

    let mut row_of = vec![None; n_cols];
    for (r, &c) in tab.basis.iter().enumerate() {
        row_of[c] = Some(r);
    }
    let mut x = Vec::with_capacity(n_vars);
    for (j, map) in maps.iter().enumerate() {
        let v = match *map {
            ColMap::Shift { col, lo } => lo + tab.value(col, &row_of),
            ColMap::Mirror { col, hi } => hi - tab.value(col, &row_of),
            ColMap::Split { pos, neg } => tab.value(pos, &row_of) - tab.value(neg, &row_of),
        };
        let (lo, hi) = bounds[j];
        x.push(v.clamp(lo, hi));
    }
    let objective_value = problem.objective_value(&x);

    let duals = if status == LpStatus::Optimal {
        let mut y = vec![0.0; problem.constraints.len()];
        for (r, row) in rows.iter().enumerate() {
            y[row.orig] = -sign[r] * tab.d[init_col[r]];
        }
        y
    } else {
        Vec::new()
    };

    LpSolution {
        status,
        x,
        objective_value,
        iterations,
        duals,
    }
}
