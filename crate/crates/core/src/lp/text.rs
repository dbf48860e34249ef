//! Line-oriented text dump of an [`LpProblem`], for debugging.
//!
//! ```text
//! # comment lines and blank lines are ignored
//! var <name> <lo> <hi> <cost>
//! con <le|eq|ge> <rhs> <index>:<coef> <index>:<coef> ...
//! ```
//!
//! Variables are numbered in the order of their `var` lines, starting at 0.
//! Infinite bounds are written `inf` / `-inf`. Numbers use Rust's shortest
//! round-trip formatting, so `load(dump(p)) == p` exactly. Whitespace inside
//! names is replaced by `_` on dump.

use std::fmt::Write;

use super::{Constraint, LpProblem, Relation};
use crate::{Error, Result};

pub fn dump(problem: &LpProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {} variables, {} constraints",
        problem.n_vars(),
        problem.constraints.len()
    );
    for j in 0..problem.n_vars() {
        let name: String = problem.var_names[j]
            .chars()
            .map(|c| if c.is_whitespace() { '_' } else { c })
            .collect();
        let name = if name.is_empty() { format!("x{j}") } else { name };
        let (lo, hi) = problem.bounds[j];
        let _ = writeln!(out, "var {name} {lo} {hi} {}", problem.objective[j]);
    }
    for c in &problem.constraints {
        let rel = match c.relation {
            Relation::Le => "le",
            Relation::Eq => "eq",
            Relation::Ge => "ge",
        };
        let _ = write!(out, "con {rel} {}", c.rhs);
        for &(j, a) in &c.terms {
            let _ = write!(out, " {j}:{a}");
        }
        out.push('\n');
    }
    out
}

pub fn load(text: &str) -> Result<LpProblem> {
    let mut p = LpProblem::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| Error::InvalidInput(format!("line {}: {msg}", lineno + 1));
        let num = |s: &str| s.parse::<f64>().map_err(|_| err(&format!("bad number {s:?}")));
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "var" => {
                if fields.len() != 5 {
                    return Err(err("expected `var <name> <lo> <hi> <cost>`"));
                }
                p.add_var(fields[1], num(fields[2])?, num(fields[3])?, num(fields[4])?);
            }
            "con" => {
                if fields.len() < 3 {
                    return Err(err("expected `con <rel> <rhs> [terms]`"));
                }
                let relation = match fields[1] {
                    "le" => Relation::Le,
                    "eq" => Relation::Eq,
                    "ge" => Relation::Ge,
                    other => return Err(err(&format!("unknown relation {other:?}"))),
                };
                let rhs = num(fields[2])?;
                let mut terms = Vec::with_capacity(fields.len() - 3);
                for t in &fields[3..] {
                    let (j, a) = t.split_once(':').ok_or_else(|| err(&format!("bad term {t:?}")))?;
                    let j = j.parse::<usize>().map_err(|_| err(&format!("bad index {j:?}")))?;
                    terms.push((j, num(a)?));
                }
                p.constraints.push(Constraint { terms, relation, rhs });
            }
            other => return Err(err(&format!("unknown record {other:?}"))),
        }
    }
    p.validate()?;
    Ok(p)
}
