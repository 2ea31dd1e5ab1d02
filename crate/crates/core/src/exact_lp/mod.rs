//! Exact linear programming over the rationals.
//!
//! Variables are nonnegative. The solver is a revised primal simplex on an
//! exact sparse basis inverse with a lexicographic ratio test, so it always
//! terminates. Large models go through a column-pricing driver, optionally
//! seeded by a floating-point crash start.

pub mod colgen;
mod crash;
mod dump;
mod q;
mod simplex;
mod verify;

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::Rational;

pub use colgen::{solve_by_pricing, solve_by_pricing_from};
pub use crash::float_support;
pub use dump::{dump_model, write_model};
pub use q::Q;
pub use simplex::{Simplex, SimplexOptions};
pub use verify::{verify_optimality, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
    pub name: Option<String>,
}

/// A linear program in nonnegative variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LPModel {
    pub num_vars: usize,
    pub var_names: Vec<Option<String>>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(usize, Rational)>,
    pub sense: Sense,
}

impl LPModel {
    pub fn new(sense: Sense) -> Self {
        LPModel { num_vars: 0, var_names: Vec::new(), constraints: Vec::new(), objective: Vec::new(), sense }
    }

    pub fn add_var(&mut self, name: Option<String>) -> usize {
        self.num_vars += 1;
        self.var_names.push(name);
        self.num_vars - 1
    }

    pub fn add_vars(&mut self, count: usize) -> std::ops::Range<usize> {
        let start = self.num_vars;
        self.num_vars += count;
        self.var_names.resize(self.num_vars, None);
        start..self.num_vars
    }

    /// Adds a row; repeated variable indices are summed and zeros dropped.
    pub fn add_constraint(
        &mut self,
        coeffs: Vec<(usize, Rational)>,
        relation: Relation,
        rhs: Rational,
        name: Option<String>,
    ) -> usize {
        let coeffs = normalize_sparse(coeffs);
        assert!(coeffs.iter().all(|(j, _)| *j < self.num_vars), "constraint refers to an unknown variable");
        self.constraints.push(Constraint { coeffs, relation, rhs, name });
        self.constraints.len() - 1
    }

    pub fn set_objective(&mut self, coeffs: Vec<(usize, Rational)>) {
        self.objective = normalize_sparse(coeffs);
    }

    /// Column-major view: for each variable, its (row, coefficient) entries.
    pub fn columns(&self) -> Vec<Vec<(usize, Rational)>> {
        let mut cols = vec![Vec::new(); self.num_vars];
        for (i, c) in self.constraints.iter().enumerate() {
            for (j, v) in &c.coeffs {
                cols[*j].push((i, v.clone()));
            }
        }
        cols
    }

    pub fn objective_dense(&self) -> Vec<Rational> {
        let mut c = vec![Rational::zero(); self.num_vars];
        for (j, v) in &self.objective {
            c[*j] += v;
        }
        c
    }

    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        self.objective.iter().map(|(j, v)| v * &x[*j]).sum()
    }
}

pub(crate) fn normalize_sparse(mut coeffs: Vec<(usize, Rational)>) -> Vec<(usize, Rational)> {
    coeffs.sort_by_key(|(j, _)| *j);
    let mut out: Vec<(usize, Rational)> = Vec::with_capacity(coeffs.len());
    for (j, v) in coeffs {
        match out.last_mut() {
            Some((k, w)) if *k == j => *w += v,
            _ => out.push((j, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Primal and dual solution. Duals follow the convention that the objective
/// equals `sum dual_i * rhs_i`; for a max problem rows with `<=` carry
/// nonnegative multipliers and rows with `>=` nonpositive ones (reversed for min).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LPSolution {
    pub status: LpStatus,
    pub primal: Vec<Rational>,
    pub dual: Vec<Rational>,
    pub objective_value: Rational,
    pub pivots: u64,
}

/// Solves a model with default options.
pub fn solve(model: &LPModel) -> crate::Result<LPSolution> {
    solve_with(model, &SimplexOptions::default())
}

/// Exact solve of a model with many columns: a floating-point optimum picks
/// the starting columns, exact pricing and simplex do the rest.
pub fn solve_seeded(model: &LPModel, options: &SimplexOptions) -> crate::Result<LPSolution> {
    solve_by_pricing_from(model, options, &float_support(model))
}

pub fn solve_with(model: &LPModel, options: &SimplexOptions) -> crate::Result<LPSolution> {
    let mut s = Simplex::from_model(model);
    s.solve(options)?;
    Ok(s.solution())
}
