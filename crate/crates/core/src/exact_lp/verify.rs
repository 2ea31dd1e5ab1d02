use std::fmt;

use num_traits::{Signed, Zero};

use super::{LPModel, LPSolution, LpStatus, Relation, Sense};
use crate::Rational;

/// First certificate condition found to fail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotOptimal(LpStatus),
    Shape { primal: usize, dual: usize },
    NegativePrimal { var: usize, value: Rational },
    RowViolated { row: usize, lhs: Rational, relation: Relation, rhs: Rational },
    DualSign { row: usize, value: Rational },
    ReducedCost { var: usize, value: Rational },
    SlackPrimal { var: usize },
    SlackDual { row: usize },
    Objective { primal: Rational, dual: Rational, claimed: Rational },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotOptimal(s) => write!(f, "status is {s:?}"),
            Violation::Shape { primal, dual } => write!(f, "wrong vector lengths ({primal}, {dual})"),
            Violation::NegativePrimal { var, value } => write!(f, "x[{var}] = {value} < 0"),
            Violation::RowViolated { row, lhs, relation, rhs } => {
                write!(f, "row {row}: {lhs} {relation} {rhs} fails")
            }
            Violation::DualSign { row, value } => write!(f, "row {row}: multiplier {value} has the wrong sign"),
            Violation::ReducedCost { var, value } => write!(f, "x[{var}]: reduced cost {value} has the wrong sign"),
            Violation::SlackPrimal { var } => write!(f, "x[{var}] > 0 with nonzero reduced cost"),
            Violation::SlackDual { row } => write!(f, "row {row} is slack with a nonzero multiplier"),
            Violation::Objective { primal, dual, claimed } => {
                write!(f, "objective mismatch: primal {primal}, dual {dual}, claimed {claimed}")
            }
        }
    }
}

impl std::error::Error for Violation {}

/// Rechecks primal feasibility, dual feasibility, complementary slackness
/// and equality of the objectives, independently of how the solution was found.
pub fn verify_optimality(model: &LPModel, sol: &LPSolution) -> Result<(), Violation> {
    if sol.status != LpStatus::Optimal {
        return Err(Violation::NotOptimal(sol.status));
    }
    if sol.primal.len() != model.num_vars || sol.dual.len() != model.constraints.len() {
        return Err(Violation::Shape { primal: sol.primal.len(), dual: sol.dual.len() });
    }
    let x = &sol.primal;
    let y = &sol.dual;
    for (j, v) in x.iter().enumerate() {
        if v.is_negative() {
            return Err(Violation::NegativePrimal { var: j, value: v.clone() });
        }
    }
    let max = model.sense == Sense::Max;
    for (i, c) in model.constraints.iter().enumerate() {
        let lhs: Rational = c.coeffs.iter().map(|(j, a)| a * &x[*j]).sum();
        let ok = match c.relation {
            Relation::Le => lhs <= c.rhs,
            Relation::Ge => lhs >= c.rhs,
            Relation::Eq => lhs == c.rhs,
        };
        if !ok {
            return Err(Violation::RowViolated { row: i, lhs, relation: c.relation, rhs: c.rhs.clone() });
        }
        let sign_ok = match (c.relation, max) {
            (Relation::Eq, _) => true,
            (Relation::Le, true) | (Relation::Ge, false) => !y[i].is_negative(),
            (Relation::Ge, true) | (Relation::Le, false) => !y[i].is_positive(),
        };
        if !sign_ok {
            return Err(Violation::DualSign { row: i, value: y[i].clone() });
        }
        if !y[i].is_zero() && lhs != c.rhs {
            return Err(Violation::SlackDual { row: i });
        }
    }
    let mut rc = model.objective_dense();
    for (i, c) in model.constraints.iter().enumerate() {
        if y[i].is_zero() {
            continue;
        }
        for (j, a) in &c.coeffs {
            rc[*j] -= &y[i] * a;
        }
    }
    for (j, r) in rc.iter().enumerate() {
        let wrong = if max { r.is_positive() } else { r.is_negative() };
        if wrong {
            return Err(Violation::ReducedCost { var: j, value: r.clone() });
        }
        if x[j].is_positive() && !r.is_zero() {
            return Err(Violation::SlackPrimal { var: j });
        }
    }
    let primal = model.evaluate(x);
    let dual: Rational = model.constraints.iter().zip(y).map(|(c, yi)| yi * &c.rhs).sum();
    if primal != dual || primal != sol.objective_value {
        return Err(Violation::Objective { primal, dual, claimed: sol.objective_value.clone() });
    }
    Ok(())
}
