//! Floating-point crash start for the exact solver.

use num_traits::ToPrimitive;

use super::{LPModel, Relation, Sense};

/// Columns in the support of a floating-point optimum, or an empty list if
/// the float solve fails. Only used to seed an exact solve, so a wrong
/// answer here costs time, never correctness.
pub fn float_support(model: &LPModel) -> Vec<usize> {
    let direction = match model.sense {
        Sense::Max => microlp::OptimizationDirection::Maximize,
        Sense::Min => microlp::OptimizationDirection::Minimize,
    };
    let mut p = microlp::Problem::new(direction);
    let obj = model.objective_dense();
    let vars: Vec<microlp::Variable> =
        obj.iter().map(|c| p.add_var(c.to_f64().unwrap_or(0.0), (0.0, f64::INFINITY))).collect();
    for c in &model.constraints {
        let mut expr = microlp::LinearExpr::empty();
        for (j, v) in &c.coeffs {
            expr.add(vars[*j], v.to_f64().unwrap_or(0.0));
        }
        let op = match c.relation {
            Relation::Le => microlp::ComparisonOp::Le,
            Relation::Ge => microlp::ComparisonOp::Ge,
            Relation::Eq => microlp::ComparisonOp::Eq,
        };
        p.add_constraint(expr, op, c.rhs.to_f64().unwrap_or(0.0));
    }
    match p.solve() {
        Ok(outcome) => match outcome.solution() {
            Some(sol) => {
                vars.iter().enumerate().filter(|(_, v)| sol.var_value_raw(**v) > 1e-9).map(|(j, _)| j).collect()
            }
            None => Vec::new(),
        },
        Err(_) => Vec::new(),
    }
}
