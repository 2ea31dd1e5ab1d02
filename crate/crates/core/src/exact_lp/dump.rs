//! Plain-text model dump.
//!
//! ```text
//! sense max
//! vars 2
//! obj: +1 x0 +1 x1
//! r0: +1 x0 +1 x1 <= 1
//! ```
//!
//! One constraint per line, coefficients as exact fractions. A variable is
//! printed by its name when it has one, otherwise as `x<index>`.

use std::fmt::Write as _;
use std::io;

use num_traits::Signed;

use super::{LPModel, Sense};
use crate::Rational;

fn term(out: &mut String, model: &LPModel, j: usize, v: &Rational) {
    let sign = if v.is_negative() { '-' } else { '+' };
    let _ = write!(out, " {sign}{} ", v.abs());
    match model.var_names.get(j).and_then(|n| n.as_deref()) {
        Some(name) => out.push_str(name),
        None => {
            let _ = write!(out, "x{j}");
        }
    }
}

pub fn dump_model(model: &LPModel) -> String {
    let mut out = String::new();
    let sense = match model.sense {
        Sense::Max => "max",
        Sense::Min => "min",
    };
    let _ = writeln!(out, "sense {sense}");
    let _ = writeln!(out, "vars {}", model.num_vars);
    out.push_str("obj:");
    for (j, v) in &model.objective {
        term(&mut out, model, *j, v);
    }
    out.push('\n');
    for (i, c) in model.constraints.iter().enumerate() {
        match &c.name {
            Some(n) => {
                let _ = write!(out, "{n}:");
            }
            None => {
                let _ = write!(out, "r{i}:");
            }
        }
        for (j, v) in &c.coeffs {
            term(&mut out, model, *j, v);
        }
        let _ = writeln!(out, " {} {}", c.relation, c.rhs);
    }
    out
}

pub fn write_model<W: io::Write>(model: &LPModel, mut w: W) -> io::Result<()> {
    w.write_all(dump_model(model).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_lp::Relation;
    use num_traits::One;

    #[test]
    fn dump_lists_every_row() {
        let mut m = LPModel::new(Sense::Max);
        m.add_vars(2);
        m.var_names[1] = Some("y".into());
        m.add_constraint(
            vec![(0, Rational::one()), (1, Rational::new((-1).into(), 2.into()))],
            Relation::Le,
            Rational::one(),
            None,
        );
        m.set_objective(vec![(0, Rational::one())]);
        let text = dump_model(&m);
        assert_eq!(text, "sense max\nvars 2\nobj: +1 x0\nr0: +1 x0 -1/2 y <= 1\n");
    }
}
