//! Closed-form values for a few chain families.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::bs_words::{parse_chain, Chain, GroupParams};
use crate::error::{Result, SclError};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Validity {
    Exact {
        /// Hypothesis under which the value is exact, when there is one.
        condition: Option<String>,
    },
    /// The hypothesis fails: `value` is an upper bound and scl lies in
    /// `[lower, value]`.
    Conditional {
        condition: String,
        #[serde(with = "crate::serde_rational")]
        lower: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaResult {
    #[serde(with = "crate::serde_rational")]
    pub value: Rational,
    pub validity: Validity,
}

impl FormulaResult {
    fn exact(value: Rational) -> FormulaResult {
        FormulaResult { value, validity: Validity::Exact { condition: None } }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.validity, Validity::Exact { .. })
    }

    /// `(lower, upper)` bounds on scl.
    pub fn bounds(&self) -> (Rational, Rational) {
        match &self.validity {
            Validity::Exact { .. } => (self.value.clone(), self.value.clone()),
            Validity::Conditional { lower, .. } => (lower.clone(), self.value.clone()),
        }
    }
}

impl fmt::Display for FormulaResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.validity {
            Validity::Exact { condition: None } => write!(f, "{} (exact)", self.value),
            Validity::Exact { condition: Some(c) } => write!(f, "{} (exact; condition {c} holds)", self.value),
            Validity::Conditional { condition, lower } => {
                write!(f, "{} (upper bound; condition {condition} fails; scl in [{lower}, {}])", self.value, self.value)
            }
        }
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn require_nonsolvable(params: &GroupParams) -> Result<(i64, i64)> {
    let (m, l) = (params.big_m.abs(), params.big_l.abs());
    if m < 2 || l < 2 {
        return Err(SclError::InvalidGroup(format!("{params}: the formula needs |M|, |L| >= 2")));
    }
    Ok((m, l))
}

/// `scl(a^k t^2 + 2 t^-1) = 1/2 - gcd(|k|, d) / (2d)`.
pub fn eg1_formula(params: &GroupParams, k: i64) -> FormulaResult {
    let d = params.d;
    let g = k.unsigned_abs().gcd(&(d as u64)) as i64;
    FormulaResult::exact(q(1, 2) - q(g, 2 * d))
}

/// `scl(atAT) = (1 - 1/|M| - 1/|L|) / 2`.
pub fn talt_product_formula(params: &GroupParams) -> Result<FormulaResult> {
    let (m, l) = require_nonsolvable(params)?;
    Ok(FormulaResult::exact((q(1, 1) - q(1, m) - q(1, l)) / q(2, 1)))
}

/// `scl(ataTAtAT) = 1/2 - 1/min(|M|, |L|)`.
pub fn talt_commutator_formula(params: &GroupParams) -> Result<FormulaResult> {
    let (m, l) = require_nonsolvable(params)?;
    Ok(FormulaResult::exact(q(1, 2) - q(1, m.min(l))))
}

/// `scl(a t^2 A T + T) <= 1/2 - 1/(4|M|) - 1/(4|L|)`, with equality when
/// `d >= (|M| + |L|) / (2 min(|M|, |L|))` and at least
/// `1/2 - 1/(2 min(|M|, |L|))` in general.
pub fn eg2_formula(params: &GroupParams) -> Result<FormulaResult> {
    let (m, l) = require_nonsolvable(params)?;
    let upper = q(1, 2) - q(1, 4 * m) - q(1, 4 * l);
    let threshold = q(m + l, 2 * m.min(l));
    let condition = format!("d>={threshold}");
    let validity = if Rational::from_integer(params.d.into()) >= threshold {
        Validity::Exact { condition: Some(condition) }
    } else {
        Validity::Conditional { condition, lower: q(1, 2) - q(1, 2 * m.min(l)) }
    };
    Ok(FormulaResult { value: upper, validity })
}

/// Named chain families with a formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Eg1 { k: i64 },
    Eg2,
    TaltProduct,
    TaltCommutator,
}

impl Family {
    /// The chain text of the family, e.g. `a^3t^2 + 2T` for `Eg1 { k: 3 }`.
    pub fn chain_text(&self) -> String {
        match self {
            Family::Eg1 { k } => format!("a^{k}t^2 + 2T"),
            Family::Eg2 => "at^2At^-1 + T".into(),
            Family::TaltProduct => "atAT".into(),
            Family::TaltCommutator => "ataTAtAT".into(),
        }
    }

    pub fn evaluate(&self, params: &GroupParams) -> Result<FormulaResult> {
        match self {
            Family::Eg1 { k } => Ok(eg1_formula(params, *k)),
            Family::Eg2 => eg2_formula(params),
            Family::TaltProduct => talt_product_formula(params),
            Family::TaltCommutator => talt_commutator_formula(params),
        }
    }

    /// Parses `eg1[:k]` (default `k = 1`), `eg2`, `atAT`/`product`,
    /// `ataTAtAT`/`commutator`.
    pub fn from_name(name: &str) -> Option<Family> {
        let lower = name.trim().to_ascii_lowercase();
        match lower.as_str() {
            "eg1" => Some(Family::Eg1 { k: 1 }),
            "eg2" => Some(Family::Eg2),
            "atat" | "product" => Some(Family::TaltProduct),
            "atatatat" | "commutator" => Some(Family::TaltCommutator),
            _ => lower.strip_prefix("eg1:").and_then(|k| k.trim().parse().ok()).map(|k| Family::Eg1 { k }),
        }
    }
}

/// The family `chain` belongs to in `params`, if any. Words are compared up
/// to rotation; `k` in `a^k t^2 + 2T` is tried over `|k| <= |max winding|`.
pub fn identify(chain: &Chain, params: &GroupParams) -> Option<Family> {
    let mut candidates = vec![Family::Eg2, Family::TaltProduct, Family::TaltCommutator];
    let kmax = chain.arcs().iter().map(|a| a.winding.abs()).max().unwrap_or(0);
    candidates.extend((-kmax..=kmax).map(|k| Family::Eg1 { k }));
    candidates.into_iter().find(|f| parse_chain(&f.chain_text(), params).is_ok_and(|c| c.equivalent(chain)))
}

/// Formula value for `chain` when it belongs to a known family.
pub fn formula_for(chain: &Chain, params: &GroupParams) -> Option<FormulaResult> {
    identify(chain, params).and_then(|f| f.evaluate(params).ok())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(m: i64, l: i64) -> GroupParams {
        GroupParams::new(m, l).unwrap()
    }

    #[test]
    fn eg1_examples() {
        assert_eq!(eg1_formula(&g(2, 4), 1).value, q(1, 4));
        assert_eq!(eg1_formula(&g(6, 9), 3).value, q(0, 1));
        assert_eq!(eg1_formula(&g(4, 6), 0).value, q(0, 1));
        assert_eq!(eg1_formula(&g(4, 6), -1).value, q(1, 4));
    }

    #[test]
    fn talt_examples() {
        assert_eq!(talt_product_formula(&g(2, 3)).unwrap().value, q(1, 12));
        assert_eq!(talt_product_formula(&g(3, 5)).unwrap().value, q(7, 30));
        assert_eq!(talt_product_formula(&g(2, 2)).unwrap().value, q(0, 1));
        assert_eq!(talt_commutator_formula(&g(2, 3)).unwrap().value, q(0, 1));
        assert_eq!(talt_commutator_formula(&g(3, 5)).unwrap().value, q(1, 6));
        assert_eq!(talt_commutator_formula(&g(4, 4)).unwrap().value, q(1, 4));
        assert!(talt_product_formula(&g(1, 3)).is_err());
    }

    #[test]
    fn eg2_examples() {
        let r = eg2_formula(&g(4, 6)).unwrap();
        assert_eq!(r.to_string(), "19/48 (exact; condition d>=5/4 holds)");
        let r = eg2_formula(&g(2, 3)).unwrap();
        assert!(!r.is_exact());
        assert_eq!(r.bounds(), (q(1, 4), q(7, 24)));
        for d in 2..=6 {
            let r = eg2_formula(&g(2 * d, 3 * d)).unwrap();
            assert!(r.is_exact());
            assert_eq!(r.value, q(1, 2) - q(5, 24 * d));
        }
    }

    #[test]
    fn identifies_families() {
        let p = g(4, 6);
        let c = parse_chain("T + t^-1at^2A", &p).unwrap();
        assert_eq!(identify(&c, &p), Some(Family::Eg2));
        let c = parse_chain("2T + a^3t^2", &p).unwrap();
        assert_eq!(identify(&c, &p), Some(Family::Eg1 { k: 3 }));
        assert_eq!(formula_for(&c, &p).unwrap().value, q(1, 2) - q(1, 4));
        let c = parse_chain("tATa", &p).unwrap();
        assert_eq!(identify(&c, &p), Some(Family::TaltProduct));
        let c = parse_chain("at^2AT^2", &p).unwrap();
        assert_eq!(identify(&c, &p), None);
        assert_eq!(Family::from_name("eg1:3"), Some(Family::Eg1 { k: 3 }));
        assert_eq!(Family::from_name("EG2"), Some(Family::Eg2));
    }
}
