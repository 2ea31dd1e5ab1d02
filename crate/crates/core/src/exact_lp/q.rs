//! Exact rational scalar with an `i64/i64` fast path.
//!
//! Every operation is exact: small results stay inline, anything that does
//! not fit is promoted to a `BigRational` and demoted again when it shrinks.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub enum Q {
    /// Reduced fraction with positive denominator; numerator never `i64::MIN`.
    S(i64, i64),
    B(Box<BigRational>),
}

impl Q {
    pub const ZERO: Q = Q::S(0, 1);
    pub const ONE: Q = Q::S(1, 1);

    pub fn int(n: i64) -> Q {
        if n == i64::MIN {
            Q::B(Box::new(BigRational::from_integer(n.into())))
        } else {
            Q::S(n, 1)
        }
    }

    fn from_i128(n: i128, d: i128) -> Q {
        debug_assert!(d != 0);
        let (mut n, mut d) = if d < 0 { (-n, -d) } else { (n, d) };
        let g = n.unsigned_abs().gcd(&d.unsigned_abs());
        if g > 1 {
            n /= g as i128;
            d /= g as i128;
        }
        if n > i64::MIN as i128 && n <= i64::MAX as i128 && d <= i64::MAX as i128 {
            Q::S(n as i64, d as i64)
        } else {
            Q::B(Box::new(BigRational::new_raw(n.into(), d.into())))
        }
    }

    fn from_big(r: BigRational) -> Q {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN => Q::S(n, d),
            _ => Q::B(Box::new(r)),
        }
    }

    pub fn from_rational(r: &BigRational) -> Q {
        Q::from_big(r.clone())
    }

    pub fn to_rational(&self) -> BigRational {
        match self {
            Q::S(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Q::B(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Q::S(n, _) => *n == 0,
            Q::B(b) => b.is_zero(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Q::S(n, _) => n.signum() as i32,
            Q::B(b) => {
                if b.is_positive() {
                    1
                } else if b.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    /// Denominator when it fits in `i128`.
    pub fn denom_i128(&self) -> Option<i128> {
        match self {
            Q::S(_, d) => Some(*d as i128),
            Q::B(b) => b.denom().to_i128(),
        }
    }

    /// Numerator when it fits in `i128`.
    pub fn numer_i128(&self) -> Option<i128> {
        match self {
            Q::S(n, _) => Some(*n as i128),
            Q::B(b) => b.numer().to_i128(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Q::S(n, d) => *n as f64 / *d as f64,
            Q::B(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn neg(&self) -> Q {
        match self {
            Q::S(n, d) => Q::S(-n, *d),
            Q::B(b) => Q::from_big(-(**b).clone()),
        }
    }

    pub fn add(&self, o: &Q) -> Q {
        match (self, o) {
            (Q::S(a, b), Q::S(c, d)) => {
                if *b == 1 && *d == 1 {
                    return Q::from_i128(*a as i128 + *c as i128, 1);
                }
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                Q::from_i128(a * d + c * b, b * d)
            }
            _ => Q::from_big(self.to_rational() + o.to_rational()),
        }
    }

    pub fn sub(&self, o: &Q) -> Q {
        match (self, o) {
            (Q::S(a, b), Q::S(c, d)) => {
                if *b == 1 && *d == 1 {
                    return Q::from_i128(*a as i128 - *c as i128, 1);
                }
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                Q::from_i128(a * d - c * b, b * d)
            }
            _ => Q::from_big(self.to_rational() - o.to_rational()),
        }
    }

    pub fn mul(&self, o: &Q) -> Q {
        match (self, o) {
            (Q::S(a, b), Q::S(c, d)) => {
                if *a == 0 || *c == 0 {
                    return Q::ZERO;
                }
                if *b == 1 && *d == 1 {
                    return Q::from_i128(*a as i128 * *c as i128, 1);
                }
                Q::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => {
                if self.is_zero() || o.is_zero() {
                    return Q::ZERO;
                }
                Q::from_big(self.to_rational() * o.to_rational())
            }
        }
    }

    pub fn div(&self, o: &Q) -> Q {
        assert!(!o.is_zero(), "division by zero");
        match (self, o) {
            (Q::S(a, b), Q::S(c, d)) => Q::from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128),
            _ => Q::from_big(self.to_rational() / o.to_rational()),
        }
    }

    /// `self - f * g`, the core update of every elimination step.
    pub fn sub_mul(&self, f: &Q, g: &Q) -> Q {
        self.sub(&f.mul(g))
    }

    pub fn cmp_q(&self, o: &Q) -> Ordering {
        match (self, o) {
            (Q::S(a, b), Q::S(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.to_rational().cmp(&o.to_rational()),
        }
    }
}

impl PartialEq for Q {
    fn eq(&self, o: &Q) -> bool {
        self.cmp_q(o) == Ordering::Equal
    }
}

impl Eq for Q {}

impl PartialOrd for Q {
    fn partial_cmp(&self, o: &Q) -> Option<Ordering> {
        Some(self.cmp_q(o))
    }
}

impl Ord for Q {
    fn cmp(&self, o: &Q) -> Ordering {
        self.cmp_q(o)
    }
}

impl Default for Q {
    fn default() -> Self {
        Q::ZERO
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Q::S(n, 1) => write!(f, "{n}"),
            Q::S(n, d) => write!(f, "{n}/{d}"),
            Q::B(b) => write!(f, "{b}"),
        }
    }
}

impl From<&BigRational> for Q {
    fn from(r: &BigRational) -> Q {
        Q::from_rational(r)
    }
}

/// Least common multiple in `i128`, `None` on overflow.
pub fn lcm_i128(a: i128, b: i128) -> Option<i128> {
    let g = a.gcd(&b);
    (a / g).checked_mul(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_arithmetic_is_reduced() {
        let a = Q::from_rational(&r(1, 6));
        let b = Q::from_rational(&r(1, 3));
        assert!(matches!(a.add(&b), Q::S(1, 2)));
        assert!(matches!(a.sub(&b), Q::S(-1, 6)));
        assert!(matches!(a.mul(&b), Q::S(1, 18)));
        assert!(matches!(a.div(&b), Q::S(1, 2)));
    }

    #[test]
    fn overflow_promotes_and_shrinking_demotes() {
        let big = Q::int(i64::MAX);
        let sq = big.mul(&big);
        assert!(matches!(sq, Q::B(_)));
        let back = sq.div(&big);
        assert!(matches!(back, Q::S(n, 1) if n == i64::MAX));
        assert_eq!(Q::int(i64::MIN).neg().to_rational(), BigRational::from_integer(BigInt::from(i64::MIN).abs()));
    }

    #[test]
    fn comparison_matches_big_rationals() {
        let vals = [r(-7, 3), r(0, 1), r(5, 11), r(1, 2), r(i64::MAX, 3)];
        for x in &vals {
            for y in &vals {
                assert_eq!(Q::from_rational(x).cmp(&Q::from_rational(y)), x.cmp(y));
            }
        }
    }
}
