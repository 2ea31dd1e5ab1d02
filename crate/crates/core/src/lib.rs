//! Exact stable commutator length of rational chains in Baumslag-Solitar groups.

pub mod bs_words;
pub mod encoding;
pub mod error;
pub mod exact_lp;
pub mod extremal;
pub mod formulas;
pub mod solver_block;
pub mod solver_pieces;
pub mod sweep;

pub use error::{Result, SclError};

/// Exact rational number used throughout the public API.
pub type Rational = num_rational::BigRational;

/// Serializes a [`Rational`] as the string `"p/q"` (or `"p"` for integers).
pub mod serde_rational {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use crate::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).ok_or_else(|| D::Error::custom(format!("not a rational: {text}")))
    }

    /// Parses `p`, `p/q` or `-p/q`.
    pub fn parse(text: &str) -> Option<Rational> {
        let text = text.trim();
        let (n, d) = match text.split_once('/') {
            Some((n, d)) => (n.trim().parse().ok()?, d.trim().parse().ok()?),
            None => (text.parse().ok()?, 1.into()),
        };
        if num_traits::Zero::is_zero(&d) {
            return None;
        }
        Some(Rational::new(n, d))
    }

    /// Same as the parent module, for vectors.
    pub mod vec {
        use serde::{ser::SerializeSeq, Deserialize, Deserializer, Serializer};

        use crate::Rational;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&r.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let items = Vec::<String>::deserialize(d)?;
            items
                .iter()
                .map(|t| super::parse(t).ok_or_else(|| serde::de::Error::custom(format!("not a rational: {t}"))))
                .collect()
        }
    }

    /// Same as the parent module, for optional values.
    pub mod option {
        use serde::{Deserialize, Deserializer, Serializer};

        use crate::Rational;

        pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_some(&r.to_string()),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            let text = Option::<String>::deserialize(d)?;
            text.map(|t| super::parse(&t).ok_or_else(|| serde::de::Error::custom(format!("not a rational: {t}"))))
                .transpose()
        }
    }
}
