//! Truncated formal power series over a [`Scalar`](crate::Scalar) field.
//!
//! [`RadialSeries`] is univariate in `t = |w|²`; [`BiSeries`] is bivariate in
//! `(u, v)` standing for `(w, w̄)`, which is where the Wirtinger derivatives
//! act.

mod bivariate;
mod radial;

pub use bivariate::BiSeries;
pub use radial::RadialSeries;

/// Serde helpers that write rationals as `"p/q"` strings.
pub mod serial {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::RadialSeries;
    use crate::scalar::{parse_rational, Rational};

    pub fn parse<E: serde::de::Error>(s: &str) -> Result<Rational, E> {
        parse_rational(s).ok_or_else(|| E::custom(format!("not a rational: {s:?}")))
    }

    pub mod rational {
        use super::*;

        pub fn serialize<Se: Serializer>(q: &Rational, s: Se) -> Result<Se::Ok, Se::Error> {
            s.collect_str(q)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
            parse(&String::deserialize(d)?)
        }
    }

    pub mod rational_vec {
        use super::*;

        pub fn serialize<Se: Serializer>(v: &[Rational], s: Se) -> Result<Se::Ok, Se::Error> {
            s.collect_seq(v.iter().map(ToString::to_string))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            Vec::<String>::deserialize(d)?.iter().map(|s| parse(s)).collect()
        }
    }

    pub mod rational_opt {
        use super::*;

        pub fn serialize<Se: Serializer>(q: &Option<Rational>, s: Se) -> Result<Se::Ok, Se::Error> {
            match q {
                Some(q) => s.collect_str(q),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|s| parse(&s))
                .transpose()
        }
    }

    pub mod series {
        use super::*;

        pub fn serialize<Se: Serializer>(f: &RadialSeries<Rational>, s: Se) -> Result<Se::Ok, Se::Error> {
            rational_vec::serialize(f.coeffs(), s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RadialSeries<Rational>, D::Error> {
            let v = rational_vec::deserialize(d)?;
            if v.is_empty() {
                return Err(D::Error::custom("empty series"));
            }
            Ok(RadialSeries::new(v))
        }
    }

    /// Radial series as a list of `"p/q"` strings, lowest degree first.
    pub fn series_strings(f: &RadialSeries<Rational>) -> Vec<String> {
        f.coeffs().iter().map(ToString::to_string).collect()
    }
}
