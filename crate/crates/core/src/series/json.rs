//! JSON interchange for scalars and series.
//!
//! ```text
//! {"vars": ["x", "y"], "order": 4, "terms": [{"m": [1, 1], "c": "1/2"}]}
//! ```
//!
//! Omitted monomials are zero. Coefficients are fraction strings (plain
//! JSON integers are accepted on input), or
//! `{"a": "p/q", "b": "r/s", "c": "m/n"}` for `a + b√c`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{BiSeries, Series, UniSeries, Var};
use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Scalar};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Rational(String),
    Integer(i64),
    Quadratic { a: String, b: String, c: String },
}

impl From<&Scalar> for ScalarRepr {
    fn from(s: &Scalar) -> Self {
        match s {
            Scalar::Rational(r) => ScalarRepr::Rational(r.to_string()),
            Scalar::Quadratic { a, b, c } => ScalarRepr::Quadratic {
                a: a.to_string(),
                b: b.to_string(),
                c: c.to_string(),
            },
        }
    }
}

impl TryFrom<ScalarRepr> for Scalar {
    type Error = Error;
    fn try_from(r: ScalarRepr) -> Result<Self> {
        match r {
            ScalarRepr::Rational(s) => parse_rational(&s).map(Scalar::Rational),
            ScalarRepr::Integer(n) => Ok(Scalar::int(n)),
            ScalarRepr::Quadratic { a, b, c } => Scalar::quadratic(
                parse_rational(&a)?,
                parse_rational(&b)?,
                parse_rational(&c)?,
            ),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarRepr::from(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(de)?;
        Scalar::try_from(repr).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct Term {
    m: Vec<usize>,
    c: Scalar,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    vars: Vec<String>,
    order: usize,
    terms: Vec<Term>,
}

impl From<&Series> for SeriesRepr {
    fn from(s: &Series) -> Self {
        match s {
            Series::Uni(u) => SeriesRepr {
                vars: vec![u.var().name().to_string()],
                order: u.order(),
                terms: u
                    .coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| Term {
                        m: vec![k],
                        c: c.clone(),
                    })
                    .collect(),
            },
            Series::Bi(b) => SeriesRepr {
                vars: vec![b.vars().0.name().to_string(), b.vars().1.name().to_string()],
                order: b.order(),
                terms: b
                    .terms()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|((i, j), c)| Term {
                        m: vec![i, j],
                        c: c.clone(),
                    })
                    .collect(),
            },
        }
    }
}

impl TryFrom<SeriesRepr> for Series {
    type Error = Error;
    fn try_from(r: SeriesRepr) -> Result<Self> {
        let too_high =
            |deg: usize| Error::Parse(format!("term of degree {deg} above order {}", r.order));
        match r.vars.as_slice() {
            [v] => {
                let mut coeffs = vec![Scalar::zero(); r.order + 1];
                for t in &r.terms {
                    let [k] = t.m.as_slice() else {
                        return Err(Error::Parse("univariate term needs one exponent".into()));
                    };
                    if *k > r.order {
                        return Err(too_high(*k));
                    }
                    coeffs[*k] = &coeffs[*k] + &t.c;
                }
                Ok(Series::Uni(UniSeries::new(
                    Var::new(v.as_str()),
                    r.order,
                    coeffs,
                )))
            }
            [v, w] => {
                if v == w {
                    return Err(Error::Parse("repeated variable name".into()));
                }
                let mut terms = Vec::with_capacity(r.terms.len());
                for t in &r.terms {
                    let [i, j] = t.m.as_slice() else {
                        return Err(Error::Parse("bivariate term needs two exponents".into()));
                    };
                    if i + j > r.order {
                        return Err(too_high(i + j));
                    }
                    terms.push(((*i, *j), t.c.clone()));
                }
                let vars = (Var::new(v.as_str()), Var::new(w.as_str()));
                Ok(Series::Bi(BiSeries::from_terms(vars, r.order, terms)))
            }
            _ => Err(Error::Parse(format!(
                "series must have one or two variables, got {}",
                r.vars.len()
            ))),
        }
    }
}

impl Serialize for Series {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr::from(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Series {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(de)?;
        Series::try_from(repr).map_err(D::Error::custom)
    }
}

impl Serialize for UniSeries {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr::from(&Series::Uni(self.clone())).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for UniSeries {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        match Series::deserialize(de)? {
            Series::Uni(u) => Ok(u),
            Series::Bi(_) => Err(D::Error::custom("expected a univariate series")),
        }
    }
}

impl Serialize for BiSeries {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr::from(&Series::Bi(self.clone())).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BiSeries {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        match Series::deserialize(de)? {
            Series::Bi(b) => Ok(b),
            Series::Uni(_) => Err(D::Error::custom("expected a bivariate series")),
        }
    }
}
