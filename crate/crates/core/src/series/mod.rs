//! Truncated power series in one and two variables with exact coefficients.
//!
//! A series carries its *valid order* `N`: every coefficient of total degree
//! at most `N` is exact, nothing above it is stored. Operations compute the
//! valid order of their result explicitly, so two series are only ever
//! compared on degrees where both are meaningful.
//!
//! Multiplication and addition keep the smaller of the two orders.
//! Differentiation loses one order and integration gains one. Substitution
//! of a series `g` without constant term keeps every degree that the
//! truncation of the outer series cannot reach, which depends on the lowest
//! degree present in `g`.

mod bi;
mod json;
mod uni;

pub use bi::BiSeries;
pub use uni::UniSeries;

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Symbolic name of a series variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The two coordinate variables most of the library works in.
pub fn xy() -> (Var, Var) {
    (Var::new("x"), Var::new("y"))
}

/// Ring operations accepted by [`Series::arithmetic`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Scale(Scalar),
}

/// A series in one or two variables, as exchanged in JSON.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Series {
    Uni(UniSeries),
    Bi(BiSeries),
}

impl Series {
    pub fn order(&self) -> usize {
        match self {
            Series::Uni(s) => s.order(),
            Series::Bi(s) => s.order(),
        }
    }

    pub fn vars(&self) -> Vec<&Var> {
        match self {
            Series::Uni(s) => vec![s.var()],
            Series::Bi(s) => vec![&s.vars().0, &s.vars().1],
        }
    }

    /// `a op b`, or `op(a)` for scaling. Both operands must use the same
    /// variables.
    pub fn arithmetic(&self, other: &Series, op: &ArithOp) -> Result<Series> {
        match (self, other) {
            (Series::Uni(a), Series::Uni(b)) => Ok(Series::Uni(match op {
                ArithOp::Add => a.try_add(b)?,
                ArithOp::Sub => a.try_sub(b)?,
                ArithOp::Mul => a.try_mul(b)?,
                ArithOp::Scale(c) => a.scale(c),
            })),
            (Series::Bi(a), Series::Bi(b)) => Ok(Series::Bi(match op {
                ArithOp::Add => a.try_add(b)?,
                ArithOp::Sub => a.try_sub(b)?,
                ArithOp::Mul => a.try_mul(b)?,
                ArithOp::Scale(c) => a.scale(c),
            })),
            _ => Err(Error::VariableMismatch(
                "cannot combine a univariate and a bivariate series".into(),
            )),
        }
    }

    /// Partial derivative with respect to `var`.
    pub fn derivative(&self, var: &Var) -> Result<Series> {
        match self {
            Series::Uni(s) if s.var() == var => s.derivative().map(Series::Uni),
            Series::Bi(s) if &s.vars().0 == var => s.partial_x().map(Series::Bi),
            Series::Bi(s) if &s.vars().1 == var => s.partial_y().map(Series::Bi),
            _ => Err(Error::VariableMismatch(format!(
                "series has no variable {var}"
            ))),
        }
    }

    /// Antiderivative in `var` vanishing where `var = 0`.
    pub fn integrate(&self, var: &Var) -> Result<Series> {
        match self {
            Series::Uni(s) if s.var() == var => Ok(Series::Uni(s.integral())),
            Series::Bi(s) if &s.vars().0 == var => Ok(Series::Bi(s.integrate_x())),
            Series::Bi(s) if &s.vars().1 == var => Ok(Series::Bi(s.integrate_y())),
            _ => Err(Error::VariableMismatch(format!(
                "series has no variable {var}"
            ))),
        }
    }

    pub fn reciprocal(&self) -> Result<Series> {
        match self {
            Series::Uni(s) => s.reciprocal().map(Series::Uni),
            Series::Bi(s) => s.reciprocal().map(Series::Bi),
        }
    }

    pub fn as_uni(&self) -> Option<&UniSeries> {
        match self {
            Series::Uni(s) => Some(s),
            Series::Bi(_) => None,
        }
    }

    pub fn as_bi(&self) -> Option<&BiSeries> {
        match self {
            Series::Bi(s) => Some(s),
            Series::Uni(_) => None,
        }
    }
}

impl From<UniSeries> for Series {
    fn from(s: UniSeries) -> Self {
        Series::Uni(s)
    }
}

impl From<BiSeries> for Series {
    fn from(s: BiSeries) -> Self {
        Series::Bi(s)
    }
}
