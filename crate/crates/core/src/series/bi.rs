use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{UniSeries, Var};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Truncated power series `Σ c_ij x^i y^j` over `i + j ≤ N`.
///
/// Storage is dense and triangular, grouped by total degree: degree `d`
/// occupies indices `d(d+1)/2 ..= d(d+1)/2 + d`, ordered by increasing
/// power of the second variable. Truncating to a lower order is a prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiSeries {
    vars: (Var, Var),
    order: usize,
    coeffs: Vec<Scalar>,
}

#[inline]
fn index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

#[inline]
fn len_for(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Exponent pairs of a triangle, in storage order.
fn monomials(order: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=order).flat_map(|d| (0..=d).map(move |j| (d - j, j)))
}

impl BiSeries {
    pub fn zero(vars: (Var, Var), order: usize) -> Self {
        BiSeries {
            vars,
            order,
            coeffs: vec![Scalar::zero(); len_for(order)],
        }
    }

    pub fn constant(vars: (Var, Var), order: usize, c: Scalar) -> Self {
        let mut s = Self::zero(vars, order);
        s.coeffs[0] = c;
        s
    }

    pub fn monomial(vars: (Var, Var), order: usize, i: usize, j: usize, c: Scalar) -> Self {
        let mut s = Self::zero(vars, order);
        if i + j <= order {
            s.coeffs[index(i, j)] = c;
        }
        s
    }

    /// The first coordinate function.
    pub fn x(vars: (Var, Var), order: usize) -> Self {
        Self::monomial(vars, order, 1, 0, Scalar::one())
    }

    /// The second coordinate function.
    pub fn y(vars: (Var, Var), order: usize) -> Self {
        Self::monomial(vars, order, 0, 1, Scalar::one())
    }

    /// Sums the given terms; terms above `order` are dropped.
    pub fn from_terms(
        vars: (Var, Var),
        order: usize,
        terms: impl IntoIterator<Item = ((usize, usize), Scalar)>,
    ) -> Self {
        let mut s = Self::zero(vars, order);
        for ((i, j), c) in terms {
            if i + j <= order {
                let k = index(i, j);
                s.coeffs[k] = &s.coeffs[k] + &c;
            }
        }
        s
    }

    /// Convenience constructor from `((i, j), num, den)` triples.
    pub fn from_ratios(
        vars: (Var, Var),
        order: usize,
        terms: &[((usize, usize), i64, i64)],
    ) -> Self {
        Self::from_terms(
            vars,
            order,
            terms.iter().map(|&(m, n, d)| (m, Scalar::frac(n, d))),
        )
    }

    pub fn vars(&self) -> &(Var, Var) {
        &self.vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficient of `x^i y^j`; panics above the valid order.
    pub fn coeff(&self, i: usize, j: usize) -> &Scalar {
        assert!(
            i + j <= self.order,
            "coefficient ({i},{j}) above order {}",
            self.order
        );
        &self.coeffs[index(i, j)]
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Scalar> {
        (i + j <= self.order).then(|| &self.coeffs[index(i, j)])
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, c: Scalar) {
        assert!(i + j <= self.order);
        self.coeffs[index(i, j)] = c;
    }

    pub fn constant_term(&self) -> &Scalar {
        &self.coeffs[0]
    }

    /// All stored terms in storage order, zeros included.
    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), &Scalar)> {
        monomials(self.order).zip(self.coeffs.iter())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order);
        BiSeries {
            vars: self.vars.clone(),
            order: n,
            coeffs: self.coeffs[..len_for(n)].to_vec(),
        }
    }

    pub fn with_vars(mut self, vars: (Var, Var)) -> Self {
        self.vars = vars;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    /// True when every coefficient of positive degree vanishes.
    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(Scalar::is_zero)
    }

    /// Lowest total degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.terms()
            .find(|(_, c)| !c.is_zero())
            .map(|((i, j), _)| i + j)
    }

    /// Exact equality on the degrees both series know.
    pub fn agrees_with(&self, other: &BiSeries) -> bool {
        let n = len_for(self.order.min(other.order));
        self.coeffs[..n] == other.coeffs[..n]
    }

    fn check_vars(&self, other: &BiSeries) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::VariableMismatch(format!(
                "({}, {}) vs ({}, {})",
                self.vars.0, self.vars.1, other.vars.0, other.vars.1
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &BiSeries, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> BiSeries {
        let order = self.order.min(other.order);
        let coeffs = (0..len_for(order))
            .map(|k| f(&self.coeffs[k], &other.coeffs[k]))
            .collect();
        BiSeries {
            vars: self.vars.clone(),
            order,
            coeffs,
        }
    }

    pub fn try_add(&self, other: &BiSeries) -> Result<BiSeries> {
        self.check_vars(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &BiSeries) -> Result<BiSeries> {
        self.check_vars(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn try_mul(&self, other: &BiSeries) -> Result<BiSeries> {
        self.check_vars(other)?;
        let order = self.order.min(other.order);
        let mut out = BiSeries::zero(self.vars.clone(), order);
        let lhs: Vec<_> = self
            .nonzero_terms()
            .filter(|((i, j), _)| i + j <= order)
            .collect();
        let rhs: Vec<_> = other
            .nonzero_terms()
            .filter(|((i, j), _)| i + j <= order)
            .collect();
        for &((i1, j1), a) in &lhs {
            for &((i2, j2), b) in &rhs {
                if i1 + j1 + i2 + j2 <= order {
                    let k = index(i1 + i2, j1 + j2);
                    out.coeffs[k] += &(a * b);
                }
            }
        }
        Ok(out)
    }

    fn nonzero_terms(&self) -> impl Iterator<Item = ((usize, usize), &Scalar)> {
        self.terms().filter(|(_, c)| !c.is_zero())
    }

    pub fn scale(&self, c: &Scalar) -> BiSeries {
        BiSeries {
            vars: self.vars.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add_constant(&self, c: &Scalar) -> BiSeries {
        let mut out = self.clone();
        out.coeffs[0] = &out.coeffs[0] + c;
        out
    }

    /// `∂/∂x` (first variable); the valid order drops by one.
    pub fn partial_x(&self) -> Result<BiSeries> {
        if self.order == 0 {
            return Err(Error::OrderExhausted(format!(
                "∂/∂{} of an order-0 series",
                self.vars.0
            )));
        }
        let order = self.order - 1;
        let coeffs = monomials(order)
            .map(|(i, j)| self.coeff(i + 1, j) * &Scalar::int(i as i64 + 1))
            .collect();
        Ok(BiSeries {
            vars: self.vars.clone(),
            order,
            coeffs,
        })
    }

    /// `∂/∂y` (second variable); the valid order drops by one.
    pub fn partial_y(&self) -> Result<BiSeries> {
        if self.order == 0 {
            return Err(Error::OrderExhausted(format!(
                "∂/∂{} of an order-0 series",
                self.vars.1
            )));
        }
        let order = self.order - 1;
        let coeffs = monomials(order)
            .map(|(i, j)| self.coeff(i, j + 1) * &Scalar::int(j as i64 + 1))
            .collect();
        Ok(BiSeries {
            vars: self.vars.clone(),
            order,
            coeffs,
        })
    }

    /// Antiderivative in the first variable vanishing on `x = 0`.
    pub fn integrate_x(&self) -> BiSeries {
        let order = self.order + 1;
        let coeffs = monomials(order)
            .map(|(i, j)| match i {
                0 => Scalar::zero(),
                _ => self.coeff(i - 1, j) / &Scalar::int(i as i64),
            })
            .collect();
        BiSeries {
            vars: self.vars.clone(),
            order,
            coeffs,
        }
    }

    /// Antiderivative in the second variable vanishing on `y = 0`.
    pub fn integrate_y(&self) -> BiSeries {
        let order = self.order + 1;
        let coeffs = monomials(order)
            .map(|(i, j)| match j {
                0 => Scalar::zero(),
                _ => self.coeff(i, j - 1) / &Scalar::int(j as i64),
            })
            .collect();
        BiSeries {
            vars: self.vars.clone(),
            order,
            coeffs,
        }
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<BiSeries> {
        let inv0 = self.coeffs[0].inv().ok_or(Error::DivisionByNonUnit)?;
        let mut out = BiSeries::zero(self.vars.clone(), self.order);
        out.coeffs[0] = inv0.clone();
        let terms: Vec<_> = self
            .nonzero_terms()
            .filter(|&((i, j), _)| i + j > 0)
            .collect();
        for (i, j) in monomials(self.order).skip(1) {
            let mut acc = Scalar::zero();
            for &((k, l), f) in &terms {
                if k <= i && l <= j {
                    let r = &out.coeffs[index(i - k, j - l)];
                    if !r.is_zero() {
                        acc += &(f * r);
                    }
                }
            }
            out.coeffs[index(i, j)] = -(&acc * &inv0);
        }
        Ok(out)
    }

    /// Restriction to the first axis, `x ↦ p(x, 0)`.
    pub fn on_first_axis(&self) -> UniSeries {
        let coeffs = (0..=self.order).map(|i| self.coeff(i, 0).clone()).collect();
        UniSeries::new(self.vars.0.clone(), self.order, coeffs)
    }

    /// Restriction to the second axis, `y ↦ p(0, y)`.
    pub fn on_second_axis(&self) -> UniSeries {
        let coeffs = (0..=self.order).map(|j| self.coeff(0, j).clone()).collect();
        UniSeries::new(self.vars.1.clone(), self.order, coeffs)
    }

    /// Coefficient of `x^k` as a series in `y`, valid to order `N − k`.
    pub fn first_slice(&self, k: usize) -> UniSeries {
        let n = self.order - k;
        let coeffs = (0..=n).map(|j| self.coeff(k, j).clone()).collect();
        UniSeries::new(self.vars.1.clone(), n, coeffs)
    }

    /// Coefficient of `y^k` as a series in `x`, valid to order `N − k`.
    pub fn second_slice(&self, k: usize) -> UniSeries {
        let n = self.order - k;
        let coeffs = (0..=n).map(|i| self.coeff(i, k).clone()).collect();
        UniSeries::new(self.vars.0.clone(), n, coeffs)
    }

    /// Overwrites the coefficient of `x^k` with `slice(y)` where known.
    pub fn set_first_slice(&mut self, k: usize, slice: &UniSeries) {
        for j in 0..=(self.order - k).min(slice.order()) {
            self.coeffs[index(k, j)] = slice.coeff(j).clone();
        }
    }

    /// Overwrites the coefficient of `y^k` with `slice(x)` where known.
    pub fn set_second_slice(&mut self, k: usize, slice: &UniSeries) {
        for i in 0..=(self.order - k).min(slice.order()) {
            self.coeffs[index(i, k)] = slice.coeff(i).clone();
        }
    }

    /// `self / (x y)` for a series vanishing on both axes; order drops by two.
    pub fn div_xy(&self) -> Result<BiSeries> {
        if self.order < 2 {
            return Err(Error::OrderExhausted(
                "division by xy needs order ≥ 2".into(),
            ));
        }
        let on_axes = self
            .terms()
            .any(|((i, j), c)| (i == 0 || j == 0) && !c.is_zero());
        if on_axes {
            return Err(Error::InvalidParameter(
                "series is not divisible by xy".into(),
            ));
        }
        let order = self.order - 2;
        let coeffs = monomials(order)
            .map(|(i, j)| self.coeff(i + 1, j + 1).clone())
            .collect();
        Ok(BiSeries {
            vars: self.vars.clone(),
            order,
            coeffs,
        })
    }

    /// `self(X(s), Y(t))` for univariate `X, Y` without constant terms.
    ///
    /// The result is a series in `(s, t)`, the variables of `xs` and `ys`.
    pub fn compose_axes(&self, xs: &UniSeries, ys: &UniSeries) -> Result<BiSeries> {
        if !xs.coeff(0).is_zero() || !ys.coeff(0).is_zero() {
            return Err(Error::CompositionNotLocal);
        }
        let vars = (xs.var().clone(), ys.var().clone());
        let v = match (xs.valuation(), ys.valuation()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => {
                return Ok(BiSeries::constant(
                    vars,
                    xs.order().min(ys.order()),
                    self.coeffs[0].clone(),
                ))
            }
        };
        let order = xs.order().min(ys.order()).min((self.order + 1) * v - 1);
        let xs = xs.truncate(order);
        let ys = ys.truncate(order);
        let powers = |s: &UniSeries| -> Result<Vec<UniSeries>> {
            let mut out = vec![UniSeries::constant(s.var().clone(), order, Scalar::one())];
            for k in 1..=order {
                out.push(out[k - 1].try_mul(s)?);
            }
            Ok(out)
        };
        let xp = powers(&xs)?;
        let yp = powers(&ys)?;
        let mut out = BiSeries::zero(vars, order);
        for ((i, j), q) in self.nonzero_terms() {
            if i > order || j > order {
                continue;
            }
            for a in i..=order {
                let xa = xp[i].coeff(a);
                if xa.is_zero() {
                    continue;
                }
                for b in j..=(order - a) {
                    let yb = yp[j].coeff(b);
                    if !yb.is_zero() {
                        out.coeffs[index(a, b)] += &(&(q * xa) * yb);
                    }
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for BiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for ((i, j), c) in self.nonzero_terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (v, e) in [(&self.vars.0, i), (&self.vars.1, j)] {
                match e {
                    0 => {}
                    1 => write!(f, "·{v}")?,
                    _ => write!(f, "·{v}^{e}")?,
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({})", self.order + 1)
    }
}

macro_rules! bi_binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&BiSeries> for &BiSeries {
            type Output = BiSeries;
            /// Panics on a variable mismatch.
            fn $m(self, rhs: &BiSeries) -> BiSeries {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

bi_binop!(Add, add, try_add);
bi_binop!(Sub, sub, try_sub);
bi_binop!(Mul, mul, try_mul);

impl Neg for &BiSeries {
    type Output = BiSeries;
    fn neg(self) -> BiSeries {
        self.scale(&Scalar::int(-1))
    }
}
