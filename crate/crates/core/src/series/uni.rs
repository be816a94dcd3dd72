use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{BiSeries, Var};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Truncated power series `c_0 + c_1 t + … + c_N t^N` in one variable.
///
/// The coefficient vector always has length `N + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniSeries {
    var: Var,
    coeffs: Vec<Scalar>,
}

impl UniSeries {
    /// Builds a series of the given order, padding missing coefficients with
    /// zero and dropping coefficients above the order.
    pub fn new(var: impl Into<Var>, order: usize, mut coeffs: Vec<Scalar>) -> Self {
        coeffs.resize(order + 1, Scalar::zero());
        UniSeries {
            var: var.into(),
            coeffs,
        }
    }

    pub fn zero(var: impl Into<Var>, order: usize) -> Self {
        Self::new(var, order, Vec::new())
    }

    pub fn constant(var: impl Into<Var>, order: usize, c: Scalar) -> Self {
        Self::new(var, order, vec![c])
    }

    /// The series `t` itself.
    pub fn variable(var: impl Into<Var>, order: usize) -> Self {
        Self::monomial(var, order, 1, Scalar::one())
    }

    pub fn monomial(var: impl Into<Var>, order: usize, k: usize, c: Scalar) -> Self {
        let mut s = Self::zero(var, order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// Convenience constructor from small integer ratios `(num, den)`.
    pub fn from_ratios(var: impl Into<Var>, order: usize, coeffs: &[(i64, i64)]) -> Self {
        let coeffs = coeffs.iter().map(|&(n, d)| Scalar::frac(n, d)).collect();
        Self::new(var, order, coeffs)
    }

    pub fn var(&self) -> &Var {
        &self.var
    }

    /// Highest degree whose coefficient is exact.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Coefficient of `t^k`; panics above the valid order.
    pub fn coeff(&self, k: usize) -> &Scalar {
        &self.coeffs[k]
    }

    pub fn get(&self, k: usize) -> Option<&Scalar> {
        self.coeffs.get(k)
    }

    pub fn set_coeff(&mut self, k: usize, c: Scalar) {
        self.coeffs[k] = c;
    }

    pub fn with_var(mut self, var: impl Into<Var>) -> Self {
        self.var = var.into();
        self
    }

    /// Keeps degrees up to `min(order, self.order())`.
    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        UniSeries {
            var: self.var.clone(),
            coeffs: self.coeffs[..=n].to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    /// Degree of the first nonzero coefficient, `None` for the zero jet.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn check_var(&self, other: &UniSeries) -> Result<()> {
        if self.var != other.var {
            return Err(Error::VariableMismatch(format!(
                "{} vs {}",
                self.var, other.var
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &UniSeries, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> UniSeries {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| f(&self.coeffs[k], &other.coeffs[k]))
            .collect();
        UniSeries {
            var: self.var.clone(),
            coeffs,
        }
    }

    pub fn try_add(&self, other: &UniSeries) -> Result<UniSeries> {
        self.check_var(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &UniSeries) -> Result<UniSeries> {
        self.check_var(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn try_mul(&self, other: &UniSeries) -> Result<UniSeries> {
        self.check_var(other)?;
        let n = self.order().min(other.order());
        let mut coeffs = vec![Scalar::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] += &(a * b);
                }
            }
        }
        Ok(UniSeries {
            var: self.var.clone(),
            coeffs,
        })
    }

    pub fn scale(&self, c: &Scalar) -> UniSeries {
        UniSeries {
            var: self.var.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add_constant(&self, c: &Scalar) -> UniSeries {
        let mut out = self.clone();
        out.coeffs[0] = &out.coeffs[0] + c;
        out
    }

    /// `d/dt`; the valid order drops by one.
    pub fn derivative(&self) -> Result<UniSeries> {
        if self.order() == 0 {
            return Err(Error::OrderExhausted(format!(
                "d/d{} of an order-0 series",
                self.var
            )));
        }
        let coeffs = (1..=self.order())
            .map(|k| &self.coeffs[k] * &Scalar::int(k as i64))
            .collect();
        Ok(UniSeries {
            var: self.var.clone(),
            coeffs,
        })
    }

    /// Antiderivative with zero constant term; the valid order grows by one.
    pub fn integral(&self) -> UniSeries {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Scalar::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / &Scalar::int(k as i64 + 1));
        }
        UniSeries {
            var: self.var.clone(),
            coeffs,
        }
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<UniSeries> {
        let inv0 = self.coeffs[0].inv().ok_or(Error::DivisionByNonUnit)?;
        let n = self.order();
        let mut out: Vec<Scalar> = Vec::with_capacity(n + 1);
        out.push(inv0.clone());
        for k in 1..=n {
            let mut acc = Scalar::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc += &(&self.coeffs[j] * &out[k - j]);
                }
            }
            out.push(-(&acc * &inv0));
        }
        Ok(UniSeries {
            var: self.var.clone(),
            coeffs: out,
        })
    }

    /// Valid order of `self ∘ g` for an inner series of order `inner_order`
    /// and valuation `val` (`None` when the inner jet is zero).
    fn composed_order(&self, inner_order: usize, val: Option<usize>) -> usize {
        match val {
            Some(v) => inner_order.min((self.order() + 1) * v - 1),
            None => inner_order,
        }
    }

    /// Composition `self(g(s))` with `g(0) = 0`; the result lives in the
    /// variable of `g`.
    pub fn compose(&self, g: &UniSeries) -> Result<UniSeries> {
        if !g.coeffs[0].is_zero() {
            return Err(Error::CompositionNotLocal);
        }
        let order = self.composed_order(g.order(), g.valuation());
        let inner = if order < g.order() {
            g.truncate(order)
        } else {
            g.clone()
        };
        let mut acc = UniSeries::zero(g.var.clone(), order);
        for c in self.coeffs.iter().rev() {
            acc = acc.try_mul(&inner)?.add_constant(c);
        }
        Ok(acc)
    }

    /// Composition `self(g(x, y))` with `g(0, 0) = 0`.
    pub fn substitute_bi(&self, g: &BiSeries) -> Result<BiSeries> {
        if !g.constant_term().is_zero() {
            return Err(Error::CompositionNotLocal);
        }
        let order = self.composed_order(g.order(), g.valuation());
        let inner = g.truncate(order);
        let mut acc = BiSeries::zero(g.vars().clone(), inner.order());
        for c in self.coeffs.iter().rev() {
            acc = acc.try_mul(&inner)?.add_constant(c);
        }
        Ok(acc)
    }

    /// Compositional inverse: the series `g` with `self(g(t)) = t`.
    ///
    /// Solved degree by degree: raising `g_n` by `δ` changes the `t^n`
    /// coefficient of `self ∘ g` by `f_1 δ` and leaves lower ones untouched.
    pub fn invert(&self) -> Result<UniSeries> {
        if self.order() == 0 || !self.coeffs[0].is_zero() {
            return Err(Error::CompositionNotLocal);
        }
        let inv1 = self.coeffs[1].inv().ok_or(Error::NotInvertibleAtOrigin)?;
        let n = self.order();
        let mut g = UniSeries::monomial(self.var.clone(), n, 1, inv1.clone());
        for k in 2..=n {
            let composed = self.compose(&g)?;
            let err = composed.coeff(k).clone();
            if !err.is_zero() {
                g.coeffs[k] = &g.coeffs[k] - &(&err * &inv1);
            }
        }
        let check = self.compose(&g)?;
        if check != UniSeries::variable(self.var.clone(), n) {
            return Err(Error::InternalInvariantViolation(
                "series reversion did not reproduce the identity".into(),
            ));
        }
        Ok(g)
    }

    /// Square root whose constant term is `root0`; `root0² ` must equal the
    /// constant term of `self`.
    pub fn sqrt_with_root(&self, root0: &Scalar) -> Result<UniSeries> {
        if &(root0 * root0) != self.coeff(0) {
            return Err(Error::InvalidParameter(format!(
                "{root0} is not a square root of {}",
                self.coeff(0)
            )));
        }
        let two_root_inv = (root0 + root0).inv().ok_or(Error::DivisionByNonUnit)?;
        let n = self.order();
        let mut s: Vec<Scalar> = vec![root0.clone()];
        for k in 1..=n {
            let mut acc = self.coeffs[k].clone();
            for i in 1..k {
                acc -= &(&s[i] * &s[k - i]);
            }
            s.push(&acc * &two_root_inv);
        }
        Ok(UniSeries {
            var: self.var.clone(),
            coeffs: s,
        })
    }

    /// Embeds `r(x)` as a bivariate series in the first variable of `vars`.
    pub fn embed_first(&self, vars: (Var, Var)) -> BiSeries {
        let n = self.order();
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| ((k, 0), c.clone()));
        BiSeries::from_terms(vars, n, terms)
    }

    /// Embeds `s(y)` as a bivariate series in the second variable of `vars`.
    pub fn embed_second(&self, vars: (Var, Var)) -> BiSeries {
        let n = self.order();
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| ((0, k), c.clone()));
        BiSeries::from_terms(vars, n, terms)
    }
}

impl fmt::Display for UniSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})·{}", self.var)?,
                _ => write!(f, "({c})·{}^{k}", self.var)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({}^{})", self.var, self.order() + 1)
    }
}

macro_rules! uni_binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&UniSeries> for &UniSeries {
            type Output = UniSeries;
            /// Panics on a variable mismatch.
            fn $m(self, rhs: &UniSeries) -> UniSeries {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

uni_binop!(Add, add, try_add);
uni_binop!(Sub, sub, try_sub);
uni_binop!(Mul, mul, try_mul);

impl Neg for &UniSeries {
    type Output = UniSeries;
    fn neg(self) -> UniSeries {
        self.scale(&Scalar::int(-1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(order: usize, c: &[(i64, i64)]) -> UniSeries {
        UniSeries::from_ratios("t", order, c)
    }

    #[test]
    fn telescoping_product() {
        let a = t(4, &[(1, 1), (1, 1)]);
        let b = t(4, &[(1, 1), (-1, 1)]);
        assert_eq!(&a * &b, t(4, &[(1, 1), (0, 1), (-1, 1)]));
    }

    #[test]
    fn geometric_reciprocals() {
        let f = t(3, &[(1, 1), (1, 1)]);
        assert_eq!(
            f.reciprocal().unwrap(),
            t(3, &[(1, 1), (-1, 1), (1, 1), (-1, 1)])
        );
        let g = t(2, &[(2, 1), (1, 1)]);
        assert_eq!(g.reciprocal().unwrap(), t(2, &[(1, 2), (-1, 4), (1, 8)]));
        assert_eq!(
            t(3, &[(0, 1), (1, 1)]).reciprocal(),
            Err(Error::DivisionByNonUnit)
        );
    }

    #[test]
    fn calculus() {
        let f = t(2, &[(1, 1), (0, 1), (1, 1)]);
        let big_f = f.integral();
        assert_eq!(big_f.order(), 3);
        assert_eq!(big_f, t(3, &[(0, 1), (1, 1), (0, 1), (1, 3)]));
        assert_eq!(big_f.derivative().unwrap(), f);
        assert!(matches!(
            t(0, &[(1, 1)]).derivative(),
            Err(Error::OrderExhausted(_))
        ));
    }

    #[test]
    fn composition_examples() {
        // f(t) = t + t², g(t) = 2t
        let f = t(2, &[(0, 1), (1, 1), (1, 1)]);
        let g = t(2, &[(0, 1), (2, 1)]);
        assert_eq!(f.compose(&g).unwrap(), t(2, &[(0, 1), (2, 1), (4, 1)]));
        let shifted = t(2, &[(1, 1), (1, 1)]);
        assert_eq!(f.compose(&shifted), Err(Error::CompositionNotLocal));
    }

    #[test]
    fn composition_order_tracks_inner_valuation() {
        // f known to order 2, g = s² known to order 10: f∘g exact through s^5
        let f = t(2, &[(1, 1), (1, 1), (1, 1)]);
        let g = UniSeries::monomial("s", 10, 2, Scalar::one());
        let h = f.compose(&g).unwrap();
        assert_eq!(h.order(), 5);
        assert_eq!(
            h,
            UniSeries::from_ratios("s", 5, &[(1, 1), (0, 1), (1, 1), (0, 1), (1, 1)])
        );
    }

    #[test]
    fn reversion_examples() {
        let lin = t(3, &[(0, 1), (3, 1)]);
        assert_eq!(lin.invert().unwrap(), t(3, &[(0, 1), (1, 3)]));
        let catalan = t(4, &[(0, 1), (1, 1), (1, 1)]);
        assert_eq!(
            catalan.invert().unwrap(),
            t(4, &[(0, 1), (1, 1), (-1, 1), (2, 1), (-5, 1)])
        );
        let cubic = t(4, &[(0, 1), (1, 1), (0, 1), (1, 1)]);
        assert_eq!(
            cubic.invert().unwrap(),
            t(4, &[(0, 1), (1, 1), (0, 1), (-1, 1)])
        );
        let flat = t(4, &[(0, 1), (0, 1), (1, 1)]);
        assert_eq!(flat.invert(), Err(Error::NotInvertibleAtOrigin));
    }

    #[test]
    fn square_root() {
        // (1 + t)² = 1 + 2t + t²
        let f = t(5, &[(1, 1), (2, 1), (1, 1)]);
        assert_eq!(
            f.sqrt_with_root(&Scalar::one()).unwrap(),
            t(5, &[(1, 1), (1, 1)])
        );
        assert_eq!(
            f.sqrt_with_root(&Scalar::int(-1)).unwrap(),
            t(5, &[(-1, 1), (-1, 1)])
        );
        assert!(f.sqrt_with_root(&Scalar::int(2)).is_err());
    }

    #[test]
    fn variable_mismatch_is_reported() {
        let a = t(2, &[(1, 1)]);
        let b = UniSeries::from_ratios("s", 2, &[(1, 1)]);
        assert!(matches!(a.try_add(&b), Err(Error::VariableMismatch(_))));
    }
}
