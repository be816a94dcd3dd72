//! Exact coefficients: rationals, optionally extended by one square root.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An exact scalar.
///
/// `Rational` is the ordinary case. `Quadratic { a, b, c }` stands for
/// `a + b·√c` where `c` is a rational that is not a square; it only arises
/// from the scaling step of the normal form. Values are kept canonical: a
/// quadratic value with `b = 0` is always stored as `Rational`, so derived
/// equality is exact equality.
///
/// Binary operations between quadratic values over two different `c` panic;
/// use [`Scalar::check_same_field`] where that can happen.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Quadratic {
        a: BigRational,
        b: BigRational,
        c: BigRational,
    },
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact square root of a non-negative rational, if it is a square.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `n / d`; panics when `d = 0`.
    pub fn frac(n: i64, d: i64) -> Self {
        Scalar::Rational(rat(n, d))
    }

    /// `a + b·√c`, canonicalized. `c` must not be a rational square unless
    /// `b = 0`.
    pub fn quadratic(a: BigRational, b: BigRational, c: BigRational) -> Result<Self> {
        if b.is_zero() {
            return Ok(Scalar::Rational(a));
        }
        if let Some(root) = rational_sqrt(&c) {
            return Ok(Scalar::Rational(a + b * root));
        }
        Ok(Scalar::Quadratic { a, b, c })
    }

    /// The square root of `q`: rational when `q` is a square, otherwise the
    /// generator `√q` of the quadratic field.
    pub fn sqrt_of(q: &BigRational) -> Self {
        match rational_sqrt(q) {
            Some(r) => Scalar::Rational(r),
            None => Scalar::Quadratic {
                a: BigRational::zero(),
                b: BigRational::one(),
                c: q.clone(),
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rational(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rational(r) if r.is_one())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Quadratic { .. } => None,
        }
    }

    /// The radicand of the quadratic field this value lives in, if any.
    pub fn field(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(_) => None,
            Scalar::Quadratic { c, .. } => Some(c),
        }
    }

    pub fn check_same_field(&self, other: &Scalar) -> Result<()> {
        match (self.field(), other.field()) {
            (Some(c1), Some(c2)) if c1 != c2 => {
                Err(Error::FieldMismatch(format!("√{c1} vs √{c2}")))
            }
            _ => Ok(()),
        }
    }

    /// Rational part and coefficient of the root.
    fn parts(&self) -> (BigRational, BigRational, Option<&BigRational>) {
        match self {
            Scalar::Rational(r) => (r.clone(), BigRational::zero(), None),
            Scalar::Quadratic { a, b, c } => (a.clone(), b.clone(), Some(c)),
        }
    }

    fn common_field<'a>(x: &'a Scalar, y: &'a Scalar) -> Option<&'a BigRational> {
        if let Err(e) = x.check_same_field(y) {
            panic!("{e}");
        }
        x.field().or(y.field())
    }

    fn build(a: BigRational, b: BigRational, c: Option<&BigRational>) -> Scalar {
        match c {
            Some(c) if !b.is_zero() => Scalar::Quadratic { a, b, c: c.clone() },
            _ => Scalar::Rational(a),
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Rational(r) => {
                if r.is_zero() {
                    None
                } else {
                    Some(Scalar::Rational(r.recip()))
                }
            }
            Scalar::Quadratic { a, b, c } => {
                // (a + b√c)(a − b√c) = a² − c·b², nonzero because c is not a square
                let norm = a * a - c * b * b;
                Some(Scalar::build(a / &norm, -(b / &norm), Some(c)))
            }
        }
    }

    /// Sign of a rational scalar; `None` for quadratic values.
    pub fn rational_sign(&self) -> Option<Sign> {
        self.as_rational().map(|r| {
            if r.is_zero() {
                Sign::NoSign
            } else if r.is_positive() {
                Sign::Plus
            } else {
                Sign::Minus
            }
        })
    }

    pub fn pow(&self, k: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Rational(r)
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Parses `"n"` or `"n/d"`.
    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s).map(Scalar::Rational)
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not an exact fraction: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Quadratic { a, b, c } => {
                if a.is_zero() {
                    write!(f, "{b}√({c})")
                } else {
                    write!(f, "{a} + {b}√({c})")
                }
            }
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Quadratic { a, b, c } => Scalar::Quadratic {
                a: -a,
                b: -b,
                c: c.clone(),
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if let (Scalar::Rational(x), Scalar::Rational(y)) = (self, rhs) {
            return Scalar::Rational(x + y);
        }
        let c = Scalar::common_field(self, rhs);
        let (a1, b1, _) = self.parts();
        let (a2, b2, _) = rhs.parts();
        Scalar::build(a1 + a2, b1 + b2, c)
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        if let (Scalar::Rational(x), Scalar::Rational(y)) = (self, rhs) {
            return Scalar::Rational(x - y);
        }
        self + &(-rhs)
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if let (Scalar::Rational(x), Scalar::Rational(y)) = (self, rhs) {
            return Scalar::Rational(x * y);
        }
        let c = Scalar::common_field(self, rhs);
        let (a1, b1, _) = self.parts();
        let (a2, b2, _) = rhs.parts();
        let rad = c.cloned().unwrap_or_else(BigRational::zero);
        Scalar::build(&a1 * &a2 + &b1 * &b2 * rad, a1 * b2 + a2 * b1, c)
    }
}

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Scalar) -> Scalar {
        let inv = rhs.inv().expect("division by zero scalar");
        self * &inv
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul, Div::div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        rat(n, d)
    }

    #[test]
    fn parse_and_display_are_canonical() {
        let s: Scalar = "6/-4".parse().unwrap();
        assert_eq!(s, Scalar::frac(-3, 2));
        assert_eq!(s.to_string(), "-3/2");
        assert_eq!(Scalar::int(5).to_string(), "5");
        assert!("1.5".parse::<Scalar>().is_err());
        assert!("1/0".parse::<Scalar>().is_err());
    }

    #[test]
    fn quadratic_arithmetic() {
        let r2 = Scalar::sqrt_of(&q(2, 1));
        assert!(matches!(r2, Scalar::Quadratic { .. }));
        // √2·√2 collapses back to the rational 2
        assert_eq!(&r2 * &r2, Scalar::int(2));
        let x = &Scalar::int(1) + &r2;
        let y = x.inv().unwrap();
        assert_eq!(&x * &y, Scalar::one());
        assert_eq!(&x - &r2, Scalar::one());
    }

    #[test]
    fn sqrt_of_square_is_rational() {
        assert_eq!(Scalar::sqrt_of(&q(9, 4)), Scalar::frac(3, 2));
        assert_eq!(Scalar::sqrt_of(&q(0, 1)), Scalar::zero());
        assert!(rational_sqrt(&q(-4, 1)).is_none());
    }

    #[test]
    #[should_panic(expected = "different fields")]
    fn mixing_fields_panics() {
        let _ = Scalar::sqrt_of(&q(2, 1)) + Scalar::sqrt_of(&q(3, 1));
    }

    #[test]
    fn check_same_field_reports_mismatch() {
        let a = Scalar::sqrt_of(&q(2, 1));
        let b = Scalar::sqrt_of(&q(3, 1));
        assert_eq!(a.check_same_field(&b).unwrap_err().code(), "FieldMismatch");
        assert!(a.check_same_field(&Scalar::int(7)).is_ok());
    }
}
