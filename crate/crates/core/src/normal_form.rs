//! Normal form `p = 1 + xy(1 + h)` of a curved 3-web `(dx, dy, dy − p dx)`.
//!
//! Only coordinate changes of the form `(x, y) ↦ (X(x), Y(y))` are used;
//! they keep the first two foliations and act on the slope by
//! `p̃(X(x), Y(y)) = Y'(y) p(x, y) / X'(x)`.
//!
//! The reduction runs in two stages.
//!
//! 1. Axis flattening. `X(x) = ∫₀ˣ p(ξ, 0) dξ` and
//!    `Y(y) = p(0,0) ∫₀ʸ dη / p(0, η)` make the new slope identically 1 on
//!    both axes. It is then `1 + c·xy(1 + h̃)` with `c` the curvature of the
//!    flattened web at the origin.
//! 2. Scaling. With `μ² = c`, the new coordinates `(μx, μy)` turn this into
//!    `1 + xy(1 + h)`. This is exact over the rationals when `c` is a
//!    positive square. Otherwise it needs `ℚ(√c)`. Negative `c` is left in
//!    the weak form, as is positive `c` when the quadratic field is not
//!    allowed.

use num_bigint::Sign;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{BiSeries, UniSeries};

/// Whether the scaling stage may leave the rationals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FieldMode {
    #[default]
    Rational,
    Quadratic,
}

/// Output of [`normalize`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizedWeb {
    /// `h` with `h(0, 0) = 0`.
    pub h: BiSeries,
    /// Curvature at the origin after axis flattening.
    pub c: Scalar,
    /// Total coordinate change in the first variable.
    #[serde(rename = "X")]
    pub x_change: UniSeries,
    /// Total coordinate change in the second variable.
    #[serde(rename = "Y")]
    pub y_change: UniSeries,
    /// `μ` with `μ² = c`, or 1 when no scaling was done.
    pub mu: Scalar,
    /// True when the slope is exactly `1 + xy(1 + h)`; false for the weak
    /// form `1 + c·xy(1 + h)`.
    pub strict: bool,
}

impl NormalizedWeb {
    /// The slope `1 + xy(1 + h)`, or `1 + c·xy(1 + h)` in the weak form.
    pub fn slope(&self) -> BiSeries {
        let k = if self.strict {
            Scalar::one()
        } else {
            self.c.clone()
        };
        slope_from_h(&self.h, &k)
    }

    pub fn order(&self) -> usize {
        self.h.order() + 2
    }
}

/// `1 + k·xy(1 + h)`, valid two orders above `h`.
pub fn slope_from_h(h: &BiSeries, k: &Scalar) -> BiSeries {
    let n = h.order() + 2;
    let mut p = BiSeries::constant(h.vars().clone(), n, Scalar::one());
    for ((i, j), v) in h.terms() {
        let mut coeff = v * k;
        if i == 0 && j == 0 {
            coeff = &coeff + k;
        }
        p.set_coeff(i + 1, j + 1, coeff);
    }
    p
}

/// Slope of the web in the coordinates `(X(x), Y(y))`.
pub fn transform_slope(
    p: &BiSeries,
    x_change: &UniSeries,
    y_change: &UniSeries,
) -> Result<BiSeries> {
    let vars = p.vars().clone();
    let x_change = x_change.clone().with_var(vars.0.clone());
    let y_change = y_change.clone().with_var(vars.1.clone());
    let dx = x_change.derivative()?.embed_first(vars.clone());
    let dy = y_change.derivative()?.embed_second(vars);
    let q = &(&dy * p) * &dx.reciprocal().map_err(|_| Error::NotInvertibleAtOrigin)?;
    q.compose_axes(&x_change.invert()?, &y_change.invert()?)
}

/// Stage 1 of the reduction: returns the flattened slope and `(X, Y)`.
pub fn flatten_axes(p: &BiSeries) -> Result<(BiSeries, UniSeries, UniSeries)> {
    let p00 = p.constant_term().clone();
    if p00.is_zero() {
        return Err(Error::NotTransverse("p vanishes at the origin".into()));
    }
    let x_change = p.on_first_axis().integral();
    let y_change = p.on_second_axis().reciprocal()?.integral().scale(&p00);
    let flat = transform_slope(p, &x_change, &y_change)?;
    let one = Scalar::one();
    let on_axes_is_one = flat.terms().all(|((i, j), v)| {
        if i == 0 && j == 0 {
            v == &one
        } else if i == 0 || j == 0 {
            v.is_zero()
        } else {
            true
        }
    });
    if !on_axes_is_one {
        return Err(Error::InternalInvariantViolation(
            "flattened slope is not 1 on the axes".into(),
        ));
    }
    Ok((flat, x_change, y_change))
}

/// Reduces `(dx, dy, dy − p dx)` to its normal form, using `p` to order `n`.
pub fn normalize(p: &BiSeries, n: usize, mode: FieldMode) -> Result<NormalizedWeb> {
    if p.order() < n {
        return Err(Error::OrderExhausted(format!(
            "p is known to order {} but normalization was asked for order {n}",
            p.order()
        )));
    }
    if n < 2 {
        return Err(Error::OrderExhausted(
            "normalization needs order ≥ 2".into(),
        ));
    }
    let (flat, x1, y1) = flatten_axes(&p.truncate(n))?;
    let k = flat.add_constant(&Scalar::int(-1)).div_xy()?;
    let c = k.constant_term().clone();
    let c_inv = c.inv().ok_or(Error::NotCurvedAtOrigin)?;
    let h_weak = k.scale(&c_inv).add_constant(&Scalar::int(-1));

    let mu = match c.as_rational() {
        Some(q) if c.rational_sign() == Some(Sign::Plus) => {
            let mu = Scalar::sqrt_of(q);
            (mu.as_rational().is_some() || mode == FieldMode::Quadratic).then_some(mu)
        }
        _ => None,
    };
    let Some(mu) = mu else {
        return Ok(NormalizedWeb {
            h: h_weak,
            c,
            x_change: x1,
            y_change: y1,
            mu: Scalar::one(),
            strict: false,
        });
    };
    let mu_inv = mu.inv().expect("μ ≠ 0");
    let mut h = h_weak.clone();
    for ((i, j), v) in h_weak.terms() {
        h.set_coeff(i, j, v * &mu_inv.pow((i + j) as u32));
    }
    Ok(NormalizedWeb {
        h,
        c,
        x_change: x1.scale(&mu),
        y_change: y1.scale(&mu),
        mu,
        strict: true,
    })
}

/// The coefficients `(a, b)` of `x` and `y` in `h`, i.e. the 3-jet
/// `1 + xy(1 + a x + b y)` of the strict normal form.
pub fn invariants_3jet(nw: &NormalizedWeb) -> Result<(Scalar, Scalar)> {
    if !nw.strict {
        return Err(Error::StrictFormRequired);
    }
    if nw.h.order() < 1 {
        return Err(Error::OrderExhausted("h must be known to order 1".into()));
    }
    Ok((nw.h.coeff(1, 0).clone(), nw.h.coeff(0, 1).clone()))
}
