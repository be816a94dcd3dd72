//! Construction of rank-1 Nakai webs.
//!
//! Two routes. [`solve_p`] fixes a relation `(r, s)` and solves `(*)` for
//! the slope `p`. With `r(0) ≠ 0` the equation can be solved for `p_x`, so
//! `p` is determined order by order in `x` from its trace `p(0, y)`. With
//! `s(0) ≠ 0` the same works in `y` from `p(x, 0)`.
//!
//! [`harmonic_example`] builds the explicit harmonic web
//! `(x, y, f, g)` with `f, g = x³/6 + y ± x u(xy)`, where `u` solves
//! `t u'² + u u' = 1/2` with `u(0) = a`. It carries a set of certificates
//! recomputed from the jets.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::abelian::{reconstruct_relation, star_residual, AbelianRelation};
use crate::error::{Error, Result};
use crate::normal_form::transform_slope;
use crate::scalar::Scalar;
use crate::series::{xy, BiSeries, UniSeries, Var};
use crate::web::{
    blaschke_curvature, check_cross_ratio_constant, cross_ratio, is_hexagonal, make_wc, Foliation,
    PlanarWeb,
};

/// Which variable the march advances in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum March {
    /// Solve for `p_x`; trace is `p(0, y)`, needs `r(0) ≠ 0`.
    X,
    /// Solve for `p_y`; trace is `p(x, 0)`, needs `s(0) ≠ 0`.
    Y,
}

/// Initial data for [`solve_p`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildSpec {
    pub r: UniSeries,
    pub s: UniSeries,
    pub trace: UniSeries,
    /// `None` picks `X` when `r(0) ≠ 0` and `Y` otherwise.
    pub side: Option<March>,
    pub cross_ratio: Scalar,
    pub order: usize,
}

impl BuildSpec {
    /// Data with `C = −1` and the default march direction.
    pub fn new(r: UniSeries, s: UniSeries, trace: UniSeries, order: usize) -> Self {
        BuildSpec {
            r,
            s,
            trace,
            side: None,
            cross_ratio: Scalar::int(-1),
            order,
        }
    }

    pub fn march(&self) -> Result<March> {
        let r0 = !self.r.coeff(0).is_zero();
        let s0 = !self.s.coeff(0).is_zero();
        match self.side {
            _ if !r0 && !s0 => Err(Error::NoUnitDirection),
            None if r0 => Ok(March::X),
            None => Ok(March::Y),
            Some(March::X) if !r0 => Err(Error::InvalidParameter("x-march needs r(0) ≠ 0".into())),
            Some(March::Y) if !s0 => Err(Error::InvalidParameter("y-march needs s(0) ≠ 0".into())),
            Some(side) => Ok(side),
        }
    }
}

/// Solves `(*)` for `p` given `(r, s)` and a trace, to total order `N`.
///
/// The returned `p` restricts to the trace exactly and its `(*)` residual
/// vanishes to order `N − 1`, so `(r, s)` is a relation of the resulting
/// `W_C`.
pub fn solve_p(spec: &BuildSpec) -> Result<BiSeries> {
    let n = spec.order;
    check_cross_ratio_constant(&spec.cross_ratio)?;
    let side = spec.march()?;
    if spec.trace.coeff(0).is_zero() {
        return Err(Error::NotTransverse("trace vanishes at the origin".into()));
    }
    for (name, s) in [("r", &spec.r), ("s", &spec.s), ("trace", &spec.trace)] {
        if s.order() < n {
            return Err(Error::OrderExhausted(format!(
                "{name} is known to order {} < {n}",
                s.order()
            )));
        }
    }
    let vars = xy();
    let r = spec.r.truncate(n).with_var(vars.0.clone());
    let s = spec.s.truncate(n).with_var(vars.1.clone());
    let c = &spec.cross_ratio;
    let mut p = BiSeries::zero(vars.clone(), n);
    match side {
        March::X => {
            p.set_first_slice(0, &spec.trace.truncate(n).with_var(vars.1.clone()));
            let r0 = r.coeff(0).clone();
            for k in 0..n {
                // x^k coefficient of (*) is known − (k+1) r_0 p_{k+1}
                let known = star_residual(&r, &s, &p, c)?.first_slice(k);
                let lead = (&r0 * &Scalar::int(k as i64 + 1)).inv().expect("r_0 ≠ 0");
                p.set_first_slice(k + 1, &known.scale(&lead));
            }
        }
        March::Y => {
            let trace = spec.trace.truncate(n).with_var(vars.0.clone());
            p.set_second_slice(0, &trace);
            let inv_trace_sq = (&trace * &trace).reciprocal()?;
            let cs0 = c * s.coeff(0);
            for k in 0..n {
                // y^k coefficient of (*) is known + C s_0 (k+1) p_0² p_{k+1}
                let known = star_residual(&r, &s, &p, c)?.second_slice(k);
                let lead = (&cs0 * &Scalar::int(k as i64 + 1))
                    .inv()
                    .expect("C s_0 ≠ 0");
                let next = (&known * &inv_trace_sq.truncate(known.order())).scale(&-lead);
                p.set_second_slice(k + 1, &next);
            }
        }
    }
    if n > 0 && !star_residual(&r, &s, &p, c)?.is_zero() {
        return Err(Error::InternalInvariantViolation(
            "march left a nonzero (*) residual".into(),
        ));
    }
    Ok(p)
}

/// Curvature and hexagonality summary of `W_C`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NakaiReport {
    pub origin_curvature: Scalar,
    pub nakai: bool,
    pub cross_ratio: Scalar,
    pub cross_ratio_constant: bool,
    /// Formal hexagonality of the 3-subwebs omitting foliation 4, 3, 2, 1.
    pub hexagonal: Vec<bool>,
}

/// Checks the Nakai conditions on `W_C` to order `n`.
pub fn check_nakai(p: &BiSeries, c: &Scalar, n: usize) -> Result<NakaiReport> {
    let wc = make_wc(p.truncate(n), c.clone())?;
    let web = wc.to_planar_web();
    let k = blaschke_curvature(&wc.base_web())?;
    let cr = cross_ratio(&web)?;
    let hexagonal = web
        .subwebs()?
        .iter()
        .map(is_hexagonal)
        .collect::<Result<Vec<_>>>()?;
    Ok(NakaiReport {
        nakai: !k.constant_term().is_zero(),
        origin_curvature: k.constant_term().clone(),
        cross_ratio_constant: cr.is_constant() && cr.constant_term() == c,
        cross_ratio: cr.constant_term().clone(),
        hexagonal,
    })
}

/// `t u'² + u u' − 1/2`, valid one order below `u`.
pub fn ode_residual(u: &UniSeries) -> Result<UniSeries> {
    let du = u.derivative()?;
    let t = UniSeries::variable(u.var().clone(), du.order());
    let lhs = &(&t * &(&du * &du)) + &(u * &du);
    Ok(lhs.add_constant(&Scalar::frac(-1, 2)))
}

/// The series solution of `t u'² + u u' = 1/2` with `u(0) = a`, to order `n`.
///
/// The `t^k` coefficient of the equation is affine in `u_{k+1}` with
/// leading factor `(k + 1) a`.
pub fn ode_u(a: &Scalar, n: usize) -> Result<UniSeries> {
    let a_inv = a
        .inv()
        .ok_or_else(|| Error::InvalidParameter("u(0) = a must be nonzero".into()))?;
    let mut u = UniSeries::constant("t", n, a.clone());
    for k in 0..n {
        let known = ode_residual(&u)?.coeff(k).clone();
        let lead = &a_inv / &Scalar::int(k as i64 + 1);
        u.set_coeff(k + 1, -(&known * &lead));
    }
    Ok(u)
}

/// Pass flag and the order up to which the checked jet was compared.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub pass: bool,
    pub residual_order: usize,
}

impl Certificate {
    fn zero(jet: &BiSeries) -> Self {
        Certificate {
            pass: jet.is_zero(),
            residual_order: jet.order(),
        }
    }

    fn zero_uni(jet: &UniSeries) -> Self {
        Certificate {
            pass: jet.is_zero(),
            residual_order: jet.order(),
        }
    }
}

pub type Certificates = BTreeMap<String, Certificate>;

/// The harmonic example and everything derived from it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExampleBundle {
    pub a: Scalar,
    pub order: usize,
    pub u: UniSeries,
    pub f: BiSeries,
    pub g: BiSeries,
    pub web: PlanarWeb,
    pub p: BiSeries,
    pub relation: AbelianRelation,
    pub certificates: Certificates,
}

impl ExampleBundle {
    pub fn all_pass(&self) -> bool {
        self.certificates.values().all(|c| c.pass)
    }
}

/// `f` or `g`: `x³/6 + y + sign · x u(xy)`, known to order `order`.
fn harmonic_integral(u: &UniSeries, order: usize, sign: i64) -> Result<BiSeries> {
    let vars = xy();
    let t = BiSeries::monomial(vars.clone(), order, 1, 1, Scalar::one());
    let ut = u.substitute_bi(&t)?.truncate(order);
    let x = BiSeries::x(vars.clone(), order);
    let base = BiSeries::from_terms(
        vars,
        order,
        [((3, 0), Scalar::frac(1, 6)), ((0, 1), Scalar::one())],
    );
    Ok(&base + &(&x * &ut).scale(&Scalar::int(sign)))
}

fn harmonic_web(f: &BiSeries, g: &BiSeries) -> Result<PlanarWeb> {
    let n = f.order();
    let vars = f.vars().clone();
    PlanarWeb::new(vec![
        Foliation::from_first_integral(&BiSeries::x(vars.clone(), n))?,
        Foliation::from_first_integral(&BiSeries::y(vars, n))?,
        Foliation::from_first_integral(f)?,
        Foliation::from_first_integral(g)?,
    ])
}

/// Builds the harmonic example for `u(0) = a`, with `u` to order `n` and
/// the first integrals `f, g` to order `n + 1` (so the slopes are known to
/// order `n`).
pub fn harmonic_example(a: &Scalar, n: usize) -> Result<ExampleBundle> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "the example needs order ≥ 2".into(),
        ));
    }
    let u = ode_u(a, n)?;
    let f = harmonic_integral(&u, n + 1, 1)?;
    let g = harmonic_integral(&u, n + 1, -1)?;
    let web = harmonic_web(&f, &g)?;
    let p = web.foliations()[2].slope()?;
    let (x, y) = (Var::new("x"), Var::new("y"));
    let r = UniSeries::monomial(x, n, 2, Scalar::one());
    let s = UniSeries::constant(y, n, Scalar::int(2));
    let relation = reconstruct_relation(&r, &s, &p, &Scalar::int(-1))?;
    let certificates = certify(a, &u, &f, &g, &p, &r, &s)?;
    Ok(ExampleBundle {
        a: a.clone(),
        order: n,
        u,
        f,
        g,
        web,
        p,
        relation,
        certificates,
    })
}

/// Recomputes every certificate of a harmonic example from its jets.
///
/// - `exact_relation`: `x³/3 + 2y − f − g = 0`
/// - `harmonic`: `f_x g_y + g_x f_y = 0`
/// - `cross_ratio`: the cross-ratio of `(x, y, f, g)` is the constant −1
/// - `slope`: `p = −f_x / f_y`
/// - `curvature_origin`: the subweb `(x, y, f)` has curvature `1/a²` at 0
/// - `subweb_curvatures`: all four 3-subwebs share one curvature jet,
///   nonzero at the origin
/// - `derivative_identity`: `2 u'(xy) f_x = f_y`, the consequence of the ODE
///   that makes `(x², 2)` a relation
/// - `ode`: `t u'² + u u' − 1/2 = 0`
/// - `reciprocal_ode`: the inverse function `t(u)` satisfies
///   `t'² − 2u t' − 2t = 0`
/// - `branch`: `t' = u + σ √(u² + 2t)` for one sign `σ`
/// - `relation`: `(r, s)` reconstructs to a valid abelian relation of
///   `W_{−1}` with slope `p`
pub fn certify(
    a: &Scalar,
    u: &UniSeries,
    f: &BiSeries,
    g: &BiSeries,
    p: &BiSeries,
    r: &UniSeries,
    s: &UniSeries,
) -> Result<Certificates> {
    let mut out = Certificates::new();
    let vars = f.vars().clone();
    let n = f.order();

    let mut sum = BiSeries::from_terms(
        vars.clone(),
        n,
        [((3, 0), Scalar::frac(1, 3)), ((0, 1), Scalar::int(2))],
    );
    sum = &(&sum - f) - g;
    out.insert("exact_relation".into(), Certificate::zero(&sum));

    let (fx, fy) = (f.partial_x()?, f.partial_y()?);
    let (gx, gy) = (g.partial_x()?, g.partial_y()?);
    let harmonic = &(&fx * &gy) + &(&gx * &fy);
    out.insert("harmonic".into(), Certificate::zero(&harmonic));

    let web = harmonic_web(f, g)?;
    let cr = cross_ratio(&web)?;
    out.insert(
        "cross_ratio".into(),
        Certificate::zero(&cr.add_constant(&Scalar::one())),
    );

    let slope = web.foliations()[2].slope()?;
    out.insert("slope".into(), Certificate::zero(&(&slope - p)));

    let subwebs = web.subwebs()?;
    let curvatures = subwebs
        .iter()
        .map(blaschke_curvature)
        .collect::<Result<Vec<_>>>()?;
    let expected = (a * a)
        .inv()
        .ok_or_else(|| Error::InvalidParameter("a = 0".into()))?;
    out.insert(
        "curvature_origin".into(),
        Certificate {
            pass: curvatures[0].constant_term() == &expected,
            residual_order: 0,
        },
    );
    out.insert(
        "subweb_curvatures".into(),
        Certificate {
            pass: curvatures.iter().all(|k| k == &curvatures[0])
                && !curvatures[0].constant_term().is_zero(),
            residual_order: curvatures[0].order(),
        },
    );

    let du = u.derivative()?;
    let t = BiSeries::monomial(vars, n, 1, 1, Scalar::one());
    let du_t = du.substitute_bi(&t)?;
    let identity = &(&du_t * &fx).scale(&Scalar::int(2)) - &fy;
    out.insert("derivative_identity".into(), Certificate::zero(&identity));

    out.insert("ode".into(), Certificate::zero_uni(&ode_residual(u)?));

    let (reciprocal, branch) = reciprocal_checks(a, u)?;
    out.insert("reciprocal_ode".into(), reciprocal);
    out.insert("branch".into(), branch);

    let relation = reconstruct_relation(r, s, p, &Scalar::int(-1))?;
    out.insert(
        "relation".into(),
        Certificate {
            pass: relation.is_valid(),
            residual_order: star_residual(r, s, p, &Scalar::int(-1))?.order(),
        },
    );
    Ok(out)
}

/// Checks on the inverse function `t(u)`, expanded in `w = u − a`.
fn reciprocal_checks(a: &Scalar, u: &UniSeries) -> Result<(Certificate, Certificate)> {
    let shifted = u.add_constant(&-a);
    let t_of_w = shifted.invert()?.with_var("w");
    let dt = t_of_w.derivative()?;
    let m = dt.order();
    let u_of_w = UniSeries::new("w", m, vec![a.clone(), Scalar::one()]);
    let t_m = t_of_w.truncate(m);
    let residual =
        &(&(&dt * &dt) - &(&u_of_w * &dt).scale(&Scalar::int(2))) - &t_m.scale(&Scalar::int(2));
    let reciprocal = Certificate::zero_uni(&residual);

    // t' − u = σ √(u² + 2t), the root taken with constant term |a|
    let radicand = &(&u_of_w * &u_of_w) + &t_m.scale(&Scalar::int(2));
    let abs_a = match a {
        Scalar::Rational(q) => Scalar::Rational(q.abs()),
        other => other.clone(),
    };
    let root = radicand.sqrt_with_root(&abs_a)?;
    let lhs = &dt - &u_of_w;
    let pass = lhs == root || lhs == -&root;
    let branch = Certificate {
        pass,
        residual_order: m,
    };
    Ok((reciprocal, branch))
}

/// Outcome of one candidate isomorphism between harmonic examples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScalingCandidate {
    pub map: String,
    pub lambda_squared: Scalar,
    pub maps_to_a_equals_1: bool,
}

/// Tests which diagonal maps `(x, y) ↦ (λx, λ^k y)` carry the harmonic
/// example with `u(0) = a` onto the one with `u(0) = 1`, comparing slopes
/// to order `n`.
///
/// Candidates are `(λx, y/λ)` and `(λx, λ³y)`, each with `λ² = a` and
/// `λ² = 1/a`. Since `u_a(t) = a·u_1(t/a²)`, one finds
/// `f_a = κ·f_1(λx, λ³y)` with `λ² = 1/a`, so that candidate always works.
pub fn harmonic_scaling_candidates(a: &Scalar, n: usize) -> Result<Vec<ScalingCandidate>> {
    let a_inv = a
        .inv()
        .ok_or_else(|| Error::InvalidParameter("a must be nonzero".into()))?;
    let target = harmonic_example(&Scalar::one(), n)?.p;
    let source = harmonic_example(a, n)?.p;
    let mut out = Vec::new();
    for (name, y_power) in [("(λx, y/λ)", -1i32), ("(λx, λ³y)", 3)] {
        for lambda_sq in [a.clone(), a_inv.clone()] {
            let Some(q) = lambda_sq.as_rational() else {
                return Err(Error::InvalidParameter("a must be rational".into()));
            };
            let lambda = Scalar::sqrt_of(q);
            let y_factor = if y_power < 0 {
                lambda.inv().expect("λ ≠ 0")
            } else {
                lambda.pow(y_power as u32)
            };
            let xs = UniSeries::monomial("x", n + 1, 1, lambda.clone());
            let ys = UniSeries::monomial("y", n + 1, 1, y_factor);
            let mapped = transform_slope(&source, &xs, &ys)?;
            out.push(ScalingCandidate {
                map: name.to_string(),
                lambda_squared: lambda_sq.clone(),
                maps_to_a_equals_1: mapped.agrees_with(&target),
            });
        }
    }
    Ok(out)
}
