//! Planar webs given by foliation jets, and their pointwise invariants.
//!
//! A foliation is stored as the coefficient pair `(a, b)` of a defining
//! 1-form `a dx + b dy`; its tangent direction is `(b, −a)`. Working with
//! pairs and 2×2 determinants keeps vertical directions (`dx`, slope ∞) on
//! the same footing as every other direction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{BiSeries, Var};

/// A foliation germ `a dx + b dy = 0` with `(a(0), b(0)) ≠ (0, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Foliation {
    a: BiSeries,
    b: BiSeries,
}

impl Foliation {
    pub fn new(a: BiSeries, b: BiSeries) -> Result<Self> {
        if a.vars() != b.vars() {
            return Err(Error::VariableMismatch(
                "1-form coefficients use different variables".into(),
            ));
        }
        if a.constant_term().is_zero() && b.constant_term().is_zero() {
            return Err(Error::SingularFoliation);
        }
        let n = a.order().min(b.order());
        Ok(Foliation {
            a: a.truncate(n),
            b: b.truncate(n),
        })
    }

    /// The foliation of a first integral `F`, defined by `dF`.
    pub fn from_first_integral(f: &BiSeries) -> Result<Self> {
        let fx = f.partial_x()?;
        let fy = f.partial_y()?;
        Foliation::new(fx, fy)
    }

    /// The foliation `dy − m dx` of slope `m`.
    pub fn from_slope(m: &BiSeries) -> Self {
        Foliation {
            a: -m,
            b: BiSeries::constant(m.vars().clone(), m.order(), Scalar::one()),
        }
    }

    pub fn dx(vars: (Var, Var), order: usize) -> Self {
        Foliation {
            a: BiSeries::constant(vars.clone(), order, Scalar::one()),
            b: BiSeries::zero(vars, order),
        }
    }

    pub fn dy(vars: (Var, Var), order: usize) -> Self {
        Foliation {
            a: BiSeries::zero(vars.clone(), order),
            b: BiSeries::constant(vars, order, Scalar::one()),
        }
    }

    pub fn a(&self) -> &BiSeries {
        &self.a
    }

    pub fn b(&self) -> &BiSeries {
        &self.b
    }

    pub fn order(&self) -> usize {
        self.a.order()
    }

    pub fn vars(&self) -> &(Var, Var) {
        self.a.vars()
    }

    pub fn truncate(&self, order: usize) -> Self {
        Foliation {
            a: self.a.truncate(order),
            b: self.b.truncate(order),
        }
    }

    /// Slope `−a/b` of the leaves; needs `b(0) ≠ 0`.
    pub fn slope(&self) -> Result<BiSeries> {
        Ok(&-&self.a * &self.b.reciprocal()?)
    }

    /// `det(v_self, v_other)` for tangent directions `v = (b, −a)`.
    pub fn direction_det(&self, other: &Foliation) -> BiSeries {
        &(&self.a * &other.b) - &(&other.a * &self.b)
    }

    /// Same foliation at jet level: the defining forms are proportional.
    pub fn is_proportional(&self, other: &Foliation) -> bool {
        self.direction_det(other).is_zero()
    }

    /// Multiplies the defining form by `unit`.
    pub fn rescale(&self, unit: &BiSeries) -> Result<Self> {
        if unit.constant_term().is_zero() {
            return Err(Error::DivisionByNonUnit);
        }
        Foliation::new(&self.a * unit, &self.b * unit)
    }
}

/// An ordered 3- or 4-web, pairwise transverse at the origin.
///
/// In JSON a web is `{"order": N, "foliations": [...]}`, each foliation
/// one of `{"a": .., "b": ..}`, `{"first_integral": F}` or `{"slope": m}`.
/// `order` is optional on input and caps the common order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WebSpec")]
pub struct PlanarWeb {
    order: usize,
    foliations: Vec<Foliation>,
}

/// One foliation as written in a JSON web.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum FoliationSpec {
    Form { a: BiSeries, b: BiSeries },
    FirstIntegral { first_integral: BiSeries },
    Slope { slope: BiSeries },
}

impl FoliationSpec {
    pub fn build(&self) -> Result<Foliation> {
        match self {
            FoliationSpec::Form { a, b } => Foliation::new(a.clone(), b.clone()),
            FoliationSpec::FirstIntegral { first_integral } => {
                Foliation::from_first_integral(first_integral)
            }
            FoliationSpec::Slope { slope } => Ok(Foliation::from_slope(slope)),
        }
    }
}

/// The input form of a [`PlanarWeb`].
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WebSpec {
    #[serde(default)]
    pub order: Option<usize>,
    pub foliations: Vec<FoliationSpec>,
}

impl TryFrom<WebSpec> for PlanarWeb {
    type Error = Error;

    fn try_from(spec: WebSpec) -> Result<Self> {
        let mut foliations = spec
            .foliations
            .iter()
            .map(FoliationSpec::build)
            .collect::<Result<Vec<_>>>()?;
        if let Some(n) = spec.order {
            foliations = foliations.iter().map(|f| f.truncate(n)).collect();
        }
        PlanarWeb::new(foliations)
    }
}

impl PlanarWeb {
    pub fn new(foliations: Vec<Foliation>) -> Result<Self> {
        let d = foliations.len();
        if !(3..=4).contains(&d) {
            return Err(Error::WrongFoliationCount {
                expected: 4,
                got: d,
            });
        }
        let vars = foliations[0].vars().clone();
        if foliations.iter().any(|f| f.vars() != &vars) {
            return Err(Error::VariableMismatch(
                "foliations use different variables".into(),
            ));
        }
        let order = foliations.iter().map(Foliation::order).min().unwrap_or(0);
        let foliations: Vec<_> = foliations.iter().map(|f| f.truncate(order)).collect();
        for i in 0..d {
            for j in i + 1..d {
                if foliations[i]
                    .direction_det(&foliations[j])
                    .constant_term()
                    .is_zero()
                {
                    return Err(Error::NotTransverse(format!(
                        "foliations {} and {} are tangent at the origin",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(PlanarWeb { foliations, order })
    }

    pub fn foliations(&self) -> &[Foliation] {
        &self.foliations
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.foliations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.foliations.is_empty()
    }

    /// The 3-subweb on the given foliation indices.
    pub fn subweb(&self, idx: [usize; 3]) -> Result<PlanarWeb> {
        PlanarWeb::new(idx.iter().map(|&i| self.foliations[i].clone()).collect())
    }

    /// All 3-subwebs of a 4-web, omitting foliation 4, 3, 2, 1 in turn.
    pub fn subwebs(&self) -> Result<Vec<PlanarWeb>> {
        self.expect_len(4)?;
        [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
            .into_iter()
            .map(|idx| self.subweb(idx))
            .collect()
    }

    fn expect_len(&self, d: usize) -> Result<()> {
        if self.len() != d {
            return Err(Error::WrongFoliationCount {
                expected: d,
                got: self.len(),
            });
        }
        Ok(())
    }
}

/// The 4-web `(dx, dy, dy − p dx, dy − C p dx)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeWeb4 {
    p: BiSeries,
    c: Scalar,
}

/// Rejects `C ∈ {0, 1}`.
pub fn check_cross_ratio_constant(c: &Scalar) -> Result<()> {
    if c.is_zero() || c.is_one() {
        return Err(Error::DegenerateCrossRatio(c.to_string()));
    }
    Ok(())
}

impl SlopeWeb4 {
    pub fn p(&self) -> &BiSeries {
        &self.p
    }

    pub fn c(&self) -> &Scalar {
        &self.c
    }

    pub fn order(&self) -> usize {
        self.p.order()
    }

    pub fn to_planar_web(&self) -> PlanarWeb {
        let vars = self.p.vars().clone();
        let n = self.p.order();
        let foliations = vec![
            Foliation::dx(vars.clone(), n),
            Foliation::dy(vars, n),
            Foliation::from_slope(&self.p),
            Foliation::from_slope(&self.p.scale(&self.c)),
        ];
        PlanarWeb::new(foliations).expect("validated by make_wc")
    }

    /// The curved 3-web `(dx, dy, dy − p dx)`.
    pub fn base_web(&self) -> PlanarWeb {
        self.to_planar_web()
            .subweb([0, 1, 2])
            .expect("validated by make_wc")
    }
}

/// Builds `W_C` from the third slope `p` and the constant `C`.
pub fn make_wc(p: BiSeries, c: Scalar) -> Result<SlopeWeb4> {
    check_cross_ratio_constant(&c)?;
    if p.constant_term().is_zero() {
        return Err(Error::NotTransverse("p vanishes at the origin".into()));
    }
    // all six pairs are transverse once p(0) ≠ 0 and C ∉ {0, 1}
    Ok(SlopeWeb4 { p, c })
}

/// Reads `(p, C)` off a 4-web already written in adapted coordinates.
pub fn to_slope_form(web: &PlanarWeb) -> Result<SlopeWeb4> {
    web.expect_len(4)?;
    let f = web.foliations();
    if !f[0].b().is_zero() || !f[1].a().is_zero() {
        return Err(Error::NotAdapted);
    }
    let p = f[2].slope()?;
    let q = f[3].slope()?;
    let ratio = &q * &p.reciprocal()?;
    if !ratio.is_constant() {
        return Err(Error::NonConstantCrossRatio);
    }
    make_wc(p, ratio.constant_term().clone())
}

/// Cross-ratio `det(v1,v3) det(v2,v4) / (det(v1,v4) det(v2,v3))` of the four
/// tangent directions, as a jet. Equals `C` on `W_C`.
pub fn cross_ratio(web: &PlanarWeb) -> Result<BiSeries> {
    web.expect_len(4)?;
    let f = web.foliations();
    let num = &f[0].direction_det(&f[2]) * &f[1].direction_det(&f[3]);
    let den = &f[0].direction_det(&f[3]) * &f[1].direction_det(&f[2]);
    let inv = den
        .reciprocal()
        .map_err(|_| Error::NotTransverse("cross-ratio denominator vanishes".into()))?;
    Ok(&num * &inv)
}

/// Blaschke curvature `K` of a 3-web, with `dγ = K dx∧dy`.
///
/// The defining forms are normalized to `ω̃_i = f_i ω_i` with `Σ ω̃_i = 0`,
/// the connection `γ = α dx + β dy` is the unique solution of
/// `dω̃_i = γ ∧ ω̃_i`, and `K = β_x − α_y`. For `(dx, dy, dy − p dx)` this
/// gives `K = (log p)_xy`. The result is valid to order `N − 2`.
pub fn blaschke_curvature(web: &PlanarWeb) -> Result<BiSeries> {
    web.expect_len(3)?;
    if web.order() < 2 {
        return Err(Error::OrderExhausted("curvature needs order ≥ 2".into()));
    }
    let f = web.foliations();
    let (a1, b1) = (f[0].a(), f[0].b());
    let (a2, b2) = (f[1].a(), f[1].b());
    let (a3, b3) = (f[2].a(), f[2].b());
    let weights = [
        &(a2 * b3) - &(a3 * b2),
        &(a3 * b1) - &(a1 * b3),
        &(a1 * b2) - &(a2 * b1),
    ];
    let forms: Vec<(BiSeries, BiSeries)> = f
        .iter()
        .zip(&weights)
        .map(|(fol, w)| (fol.a() * w, fol.b() * w))
        .collect();
    // dω̃ = (B_x − A_y) dx∧dy and γ∧ω̃ = (αB − βA) dx∧dy
    let rhs: Vec<BiSeries> = forms
        .iter()
        .map(|(a, b)| Ok(&b.partial_x()? - &a.partial_y()?))
        .collect::<Result<_>>()?;
    let (big_a1, big_b1) = &forms[0];
    let (big_a2, big_b2) = &forms[1];
    let det = &(big_a1 * big_b2) - &(big_a2 * big_b1);
    let det_inv = det
        .reciprocal()
        .map_err(|_| Error::NotTransverse("3-web is not transverse at the origin".into()))?;
    let alpha = &(&(big_a1 * &rhs[1]) - &(big_a2 * &rhs[0])) * &det_inv;
    let beta = &(&(big_b1 * &rhs[1]) - &(big_b2 * &rhs[0])) * &det_inv;

    let (big_a3, big_b3) = &forms[2];
    let third = &(&alpha * big_b3) - &(&beta * big_a3);
    if !third.agrees_with(&rhs[2]) {
        return Err(Error::InternalInvariantViolation(
            "connection does not satisfy the third structure equation".into(),
        ));
    }
    Ok(&beta.partial_x()? - &alpha.partial_y()?)
}

/// Formal hexagonality: the curvature jet vanishes up to its valid order.
pub fn is_hexagonal(web: &PlanarWeb) -> Result<bool> {
    Ok(blaschke_curvature(web)?.is_zero())
}

#[cfg(test)]
pub(crate) mod oracle {
    use crate::scalar::Scalar;
    use crate::series::BiSeries;

    /// `log(p / p(0))` by the logarithm power series.
    pub fn log_unit(p: &BiSeries) -> BiSeries {
        let p0 = p.constant_term().clone();
        let g = p.scale(&p0.inv().unwrap()).add_constant(&Scalar::int(-1));
        let mut out = BiSeries::zero(p.vars().clone(), p.order());
        let mut power = g.clone();
        for k in 1..=p.order() {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            out = &out + &power.scale(&Scalar::frac(sign, k as i64));
            power = &power * &g;
        }
        out
    }

    /// `(log p)_xy`, independent of the connection construction.
    pub fn log_mixed_partial(p: &BiSeries) -> BiSeries {
        log_unit(p).partial_x().unwrap().partial_y().unwrap()
    }
}
