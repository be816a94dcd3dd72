//! Abelian relations of `W_C` and the formal rank.
//!
//! A relation of `(dx, dy, dy − p dx, dy − C p dx)` is a quadruple of
//! functions `(r, s, c, e)` with
//!
//! ```text
//! r dx + s dy + c (dy − p dx) + e (dy − C p dx) = 0
//! ```
//!
//! and each of the four 1-forms closed. Closedness of `r dx` and `s dy`
//! makes `r = r(x)` and `s = s(y)`. The two algebraic identities give
//! `c = (C s + r/p)/(1 − C)` and `e = −s − c`, and closedness of
//! `c (dy − p dx)`, which reads `c_x + (c p)_y = 0`, is equivalent to
//!
//! ```text
//! r'(x) p − r(x) p_x + C (s'(y) p³ + s(y) p² p_y) = 0.        (*)
//! ```
//!
//! So the relations are exactly the solutions `(r, s)` of `(*)`. Taking
//! Taylor coefficients turns `(*)` into a linear system; its kernel at
//! growing truncation orders gives the formal rank.

use std::thread;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{normalize_first_nonzero, Matrix};
use crate::scalar::Scalar;
use crate::series::{BiSeries, UniSeries, Var};
use crate::web::{check_cross_ratio_constant, make_wc};

/// Left-hand side of `(*)` as a jet in the variables of `p`.
///
/// `r` is read as a function of the first variable and `s` of the second.
/// The result is valid to one order below the smallest input order.
pub fn star_residual(r: &UniSeries, s: &UniSeries, p: &BiSeries, c: &Scalar) -> Result<BiSeries> {
    let vars = p.vars().clone();
    let r2 = r.embed_first(vars.clone());
    let s2 = s.embed_second(vars.clone());
    let dr = r.derivative()?.embed_first(vars.clone());
    let ds = s.derivative()?.embed_second(vars);
    let px = p.partial_x()?;
    let py = p.partial_y()?;
    let p2 = p * p;
    let x_part = &(&dr * p) - &(&r2 * &px);
    let y_part = &(&(&ds * &p2) * p) + &(&(&s2 * &p2) * &py);
    Ok(&x_part + &y_part.scale(c))
}

/// Coefficient matrix of `(*)` at truncation order `n`.
///
/// Unknowns are `(r_0, …, r_n, s_0, …, s_n)`. There is one row per monomial
/// `x^i y^j` with `i + j ≤ n − 1`, in total-degree order. These rows are
/// exact: the tails of `r` and `s` beyond degree `n` only reach degree `n`
/// and above.
pub fn build_system(p: &BiSeries, c: &Scalar, n: usize) -> Result<Matrix> {
    make_wc(p.clone(), c.clone())?;
    if p.order() < n {
        return Err(Error::OrderExhausted(format!(
            "p is known to order {} but the system needs order {n}",
            p.order()
        )));
    }
    let rows = n * (n + 1) / 2;
    let mut m = Matrix::zeros(rows, 2 * (n + 1));
    if n == 0 {
        return Ok(m);
    }
    let p = p.truncate(n);
    let (x, y) = (p.vars().0.clone(), p.vars().1.clone());
    for k in 0..=n {
        let rk = UniSeries::monomial(x.clone(), n, k, Scalar::one());
        let sk = UniSeries::monomial(y.clone(), n, k, Scalar::one());
        let zero_r = UniSeries::zero(x.clone(), n);
        let zero_s = UniSeries::zero(y.clone(), n);
        let col_r = star_residual(&rk, &zero_s, &p, c)?;
        let col_s = star_residual(&zero_r, &sk, &p, c)?;
        for (row, ((_, v_r), (_, v_s))) in col_r.terms().zip(col_s.terms()).enumerate() {
            m.set(row, k, v_r.clone());
            m.set(row, n + 1 + k, v_s.clone());
        }
    }
    Ok(m)
}

/// A pair `(r, s)` solving `(*)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationPair {
    pub r: UniSeries,
    pub s: UniSeries,
}

/// Result of the rank computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub order: usize,
    /// Kernel dimension of the truncated system at each order `0..=order`.
    pub dims: Vec<usize>,
    pub rank: usize,
    /// `dims[order] == dims[order − 1]`.
    pub stabilized: bool,
    pub basis: Vec<RelationPair>,
}

impl RankReport {
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.stabilized {
            out.push(format!(
                "StabilizationNotReached: kernel dimension still changing at order {}",
                self.order
            ));
        }
        out
    }
}

/// Splits a kernel vector into `(r, s)` and rescales so the first nonzero
/// entry of `(r_0, s_0, r_1, s_1, …)` is 1.
fn split_pair(v: &[Scalar], n: usize, vars: &(Var, Var)) -> RelationPair {
    let mut interleaved: Vec<Scalar> = (0..=n)
        .flat_map(|k| [v[k].clone(), v[n + 1 + k].clone()])
        .collect();
    normalize_first_nonzero(&mut interleaved);
    let r = interleaved.iter().step_by(2).cloned().collect();
    let s = interleaved.iter().skip(1).step_by(2).cloned().collect();
    RelationPair {
        r: UniSeries::new(vars.0.clone(), n, r),
        s: UniSeries::new(vars.1.clone(), n, s),
    }
}

/// Formal rank of `W_C` at truncation order `n`.
///
/// The truncated systems for orders `0..=n` are independent and are
/// eliminated on separate threads.
pub fn rank(p: &BiSeries, c: &Scalar, n: usize) -> Result<RankReport> {
    let systems: Vec<Matrix> = (0..=n)
        .map(|k| build_system(p, c, k))
        .collect::<Result<_>>()?;
    let kernels: Vec<Vec<Vec<Scalar>>> = thread::scope(|scope| {
        let handles: Vec<_> = systems
            .iter()
            .map(|m| scope.spawn(move || m.kernel_basis()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("elimination thread panicked"))
            .collect()
    });
    let dims: Vec<usize> = kernels.iter().map(Vec::len).collect();
    let vars = p.vars().clone();
    let basis: Vec<RelationPair> = kernels[n].iter().map(|v| split_pair(v, n, &vars)).collect();
    if n > 0 {
        let p_n = p.truncate(n);
        for pair in &basis {
            if !star_residual(&pair.r, &pair.s, &p_n, c)?.is_zero() {
                return Err(Error::InternalInvariantViolation(
                    "kernel element does not solve (*) to order n − 1".into(),
                ));
            }
        }
    }
    Ok(RankReport {
        order: n,
        rank: dims[n],
        stabilized: n > 0 && dims[n] == dims[n - 1],
        dims,
        basis,
    })
}

/// Outcome of each identity checked on a reconstructed relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationChecks {
    /// `s + c + e = 0`
    pub sum: bool,
    /// `r − p c − C p e = 0`
    pub coefficient_identity: bool,
    /// `c_x + (c p)_y = 0`, i.e. `d(c (dy − p dx)) = 0`
    pub c_closed: bool,
    /// `e_x + C (e p)_y = 0`, i.e. `d(e (dy − C p dx)) = 0`
    pub e_closed: bool,
    /// `(*)` residual vanishes.
    pub star: bool,
}

impl RelationChecks {
    pub fn all(&self) -> bool {
        self.sum && self.coefficient_identity && self.c_closed && self.e_closed && self.star
    }
}

/// The four functions of an abelian relation of `W_C`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianRelation {
    pub r: UniSeries,
    pub s: UniSeries,
    pub c: BiSeries,
    pub e: BiSeries,
    #[serde(rename = "C")]
    pub cross_ratio: Scalar,
    #[serde(skip)]
    pub p: BiSeries,
    pub checks: RelationChecks,
}

impl AbelianRelation {
    pub fn is_valid(&self) -> bool {
        self.checks.all()
    }
}

/// Recovers `c` and `e` from `(r, s)` and checks every defining identity.
///
/// Pairs that do not solve `(*)` are still reconstructed; the failing
/// checks are reported in [`AbelianRelation::checks`].
pub fn reconstruct_relation(
    r: &UniSeries,
    s: &UniSeries,
    p: &BiSeries,
    cross_ratio: &Scalar,
) -> Result<AbelianRelation> {
    check_cross_ratio_constant(cross_ratio)?;
    let vars = p.vars().clone();
    let inv_p = p.reciprocal()?;
    let r2 = r.embed_first(vars.clone());
    let s2 = s.embed_second(vars);
    let one_minus = (Scalar::one() - cross_ratio).inv().expect("C ≠ 1");
    let c = (&s2.scale(cross_ratio) + &(&r2 * &inv_p)).scale(&one_minus);
    let e = &-&s2 - &c;

    let sum = (&(&s2 + &c) + &e).is_zero();
    let pc = p * &c;
    let pe = p * &e;
    let coefficient_identity = (&(&r2 - &pc) - &pe.scale(cross_ratio)).is_zero();
    let c_closed = (&c.partial_x()? + &pc.partial_y()?).is_zero();
    let e_closed = (&e.partial_x()? + &pe.partial_y()?.scale(cross_ratio)).is_zero();
    let star = star_residual(r, s, p, cross_ratio)?.is_zero();

    Ok(AbelianRelation {
        r: r.clone(),
        s: s.clone(),
        c,
        e,
        cross_ratio: cross_ratio.clone(),
        p: p.clone(),
        checks: RelationChecks {
            sum,
            coefficient_identity,
            c_closed,
            e_closed,
            star,
        },
    })
}

/// Moves a relation of `W_C` to `W_D` through `(r, s) ↦ (r, C s / D)`.
///
/// `s` only enters `(*)` through the product `C s`, so this is a bijection
/// between the solution spaces for `C` and `D`.
pub fn transfer_relation(rel: &AbelianRelation, d: &Scalar) -> Result<AbelianRelation> {
    check_cross_ratio_constant(d)?;
    let s = rel.s.scale(&(&rel.cross_ratio / d));
    reconstruct_relation(&rel.r, &s, &rel.p, d)
}

/// The 2×2 system on `(r_0, s_0)` coming from the degree-3 Taylor
/// coefficients of `(*)` at `C = −1`, for a normal form whose `h` has 2-jet
/// `a x + b y + u x² + v xy + w y²`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Degree3 {
    pub matrix: [[Scalar; 2]; 2],
    pub det: Scalar,
    pub generic: bool,
}

pub fn degree3_analysis(a: &Scalar, b: &Scalar, u: &Scalar, v: &Scalar, w: &Scalar) -> Degree3 {
    let int = |k: i64| Scalar::int(k);
    let ab = a * b;
    let m00 = &(&int(-5) * &(a * a)) + &(&int(6) * u);
    let m01 = &(&int(3) - &(&int(5) * &ab)) + &(&int(4) * v);
    let m10 = &(&(&int(-5) * &ab) + &(&int(4) * v)) - &int(7);
    let m11 = &(&int(6) * w) - &(&int(5) * &(b * b));
    let det = &(&m00 * &m11) - &(&m01 * &m10);
    Degree3 {
        generic: !det.is_zero(),
        matrix: [[m00, m01], [m10, m11]],
        det,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::xy;

    fn bi(order: usize, terms: &[((usize, usize), i64, i64)]) -> BiSeries {
        BiSeries::from_ratios(xy(), order, terms)
    }

    fn normal_form(n: usize, h: &[((usize, usize), i64, i64)]) -> BiSeries {
        let mut terms = vec![((0, 0), 1, 1), ((1, 1), 1, 1)];
        terms.extend(
            h.iter()
                .map(|&((i, j), num, den)| ((i + 1, j + 1), num, den)),
        );
        bi(n, &terms)
    }

    fn minus_one() -> Scalar {
        Scalar::int(-1)
    }

    /// Column of the unknown `name_k` in a system of order `n`.
    fn col(n: usize, r: bool, k: usize) -> usize {
        if r {
            k
        } else {
            n + 1 + k
        }
    }

    #[test]
    fn constant_row_reads_s1_equals_r1() {
        let m = build_system(&normal_form(3, &[]), &minus_one(), 3).unwrap();
        let row = m.row(0);
        for (j, v) in row.iter().enumerate() {
            let expected = if j == col(3, true, 1) {
                Scalar::one()
            } else if j == col(3, false, 1) {
                Scalar::int(-1)
            } else {
                Scalar::zero()
            };
            assert_eq!(v, &expected, "column {j}");
        }
    }

    #[test]
    fn degree_one_rows() {
        let n = 3;
        let m = build_system(&normal_form(n, &[]), &minus_one(), n).unwrap();
        // row 1 is the x coefficient: 2 r_2 − s_0 = 0
        assert_eq!(m.get(1, col(n, true, 2)), &Scalar::int(2));
        assert_eq!(m.get(1, col(n, false, 0)), &Scalar::int(-1));
        // row 2 is the y coefficient: −r_0 − 2 s_2 = 0
        assert_eq!(m.get(2, col(n, true, 0)), &Scalar::int(-1));
        assert_eq!(m.get(2, col(n, false, 2)), &Scalar::int(-2));
        let nonzero = |row: usize| m.row(row).iter().filter(|v| !v.is_zero()).count();
        assert_eq!(nonzero(1), 2);
        assert_eq!(nonzero(2), 2);
    }

    #[test]
    fn flat_normal_form_has_rank_zero() {
        let report = rank(&normal_form(8, &[]), &minus_one(), 8).unwrap();
        assert_eq!(report.rank, 0);
        assert!(report.stabilized);
        assert!(report.basis.is_empty());
        assert_eq!(report.dims, vec![2, 3, 3, 2, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn rank_rejects_degenerate_input() {
        assert!(matches!(
            rank(&bi(6, &[((1, 1), 1, 1)]), &minus_one(), 6),
            Err(Error::NotTransverse(_))
        ));
        assert!(matches!(
            rank(&normal_form(6, &[]), &Scalar::one(), 6),
            Err(Error::DegenerateCrossRatio(_))
        ));
        assert!(matches!(
            rank(&normal_form(4, &[]), &minus_one(), 6),
            Err(Error::OrderExhausted(_))
        ));
    }

    #[test]
    fn non_relation_is_flagged() {
        let r = UniSeries::constant("x", 5, Scalar::one());
        let s = UniSeries::zero("y", 5);
        let rel = reconstruct_relation(&r, &s, &normal_form(5, &[]), &minus_one()).unwrap();
        assert!(!rel.checks.star);
        assert!(!rel.is_valid());
        assert!(rel.checks.sum);
    }

    #[test]
    fn zero_relation_passes_and_transfers() {
        let r = UniSeries::zero("x", 5);
        let s = UniSeries::zero("y", 5);
        let rel = reconstruct_relation(&r, &s, &normal_form(5, &[]), &minus_one()).unwrap();
        assert!(rel.is_valid());
        let moved = transfer_relation(&rel, &Scalar::int(2)).unwrap();
        assert!(moved.is_valid());
        assert!(moved.s.is_zero());
        assert!(matches!(
            transfer_relation(&rel, &Scalar::zero()),
            Err(Error::DegenerateCrossRatio(_))
        ));
    }

    #[test]
    fn transfer_keeps_the_product_c_s() {
        let n = 5;
        let p = normal_form(n, &[((1, 0), 1, 1)]);
        // a relation of the web built by the march
        let spec = crate::nakai::BuildSpec::new(
            UniSeries::constant("x", n, Scalar::one()),
            UniSeries::variable("y", n),
            p.on_second_axis(),
            n,
        );
        let q = crate::nakai::solve_p(&spec).unwrap();
        let rel = reconstruct_relation(&spec.r, &spec.s, &q, &minus_one()).unwrap();
        assert!(rel.is_valid());
        let moved = transfer_relation(&rel, &Scalar::int(2)).unwrap();
        assert!(moved.is_valid());
        assert_eq!(moved.s, spec.s.scale(&Scalar::frac(-1, 2)));
        let back = transfer_relation(&moved, &minus_one()).unwrap();
        assert_eq!((back.r, back.s), (rel.r, rel.s));
    }

    #[test]
    fn degree3_flat_case() {
        let z = Scalar::zero();
        let d = degree3_analysis(&z, &z, &z, &z, &z);
        assert_eq!(
            d.matrix,
            [
                [Scalar::zero(), Scalar::int(3)],
                [Scalar::int(-7), Scalar::zero()]
            ]
        );
        assert_eq!(d.det, Scalar::int(21));
        assert!(d.generic);
    }

    #[test]
    fn degree3_degenerate_case() {
        let z = Scalar::zero();
        let d = degree3_analysis(&z, &z, &Scalar::frac(7, 12), &z, &Scalar::int(-1));
        // det = 36 u w + 21
        assert_eq!(d.det, Scalar::zero());
        assert!(!d.generic);
    }
}
