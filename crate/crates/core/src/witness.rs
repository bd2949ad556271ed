//! Witness polynomials for the slice-rank bounds.
//!
//! A witness for a point set `F` is a polynomial `P(x; y)` in `2n`
//! variables with `P(a, a) ≠ 0` for every `a ∈ F` and `P(a, b) = 0` for
//! distinct `a, b ∈ F`. Given one, `|F|` is at most twice the number of
//! box monomials of total degree `≤ deg(P)/2`, and at most
//! `2 (t J(t, 2n(t−1)/deg P))ⁿ`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bounds::{count_monomials, maincor2_bound, Interval, DEFAULT_TOL};
use crate::bounds::clp_threshold;
use crate::error::{Error, Result};
use crate::geometry::{Point, PointSet, Scalar, SquaredDistancePalette};
use crate::poly::{Evaluator, MultiPoly};

/// `∏ᵢ (Σⱼ (xⱼ − yⱼ)² − dᵢ)` over the palette's squared distances `dᵢ`.
///
/// Variables `0..n` are the `x`s and `n..2n` the `y`s.
pub fn build_distance_polynomial(n: usize, palette: &SquaredDistancePalette) -> Result<MultiPoly> {
    if palette.is_empty() {
        return Err(Error::EmptyPalette);
    }
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let nvars = 2 * n;

    // coefficients of ∏ (u − dᵢ) as a polynomial in u, lowest degree first
    let mut univariate = vec![Scalar::one()];
    for d in palette.values() {
        let mut next = vec![Scalar::zero(); univariate.len() + 1];
        for (k, c) in univariate.iter().enumerate() {
            next[k + 1] = &next[k + 1] + c;
            next[k] = &next[k] - &(c * d);
        }
        univariate = next;
    }

    // Σ_K c_K u^K with u = Σ_j (x_j − y_j)², expanded over compositions
    // K = k_1 + … + k_n; distinct compositions give disjoint monomials.
    let mut terms = Vec::new();
    compositions(n, univariate.len() - 1, &mut Vec::with_capacity(n), &mut |ks| {
        let total: usize = ks.iter().sum();
        if univariate[total].is_zero() {
            return;
        }
        let denom = ks.iter().fold(BigInt::one(), |d, &k| d * factorial(k));
        let multinomial = Scalar::new(BigRational::from_integer(factorial(total) / denom));
        let base = &univariate[total] * &multinomial;
        expand_squares(n, ks, 0, &mut vec![0; nvars], BigInt::one(), &base, &mut terms);
    });
    MultiPoly::from_terms(nvars, terms)
}

/// Calls `f` on every `(k_1, …, k_n)` with `Σ k_j ≤ budget`.
fn compositions(n: usize, budget: usize, ks: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if ks.len() == n {
        f(ks);
        return;
    }
    for k in 0..=budget {
        ks.push(k);
        compositions(n, budget - k, ks, f);
        ks.pop();
    }
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |a, i| a * BigInt::from(i))
}

/// Multiplies out `∏_j (x_j − y_j)^{2 k_j}` from coordinate `j` on.
fn expand_squares(
    n: usize,
    ks: &[usize],
    j: usize,
    exps: &mut Vec<u32>,
    coef: BigInt,
    base: &Scalar,
    out: &mut Vec<(Vec<u32>, Scalar)>,
) {
    if j == n {
        out.push((exps.clone(), base * &Scalar::new(BigRational::from_integer(coef))));
        return;
    }
    let m = 2 * ks[j];
    let mut binom = BigInt::one();
    for a in 0..=m {
        // x_j^a (−y_j)^{m−a}
        exps[j] = a as u32;
        exps[n + j] = (m - a) as u32;
        let signed = if (m - a) % 2 == 1 { -&binom } else { binom.clone() };
        expand_squares(n, ks, j + 1, exps, &coef * signed, base, out);
        binom = binom * BigInt::from(m - a) / BigInt::from(a + 1);
    }
    exps[j] = 0;
    exps[n + j] = 0;
}

fn concat(a: &Point, b: &Point) -> Vec<Scalar> {
    a.coords().iter().chain(b.coords()).cloned().collect()
}

/// `P(a; b)`.
pub fn evaluate(p: &MultiPoly, a: &Point, b: &Point) -> Result<Scalar> {
    if a.dim() != b.dim() || 2 * a.dim() != p.nvars() {
        return Err(Error::DimensionMismatch { expected: p.nvars(), got: a.dim() + b.dim() });
    }
    p.evaluate(&concat(a, b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WitnessCondition {
    /// `P(a, a) = 0` for some `a`.
    #[serde(rename = "i")]
    Diagonal,
    /// `P(a, b) ≠ 0` for some distinct `a, b`.
    #[serde(rename = "ii")]
    OffDiagonal,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub condition: WitnessCondition,
    pub a: Point,
    pub b: Point,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessCheckResult {
    pub condition_i_ok: bool,
    pub condition_ii_ok: bool,
    /// First failing diagonal point if (i) fails, otherwise the first
    /// failing ordered pair in point-set order.
    pub first_violation: Option<Violation>,
    pub degree: u32,
    #[serde(serialize_with = "biguint_string")]
    pub bound_maincor: BigUint,
    pub bound_maincor2: Option<Interval>,
}

impl WitnessCheckResult {
    pub fn is_witness(&self) -> bool {
        self.condition_i_ok && self.condition_ii_ok
    }
}

pub(crate) fn biguint_string<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Checks both witness conditions of `p` on `set` and reports the two
/// bounds they would imply. Bounds are reported even when a condition
/// fails.
pub fn verify_witness(p: &MultiPoly, set: &PointSet, t: usize) -> Result<WitnessCheckResult> {
    let n = set.dim();
    let q = set.bounding_box().q();
    if q != t {
        return Err(Error::BoxSizeMismatch { box_q: q, t });
    }
    if p.nvars() != 2 * n {
        return Err(Error::DimensionMismatch { expected: 2 * n, got: p.nvars() });
    }
    let pts = set.points();
    // fix x = a once per point, then evaluate the smaller polynomial in y
    let rows: Vec<(bool, Option<usize>)> = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let reduced = p.substitute_prefix(pts[i].coords()).expect("dimensions checked");
            let eval = Evaluator::new(&reduced);
            let at = |j: usize| eval.evaluate(pts[j].coords()).expect("dimensions checked");
            let diagonal_zero = at(i).is_zero();
            let off = (0..pts.len()).find(|&j| j != i && !at(j).is_zero());
            (diagonal_zero, off)
        })
        .collect();
    let diagonal_fail = rows.iter().position(|r| r.0);
    let off_fail = rows.iter().enumerate().find_map(|(i, r)| r.1.map(|j| (i, j)));
    let first_violation = match (diagonal_fail, off_fail) {
        (Some(i), _) => Some(Violation {
            condition: WitnessCondition::Diagonal,
            a: pts[i].clone(),
            b: pts[i].clone(),
        }),
        (None, Some((i, j))) => Some(Violation {
            condition: WitnessCondition::OffDiagonal,
            a: pts[i].clone(),
            b: pts[j].clone(),
        }),
        (None, None) => None,
    };

    let degree = p.total_degree();
    let bound_maincor = count_monomials(n as u64, t as u64, (degree / 2) as u64)? * 2u32;
    let bound_maincor2 = if degree == 0 {
        None
    } else {
        Some(maincor2_bound(n as u64, t as u64, degree as u64, DEFAULT_TOL)?)
    };
    Ok(WitnessCheckResult {
        condition_i_ok: diagonal_fail.is_none(),
        condition_ii_ok: off_fail.is_none(),
        first_violation,
        degree,
        bound_maincor,
        bound_maincor2,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClpOutcome {
    /// `P(0) = 0`: the conclusion holds whatever the hypotheses.
    ConclusionHolds,
    /// `|F|` does not exceed the threshold.
    CardinalityUnmet,
    /// Some difference `a − b` of distinct points has `P(a − b) ≠ 0`.
    VanishingUnmet,
    /// Hypotheses hold but `P(0) ≠ 0`; impossible for a correct lemma.
    Counterexample,
}

impl ClpOutcome {
    /// False only for a counterexample to the lemma.
    pub fn holds(&self) -> bool {
        *self != ClpOutcome::Counterexample
    }
}

/// Tests one instance of the Croot–Lev–Pach lemma for a multilinear
/// polynomial in `n` variables: if `|F| > 2 Σ_{i≤deg/2} C(n,i)` and `P`
/// vanishes on all differences of distinct points, then `P(0) = 0`.
pub fn clp_check(p: &MultiPoly, set: &PointSet) -> Result<ClpOutcome> {
    let n = set.dim();
    if p.nvars() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.nvars() });
    }
    if !p.is_multilinear() {
        return Err(Error::NotMultilinear);
    }
    let eval = Evaluator::new(p);
    if eval.evaluate(&vec![Scalar::zero(); n])?.is_zero() {
        return Ok(ClpOutcome::ConclusionHolds);
    }
    let threshold = clp_threshold(n as u64, p.total_degree() as u64)?;
    if BigUint::from(set.len()) <= threshold {
        return Ok(ClpOutcome::CardinalityUnmet);
    }
    let pts = set.points();
    let all_vanish = (0..pts.len()).into_par_iter().all(|i| {
        (0..pts.len()).filter(|&j| j != i).all(|j| {
            let diff: Vec<Scalar> =
                pts[i].coords().iter().zip(pts[j].coords()).map(|(x, y)| x - y).collect();
            eval.evaluate(&diff).expect("dimensions checked").is_zero()
        })
    });
    Ok(if all_vanish { ClpOutcome::Counterexample } else { ClpOutcome::VanishingUnmet })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{distance_palette, squared_distance, CoordBox};

    fn sc(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    /// `∏ (u − d)` by repeated polynomial multiplication.
    fn naive(n: usize, palette: &SquaredDistancePalette) -> MultiPoly {
        let nvars = 2 * n;
        let mut u = MultiPoly::zero(nvars);
        for j in 0..n {
            let diff = MultiPoly::variable(nvars, j).add(&MultiPoly::variable(nvars, n + j).scale(&sc("-1"))).unwrap();
            u = u.add(&diff.mul(&diff).unwrap()).unwrap();
        }
        palette.values().iter().fold(MultiPoly::constant(nvars, Scalar::one()), |acc, d| {
            acc.mul(&u.add(&MultiPoly::constant(nvars, -d.clone())).unwrap()).unwrap()
        })
    }

    #[test]
    fn expansion_matches_repeated_multiplication() {
        for (n, values) in [(1, vec!["1"]), (2, vec!["1", "2"]), (3, vec!["1", "2", "3"]), (2, vec!["1/2", "5", "7/3"])] {
            let pal = SquaredDistancePalette::from_values(values.iter().map(|v| sc(v))).unwrap();
            assert_eq!(build_distance_polynomial(n, &pal).unwrap(), naive(n, &pal), "n={n} {values:?}");
        }
    }

    fn palette(vals: &[i64]) -> SquaredDistancePalette {
        SquaredDistancePalette::from_values(vals.iter().map(|&v| Scalar::from_integer(v))).unwrap()
    }

    fn set(n: usize, q: usize, raw: &[&[i64]]) -> PointSet {
        PointSet::new(
            CoordBox::grid(n, q).unwrap(),
            raw.iter().map(|p| Point::from_integers(p)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_factor_expansion() {
        let p = build_distance_polynomial(1, &palette(&[1])).unwrap();
        let expected = MultiPoly::from_terms(
            2,
            vec![
                (vec![2, 0], sc("1")),
                (vec![1, 1], sc("-2")),
                (vec![0, 2], sc("1")),
                (vec![0, 0], sc("-1")),
            ],
        )
        .unwrap();
        assert_eq!(p, expected);
        assert_eq!(p.total_degree(), 2);
        let o = Point::from_integers(&[0]);
        assert_eq!(evaluate(&p, &o, &o).unwrap(), sc("-1"));
        assert_eq!(evaluate(&p, &Point::from_integers(&[1]), &o).unwrap(), sc("0"));
    }

    #[test]
    fn two_factor_example() {
        let p = build_distance_polynomial(2, &palette(&[1, 2])).unwrap();
        assert_eq!(p.total_degree(), 4);
        let v = evaluate(&p, &Point::from_integers(&[0, 0]), &Point::from_integers(&[0, 1])).unwrap();
        assert!(v.is_zero());
        assert!(build_distance_polynomial(2, &SquaredDistancePalette::default()).is_err());
    }

    #[test]
    fn expansion_matches_product_formula() {
        let pal = palette(&[1, 3, 4]);
        let p = build_distance_polynomial(3, &pal).unwrap();
        assert_eq!(p.total_degree(), 6);
        let vals = ["0", "1/2", "-2", "3", "5/3"];
        for (k, a0) in vals.iter().enumerate() {
            let a = Point::new(vec![sc(a0), sc(vals[(k + 1) % 5]), sc(vals[(k + 2) % 5])]);
            let b = Point::new(vec![sc(vals[(k + 3) % 5]), sc(a0), sc("7/5")]);
            let d2 = squared_distance(&a, &b).unwrap();
            let direct = pal.values().iter().fold(Scalar::one(), |acc, d| &acc * &(&d2 - d));
            assert_eq!(evaluate(&p, &a, &b).unwrap(), direct);
        }
    }

    #[test]
    fn witness_from_own_palette_passes() {
        let f = set(2, 2, &[&[0, 0], &[1, 1]]);
        let p = build_distance_polynomial(2, &distance_palette(&f).unwrap()).unwrap();
        let r = verify_witness(&p, &f, 2).unwrap();
        assert!(r.is_witness());
        assert_eq!(r.first_violation, None);
        assert_eq!(r.bound_maincor, BigUint::from(6u32));
        assert!(r.bound_maincor2.unwrap().contains(8.0));
        assert!(matches!(verify_witness(&p, &f, 3), Err(Error::BoxSizeMismatch { .. })));
    }

    #[test]
    fn enlarged_set_reports_offending_pair() {
        let f = set(2, 2, &[&[0, 0], &[1, 1]]);
        let p = build_distance_polynomial(2, &distance_palette(&f).unwrap()).unwrap();
        let bigger = set(2, 2, &[&[0, 0], &[1, 1], &[0, 1]]);
        let r = verify_witness(&p, &bigger, 2).unwrap();
        assert!(r.condition_i_ok);
        assert!(!r.condition_ii_ok);
        let v = r.first_violation.unwrap();
        assert_eq!(v.condition, WitnessCondition::OffDiagonal);
        assert_eq!((v.a, v.b), (Point::from_integers(&[0, 0]), Point::from_integers(&[0, 1])));
    }

    #[test]
    fn diagonal_violation() {
        // P = x1 vanishes at a = (0; 0)
        let p = MultiPoly::variable(2, 0);
        let f = set(1, 2, &[&[0], &[1]]);
        let r = verify_witness(&p, &f, 2).unwrap();
        assert!(!r.condition_i_ok);
        assert_eq!(r.first_violation.unwrap().condition, WitnessCondition::Diagonal);
    }

    #[test]
    fn clp_outcomes() {
        let f = set(2, 3, &[&[0, 0], &[0, 1], &[1, 2], &[2, 2], &[2, 0], &[1, 1], &[0, 2]]);
        assert_eq!(clp_check(&MultiPoly::zero(2), &f).unwrap(), ClpOutcome::ConclusionHolds);
        let one = MultiPoly::constant(2, Scalar::one());
        assert_eq!(clp_check(&one, &f).unwrap(), ClpOutcome::VanishingUnmet);
        let small = set(2, 3, &[&[0, 0]]);
        assert_eq!(clp_check(&one, &small).unwrap(), ClpOutcome::CardinalityUnmet);
        let sq = MultiPoly::from_terms(2, vec![(vec![2, 0], sc("1"))]).unwrap();
        assert_eq!(clp_check(&sq, &f), Err(Error::NotMultilinear));
        assert!(clp_check(&MultiPoly::zero(3), &f).is_err());
    }
}
