//! The constant `J(t, d)` and the bounds built from it.
//!
//! `J(t, d)` is the infimum over `x ∈ (0, 1)` of
//!
//! ```text
//! f(x) = (1/t) · (1 + x + … + x^(t−1)) · x^(−(t−1)/d)
//! ```
//!
//! The polynomial form removes the singularity of `(1 − x^t)/(1 − x)` at
//! `x = 1`, where `f = 1`. Non-integer `d > 0` is accepted.

use serde::{Deserialize, Serialize};

use super::interval::{round_down, round_up, Interval};
use super::minimize::{certified_minimum, Objective};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JParams {
    pub t: u32,
    pub d: f64,
}

impl JParams {
    pub fn new(t: u32, d: f64) -> Result<Self> {
        if t < 2 {
            return Err(Error::InvalidParameter(format!("t = {t} must be at least 2")));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidParameter(format!("d = {d} must be positive and finite")));
        }
        Ok(JParams { t, d })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JValue {
    pub lower: f64,
    pub upper: f64,
    pub argmin_estimate: f64,
    pub attained_interior: bool,
}

impl JValue {
    pub fn interval(&self) -> Interval {
        Interval::new(self.lower, self.upper)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

struct JObjective {
    t: u32,
    exponent: f64,
    slack: u32,
}

impl JObjective {
    fn new(p: JParams) -> Self {
        JObjective {
            t: p.t,
            exponent: (p.t - 1) as f64 / p.d,
            // Horner over t positive terms, one powf, one product, one quotient
            slack: 4 + 2 * p.t,
        }
    }

    fn series(&self, x: f64) -> f64 {
        (0..self.t).fold(0.0, |acc, _| acc * x + 1.0)
    }
}

impl Objective for JObjective {
    fn domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn value(&self, x: f64) -> f64 {
        self.series(x) * x.powf(-self.exponent) / self.t as f64
    }

    fn upper_at(&self, x: f64) -> f64 {
        if x == 1.0 {
            return 1.0;
        }
        round_up(self.value(x), self.slack)
    }

    // the series increases and x^(−c) decreases on [a, b]
    fn lower_on(&self, a: f64, b: f64) -> f64 {
        round_down(self.series(a) * b.powf(-self.exponent) / self.t as f64, self.slack)
    }

    // sign of f' is the sign of Σ (k − c) x^k
    fn slope(&self, x: f64) -> f64 {
        (0..self.t)
            .rev()
            .fold(0.0, |acc, k| acc * x + (k as f64 - self.exponent))
    }
}

/// Certified enclosure of `J(t, d)` of width at most `tol`.
///
/// When `d ≤ 2` the infimum is approached only as `x → 1`; the result is then
/// an enclosure of 1 with `attained_interior = false`.
pub fn compute_j(params: JParams, tol: f64) -> Result<JValue> {
    let params = JParams::new(params.t, params.d)?;
    let m = certified_minimum(&JObjective::new(params), tol)?;
    Ok(JValue {
        lower: m.lower,
        upper: m.upper,
        argmin_estimate: m.argmin,
        attained_interior: m.interior,
    })
}

/// `(z − z⁻²) / (3 ln z)` on `(1, z_max]`.
struct LimitObjective {
    z_max: f64,
}

const LIMIT_SLACK: u32 = 8;

impl LimitObjective {
    fn eval(z: f64) -> f64 {
        (z - z.powi(-2)) / (3.0 * z.ln())
    }
}

impl Objective for LimitObjective {
    fn domain(&self) -> (f64, f64) {
        (1.0, self.z_max)
    }

    fn value(&self, z: f64) -> f64 {
        Self::eval(z)
    }

    fn upper_at(&self, z: f64) -> f64 {
        round_up(Self::eval(z), LIMIT_SLACK)
    }

    fn lower_on(&self, a: f64, b: f64) -> f64 {
        // numerator and denominator both increase on [a, b]
        let mut lower = if a > 1.0 { (a - a.powi(-2)) / (3.0 * b.ln()) } else { 0.0 };
        // Writing z = e^u, the objective is the mean of (e^v + 2e^(−2v))/3 over
        // v ∈ [0, u]; that integrand decreases up to u = ln(4)/3.
        if b <= 4f64.cbrt() {
            lower = lower.max((b + 2.0 * b.powi(-2)) / 3.0);
        }
        round_down(lower, LIMIT_SLACK)
    }

    fn slope(&self, z: f64) -> f64 {
        let inv3 = z.powi(-3);
        (1.0 + 2.0 * inv3) * z.ln() - (1.0 - inv3)
    }
}

/// Enclosure of `inf_{z>1} (z − z⁻²)/(3 ln z)`, the limit of `J(t, 3)` as
/// `t → ∞`, to width at most `1e-6`.
pub fn j_limit_d3() -> Result<Interval> {
    // Beyond z = e the derivative is positive, so once z_max ≥ e and the
    // slope there is positive, (1, z_max] contains the infimum.
    let mut obj = LimitObjective { z_max: 2.0 };
    while !(obj.z_max >= std::f64::consts::E && obj.slope(obj.z_max) > 0.0) {
        obj.z_max *= 2.0;
    }
    let m = certified_minimum(&obj, 5e-7)?;
    Ok(Interval::new(m.lower, m.upper))
}

fn exponential_bound(n: u64, t: u64, d: f64, tol: f64) -> Result<Interval> {
    let t32 = u32::try_from(t).map_err(|_| Error::InvalidParameter(format!("t = {t} too large")))?;
    let j = compute_j(JParams::new(t32, d)?, tol)?;
    let n32 = i32::try_from(n).map_err(|_| Error::Overflow)?;
    let slack = 4 + n32.unsigned_abs().min(1 << 20);
    let lo = round_down(2.0 * (t as f64 * j.lower).powi(n32), slack);
    let hi = round_up(2.0 * (t as f64 * j.upper).powi(n32), slack);
    let iv = Interval::new(lo.max(0.0), hi);
    if !iv.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(iv)
}

/// Enclosure of `2 (q J(q, n(q−1)/s))ⁿ`.
pub fn corollary_bound(n: u64, q: u64, s: u64, tol: f64) -> Result<Interval> {
    if n < 1 || q < 2 || s < 1 {
        return Err(Error::InvalidParameter(format!(
            "need n ≥ 1, q ≥ 2, s ≥ 1 (got n={n}, q={q}, s={s})"
        )));
    }
    exponential_bound(n, q, (n * (q - 1)) as f64 / s as f64, tol)
}

/// Enclosure of `2 (t J(t, 2n(t−1)/deg P))ⁿ`.
pub fn maincor2_bound(n: u64, t: u64, deg_p: u64, tol: f64) -> Result<Interval> {
    if deg_p == 0 {
        return Err(Error::InvalidParameter("polynomial degree must be positive".into()));
    }
    if n < 1 || t < 2 {
        return Err(Error::InvalidParameter(format!("need n ≥ 1 and t ≥ 2 (got n={n}, t={t})")));
    }
    exponential_bound(n, t, (2 * n * (t - 1)) as f64 / deg_p as f64, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(t: u32, d: f64, tol: f64) -> JValue {
        compute_j(JParams::new(t, d).unwrap(), tol).unwrap()
    }

    /// Independent dense-grid minimization of f, for cross-checking.
    fn grid_min(t: u32, d: f64, samples: usize) -> f64 {
        let c = (t - 1) as f64 / d;
        (1..=samples)
            .map(|i| {
                let x = i as f64 / samples as f64;
                let s: f64 = (0..t as i32).map(|k| x.powi(k)).sum();
                s * x.powf(-c) / t as f64
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn j33_matches_reported_constant() {
        let v = j(3, 3.0, 5e-5);
        assert!(v.upper - v.lower <= 5e-5);
        // the upper end is the value at the located minimizer
        assert!((v.upper - 0.9184).abs() <= 5e-5, "{v:?}");
        let tight = j(3, 3.0, 1e-7);
        assert!(tight.lower >= 0.9184 - 5e-5 && tight.upper <= 0.9184 + 5e-5);
        assert!(v.attained_interior);
    }

    #[test]
    fn closed_form_for_t2() {
        let v = j(2, 3.0, 1e-6);
        let exact = 0.75 * 2f64.cbrt();
        assert!(v.lower <= exact && exact <= v.upper);
        assert!((v.argmin_estimate - 0.5).abs() < 1e-5);
        let b = j(2, 2.0, 1e-6);
        assert!(!b.attained_interior);
        assert!(b.lower <= 1.0 && b.upper == 1.0);
    }

    #[test]
    fn agrees_with_dense_grid() {
        for (t, d) in [(3, 2.5), (5, 3.0), (4, 7.0), (7, 1.5)] {
            let v = j(t, d, 1e-7);
            let g = grid_min(t, d, 200_000);
            assert!(v.lower <= g + 1e-12, "t={t} d={d}");
            assert!(g - v.upper < 1e-6, "t={t} d={d}: grid {g}, {v:?}");
        }
    }

    #[test]
    fn limit_constant() {
        let iv = j_limit_d3().unwrap();
        assert!(iv.width() <= 1e-6);
        assert!(iv.lo >= 0.8414 && iv.hi <= 0.8415, "{iv}");
    }

    #[test]
    fn parameter_validation() {
        assert!(JParams::new(1, 3.0).is_err());
        assert!(JParams::new(3, 0.0).is_err());
        assert!(JParams::new(3, f64::INFINITY).is_err());
        assert!(compute_j(JParams { t: 3, d: 3.0 }, -1.0).is_err());
        assert!(maincor2_bound(2, 2, 0, 1e-6).is_err());
        assert!(corollary_bound(2, 2, 0, 1e-6).is_err());
    }

    #[test]
    fn exponential_bounds() {
        let c = corollary_bound(2, 2, 1, 1e-8).unwrap();
        assert!(c.contains(8.0) && c.width() < 1e-6, "{c}");
        let m = maincor2_bound(2, 2, 2, 1e-8).unwrap();
        assert!(m.contains(8.0));
        let a = corollary_bound(3, 3, 3, 1e-4).unwrap();
        let b = maincor2_bound(3, 3, 6, 1e-4).unwrap();
        assert_eq!(a, b);
        // d = 2 here: boundary case, J(3, 2) = 1 and the bound is 2·3³
        assert!(a.contains(54.0), "{a}");
    }
}
