//! Certified minimization of a one-dimensional function on `(lo, hi]`.
//!
//! A grid scan of derivative signs brackets the minimizer and checks that
//! the sign pattern is unimodal (refining the grid when it is not), golden
//! section search locates the minimizer, and a best-first subdivision of
//! the domain with rigorous per-cell lower bounds certifies the enclosure.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const INITIAL_GRID: usize = 64;
const MAX_GRID: usize = 1 << 16;
const MAX_SPLITS: usize = 4_000_000;
const GOLDEN_ITERS: usize = 300;

pub(crate) trait Objective {
    /// Domain `(lo, hi]`; `lo` itself is excluded.
    fn domain(&self) -> (f64, f64);

    /// Floating-point estimate of the objective.
    fn value(&self, x: f64) -> f64;

    /// Upper bound on the exact objective at `x`.
    fn upper_at(&self, x: f64) -> f64;

    /// Lower bound on the exact objective over `[a, b]` (over `(a, b]` when
    /// `a` is the open end of the domain).
    fn lower_on(&self, a: f64, b: f64) -> f64;

    /// A quantity with the same sign as the derivative at `x`.
    fn slope(&self, x: f64) -> f64;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Minimum {
    pub lower: f64,
    pub upper: f64,
    pub argmin: f64,
    pub interior: bool,
}

#[derive(Clone, Copy)]
struct Cell {
    lower: f64,
    a: f64,
    b: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    // min-heap on the lower bound
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .lower
            .total_cmp(&self.lower)
            .then(other.a.total_cmp(&self.a))
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| if i == n { hi } else { lo + (hi - lo) * (i as f64 / n as f64) })
        .collect()
}

/// Index of the first grid point with positive slope, provided the signs go
/// non-positive then positive with no return.
fn unimodal_split(slopes: &[f64]) -> Option<Option<usize>> {
    let first_pos = slopes.iter().position(|&s| s > 0.0);
    match first_pos {
        Some(i) if slopes[i..].iter().any(|&s| s < 0.0) => None,
        other => Some(other),
    }
}

fn golden_section(obj: &impl Objective, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = obj.value(c);
    let mut fd = obj.value(d);
    for _ in 0..GOLDEN_ITERS {
        if b - a <= 1e-15 * b.abs().max(1.0) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = obj.value(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = obj.value(d);
        }
    }
    if fc < fd {
        c
    } else {
        d
    }
}

pub(crate) fn certified_minimum(obj: &impl Objective, tol: f64) -> Result<Minimum> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let (lo, hi) = obj.domain();

    let mut n = INITIAL_GRID;
    let (xs, split) = loop {
        let xs = grid(lo, hi, n);
        let slopes: Vec<f64> = xs.iter().map(|&x| obj.slope(x)).collect();
        if let Some(split) = unimodal_split(&slopes) {
            break (xs, split);
        }
        n *= 2;
        if n > MAX_GRID {
            return Err(Error::NotCertified(MAX_GRID));
        }
    };

    let (argmin, interior) = match split {
        None => (hi, false),
        Some(i) => {
            let left = if i == 0 { lo } else { xs[i - 1] };
            (golden_section(obj, left, xs[i]), true)
        }
    };
    let mut upper = obj.upper_at(argmin).min(obj.upper_at(hi));

    let mut heap = BinaryHeap::with_capacity(xs.len());
    let mut left = lo;
    for &right in &xs {
        heap.push(Cell { lower: obj.lower_on(left, right), a: left, b: right });
        left = right;
    }

    for _ in 0..MAX_SPLITS {
        let Some(&top) = heap.peek() else {
            return Ok(Minimum { lower: upper, upper, argmin, interior });
        };
        if upper - top.lower.min(upper) <= tol {
            return Ok(Minimum { lower: top.lower.min(upper), upper, argmin, interior });
        }
        heap.pop();
        let mid = 0.5 * (top.a + top.b);
        if !(top.a < mid && mid < top.b) {
            return Err(Error::NotCertified(MAX_SPLITS));
        }
        upper = upper.min(obj.upper_at(mid));
        for (a, b) in [(top.a, mid), (mid, top.b)] {
            let lower = obj.lower_on(a, b);
            if lower < upper {
                heap.push(Cell { lower, a, b });
            }
        }
    }
    Err(Error::NotCertified(MAX_SPLITS))
}
