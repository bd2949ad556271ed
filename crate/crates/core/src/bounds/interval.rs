use serde::{Deserialize, Serialize};

/// Closed interval of reals with `f64` endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Step `x` down by (at least) `ulps` units in the last place.
pub fn round_down(x: f64, ulps: u32) -> f64 {
    if ulps <= 16 || !x.is_finite() {
        let mut x = x;
        for _ in 0..ulps {
            x = x.next_down();
        }
        return x;
    }
    let rel = ulps as f64 * f64::EPSILON;
    let scaled = if x >= 0.0 { x * (1.0 - rel) } else { x * (1.0 + rel) };
    scaled.next_down()
}

/// Step `x` up by (at least) `ulps` units in the last place.
pub fn round_up(x: f64, ulps: u32) -> f64 {
    -round_down(-x, ulps)
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Image under a monotone non-decreasing map evaluated in floating point
    /// with at most `ulps` of rounding error per endpoint.
    pub fn map_monotone(&self, f: impl Fn(f64) -> f64, ulps: u32) -> Interval {
        Interval::new(round_down(f(self.lo), ulps), round_up(f(self.hi), ulps))
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_brackets() {
        let x = 0.1f64;
        assert!(round_down(x, 4) < x && x < round_up(x, 4));
        assert_eq!(round_up(round_down(x, 4), 4), x);
        let iv = Interval::new(2.0, 3.0).map_monotone(|v| v * v, 2);
        assert!(iv.contains(4.0) && iv.contains(9.0));
        assert!(iv.width() < 5.0 + 1e-12);
    }
}
