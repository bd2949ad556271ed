//! Upper bounds for s-distance and s-scalar-product sets.
//!
//! Combinatorial bounds are exact big integers. Bounds that depend on
//! `J(t, d)` are certified intervals. Every bound is also exposed through
//! the [`Bound`] trait so tables can be assembled from a [`BoundRegistry`]
//! by name.

mod counting;
pub mod interval;
mod jconst;
mod minimize;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

pub use counting::{
    bbs_bound, binomial, clp_threshold, count_monomials, deza_frankl_bound, dfrank_box_bound,
    dgs_bound, main_theorem_bound,
};
pub use interval::Interval;
pub use jconst::{compute_j, corollary_bound, j_limit_d3, maincor2_bound, JParams, JValue};

use crate::error::Result;

/// Default enclosure width for J-based bounds in tables and reports.
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum BoundValue {
    Integer(BigUint),
    Interval(Interval),
}

impl BoundValue {
    /// Largest value the bound may take, as a float (for comparisons).
    pub fn upper_f64(&self) -> f64 {
        match self {
            BoundValue::Integer(v) => num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::INFINITY),
            BoundValue::Interval(iv) => iv.hi,
        }
    }

    /// Cell text for tables: the integer, or `lo..hi`.
    pub fn to_cell(&self) -> String {
        match self {
            BoundValue::Integer(v) => v.to_string(),
            BoundValue::Interval(iv) => format!("{:.9}..{:.9}", iv.lo, iv.hi),
        }
    }
}

/// Parameters a bound is evaluated at.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundParams {
    pub n: u64,
    pub q: u64,
    pub s: u64,
    #[serde(skip)]
    pub tol: f64,
}

impl BoundParams {
    pub fn new(n: u64, q: u64, s: u64) -> Self {
        BoundParams { n, q, s, tol: DEFAULT_TOL }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// A named bound evaluated at `(n, q, s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub params: BTreeMap<String, u64>,
    pub value: BoundValue,
}

impl Serialize for BoundReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        map.serialize_entry("name", &self.name)?;
        map.serialize_entry("params", &self.params)?;
        match &self.value {
            BoundValue::Integer(v) => map.serialize_entry("value", &v.to_string())?,
            BoundValue::Interval(iv) => {
                map.serialize_entry("value_lo", &iv.lo)?;
                map.serialize_entry("value_hi", &iv.hi)?;
            }
        }
        map.end()
    }
}

pub trait Bound: Send + Sync {
    fn name(&self) -> &'static str;

    /// Names of the parameters the bound reads, for reports.
    fn param_names(&self) -> &'static [&'static str];

    fn evaluate(&self, p: &BoundParams) -> Result<BoundValue>;

    fn report(&self, p: &BoundParams) -> Result<BoundReport> {
        let value = self.evaluate(p)?;
        let params = self
            .param_names()
            .iter()
            .map(|&k| {
                let v = match k {
                    "n" => p.n,
                    "q" => p.q,
                    "s" => p.s,
                    "d" => 2 * p.s,
                    _ => unreachable!("unknown parameter {k}"),
                };
                (k.to_string(), v)
            })
            .collect();
        Ok(BoundReport { name: self.name().to_string(), params, value })
    }
}

macro_rules! integer_bound {
    ($ty:ident, $name:literal, $params:expr, |$p:ident| $body:expr) => {
        struct $ty;
        impl Bound for $ty {
            fn name(&self) -> &'static str {
                $name
            }
            fn param_names(&self) -> &'static [&'static str] {
                $params
            }
            fn evaluate(&self, $p: &BoundParams) -> Result<BoundValue> {
                $body.map(BoundValue::Integer)
            }
        }
    };
}

integer_bound!(Bbs, "bbs", &["n", "s"], |p| bbs_bound(p.n, p.s));
integer_bound!(Dgs, "dgs", &["n", "s"], |p| dgs_bound(p.n, p.s));
integer_bound!(DezaFrankl, "deza_frankl", &["n", "s"], |p| deza_frankl_bound(p.n, p.s));
integer_bound!(MainTheorem, "main_theorem", &["n", "q", "s"], |p| main_theorem_bound(p.n, p.q, p.s));
integer_bound!(DfrankBox, "dfrank_box", &["n", "q", "s"], |p| dfrank_box_bound(p.n, p.q, p.s));
integer_bound!(ClpThreshold, "clp_threshold", &["n", "d"], |p| clp_threshold(p.n, 2 * p.s));

struct Corollary;

impl Bound for Corollary {
    fn name(&self) -> &'static str {
        "corollary"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["n", "q", "s"]
    }
    fn evaluate(&self, p: &BoundParams) -> Result<BoundValue> {
        corollary_bound(p.n, p.q, p.s, p.tol).map(BoundValue::Interval)
    }
}

/// Bounds registered by name, in table column order.
pub struct BoundRegistry {
    entries: Vec<Box<dyn Bound>>,
}

impl Default for BoundRegistry {
    fn default() -> Self {
        let mut reg = BoundRegistry::empty();
        reg.register(Box::new(Bbs));
        reg.register(Box::new(Dgs));
        reg.register(Box::new(DezaFrankl));
        reg.register(Box::new(MainTheorem));
        reg.register(Box::new(DfrankBox));
        reg.register(Box::new(Corollary));
        reg.register(Box::new(ClpThreshold));
        reg
    }
}

impl BoundRegistry {
    pub fn empty() -> Self {
        BoundRegistry { entries: Vec::new() }
    }

    /// Adds a bound, replacing any existing entry with the same name.
    pub fn register(&mut self, bound: Box<dyn Bound>) {
        match self.entries.iter().position(|b| b.name() == bound.name()) {
            Some(i) => self.entries[i] = bound,
            None => self.entries.push(bound),
        }
    }

    pub fn get(&self, name: &str) -> Option<&dyn Bound> {
        self.entries.iter().find(|b| b.name() == name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|b| b.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Bound> {
        self.entries.iter().map(|b| b.as_ref())
    }

    /// Evaluates every bound; failures stay per-entry.
    pub fn evaluate_all(&self, p: &BoundParams) -> Vec<(&'static str, Result<BoundValue>)> {
        self.iter().map(|b| (b.name(), b.evaluate(p))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_row() {
        let reg = BoundRegistry::default();
        assert_eq!(
            reg.names(),
            ["bbs", "dgs", "deza_frankl", "main_theorem", "dfrank_box", "corollary", "clp_threshold"]
        );
        let row = reg.evaluate_all(&BoundParams::new(2, 2, 1));
        let get = |name: &str| row.iter().find(|(n, _)| *n == name).unwrap().1.clone().unwrap();
        assert_eq!(get("main_theorem"), BoundValue::Integer(6u32.into()));
        assert_eq!(get("dfrank_box"), BoundValue::Integer(3u32.into()));
        assert_eq!(get("bbs"), BoundValue::Integer(3u32.into()));
        assert_eq!(get("clp_threshold"), BoundValue::Integer(6u32.into()));
        assert!(get("corollary").upper_f64() >= 8.0);
    }

    #[test]
    fn invalid_cells_do_not_poison_row() {
        let reg = BoundRegistry::default();
        let row = reg.evaluate_all(&BoundParams::new(1, 2, 0));
        assert!(row.iter().find(|(n, _)| *n == "dgs").unwrap().1.is_err());
        assert!(row.iter().find(|(n, _)| *n == "corollary").unwrap().1.is_err());
        assert!(row.iter().find(|(n, _)| *n == "bbs").unwrap().1.is_ok());
    }

    #[test]
    fn report_json() {
        let reg = BoundRegistry::default();
        let r = reg.get("main_theorem").unwrap().report(&BoundParams::new(3, 3, 2)).unwrap();
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"name":"main_theorem","params":{"n":3,"q":3,"s":2},"value":"20"}"#
        );
        let c = reg.get("corollary").unwrap().report(&BoundParams::new(2, 2, 1)).unwrap();
        let js = serde_json::to_value(&c).unwrap();
        assert!(js["value_lo"].as_f64().unwrap() <= 8.0);
        assert!(js["value_hi"].as_f64().unwrap() >= 8.0);
    }
}
