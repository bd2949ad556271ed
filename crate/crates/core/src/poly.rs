//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Scalar;

pub type Exponents = Vec<u32>;

/// Polynomial stored as a map from exponent vectors to nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPoly", into = "RawPoly")]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, Scalar>,
    total_degree: u32,
}

#[derive(Serialize, Deserialize)]
struct RawTerm {
    exps: Exponents,
    coef: Scalar,
}

#[derive(Serialize, Deserialize)]
struct RawPoly {
    nvars: usize,
    terms: Vec<RawTerm>,
}

impl TryFrom<RawPoly> for MultiPoly {
    type Error = Error;
    fn try_from(raw: RawPoly) -> Result<Self> {
        MultiPoly::from_terms(raw.nvars, raw.terms.into_iter().map(|t| (t.exps, t.coef)))
    }
}

impl From<MultiPoly> for RawPoly {
    fn from(p: MultiPoly) -> Self {
        RawPoly {
            nvars: p.nvars,
            terms: p.terms.into_iter().map(|(exps, coef)| RawTerm { exps, coef }).collect(),
        }
    }
}

fn degree_of(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new(), total_degree: 0 }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut p = MultiPoly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The polynomial `x_i`.
    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = MultiPoly::zero(nvars);
        p.add_term(e, Scalar::one());
        p
    }

    /// Sums like terms and drops zero coefficients.
    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Exponents, Scalar)>,
    ) -> Result<Self> {
        let mut p = MultiPoly::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, got: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exponents, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let deg = degree_of(&e);
        let mut dropped = false;
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = &*o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                    dropped = true;
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
        if dropped {
            self.total_degree = self.terms.keys().map(|e| degree_of(e)).max().unwrap_or(0);
        } else {
            self.total_degree = self.total_degree.max(deg);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Maximum total degree of a term; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.total_degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &[u32]) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x <= 1))
    }

    fn check_same_vars(&self, other: &MultiPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: other.nvars });
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_same_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a * c);
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_same_vars(other)?;
        let mut acc: BTreeMap<Exponents, Scalar> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let prod = c1 * c2;
                acc.entry(e)
                    .and_modify(|v| *v = &*v + &prod)
                    .or_insert(prod);
            }
        }
        MultiPoly::from_terms(self.nvars, acc)
    }

    pub fn evaluate(&self, values: &[Scalar]) -> Result<Scalar> {
        Evaluator::new(self).evaluate(values)
    }

    /// The polynomial in the remaining variables obtained by fixing the
    /// first `values.len()` variables.
    pub fn substitute_prefix(&self, values: &[Scalar]) -> Result<MultiPoly> {
        let k = values.len();
        if k > self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: k });
        }
        let max: Vec<u32> = (0..k)
            .map(|i| self.terms.keys().map(|e| e[i]).max().unwrap_or(0))
            .collect();
        if let Some(p) = self.substitute_integer(values, &max) {
            return Ok(p);
        }
        let powers: Vec<Vec<Scalar>> = values
            .iter()
            .zip(&max)
            .map(|(x, &m)| (0..=m).map(|e| x.pow(e)).collect())
            .collect();
        let mut acc: BTreeMap<Exponents, Scalar> = BTreeMap::new();
        for (e, c) in &self.terms {
            let v = (0..k).filter(|&i| e[i] > 0).fold(c.clone(), |a, i| &a * &powers[i][e[i] as usize]);
            let slot = acc.entry(e[k..].to_vec()).or_insert_with(Scalar::zero);
            *slot = &*slot + &v;
        }
        MultiPoly::from_terms(self.nvars - k, acc)
    }

    fn substitute_integer(&self, values: &[Scalar], max: &[u32]) -> Option<MultiPoly> {
        let k = values.len();
        let mut powers = Vec::with_capacity(k);
        for (x, &m) in values.iter().zip(max) {
            if !x.is_integer() {
                return None;
            }
            let x = x.numer().to_i128()?;
            let mut row = vec![1i128];
            for e in 1..=m as usize {
                row.push(row[e - 1].checked_mul(x)?);
            }
            powers.push(row);
        }
        let mut acc: BTreeMap<Exponents, i128> = BTreeMap::new();
        for (e, c) in &self.terms {
            if !c.is_integer() {
                return None;
            }
            let mut v = c.numer().to_i128()?;
            for i in 0..k {
                if e[i] > 0 {
                    v = v.checked_mul(powers[i][e[i] as usize])?;
                }
            }
            let slot = acc.entry(e[k..].to_vec()).or_insert(0);
            *slot = slot.checked_add(v)?;
        }
        let terms = acc.into_iter().map(|(e, v)| (e, Scalar::new(num_rational::BigRational::from_integer(v.into()))));
        MultiPoly::from_terms(self.nvars - k, terms).ok()
    }
}

/// Repeated evaluation of one polynomial, with an `i128` fast path used
/// when coefficients and inputs are integers and nothing overflows.
pub struct Evaluator<'a> {
    poly: &'a MultiPoly,
    integer_terms: Option<Vec<(&'a [u32], i128)>>,
    max_exp: Vec<u32>,
}

impl<'a> Evaluator<'a> {
    pub fn new(poly: &'a MultiPoly) -> Self {
        let integer_terms = poly
            .terms
            .iter()
            .map(|(e, c)| {
                if c.is_integer() {
                    c.numer().to_i128().map(|v| (e.as_slice(), v))
                } else {
                    None
                }
            })
            .collect();
        let mut max_exp = vec![0; poly.nvars];
        for e in poly.terms.keys() {
            for (m, &x) in max_exp.iter_mut().zip(e) {
                *m = (*m).max(x);
            }
        }
        Evaluator { poly, integer_terms, max_exp }
    }

    pub fn evaluate(&self, values: &[Scalar]) -> Result<Scalar> {
        if values.len() != self.poly.nvars {
            return Err(Error::DimensionMismatch { expected: self.poly.nvars, got: values.len() });
        }
        if let Some(v) = self.evaluate_integer(values) {
            return Ok(Scalar::new(num_rational::BigRational::from_integer(v.into())));
        }
        let powers: Vec<Vec<Scalar>> = values
            .iter()
            .zip(&self.max_exp)
            .map(|(x, &m)| {
                let mut row = Vec::with_capacity(m as usize + 1);
                row.push(Scalar::one());
                for k in 1..=m as usize {
                    let next = &row[k - 1] * x;
                    row.push(next);
                }
                row
            })
            .collect();
        Ok(self
            .poly
            .terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .fold(c.clone(), |acc, (i, &k)| &acc * &powers[i][k as usize])
            })
            .sum())
    }

    fn evaluate_integer(&self, values: &[Scalar]) -> Option<i128> {
        let terms = self.integer_terms.as_ref()?;
        let mut powers = Vec::with_capacity(values.len());
        for (x, &m) in values.iter().zip(&self.max_exp) {
            if !x.is_integer() {
                return None;
            }
            let x = x.numer().to_i128()?;
            let mut row = Vec::with_capacity(m as usize + 1);
            row.push(1i128);
            for k in 1..=m as usize {
                row.push(row[k - 1].checked_mul(x)?);
            }
            powers.push(row);
        }
        let mut total: i128 = 0;
        for (e, c) in terms {
            let mut term = *c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.checked_mul(powers[i][k as usize])?;
                }
            }
            total = total.checked_add(term)?;
        }
        Some(total)
    }
}
