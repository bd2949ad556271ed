//! Exact combinatorial bounds.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

/// Number of exponent vectors `α ∈ {0,…,q−1}ⁿ` with `Σαᵢ ≤ s`.
///
/// Runs a length-`(s+1)` truncated convolution with the all-ones sequence of
/// length `q`, once per coordinate.
pub fn count_monomials(n: u64, q: u64, s: u64) -> Result<BigUint> {
    require(n >= 1, || format!("n = {n} must be at least 1"))?;
    require(q >= 2, || format!("q = {q} must be at least 2"))?;
    let full = n.saturating_mul(q - 1);
    if s >= full {
        return Ok(BigUint::from(q).pow(n as u32));
    }
    let cap = s as usize;
    let q = q as usize;
    // ways[k] = number of exponent prefixes summing to exactly k
    let mut ways = vec![BigUint::zero(); cap + 1];
    ways[0] = BigUint::one();
    let mut prefix = vec![BigUint::zero(); cap + 2];
    for _ in 0..n {
        for k in 0..=cap {
            prefix[k + 1] = &prefix[k] + &ways[k];
        }
        for k in 0..=cap {
            let lo = (k + 1).saturating_sub(q);
            ways[k] = &prefix[k + 1] - &prefix[lo];
        }
    }
    Ok(ways.into_iter().sum())
}

/// `C(n+s, s)`: bound for s-distance sets in ℝⁿ.
pub fn bbs_bound(n: u64, s: u64) -> Result<BigUint> {
    require(n >= 1, || format!("n = {n} must be at least 1"))?;
    Ok(binomial(n + s, s))
}

/// `C(n+s−1, s) + C(n+s−2, s−1)`: bound for spherical s-distance sets on
/// the sphere in ℝⁿ.
pub fn dgs_bound(n: u64, s: u64) -> Result<BigUint> {
    require(n >= 2, || format!("n = {n} must be at least 2 for a sphere"))?;
    require(s >= 1, || "s must be at least 1".to_string())?;
    Ok(binomial(n + s - 1, s) + binomial(n + s - 2, s - 1))
}

/// Same formula as [`bbs_bound`], for sets with at most `s` distinct
/// scalar products.
pub fn deza_frankl_bound(n: u64, s: u64) -> Result<BigUint> {
    bbs_bound(n, s)
}

/// `2 Σ_{i=0}^{⌊d/2⌋} C(n, i)`.
pub fn clp_threshold(n: u64, d: u64) -> Result<BigUint> {
    require(n >= 1, || format!("n = {n} must be at least 1"))?;
    let sum: BigUint = (0..=d / 2).map(|i| binomial(n, i)).sum();
    Ok(sum * 2u32)
}

/// Twice the box monomial count: the slice-rank bound for s-distance sets.
pub fn main_theorem_bound(n: u64, q: u64, s: u64) -> Result<BigUint> {
    Ok(count_monomials(n, q, s)? * 2u32)
}

/// The box monomial count itself: bound for scalar-product sets meeting
/// the self-product condition.
pub fn dfrank_box_bound(n: u64, q: u64, s: u64) -> Result<BigUint> {
    count_monomials(n, q, s)
}
