//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use boxdist_core::geometry::{squared_distance, CoordBox, Scalar};

/// For every `s`, the largest subset with at most `s` distances and the
/// lexicographically least such subset (as sorted point indices).
pub fn brute_force(bx: &CoordBox) -> Vec<(usize, Vec<usize>)> {
    let pts = bx.points();
    let m = pts.len();
    assert!(m <= 16);
    let mut values: Vec<Scalar> = Vec::new();
    let mut d = vec![0usize; m * m];
    for i in 0..m {
        for j in 0..m {
            if i != j {
                let v = squared_distance(&pts[i], &pts[j]).unwrap();
                let k = values.iter().position(|x| *x == v).unwrap_or_else(|| {
                    values.push(v);
                    values.len() - 1
                });
                d[i * m + j] = k;
            }
        }
    }
    assert!(values.len() <= 64);
    // palette mask of every subset, built from the subset without its top bit
    let mut pal = vec![0u64; 1 << m];
    for mask in 1usize..1 << m {
        let top = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
        let rest = mask & !(1 << top);
        let mut p = pal[rest];
        for j in 0..top {
            if rest >> j & 1 == 1 {
                p |= 1 << d[top * m + j];
            }
        }
        pal[mask] = p;
    }
    let as_vec = |mask: usize| (0..m).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>();
    (0..=values.len())
        .map(|s| {
            let mut best: Option<Vec<usize>> = None;
            for mask in 0usize..1 << m {
                if pal[mask].count_ones() as usize > s {
                    continue;
                }
                let v = as_vec(mask);
                let better = match &best {
                    None => true,
                    Some(b) => v.len() > b.len() || (v.len() == b.len() && v < *b),
                };
                if better {
                    best = Some(v);
                }
            }
            let b = best.unwrap();
            (b.len(), b)
        })
        .collect()
}

/// Exponent vectors in `{0..q-1}^n` with sum at most `s`, by enumeration.
pub fn enumerate_monomials(n: usize, q: usize, s: usize) -> u64 {
    let mut count = 0;
    let mut e = vec![0usize; n];
    loop {
        if e.iter().sum::<usize>() <= s {
            count += 1;
        }
        let mut j = 0;
        while j < n && e[j] == q - 1 {
            e[j] = 0;
            j += 1;
        }
        if j == n {
            return count;
        }
        e[j] += 1;
    }
}

/// Index of each point of `set` in the box's lexicographic order.
pub fn indices(bx: &CoordBox, points: &[boxdist_core::geometry::Point]) -> Vec<usize> {
    points.iter().map(|p| bx.index_of_digits(&bx.digits_of(p).unwrap())).collect()
}
