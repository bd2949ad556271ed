//! Precomputed view of a box for searching: points in lexicographic order,
//! the global distance palette, and every pairwise squared distance as an
//! index into that palette.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::geometry::{CoordBox, Point, Scalar, SquaredDistancePalette};

/// Largest box the search accepts.
pub const MAX_SEARCH_POINTS: usize = 4096;

pub struct SearchInstance {
    bx: CoordBox,
    m: usize,
    palette: SquaredDistancePalette,
    dist: Vec<u32>,
}

impl SearchInstance {
    pub fn new(bx: &CoordBox) -> Result<Self> {
        let m = bx
            .size()
            .filter(|&m| m <= MAX_SEARCH_POINTS)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "box has more than {MAX_SEARCH_POINTS} points; too large to search"
                ))
            })?;
        let (palette, dist) = match integer_distances(bx, m) {
            Some(found) => found,
            None => rational_distances(bx, m),
        };
        Ok(SearchInstance { bx: bx.clone(), m, palette, dist })
    }

    pub fn bounding_box(&self) -> &CoordBox {
        &self.bx
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn palette(&self) -> &SquaredDistancePalette {
        &self.palette
    }

    pub fn palette_len(&self) -> usize {
        self.palette.len()
    }

    /// Palette index of the squared distance between points `i ≠ j`.
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> u32 {
        self.dist[i * self.m + j]
    }

    pub fn point(&self, i: usize) -> Point {
        self.bx.point_from_digits(&self.bx.digits_of_index(i))
    }

    pub fn points(&self, indices: &[usize]) -> Vec<Point> {
        indices.iter().map(|&i| self.point(i)).collect()
    }

    /// Number of distinct distances among the given points.
    pub fn palette_size_of(&self, indices: &[usize]) -> usize {
        let mut seen: Vec<u32> = Vec::new();
        for (k, &i) in indices.iter().enumerate() {
            for &j in &indices[k + 1..] {
                seen.push(self.dist(i, j));
            }
        }
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }
}

/// Squared-difference table per coordinate, then sums over coordinates.
fn fill_distances<K: Clone + Ord + std::hash::Hash>(
    bx: &CoordBox,
    m: usize,
    per_coord: Vec<Vec<K>>,
    add: impl Fn(&K, &K) -> K,
    zero: K,
) -> (Vec<K>, Vec<u32>) {
    let q = bx.q();
    let digits: Vec<Vec<usize>> = (0..m).map(|i| bx.digits_of_index(i)).collect();
    let mut keys: Vec<K> = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            let mut acc = zero.clone();
            for (c, table) in per_coord.iter().enumerate() {
                acc = add(&acc, &table[digits[i][c] * q + digits[j][c]]);
            }
            keys.push(acc);
        }
    }
    let mut distinct = keys.clone();
    distinct.sort();
    distinct.dedup();
    let index: HashMap<&K, u32> = distinct.iter().enumerate().map(|(k, v)| (v, k as u32)).collect();
    let mut dist = vec![u32::MAX; m * m];
    let mut it = keys.iter();
    for i in 0..m {
        for j in i + 1..m {
            let k = index[it.next().expect("one key per pair")];
            dist[i * m + j] = k;
            dist[j * m + i] = k;
        }
    }
    (distinct, dist)
}

/// Fast path: coordinates scaled by a common denominator fit in `i64` and
/// squared distances fit in `u128`.
fn integer_distances(bx: &CoordBox, m: usize) -> Option<(SquaredDistancePalette, Vec<u32>)> {
    let q = bx.q();
    let lcm = bx
        .coord_sets()
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scaled: Vec<Vec<i64>> = bx
        .coord_sets()
        .iter()
        .map(|set| {
            set.iter()
                .map(|c| (c.numer() * (&lcm / c.denom())).to_i64())
                .collect::<Option<Vec<_>>>()
        })
        .collect::<Option<_>>()?;
    let mut per_coord = Vec::with_capacity(scaled.len());
    for set in &scaled {
        let mut table = vec![0u128; q * q];
        for (a, &x) in set.iter().enumerate() {
            for (b, &y) in set.iter().enumerate() {
                let diff = (x as i128 - y as i128).unsigned_abs();
                table[a * q + b] = diff.checked_mul(diff)?;
            }
        }
        per_coord.push(table);
    }
    // the largest possible sum must not overflow
    per_coord
        .iter()
        .try_fold(0u128, |acc, table| acc.checked_add(*table.iter().max()?))?;
    let (distinct, dist) = fill_distances(bx, m, per_coord, |a, b| a + b, 0u128);
    let denom = BigInt::from(&lcm * &lcm);
    let values = distinct
        .into_iter()
        .map(|k| Scalar::new(BigRational::new(BigInt::from(k), denom.clone())));
    let palette = SquaredDistancePalette::from_values(values).ok()?;
    Some((palette, dist))
}

fn rational_distances(bx: &CoordBox, m: usize) -> (SquaredDistancePalette, Vec<u32>) {
    let q = bx.q();
    let per_coord: Vec<Vec<Scalar>> = bx
        .coord_sets()
        .iter()
        .map(|set| {
            let mut table = Vec::with_capacity(q * q);
            for x in set {
                for y in set {
                    table.push((x - y).square());
                }
            }
            table
        })
        .collect();
    let (distinct, dist) = fill_distances(bx, m, per_coord, |a, b| a + b, Scalar::zero());
    let palette = SquaredDistancePalette::from_values(distinct).expect("distinct points");
    (palette, dist)
}

/// Index permutations of the box points generated by isometries that map
/// the box onto itself: reflection of a coordinate whose set is symmetric
/// about its midpoint, and exchange of two coordinates with equal sets.
pub(crate) struct Symmetry {
    q: usize,
    n: usize,
    symmetric: Vec<bool>,
    equal_pairs: Vec<(usize, usize)>,
}

impl Symmetry {
    pub fn detect(bx: &CoordBox) -> Self {
        let sets = bx.coord_sets();
        let q = bx.q();
        let symmetric = sets
            .iter()
            .map(|set| {
                let total = &set[0] + &set[q - 1];
                (0..q).all(|k| &set[k] + &set[q - 1 - k] == total)
            })
            .collect();
        let mut equal_pairs = Vec::new();
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if sets[i] == sets[j] {
                    equal_pairs.push((i, j));
                }
            }
        }
        Symmetry { q, n: sets.len(), symmetric, equal_pairs }
    }

    pub fn trivial(bx: &CoordBox) -> Self {
        Symmetry { q: bx.q(), n: bx.dim(), symmetric: vec![false; bx.dim()], equal_pairs: vec![] }
    }

    /// Digit maps generating the whole group.
    fn generators(&self) -> Vec<DigitMap> {
        let mut gens: Vec<DigitMap> = (0..self.n)
            .filter(|&i| self.symmetric[i])
            .map(DigitMap::Flip)
            .collect();
        gens.extend(self.equal_pairs.iter().map(|&(i, j)| DigitMap::Swap(i, j)));
        gens
    }

    /// Digit maps generating the stabilizer of the point with `digits`.
    fn stabilizer_generators(&self, digits: &[usize]) -> Vec<DigitMap> {
        let q = self.q;
        let mirror = |d: usize| q - 1 - d;
        let mut gens: Vec<DigitMap> = (0..self.n)
            .filter(|&i| self.symmetric[i] && digits[i] == mirror(digits[i]))
            .map(DigitMap::Flip)
            .collect();
        for &(i, j) in &self.equal_pairs {
            if digits[i] == digits[j] {
                gens.push(DigitMap::Swap(i, j));
            }
            if self.symmetric[i] && digits[j] == mirror(digits[i]) {
                gens.push(DigitMap::SwapFlip(i, j));
            }
        }
        gens
    }

    /// Orbit label (smallest member index) of every point.
    pub fn orbits(&self, bx: &CoordBox, m: usize) -> Vec<usize> {
        orbits_under(bx, m, self.q, &self.generators())
    }

    pub fn stabilizer_orbits(&self, bx: &CoordBox, m: usize, point: usize) -> Vec<usize> {
        let digits = bx.digits_of_index(point);
        orbits_under(bx, m, self.q, &self.stabilizer_generators(&digits))
    }
}

#[derive(Clone, Copy, Debug)]
enum DigitMap {
    Flip(usize),
    Swap(usize, usize),
    SwapFlip(usize, usize),
}

impl DigitMap {
    fn apply(&self, digits: &mut [usize], q: usize) {
        match *self {
            DigitMap::Flip(i) => digits[i] = q - 1 - digits[i],
            DigitMap::Swap(i, j) => digits.swap(i, j),
            DigitMap::SwapFlip(i, j) => {
                digits.swap(i, j);
                digits[i] = q - 1 - digits[i];
                digits[j] = q - 1 - digits[j];
            }
        }
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn orbits_under(bx: &CoordBox, m: usize, q: usize, gens: &[DigitMap]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..m).collect();
    for i in 0..m {
        let digits = bx.digits_of_index(i);
        for g in gens {
            let mut image = digits.clone();
            g.apply(&mut image, q);
            let j = bx.index_of_digits(&image);
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            // keep the smaller index as root so labels are orbit minima
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }
    }
    (0..m).map(|i| find(&mut parent, i)).collect()
}

/// Groups of indices sharing a label, ordered by label.
pub(crate) fn orbit_classes(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        classes.entry(l).or_default().push(i);
    }
    classes.into_values().collect()
}
