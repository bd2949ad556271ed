//! Exact rational geometry: boxes, point sets, squared distances and
//! scalar products.
//!
//! Distances are always handled squared. For rational points the squared
//! distance is rational, and squaring is injective on non-negative reals,
//! so counting distinct squared distances counts distinct distances.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number, always in lowest terms with a positive
/// denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn new(value: BigRational) -> Self {
        Scalar(value)
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        Scalar(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn square(&self) -> Scalar {
        Scalar(&self.0 * &self.0)
    }

    pub fn pow(&self, exp: u32) -> Scalar {
        Scalar(num_traits::pow(self.0.clone(), exp as usize))
    }

    pub fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self.0).unwrap_or(f64::NAN)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_integer(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

fn is_decimal_integer(s: &str) -> bool {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseScalar(s.to_string());
        let s_trim = s.trim();
        let (num, den) = match s_trim.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s_trim, None),
        };
        if !is_decimal_integer(num) {
            return Err(bad());
        }
        let numer: BigInt = num.parse().map_err(|_| bad())?;
        let denom: BigInt = match den {
            Some(d) if is_decimal_integer(d) => d.parse().map_err(|_| bad())?,
            Some(_) => return Err(bad()),
            None => BigInt::one(),
        };
        if denom.is_zero() {
            return Err(bad());
        }
        Ok(Scalar(BigRational::new(numer, denom)))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $method:ident) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                Scalar($tr::$method(&self.0, &rhs.0))
            }
        }
        impl $tr for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar($tr::$method(self.0, rhs.0))
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

/// A point of ℚⁿ.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<Scalar>);

impl Point {
    pub fn new(coords: Vec<Scalar>) -> Self {
        Point(coords)
    }

    pub fn from_integers(coords: &[i64]) -> Self {
        Point(coords.iter().map(|&c| Scalar::from_integer(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.0
    }
}

/// A product `A_1 × … × A_n` of finite coordinate sets, all of size `q ≥ 2`.
///
/// Coordinate sets are kept sorted, so enumerating points with the first
/// coordinate most significant yields them in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawBox")]
pub struct CoordBox {
    coords: Vec<Vec<Scalar>>,
}

#[derive(Deserialize)]
struct RawBox {
    coords: Vec<Vec<Scalar>>,
}

impl TryFrom<RawBox> for CoordBox {
    type Error = Error;
    fn try_from(raw: RawBox) -> Result<Self> {
        CoordBox::new(raw.coords)
    }
}

impl CoordBox {
    pub fn new(mut coords: Vec<Vec<Scalar>>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidBox("dimension must be at least 1".into()));
        }
        let q = coords[0].len();
        for (i, set) in coords.iter_mut().enumerate() {
            if set.len() != q {
                return Err(Error::InvalidBox(format!(
                    "coordinate set {i} has {} elements, expected {q}",
                    set.len()
                )));
            }
            set.sort();
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidBox(format!("coordinate set {i} has duplicates")));
            }
        }
        if q < 2 {
            return Err(Error::InvalidBox("coordinate sets need at least 2 elements".into()));
        }
        Ok(CoordBox { coords })
    }

    /// The integer grid `{0, …, q−1}ⁿ`.
    pub fn grid(n: usize, q: usize) -> Result<Self> {
        let set: Vec<Scalar> = (0..q as i64).map(Scalar::from_integer).collect();
        CoordBox::new(vec![set; n])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn q(&self) -> usize {
        self.coords[0].len()
    }

    pub fn coord_sets(&self) -> &[Vec<Scalar>] {
        &self.coords
    }

    /// Number of points, `qⁿ`, or `None` if it does not fit in `usize`.
    pub fn size(&self) -> Option<usize> {
        self.q().checked_pow(self.dim() as u32)
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && p.0.iter().zip(&self.coords).all(|(c, set)| set.binary_search(c).is_ok())
    }

    /// Digit representation (index into each coordinate set), if `p` lies in
    /// the box.
    pub fn digits_of(&self, p: &Point) -> Option<Vec<usize>> {
        if p.dim() != self.dim() {
            return None;
        }
        p.0.iter()
            .zip(&self.coords)
            .map(|(c, set)| set.binary_search(c).ok())
            .collect()
    }

    pub fn point_from_digits(&self, digits: &[usize]) -> Point {
        Point(
            digits
                .iter()
                .zip(&self.coords)
                .map(|(&d, set)| set[d].clone())
                .collect(),
        )
    }

    /// Lexicographic index of the point with the given digits.
    pub fn index_of_digits(&self, digits: &[usize]) -> usize {
        let q = self.q();
        digits.iter().fold(0, |acc, &d| acc * q + d)
    }

    pub fn digits_of_index(&self, mut index: usize) -> Vec<usize> {
        let q = self.q();
        let mut digits = vec![0; self.dim()];
        for d in digits.iter_mut().rev() {
            *d = index % q;
            index /= q;
        }
        digits
    }

    /// All points in lexicographic order.
    pub fn points(&self) -> Vec<Point> {
        let total = self.size().expect("box too large to enumerate");
        (0..total)
            .map(|i| self.point_from_digits(&self.digits_of_index(i)))
            .collect()
    }
}

/// A finite set of distinct points of a box, stored in the order given.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPointSet")]
pub struct PointSet {
    #[serde(rename = "box")]
    bx: CoordBox,
    points: Vec<Point>,
}

#[derive(Deserialize)]
struct RawPointSet {
    #[serde(rename = "box")]
    bx: CoordBox,
    points: Vec<Point>,
}

impl TryFrom<RawPointSet> for PointSet {
    type Error = Error;
    fn try_from(raw: RawPointSet) -> Result<Self> {
        PointSet::new(raw.bx, raw.points)
    }
}

impl PointSet {
    /// Rejects points outside the box and duplicates; never deduplicates
    /// silently.
    pub fn new(bx: CoordBox, points: Vec<Point>) -> Result<Self> {
        for (index, p) in points.iter().enumerate() {
            if p.dim() != bx.dim() {
                return Err(Error::DimensionMismatch { expected: bx.dim(), got: p.dim() });
            }
            if !bx.contains(p) {
                return Err(Error::PointOutsideBox { index });
            }
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].cmp(&points[b]).then(a.cmp(&b)));
        for w in order.windows(2) {
            if points[w[0]] == points[w[1]] {
                return Err(Error::DuplicatePoint { first: w[0], second: w[1] });
            }
        }
        Ok(PointSet { bx, points })
    }

    pub fn bounding_box(&self) -> &CoordBox {
        &self.bx
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.bx.dim()
    }
}

/// Sorted, duplicate-free set of positive squared distances.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Scalar>", into = "Vec<Scalar>")]
pub struct SquaredDistancePalette {
    values: Vec<Scalar>,
}

impl TryFrom<Vec<Scalar>> for SquaredDistancePalette {
    type Error = Error;
    fn try_from(values: Vec<Scalar>) -> Result<Self> {
        SquaredDistancePalette::from_values(values)
    }
}

impl From<SquaredDistancePalette> for Vec<Scalar> {
    fn from(p: SquaredDistancePalette) -> Self {
        p.values
    }
}

impl SquaredDistancePalette {
    pub fn from_values(values: impl IntoIterator<Item = Scalar>) -> Result<Self> {
        let set: BTreeSet<Scalar> = values.into_iter().collect();
        if let Some(bad) = set.iter().find(|v| !v.is_positive()) {
            return Err(Error::InvalidParameter(format!(
                "squared distance {bad} is not positive"
            )));
        }
        Ok(SquaredDistancePalette { values: set.into_iter().collect() })
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, v: &Scalar) -> bool {
        self.values.binary_search(v).is_ok()
    }
}

/// Sorted, duplicate-free set of scalar products.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScalarProductSet {
    values: Vec<Scalar>,
}

impl ScalarProductSet {
    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, v: &Scalar) -> bool {
        self.values.binary_search(v).is_ok()
    }
}

fn check_dims(a: &Point, b: &Point) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(())
}

pub fn squared_distance(a: &Point, b: &Point) -> Result<Scalar> {
    check_dims(a, b)?;
    Ok(a.0
        .iter()
        .zip(&b.0)
        .map(|(x, y)| (x - y).square())
        .sum())
}

pub fn scalar_product(a: &Point, b: &Point) -> Result<Scalar> {
    check_dims(a, b)?;
    Ok(a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum())
}

fn unordered_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Distinct squared distances over all pairs of distinct points.
pub fn distance_palette(set: &PointSet) -> Result<SquaredDistancePalette> {
    if set.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let pts = set.points();
    if let Some(ints) = small_integer_coords(pts) {
        let mut values: Vec<i128> = unordered_pairs(ints.len())
            .map(|(i, j)| ints[i].iter().zip(&ints[j]).map(|(x, y)| (x - y) * (x - y)).sum())
            .collect();
        values.sort_unstable();
        values.dedup();
        let values = values.into_iter().map(|v| Scalar::new(BigRational::from_integer(BigInt::from(v)))).collect();
        return Ok(SquaredDistancePalette { values });
    }
    let values: BTreeSet<Scalar> = unordered_pairs(pts.len())
        .map(|(i, j)| squared_distance(&pts[i], &pts[j]))
        .collect::<Result<_>>()?;
    Ok(SquaredDistancePalette { values: values.into_iter().collect() })
}

/// Integer coordinates small enough that squared distances cannot overflow.
fn small_integer_coords(pts: &[Point]) -> Option<Vec<Vec<i128>>> {
    const LIMIT: i128 = 1 << 40;
    let dim = pts.first()?.dim();
    if dim > 1 << 20 {
        return None;
    }
    pts.iter()
        .map(|p| {
            p.coords()
                .iter()
                .map(|c| {
                    let v = if c.is_integer() { c.numer().to_i128()? } else { return None };
                    (v.abs() < LIMIT).then_some(v)
                })
                .collect()
        })
        .collect()
}

pub fn is_s_distance_set(set: &PointSet, s: usize) -> bool {
    match distance_palette(set) {
        Ok(p) => p.len() <= s,
        Err(_) => true,
    }
}

/// Inner products between distinct points.
pub fn scalar_product_set(set: &PointSet) -> ScalarProductSet {
    let pts = set.points();
    let values: BTreeSet<Scalar> = unordered_pairs(pts.len())
        .map(|(i, j)| scalar_product(&pts[i], &pts[j]).expect("points share the box dimension"))
        .collect();
    ScalarProductSet { values: values.into_iter().collect() }
}

/// Both hypotheses of the box scalar-product bound: no point's
/// self-product occurs among the mutual products, and there are at most
/// `s` mutual products.
pub fn check_df_conditions(set: &PointSet, s: usize) -> bool {
    let products = scalar_product_set(set);
    products.len() <= s
        && set.points().iter().all(|f| {
            let own = scalar_product(f, f).expect("same dimension");
            !products.contains(&own)
        })
}
