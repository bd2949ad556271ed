//! Explicit few-distance sets.

use num_bigint::BigUint;
use serde::Serialize;

use crate::bounds::binomial;
use crate::error::{Error, Result};
use crate::geometry::{distance_palette, CoordBox, Point, PointSet, SquaredDistancePalette};
use crate::witness::biguint_string;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructionReport {
    pub points: PointSet,
    #[serde(serialize_with = "biguint_string")]
    pub claimed_size: BigUint,
    pub palette: SquaredDistancePalette,
    pub s_achieved: usize,
}

/// Characteristic vectors of all `s`-subsets of `[n]` in `{0,1}^n`, in
/// lexicographic order.
pub fn characteristic_vector_set(n: usize, s: usize) -> Result<ConstructionReport> {
    if n == 0 || s == 0 || s > n {
        return Err(Error::InvalidParameter(format!("need 0 < s <= n, got n = {n}, s = {s}")));
    }
    let mut points = Vec::new();
    let mut bits = vec![0i64; n];
    subsets(&mut bits, 0, s, &mut points);
    points.sort();
    let set = PointSet::new(CoordBox::grid(n, 2)?, points)?;
    report(set, binomial(n as u64, s as u64))
}

fn subsets(bits: &mut [i64], from: usize, left: usize, out: &mut Vec<Point>) {
    if left == 0 {
        out.push(Point::from_integers(bits));
        return;
    }
    for i in from..=bits.len() - left {
        bits[i] = 1;
        subsets(bits, i + 1, left - 1, out);
        bits[i] = 0;
    }
}

/// The whole box, which uses every distance the box has.
pub fn full_box_report(bx: &CoordBox) -> Result<ConstructionReport> {
    let size = bx
        .size()
        .ok_or_else(|| Error::InvalidParameter("box too large to list".into()))?;
    let set = PointSet::new(bx.clone(), bx.points())?;
    report(set, BigUint::from(size))
}

fn report(points: PointSet, claimed_size: BigUint) -> Result<ConstructionReport> {
    let palette = distance_palette(&points)?;
    Ok(ConstructionReport { s_achieved: palette.len(), points, claimed_size, palette })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{is_s_distance_set, Scalar};

    fn ints(p: &SquaredDistancePalette) -> Vec<i64> {
        p.values().iter().map(|v| v.to_f64() as i64).collect()
    }

    #[test]
    fn small_cases() {
        let r = characteristic_vector_set(3, 1).unwrap();
        assert_eq!(r.points.len(), 3);
        assert_eq!(ints(&r.palette), vec![2]);
        assert_eq!(r.s_achieved, 1);
        let r = characteristic_vector_set(4, 2).unwrap();
        assert_eq!(r.points.len(), 6);
        assert_eq!(ints(&r.palette), vec![2, 4]);
        // past n/2 fewer distances occur
        let r = characteristic_vector_set(5, 4).unwrap();
        assert_eq!(ints(&r.palette), vec![2]);
        assert!(is_s_distance_set(&r.points, 4));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(characteristic_vector_set(3, 0).is_err());
        assert!(characteristic_vector_set(3, 4).is_err());
    }

    #[test]
    fn full_boxes() {
        let r = full_box_report(&CoordBox::grid(3, 2).unwrap()).unwrap();
        assert_eq!((r.points.len(), ints(&r.palette), r.s_achieved), (8, vec![1, 2, 3], 3));
        let r = full_box_report(&CoordBox::grid(1, 2).unwrap()).unwrap();
        assert_eq!(r.palette.values(), &[Scalar::one()]);
        let r = full_box_report(&CoordBox::grid(2, 3).unwrap()).unwrap();
        assert_eq!((r.points.len(), ints(&r.palette)), (9, vec![1, 2, 4, 5, 8]));
    }
}
