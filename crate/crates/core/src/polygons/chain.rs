use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use super::rational::RationalValue;
use crate::error::{LabError, Result};

/// A polygonal chain over the integer abscissae `0..=len`, starting at `(0, 0)`.
///
/// Ordinates are stored at every integer abscissa, so two polygons compare
/// pointwise. Whether the chain is convex is a property, not an invariant:
/// arithmetic polygons are built literally and tested for convexity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LowerPolygon {
    ordinates: Vec<RationalValue>,
}

impl LowerPolygon {
    pub fn from_ordinates(ordinates: Vec<RationalValue>) -> Result<Self> {
        match ordinates.first() {
            Some(h) if h.is_zero() => Ok(LowerPolygon { ordinates }),
            Some(_) => Err(LabError::Invalid("polygon must start at (0,0)".into())),
            None => Err(LabError::Invalid("empty polygon".into())),
        }
    }

    /// Lower convex hull of `points`, densified to every integer in `0..=len`.
    ///
    /// The points must include abscissae `0` (with ordinate 0) and `len`; for
    /// repeated abscissae the smallest ordinate wins.
    pub fn lower_hull(points: &[(usize, RationalValue)], len: usize) -> Result<Self> {
        let mut pts: Vec<(usize, RationalValue)> = points.to_vec();
        pts.sort();
        pts.dedup_by(|b, a| a.0 == b.0);
        if pts.first().map(|p| p.0) != Some(0) || pts.last().map(|p| p.0) != Some(len) {
            return Err(LabError::Invalid("hull needs both endpoints".into()));
        }
        if pts.iter().any(|p| p.0 > len) {
            return Err(LabError::Invalid("point beyond polygon length".into()));
        }
        let mut hull: Vec<(usize, RationalValue)> = Vec::with_capacity(pts.len());
        for pt in pts {
            while hull.len() >= 2 {
                let (x1, y1) = &hull[hull.len() - 2];
                let (x2, y2) = &hull[hull.len() - 1];
                // drop the middle point unless it lies strictly below the chord
                let lhs = (y2 - y1) * RationalValue::from_integer((pt.0 - x1) as i64);
                let rhs = (&pt.1 - y1) * RationalValue::from_integer((x2 - x1) as i64);
                if lhs >= rhs {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        let mut ordinates = Vec::with_capacity(len + 1);
        for w in hull.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            let slope = (y1 - y0) / RationalValue::from_integer((x1 - x0) as i64);
            for k in *x0..*x1 {
                ordinates.push(y0 + &(&slope * &RationalValue::from_integer((k - x0) as i64)));
            }
        }
        ordinates.push(hull.last().unwrap().1.clone());
        Self::from_ordinates(ordinates)
    }

    pub fn len(&self) -> usize {
        self.ordinates.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ordinate(&self, k: usize) -> &RationalValue {
        &self.ordinates[k]
    }

    pub fn ordinates(&self) -> &[RationalValue] {
        &self.ordinates
    }

    pub fn end_point(&self) -> (usize, &RationalValue) {
        (self.len(), &self.ordinates[self.len()])
    }

    /// Slope of the segment `[k, k+1]`.
    pub fn slopes(&self) -> Vec<RationalValue> {
        self.ordinates.windows(2).map(|w| &w[1] - &w[0]).collect()
    }

    /// Endpoints plus every abscissa where the slope strictly increases.
    pub fn vertices(&self) -> Vec<usize> {
        let slopes = self.slopes();
        let mut out = vec![0];
        for k in 1..self.len() {
            if slopes[k] > slopes[k - 1] {
                out.push(k);
            }
        }
        if !self.is_empty() {
            out.push(self.len());
        }
        out
    }

    pub fn is_convex(&self) -> bool {
        self.slopes().windows(2).all(|w| w[0] <= w[1])
    }

    pub fn to_json(&self) -> Value {
        let points: Vec<Value> = self
            .ordinates
            .iter()
            .enumerate()
            .map(|(k, h)| json!([k, [big_to_json(h.numer()), big_to_json(h.denom())]]))
            .collect();
        json!({ "len": self.len(), "points": points, "vertices": self.vertices() })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = || LabError::Invalid("malformed polygon JSON".into());
        let points = value
            .get("points")
            .and_then(Value::as_array)
            .ok_or_else(bad)?;
        let mut ordinates = Vec::with_capacity(points.len());
        for (k, pt) in points.iter().enumerate() {
            let arr = pt.as_array().ok_or_else(bad)?;
            if arr.len() != 2 || arr[0].as_u64() != Some(k as u64) {
                return Err(bad());
            }
            let frac = arr[1].as_array().ok_or_else(bad)?;
            if frac.len() != 2 {
                return Err(bad());
            }
            let num = json_to_big(&frac[0]).ok_or_else(bad)?;
            let den = json_to_big(&frac[1]).ok_or_else(bad)?;
            ordinates.push(RationalValue::from_big(num, den));
        }
        Self::from_ordinates(ordinates)
    }

    /// CSV with columns `k,num,den,decimal`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,num,den,decimal\n");
        for (k, h) in self.ordinates.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{:.12}\n",
                k,
                h.numer(),
                h.denom(),
                h.to_f64()
            ));
        }
        out
    }
}

impl fmt::Display for LowerPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .ordinates
            .iter()
            .enumerate()
            .map(|(k, h)| format!("({k},{h})"))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

fn big_to_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn json_to_big(v: &Value) -> Option<BigInt> {
    if let Some(i) = v.as_i64() {
        return Some(i.into());
    }
    v.as_str()?.parse().ok()
}

/// Convexity and vertex structure of a polygon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexityReport {
    pub is_convex: bool,
    pub vertex_abscissae: Vec<usize>,
    /// Set when the polygon is an arithmetic polygon with `p <= 3D`, where
    /// convexity is not guaranteed.
    pub threshold_warning: bool,
}

pub fn convexity_report(poly: &LowerPolygon) -> ConvexityReport {
    ConvexityReport {
        is_convex: poly.is_convex(),
        vertex_abscissae: poly.vertices(),
        threshold_warning: false,
    }
}

/// Pointwise comparison: `upper(k) >= lower(k)` for every `k`.
pub fn lies_on_or_above(upper: &LowerPolygon, lower: &LowerPolygon) -> Result<bool> {
    if upper.len() != lower.len() {
        return Err(LabError::LengthMismatch {
            left: upper.len(),
            right: lower.len(),
        });
    }
    Ok(upper
        .ordinates
        .iter()
        .zip(&lower.ordinates)
        .all(|(u, l)| u >= l))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> RationalValue {
        RationalValue::new(n, d)
    }

    #[test]
    fn hull_densifies_and_drops_points_above() {
        let pts = vec![(0, r(0, 1)), (1, r(1, 1)), (2, r(0, 1)), (4, r(2, 1))];
        let poly = LowerPolygon::lower_hull(&pts, 4).unwrap();
        assert_eq!(poly.to_string(), "(0,0),(1,0),(2,0),(3,1),(4,2)");
        assert_eq!(poly.vertices(), vec![0, 2, 4]);
    }

    #[test]
    fn collinear_points_are_not_vertices() {
        let pts = vec![(0, r(0, 1)), (1, r(1, 2)), (2, r(1, 1))];
        let poly = LowerPolygon::lower_hull(&pts, 2).unwrap();
        assert_eq!(poly.vertices(), vec![0, 2]);
        assert!(poly.is_convex());
    }

    #[test]
    fn json_and_csv() {
        let poly = LowerPolygon::from_ordinates(vec![r(0, 1), r(0, 1), r(1, 2)]).unwrap();
        let j = poly.to_json();
        assert_eq!(
            j.to_string(),
            r#"{"len":2,"points":[[0,[0,1]],[1,[0,1]],[2,[1,2]]],"vertices":[0,1,2]}"#
        );
        assert_eq!(LowerPolygon::from_json(&j).unwrap(), poly);
        assert!(poly.to_csv().ends_with("2,1,2,0.500000000000\n"));
    }

    #[test]
    fn comparison_requires_equal_lengths() {
        let a = LowerPolygon::from_ordinates(vec![r(0, 1), r(1, 1)]).unwrap();
        let b = LowerPolygon::from_ordinates(vec![r(0, 1), r(1, 1), r(2, 1)]).unwrap();
        assert!(lies_on_or_above(&a, &b).is_err());
        assert!(lies_on_or_above(&a, &a).unwrap());
        assert!(convexity_report(&a).is_convex);
    }

    #[test]
    fn nonconvex_detected() {
        let poly = LowerPolygon::from_ordinates(vec![r(0, 1), r(1, 1), r(1, 1)]).unwrap();
        assert!(!poly.is_convex());
    }
}
