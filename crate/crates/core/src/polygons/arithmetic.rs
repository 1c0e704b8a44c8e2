use serde::Serialize;

use super::chain::{ConvexityReport, LowerPolygon};
use super::rational::RationalValue;
use super::shape::{IntervalShape, Threshold};
use crate::arith::ceil_div;
use crate::error::{LabError, Result};

/// `deg(i) = i/d` for `i >= 0` and `-i/e` for `i <= 0`.
pub fn degree(i: i64, shape: &IntervalShape) -> Result<RationalValue> {
    if i >= 0 {
        Ok(RationalValue::new(i, shape.d() as i64))
    } else if shape.e() == 0 {
        Err(LabError::OutOfRange(format!("deg({i}) needs e > 0")))
    } else {
        Ok(RationalValue::new(-i, shape.e() as i64))
    }
}

/// The Hodge polygon of the interval.
pub fn hodge_polygon(shape: &IntervalShape) -> LowerPolygon {
    let d = shape.d() as i64;
    let e = shape.e() as i64;
    if e == 0 {
        let ords = (0..d)
            .map(|n| RationalValue::new(n * (n + 1), 2 * d))
            .collect();
        return LowerPolygon::from_ordinates(ords).expect("starts at zero");
    }
    let len = (d + e) as usize;
    let mut pts = vec![
        (0, RationalValue::zero()),
        (len, RationalValue::new(d + e, 2)),
    ];
    for m in 0..e {
        for n in 0..d {
            // strict pair range: -d < m d - n e < e
            let t = m * d - n * e;
            if -d < t && t < e {
                let h =
                    RationalValue::new(m * (m + 1), 2 * e) + RationalValue::new(n * (n + 1), 2 * d);
                pts.push(((m + n + 1) as usize, h));
            }
        }
    }
    LowerPolygon::lower_hull(&pts, len).expect("endpoints present")
}

/// `(1/(p-1)) * sum_{i=1}^{n} ceil((p i - n)/d)` for `0 <= n <= d`.
pub fn p_unit(p: u64, d: u32, n: u32) -> Result<RationalValue> {
    if d == 0 || n > d {
        return Err(LabError::OutOfRange(format!(
            "p_unit needs 0 <= n <= d, got n={n}, d={d}"
        )));
    }
    let p = p as i64;
    let (d, n) = (d as i64, n as i64);
    let sum: i64 = (1..=n).map(|i| ceil_div(p * i - n, d)).sum();
    Ok(RationalValue::new(sum, p - 1))
}

/// A pair `(m, n)` with `m + n + 1 = k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct IndexPair {
    pub m: u32,
    pub n: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairSet {
    pub pairs: Vec<IndexPair>,
}

impl PairSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn singleton(&self) -> Option<IndexPair> {
        match self.pairs.as_slice() {
            [only] => Some(*only),
            _ => None,
        }
    }
}

fn check_k(shape: &IntervalShape, k: u32) -> Result<()> {
    if shape.e() == 0 {
        return Err(LabError::OutOfRange("index pairs need e > 0".into()));
    }
    let top = shape.d() + shape.e() - 1;
    if k < 1 || k > top {
        return Err(LabError::OutOfRange(format!("k = {k} not in [1, {top}]")));
    }
    Ok(())
}

/// `I_k`: pairs with `m + n + 1 = k`, `0 <= m < e`, `0 <= n < d` and
/// `-1/e <= m/e - n/d <= 1/d` (closed inequalities).
pub fn index_pairs(shape: &IntervalShape, k: u32) -> Result<PairSet> {
    check_k(shape, k)?;
    let (d, e) = (shape.d() as i64, shape.e() as i64);
    let mut pairs = Vec::new();
    for m in 0..e.min(k as i64) {
        let n = k as i64 - 1 - m;
        if n < 0 || n >= d {
            continue;
        }
        let t = m * d - n * e;
        if -d <= t && t <= e {
            pairs.push(IndexPair {
                m: m as u32,
                n: n as u32,
            });
        }
    }
    Ok(PairSet { pairs })
}

fn pair_value(p: u64, shape: &IntervalShape, pair: IndexPair) -> RationalValue {
    p_unit(p, shape.e(), pair.m).expect("m < e") + p_unit(p, shape.d(), pair.n).expect("n < d")
}

/// `V_k`: the pairs of `I_k` minimising `p_unit(p,e,m) + p_unit(p,d,n)`.
pub fn minimizing_pairs(p: u64, shape: &IntervalShape, k: u32) -> Result<PairSet> {
    shape.check_prime(p)?;
    let all = index_pairs(shape, k)?;
    let values: Vec<RationalValue> = all
        .pairs
        .iter()
        .map(|&pr| pair_value(p, shape, pr))
        .collect();
    let min = values
        .iter()
        .min()
        .cloned()
        .ok_or_else(|| LabError::Invalid(format!("I_{k} is empty")))?;
    let pairs = all
        .pairs
        .iter()
        .zip(&values)
        .filter(|(_, v)| **v == min)
        .map(|(pr, _)| *pr)
        .collect();
    Ok(PairSet { pairs })
}

/// The arithmetic polygon: the literal piecewise-linear graph of the
/// minimised ceiling sums (no convexification). For `e = 0` this is the
/// polygon through `(n, p_unit(p, d, n))`, `n = 0..d-1`.
pub fn arithmetic_polygon(p: u64, shape: &IntervalShape) -> Result<LowerPolygon> {
    shape.check_prime(p)?;
    let (d, e) = (shape.d(), shape.e());
    if e == 0 {
        let ords = (0..d)
            .map(|n| p_unit(p, d, n))
            .collect::<Result<Vec<_>>>()?;
        return LowerPolygon::from_ordinates(ords);
    }
    let mut ords = vec![RationalValue::zero()];
    for k in 1..d + e {
        let v = minimizing_pairs(p, shape, k)?;
        ords.push(pair_value(p, shape, v.pairs[0]));
    }
    ords.push(RationalValue::new((d + e) as i64, 2));
    LowerPolygon::from_ordinates(ords)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LocalRelationKind {
    /// `|V_k| = 2`: the point is the midpoint of its neighbours.
    Midpoint,
    /// `|I_k| = 2`, `|V_k| = 1`: strict convexity.
    StrictTwoPairs,
    /// `|I_k| = 1`: strict convexity.
    StrictSinglePair,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalRelation {
    pub k: u32,
    pub kind: LocalRelationKind,
    pub holds: bool,
}

/// Convexity and vertex-criterion analysis of an arithmetic polygon.
#[derive(Clone, Debug)]
pub struct ArithmeticAnalysis {
    pub polygon: LowerPolygon,
    pub convexity: ConvexityReport,
    /// `{k : |V_k| = 1} ∪ {0, d+e}`.
    pub singleton_abscissae: Vec<usize>,
    pub vertex_criterion_holds: bool,
    pub local_relations: Vec<LocalRelation>,
    pub threshold: Threshold,
    pub threshold_met: bool,
}

impl ArithmeticAnalysis {
    pub fn all_hold(&self) -> bool {
        self.convexity.is_convex
            && self.vertex_criterion_holds
            && self.local_relations.iter().all(|r| r.holds)
    }
}

pub fn analyze_arithmetic_polygon(p: u64, shape: &IntervalShape) -> Result<ArithmeticAnalysis> {
    if shape.e() == 0 {
        return Err(LabError::OutOfRange("analysis needs e > 0".into()));
    }
    let polygon = arithmetic_polygon(p, shape)?;
    let threshold = Threshold::Above3D;
    let threshold_met = threshold.met(p, shape);
    let mut convexity = super::chain::convexity_report(&polygon);
    convexity.threshold_warning = !threshold_met;

    let len = polygon.len();
    let mut singleton_abscissae = vec![0];
    let mut local_relations = Vec::new();
    for k in 1..len as u32 {
        let ik = index_pairs(shape, k)?;
        let vk = minimizing_pairs(p, shape, k)?;
        if vk.len() == 1 {
            singleton_abscissae.push(k as usize);
        }
        let twice = polygon.ordinate(k as usize) + polygon.ordinate(k as usize);
        let sides = polygon.ordinate(k as usize - 1) + polygon.ordinate(k as usize + 1);
        let (kind, holds) = match (ik.len(), vk.len()) {
            (_, 2) => (LocalRelationKind::Midpoint, twice == sides),
            (2, 1) => (LocalRelationKind::StrictTwoPairs, twice < sides),
            _ => (LocalRelationKind::StrictSinglePair, twice < sides),
        };
        local_relations.push(LocalRelation { k, kind, holds });
    }
    singleton_abscissae.push(len);
    let vertex_criterion_holds = convexity.vertex_abscissae == singleton_abscissae;
    Ok(ArithmeticAnalysis {
        polygon,
        convexity,
        singleton_abscissae,
        vertex_criterion_holds,
        local_relations,
        threshold,
        threshold_met,
    })
}

/// `max_k (arithmetic(k) - hodge(k))`.
pub fn hodge_gap(p: u64, shape: &IntervalShape) -> Result<RationalValue> {
    let arith = arithmetic_polygon(p, shape)?;
    let hodge = hodge_polygon(shape);
    if arith.len() != hodge.len() {
        return Err(LabError::LengthMismatch {
            left: arith.len(),
            right: hodge.len(),
        });
    }
    Ok(arith
        .ordinates()
        .iter()
        .zip(hodge.ordinates())
        .map(|(a, h)| a - h)
        .max()
        .expect("nonempty"))
}
