use proptest::prelude::*;

use super::*;
use crate::arith::is_prime;
use crate::error::LabError;

fn r(n: i64, d: i64) -> RationalValue {
    RationalValue::new(n, d)
}

fn shape(d: u32, e: u32) -> IntervalShape {
    IntervalShape::new(d, e).unwrap()
}

/// Independent evaluation of the arithmetic polygon straight from its
/// definition: integer ceiling by search, every `(m, n)` enumerated, pair
/// membership tested with `f64`-free cross-multiplication in a different
/// arrangement than the library. Returns `(p - 1) * ordinate` as integers
/// with the common denominator `2 (p - 1)`.
fn direct_arithmetic(p: i64, d: i64, e: i64) -> Vec<(i64, i64)> {
    fn ceil_by_search(a: i64, b: i64) -> i64 {
        let mut c = -(a.abs() + b) / b - 2;
        while c * b < a {
            c += 1;
        }
        c
    }
    let unit = |deg: i64, n: i64| -> i64 { (1..=n).map(|i| ceil_by_search(p * i - n, deg)).sum() };
    let mut out = vec![(0, 1)];
    for k in 1..d + e {
        let mut best: Option<i64> = None;
        for m in 0..e {
            for n in 0..d {
                if m + n + 1 != k {
                    continue;
                }
                // -1/e <= m/e - n/d  <=>  n e <= (m + 1) d ;  m/e - n/d <= 1/d  <=>  m d <= (n + 1) e
                if n * e <= (m + 1) * d && m * d <= (n + 1) * e {
                    let v = unit(e, m) + unit(d, n);
                    best = Some(best.map_or(v, |b: i64| b.min(v)));
                }
            }
        }
        out.push((best.unwrap(), p - 1));
    }
    out.push((d + e, 2));
    out
}

#[test]
fn direct_oracle_freezes_acceptance_values() {
    let to_r = |v: Vec<(i64, i64)>| v.into_iter().map(|(a, b)| r(a, b)).collect::<Vec<_>>();
    assert_eq!(
        to_r(direct_arithmetic(7, 2, 1)),
        vec![r(0, 1), r(0, 1), r(1, 2), r(3, 2)]
    );
    assert_eq!(
        to_r(direct_arithmetic(11, 3, 1)),
        vec![r(0, 1), r(0, 1), r(2, 5), r(1, 1), r(2, 1)]
    );
}

#[test]
fn degree_examples() {
    let s = shape(3, 2);
    assert_eq!(degree(0, &s).unwrap(), r(0, 1));
    assert_eq!(degree(3, &s).unwrap(), r(1, 1));
    assert_eq!(degree(-2, &s).unwrap(), r(1, 1));
    assert_eq!(degree(-5, &s).unwrap(), r(5, 2));
    assert!(matches!(
        degree(-1, &shape(3, 0)),
        Err(LabError::OutOfRange(_))
    ));
}

#[test]
fn hodge_examples() {
    assert_eq!(hodge_polygon(&shape(2, 0)).to_string(), "(0,0),(1,1/2)");
    assert_eq!(
        hodge_polygon(&shape(2, 1)).to_string(),
        "(0,0),(1,0),(2,1/2),(3,3/2)"
    );
    assert_eq!(hodge_polygon(&shape(1, 1)).to_string(), "(0,0),(1,0),(2,1)");
    assert_eq!(
        hodge_polygon(&shape(3, 1)).to_string(),
        "(0,0),(1,0),(2,1/3),(3,1),(4,2)"
    );
}

#[test]
fn p_unit_examples() {
    assert_eq!(p_unit(7, 2, 0).unwrap(), r(0, 1));
    assert_eq!(p_unit(7, 2, 1).unwrap(), r(1, 2));
    assert_eq!(p_unit(11, 3, 1).unwrap(), r(2, 5));
    assert!(p_unit(7, 2, 3).is_err());
}

#[test]
fn index_pair_examples() {
    let pairs = |d, e, k| {
        index_pairs(&shape(d, e), k)
            .unwrap()
            .pairs
            .iter()
            .map(|p| (p.m, p.n))
            .collect::<Vec<_>>()
    };
    assert_eq!(pairs(2, 1, 1), vec![(0, 0)]);
    assert_eq!(pairs(2, 1, 2), vec![(0, 1)]);
    assert_eq!(pairs(2, 2, 2), vec![(0, 1), (1, 0)]);
    assert!(index_pairs(&shape(2, 1), 3).is_err());
    assert!(index_pairs(&shape(2, 1), 0).is_err());
    assert!(index_pairs(&shape(2, 0), 1).is_err());
}

#[test]
fn minimizing_pair_examples() {
    let v = |p, d, e, k| {
        minimizing_pairs(p, &shape(d, e), k)
            .unwrap()
            .pairs
            .iter()
            .map(|p| (p.m, p.n))
            .collect::<Vec<_>>()
    };
    assert_eq!(v(7, 2, 1, 2), vec![(0, 1)]);
    assert_eq!(v(7, 2, 2, 2), vec![(0, 1), (1, 0)]);
    assert_eq!(v(11, 3, 1, 3), vec![(0, 2)]);
}

#[test]
fn arithmetic_examples() {
    let a = arithmetic_polygon(7, &shape(2, 1)).unwrap();
    assert_eq!(a.to_string(), "(0,0),(1,0),(2,1/2),(3,3/2)");
    assert_eq!(a, hodge_polygon(&shape(2, 1)));
    let a = arithmetic_polygon(11, &shape(3, 1)).unwrap();
    assert_eq!(a.to_string(), "(0,0),(1,0),(2,2/5),(3,1),(4,2)");
    // e = 0: the polynomial-case polygon
    assert_eq!(
        arithmetic_polygon(11, &shape(3, 0)).unwrap().to_string(),
        "(0,0),(1,2/5),(2,1)"
    );
    assert!(matches!(
        arithmetic_polygon(6, &shape(2, 1)),
        Err(LabError::NotPrime(6))
    ));
    assert!(matches!(
        arithmetic_polygon(3, &shape(3, 1)),
        Err(LabError::PrimeDividesD { .. })
    ));
}

#[test]
fn convexity_examples() {
    let rep = convexity_report(&hodge_polygon(&shape(2, 1)));
    assert!(rep.is_convex);
    assert_eq!(rep.vertex_abscissae, vec![0, 1, 2, 3]);

    let an = analyze_arithmetic_polygon(7, &shape(2, 2)).unwrap();
    assert!(!an.convexity.vertex_abscissae.contains(&2));
    assert_eq!(an.local_relations[1].kind, LocalRelationKind::Midpoint);
    assert!(!an.convexity.threshold_warning);
    assert!(an.all_hold());
}

#[test]
fn threshold_warning_tracks_three_d() {
    // D = 2, 3D = 6 < 7: no warning; D = 6 for (3,2): 7 <= 18, warning
    assert!(
        !analyze_arithmetic_polygon(7, &shape(2, 1))
            .unwrap()
            .convexity
            .threshold_warning
    );
    assert!(
        analyze_arithmetic_polygon(7, &shape(3, 2))
            .unwrap()
            .convexity
            .threshold_warning
    );
}

#[test]
fn lies_on_or_above_examples() {
    let a = arithmetic_polygon(11, &shape(3, 1)).unwrap();
    let h = hodge_polygon(&shape(3, 1));
    assert!(lies_on_or_above(&a, &a).unwrap());
    assert!(lies_on_or_above(&a, &h).unwrap());
    assert!(a.ordinate(2) > h.ordinate(2));
    assert_eq!(a.ordinate(2), &r(2, 5));
    assert_eq!(h.ordinate(2), &r(1, 3));
    let a13 = arithmetic_polygon(13, &shape(3, 1)).unwrap();
    assert!(lies_on_or_above(&a13, &h).unwrap() && a13 == h);
}

fn grid() -> Vec<(u64, u32, u32)> {
    let mut out = Vec::new();
    for p in (5..=101).filter(|&p| is_prime(p)) {
        for d in 1..=6 {
            for e in 1..=6 {
                let s = shape(d, e);
                if !s.big_d().is_multiple_of(p) {
                    out.push((p, d, e));
                }
            }
        }
    }
    out
}

#[test]
fn lemma_two_pair_structure() {
    for d in 1..=8 {
        for e in 1..=8 {
            let s = shape(d, e);
            for k in 1..d + e {
                let ik = index_pairs(&s, k).unwrap();
                assert!(matches!(ik.len(), 1 | 2), "|I_{k}| for ({d},{e})");
                if let [a, b] = ik.pairs.as_slice() {
                    assert_eq!((b.m, b.n + 1), (a.m + 1, a.n));
                    assert_eq!((a.m as u64 + 1) * d as u64, a.n as u64 * e as u64);
                }
                if let Some(only) = ik.singleton() {
                    let t = only.m as i64 * d as i64 - only.n as i64 * e as i64;
                    assert!(-(d as i64) < t && t < e as i64);
                }
            }
        }
    }
}

#[test]
fn arithmetic_matches_direct_oracle_on_grid() {
    for (p, d, e) in grid() {
        let lib = arithmetic_polygon(p, &shape(d, e)).unwrap();
        let direct: Vec<RationalValue> = direct_arithmetic(p as i64, d as i64, e as i64)
            .into_iter()
            .map(|(a, b)| r(a, b))
            .collect();
        assert_eq!(lib.ordinates(), direct.as_slice(), "p={p} d={d} e={e}");
    }
}

#[test]
fn shared_endpoints_and_hodge_bound() {
    for (p, d, e) in grid() {
        let s = shape(d, e);
        let a = arithmetic_polygon(p, &s).unwrap();
        let h = hodge_polygon(&s);
        assert_eq!(a.end_point(), h.end_point());
        assert_eq!(a.ordinate(0), h.ordinate(0));
        assert!(lies_on_or_above(&a, &h).unwrap(), "p={p} d={d} e={e}");
    }
}

#[test]
fn stickelberger_collapse() {
    for (p, d, e) in grid() {
        let s = shape(d, e);
        if p % s.big_d() == 1 {
            assert_eq!(
                arithmetic_polygon(p, &s).unwrap(),
                hodge_polygon(&s),
                "p={p} d={d} e={e}"
            );
        }
    }
    for d in 1..=6 {
        for p in (5..=101).filter(|&p| is_prime(p) && p % d as u64 == 1) {
            let s = shape(d, 0);
            assert_eq!(arithmetic_polygon(p, &s).unwrap(), hodge_polygon(&s));
        }
    }
}

#[test]
fn convexity_and_local_relations_above_three_d() {
    for (p, d, e) in grid() {
        let s = shape(d, e);
        if !Threshold::Above3D.met(p, &s) {
            continue;
        }
        let an = analyze_arithmetic_polygon(p, &s).unwrap();
        assert!(an.all_hold(), "p={p} d={d} e={e}: {:?}", an.local_relations);
    }
}

#[test]
fn convergence_envelope() {
    for (p, d, e) in grid() {
        let s = shape(d, e);
        let gap = hodge_gap(p, &s).unwrap();
        let bound = r(((d + e) * (d + e)) as i64, p as i64 - 1);
        assert!(!gap.is_negative() && gap <= bound, "p={p} d={d} e={e}");
    }
}

proptest! {
    #[test]
    fn hull_is_convex_and_below_inputs(ys in proptest::collection::vec(0i64..20, 2..9)) {
        let len = ys.len() - 1;
        let pts: Vec<(usize, RationalValue)> = ys
            .iter()
            .enumerate()
            .map(|(k, &y)| (k, if k == 0 { r(0, 1) } else { r(y, 3) }))
            .collect();
        let hull = LowerPolygon::lower_hull(&pts, len).unwrap();
        prop_assert!(hull.is_convex());
        for (k, y) in &pts {
            prop_assert!(hull.ordinate(*k) <= y);
        }
        for v in hull.vertices() {
            prop_assert!(pts.iter().any(|(k, y)| *k == v && hull.ordinate(v) == y));
        }
    }
}
