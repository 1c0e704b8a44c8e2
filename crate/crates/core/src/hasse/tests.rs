use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::*;
use crate::oracle::LaurentCoeffVector;
use crate::polygons::{minimizing_pairs, IntervalShape};

fn shape(d: u32, e: u32) -> IntervalShape {
    IntervalShape::new(d, e).unwrap()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `exp(g)` as `sum_k g^k / k!`, truncated at degree `n`.
fn artin_hasse_by_exponential(p: u64, n: usize) -> Vec<BigRational> {
    let mut g = vec![BigRational::zero(); n + 1];
    let mut pi = 1usize;
    while pi <= n {
        g[pi] = rat(1, pi as i64);
        pi *= p as usize;
    }
    let mut out = vec![BigRational::zero(); n + 1];
    let mut power = vec![BigRational::zero(); n + 1];
    power[0] = BigRational::one();
    let mut fact = BigRational::one();
    for k in 0..=n {
        if k > 0 {
            fact *= rat(k as i64, 1);
            let mut next = vec![BigRational::zero(); n + 1];
            for (i, a) in power.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in g.iter().enumerate().take(n + 1 - i) {
                    next[i + j] += a * b;
                }
            }
            power = next;
        }
        for i in 0..=n {
            out[i] += &power[i] / &fact;
        }
    }
    out
}

fn modp(r: &BigRational, p: u64) -> u64 {
    reduce_rational(r, p).unwrap()
}

/// Literal membership test for `S_k` with exact fractional parts.
fn in_sk_literal(p: i64, d: i64, e: i64, m: i64, n: i64, i: i64, t: i64) -> bool {
    let frac = |x: BigRational| &x - x.floor();
    if i > 0 {
        let bound = rat(n, 1) - rat(d, 1) * frac(rat(-(p * i - n), d));
        rat(t, 1) >= bound
    } else if i < 0 {
        let bound = rat(-m, 1) + rat(e, 1) * frac(rat(p * i + m, e));
        rat(t, 1) <= bound
    } else {
        t == 0
    }
}

fn permutations(items: &[i64]) -> Vec<Vec<i64>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (idx, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(idx);
        for mut tail in permutations(&rest) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

fn sign_of(perm: &[i64]) -> i64 {
    let mut inv = 0;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Independent `H_k mod p`: brute force over all permutations, exact
/// rational `lambda` from the exponential, literal formulas throughout.
fn brute_component(p: u64, sh: &IntervalShape, k: u32) -> (usize, SparseFpPolynomial) {
    let pair = minimizing_pairs(p, sh, k).unwrap().singleton().unwrap();
    let (m, n) = (pair.m as i64, pair.n as i64);
    let (d, e, pi) = (sh.d() as i64, sh.e() as i64, p as i64);
    let lam = artin_hasse_by_exponential(p, p as usize + 2);
    let frac_ceil = |num: i64, den: i64| if num % den == 0 { 0usize } else { 1 };
    let r = |i: i64| -> i64 {
        let frac_times = |num: i64, den: i64| num.rem_euclid(den);
        if i > 0 {
            n - frac_times(-(pi * i - n), d) + d
        } else {
            m - frac_times(pi * i + m, e) + e
        }
    };
    let domain: Vec<i64> = (-m..=n).collect();
    let mut poly = SparseFpPolynomial::zero(p, *sh);
    let mut count = 0;
    for perm in permutations(&domain) {
        let tau = |i: i64| perm[(i + m) as usize];
        if !domain
            .iter()
            .all(|&i| in_sk_literal(pi, d, e, m, n, i, tau(i)))
        {
            continue;
        }
        count += 1;
        let mut u = rat(sign_of(&perm), 1);
        let mut subs = Vec::new();
        for i in 1..=n {
            let x = pi * i - tau(i);
            u *= &lam[x.div_euclid(d) as usize] * &lam[frac_ceil(x, d)];
            subs.push((r(i) - tau(i)) as i32);
        }
        for i in -m..=-1 {
            let x = -pi * i + tau(i);
            u *= &lam[x.div_euclid(e) as usize] * &lam[frac_ceil(x, e)];
            subs.push((-r(i) - tau(i)) as i32);
        }
        let mono = SparseFpPolynomial::monomial(p, *sh, &subs, modp(&u, p)).unwrap();
        for (ex, c) in mono.terms() {
            poly.add_term(ex.clone(), *c);
        }
    }
    (count, poly)
}

#[test]
fn artin_hasse_examples() {
    let s = artin_hasse(7, 10).unwrap();
    assert_eq!(s.coeff(0), &BigRational::one());
    assert_eq!(s.coeff(2), &rat(1, 2));
    assert_eq!(artin_hasse(3, 3).unwrap().coeff(3), &rat(1, 2));
    assert_eq!(lambda_mod_p(7, 0).unwrap(), 1);
    assert_eq!(lambda_mod_p(7, 3).unwrap(), 6);
    assert_eq!(lambda_mod_p(11, 7).unwrap(), 6);
    assert!(artin_hasse(4, 3).is_err());
}

#[test]
fn artin_hasse_matches_exponential() {
    for p in [2u64, 3, 5, 7] {
        let n = 40;
        let rec = artin_hasse(p, n).unwrap();
        assert_eq!(rec.coeffs(), artin_hasse_by_exponential(p, n).as_slice());
        let mut fact = BigRational::one();
        for k in 0..(p as usize).min(n + 1) {
            if k > 0 {
                fact *= rat(k as i64, 1);
            }
            assert_eq!(rec.coeff(k), &fact.recip());
        }
    }
}

#[test]
fn r_vector_examples() {
    assert_eq!(r_vector(7, &shape(2, 1), 2).unwrap().get(1), 3);
    let r = r_vector(11, &shape(3, 1), 3).unwrap();
    assert_eq!((r.get(1), r.get(2)), (5, 4));
    assert_eq!(r_vector(11, &shape(3, 1), 2).unwrap().get(1), 2);
}

#[test]
fn enumerate_examples() {
    let s = enumerate_sk(7, &shape(2, 1), 2).unwrap();
    assert_eq!(s.len(), 1);
    assert!(s[0].is_identity());
    let s = enumerate_sk(11, &shape(3, 1), 3).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!((s[0].image(1), s[0].image(2), s[0].image(0)), (2, 1, 0));
    assert_eq!(s[0].sign(), -1);
    let s = enumerate_sk(11, &shape(3, 1), 1).unwrap();
    assert_eq!(s.len(), 1);
    assert!(s[0].is_identity() && s[0].images() == [0]);
}

#[test]
fn unit_examples() {
    let sh = shape(2, 1);
    let id = &enumerate_sk(7, &sh, 2).unwrap()[0];
    assert_eq!(unit_u_tau(7, &sh, 2, id).unwrap(), 6);
    let id1 = &enumerate_sk(7, &sh, 1).unwrap()[0];
    assert_eq!(unit_u_tau(7, &sh, 1, id1).unwrap(), 1);
    let sh = shape(3, 1);
    let swap = &enumerate_sk(11, &sh, 3).unwrap()[0];
    assert_eq!(unit_u_tau(11, &sh, 3, swap).unwrap(), 10);
}

#[test]
fn component_examples() {
    assert_eq!(
        hasse_component(7, &shape(2, 1), 2).unwrap().to_string(),
        "6·x_2"
    );
    assert_eq!(
        hasse_component(11, &shape(3, 1), 2).unwrap().to_string(),
        "2·x_1"
    );
    assert_eq!(
        hasse_component(11, &shape(3, 1), 3).unwrap().to_string(),
        "10·x_3²"
    );
}

#[test]
fn hasse_polynomial_examples() {
    let h = hasse_polynomial(7, &shape(2, 1)).unwrap();
    assert_eq!(h.to_string(), "6·x_2²·x_{-1}");
    // x_3 x_{-1} (2 x_1)(10 x_3^2): total degree 2 + 1 + 2 = 5
    let sh = shape(3, 1);
    let h = hasse_polynomial(11, &sh).unwrap();
    assert_eq!(h.to_string(), "9·x_1·x_3³·x_{-1}");
    assert_eq!(h.total_degrees(), vec![5]);
    let report = hasse_report(7, &shape(3, 2)).unwrap();
    assert!(report.threshold_warning);
    assert!(!hasse_report(11, &sh).unwrap().threshold_warning);
}

#[test]
fn evaluation_examples() {
    let sh = shape(3, 1);
    let h = hasse_polynomial(11, &sh).unwrap();
    let at = |a: &[i64]| {
        h.evaluate(&LaurentCoeffVector::from_residues(11, sh, a).unwrap())
            .unwrap()
            .0[0]
    };
    assert_eq!(at(&[1, 1, 0, 0, 1]), 0);
    assert_eq!(at(&[1, 1, 1, 5, 1]), 9);
    let base = SparseFpPolynomial::monomial(11, sh, &[3, -1], 1).unwrap();
    assert_eq!(
        base.evaluate(&LaurentCoeffVector::from_residues(11, sh, &[1, 1, 0, 0, 1]).unwrap())
            .unwrap()
            .0,
        vec![1]
    );
    // a_d = 0 is rejected before evaluation, and the factor x_d kills H there
    let mut zero_d = SparseFpPolynomial::constant(11, sh, 0);
    assert!(zero_d.is_zero());
    zero_d.add_term(vec![0; 5], 3);
    assert_eq!(zero_d.to_string(), "3");
}

#[test]
fn json_round_trip() {
    let h = hasse_polynomial(11, &shape(3, 1)).unwrap();
    let v = h.to_json();
    assert_eq!(v["terms"][0]["exponents"]["3"], 3);
    assert_eq!(v["terms"][0]["exponents"]["-1"], 1);
    assert_eq!(SparseFpPolynomial::from_json(&v).unwrap(), h);
}

#[test]
fn minimal_monomial_examples() {
    let mm = minimal_monomial(7, &shape(2, 1), 2).unwrap();
    assert_eq!(
        SparseFpPolynomial::format_monomial(&shape(2, 1), &mm.exponents),
        "x_2"
    );
    assert_eq!(mm.multiplicity, 1);
    let mm = minimal_monomial(11, &shape(3, 1), 3).unwrap();
    assert_eq!(
        SparseFpPolynomial::format_monomial(&shape(3, 1), &mm.exponents),
        "x_3²"
    );
    assert_eq!(mm.multiplicity, 1);
    assert!(mm.tau_zero_attains);
}

#[test]
fn components_match_brute_force_on_small_grid() {
    let mut checked = 0;
    for p in [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43] {
        for d in 1..=5u32 {
            for e in 1..=4u32 {
                let sh = shape(d, e);
                if sh.check_prime(p).is_err() {
                    continue;
                }
                for k in 1..d + e {
                    let Some(pair) = minimizing_pairs(p, &sh, k).unwrap().singleton() else {
                        continue;
                    };
                    if pair.m + pair.n + 1 > 7 {
                        continue;
                    }
                    let perms = enumerate_sk(p, &sh, k).unwrap();
                    let (count, brute) = brute_component(p, &sh, k);
                    assert_eq!(perms.len(), count, "|S_k| at p={p} d={d} e={e} k={k}");
                    match hasse_component(p, &sh, k) {
                        Ok(h) => assert_eq!(h, brute, "H_k at p={p} d={d} e={e} k={k}"),
                        Err(_) => assert!(brute.is_zero()),
                    }
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 200);
}

#[test]
fn grid_properties_above_threshold() {
    for p in (5u64..=61).filter(|&p| crate::arith::is_prime(p)) {
        for d in 2..=6u32 {
            for e in 1..d {
                let sh = shape(d, e);
                if sh.check_prime(p).is_err() || p <= 3 * sh.big_d() {
                    continue;
                }
                let report = hasse_report(p, &sh).unwrap();
                assert!(!report.polynomial.is_zero());
                for c in &report.components {
                    assert!(c.units.iter().all(|&u| u != 0));
                    assert!(c
                        .polynomial
                        .total_degrees()
                        .iter()
                        .all(|&t| t == c.pair.m + c.pair.n));
                    let r = &c.r;
                    let tau0 = tau_zero(r);
                    assert!(c.permutations.contains(&tau0));
                    let mm = minimal_monomial(p, &sh, c.k).unwrap();
                    assert_eq!(mm.multiplicity, 1, "p={p} d={d} e={e} k={}", c.k);
                    assert!(mm.tau_zero_attains);
                    assert!(c.polynomial.terms().contains_key(&mm.exponents));
                }
            }
        }
    }
}
