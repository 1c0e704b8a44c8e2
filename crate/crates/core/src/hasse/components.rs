use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

use super::artin::{artin_hasse, ArtinHasseSeries};
use super::sparse::{Exponents, SparseFpPolynomial};
use crate::arith::{floor_div, frac_numer};
use crate::error::{LabError, Result};
use crate::polygons::{minimizing_pairs, IndexPair, IntervalShape, Threshold};

/// `r_i` for `i` in `-m..=-1` and `1..=n`, stored at position `i + m`
/// (position `m` is unused and holds 0).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RVector {
    pub m: u32,
    pub n: u32,
    values: Vec<i64>,
}

impl RVector {
    pub fn get(&self, i: i32) -> i64 {
        assert!(i != 0 && -(self.m as i32) <= i && i <= self.n as i32);
        self.values[(i + self.m as i32) as usize]
    }
}

/// A permutation of `-m..=n` fixing 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ConstrainedPermutation {
    pub m: u32,
    pub n: u32,
    images: Vec<i32>,
}

impl ConstrainedPermutation {
    pub fn from_images(m: u32, n: u32, images: Vec<i32>) -> Result<Self> {
        let len = (m + n + 1) as usize;
        let mut seen = vec![false; len];
        for &v in &images {
            let pos = v + m as i32;
            if images.len() != len || pos < 0 || pos as usize >= len || seen[pos as usize] {
                return Err(LabError::Invalid(format!(
                    "{images:?} is not a permutation of -{m}..={n}"
                )));
            }
            seen[pos as usize] = true;
        }
        Ok(ConstrainedPermutation { m, n, images })
    }

    pub fn image(&self, i: i32) -> i32 {
        self.images[(i + self.m as i32) as usize]
    }

    /// Images of `-m..=n` in order.
    pub fn images(&self) -> &[i32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(pos, &v)| v == pos as i32 - self.m as i32)
    }

    pub fn sign(&self) -> i32 {
        let mut visited = vec![false; self.images.len()];
        let mut sign = 1;
        for start in 0..self.images.len() {
            let mut len = 0;
            let mut pos = start;
            while !visited[pos] {
                visited[pos] = true;
                pos = (self.images[pos] + self.m as i32) as usize;
                len += 1;
            }
            if len > 0 && len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }
}

fn singleton_pair(p: u64, shape: &IntervalShape, k: u32) -> Result<IndexPair> {
    if shape.e() == 0 {
        return Err(LabError::OutOfRange("Hasse components need e > 0".into()));
    }
    let v = minimizing_pairs(p, shape, k)?;
    v.singleton()
        .ok_or(LabError::NotSingleton { k, size: v.len() })
}

pub fn r_vector(p: u64, shape: &IntervalShape, k: u32) -> Result<RVector> {
    let IndexPair { m, n } = singleton_pair(p, shape, k)?;
    let (d, e, p) = (shape.d() as i64, shape.e() as i64, p as i64);
    let (mi, ni) = (m as i64, n as i64);
    let mut values = vec![0; (m + n + 1) as usize];
    for i in -mi..=ni {
        let r = match i.cmp(&0) {
            Ordering::Greater => ni - frac_numer(-(p * i - ni), d) + d,
            Ordering::Less => mi - frac_numer(p * i + mi, e) + e,
            Ordering::Equal => continue,
        };
        values[(i + mi) as usize] = r;
    }
    let rv = RVector { m, n, values };
    let pos: Vec<i64> = (1..=n as i32).map(|i| rv.get(i)).collect();
    let neg: Vec<i64> = (1..=m as i32).map(|i| rv.get(-i)).collect();
    for (vals, bound) in [(&pos, ni + d), (&neg, mi + e)] {
        let mut sorted = vals.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != vals.len() || vals.iter().any(|&r| r > bound) {
            return Err(LabError::HasseDiagnostic(format!(
                "r-values {vals:?} violate distinctness or bound {bound}"
            )));
        }
    }
    Ok(rv)
}

/// Inclusive range of admissible images for index `i`.
fn admissible(r: &RVector, shape: &IntervalShape, i: i32) -> (i32, i32) {
    let (m, n) = (r.m as i32, r.n as i32);
    match i.cmp(&0) {
        Ordering::Greater => (((r.get(i) - shape.d() as i64) as i32).max(-m), n),
        Ordering::Less => (-m, ((shape.e() as i64 - r.get(i)) as i32).min(n)),
        Ordering::Equal => (0, 0),
    }
}

/// Every permutation in `S_k`, sorted by image vector.
pub fn enumerate_sk(p: u64, shape: &IntervalShape, k: u32) -> Result<Vec<ConstrainedPermutation>> {
    let r = r_vector(p, shape, k)?;
    let (m, n) = (r.m as i32, r.n as i32);
    let ranges: Vec<(i32, i32)> = (-m..=n).map(|i| admissible(&r, shape, i)).collect();
    // most constrained index first
    let mut order: Vec<usize> = (0..ranges.len()).collect();
    order.sort_by_key(|&pos| (ranges[pos].1 - ranges[pos].0, pos));
    let mut images = vec![0i32; ranges.len()];
    let mut used = vec![false; ranges.len()];
    let mut out = Vec::new();
    fn go(
        depth: usize,
        order: &[usize],
        ranges: &[(i32, i32)],
        m: i32,
        images: &mut Vec<i32>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<i32>>,
    ) {
        if depth == order.len() {
            out.push(images.clone());
            return;
        }
        let pos = order[depth];
        let (lo, hi) = ranges[pos];
        for v in lo..=hi {
            let slot = (v + m) as usize;
            if used[slot] {
                continue;
            }
            used[slot] = true;
            images[pos] = v;
            go(depth + 1, order, ranges, m, images, used, out);
            used[slot] = false;
        }
    }
    go(0, &order, &ranges, m, &mut images, &mut used, &mut out);
    out.sort();
    out.into_iter()
        .map(|imgs| ConstrainedPermutation::from_images(r.m, r.n, imgs))
        .collect()
}

/// The permutation sending the `j`-th largest positive `r` to `n + 1 - j`
/// and the `j`-th largest negative `r` to `-(m + 1 - j)`.
pub fn tau_zero(r: &RVector) -> ConstrainedPermutation {
    let (m, n) = (r.m as i32, r.n as i32);
    let mut images = vec![0; (m + n + 1) as usize];
    let mut pos: Vec<i32> = (1..=n).collect();
    pos.sort_by_key(|&i| std::cmp::Reverse(r.get(i)));
    for (j, &i) in pos.iter().enumerate() {
        images[(i + m) as usize] = n - j as i32;
    }
    let mut neg: Vec<i32> = (1..=m).map(|i| -i).collect();
    neg.sort_by_key(|&i| std::cmp::Reverse(r.get(i)));
    for (j, &i) in neg.iter().enumerate() {
        images[(i + m) as usize] = -(m - j as i32);
    }
    ConstrainedPermutation::from_images(r.m, r.n, images).expect("tau_0 is a permutation")
}

/// Subscripts of the monomial attached to `tau`, positive then negative.
pub fn tau_monomial(r: &RVector, tau: &ConstrainedPermutation) -> (Vec<i32>, Vec<i32>) {
    let pos = (1..=r.n as i32)
        .map(|i| (r.get(i) - tau.image(i) as i64) as i32)
        .collect();
    let neg = (1..=r.m as i32)
        .map(|i| (-r.get(-i) - tau.image(-i) as i64) as i32)
        .collect();
    (pos, neg)
}

fn lambda_pair(series: &ArtinHasseSeries, num: i64, den: i64) -> Result<u64> {
    let fl = floor_div(num, den);
    if fl < 0 {
        return Err(LabError::HasseDiagnostic(format!(
            "negative Artin-Hasse index {num}/{den}"
        )));
    }
    let frac_index = usize::from(frac_numer(num, den) != 0);
    let p = series.p();
    Ok(series.coeff_mod(fl as usize, p) * series.coeff_mod(frac_index, p) % p)
}

fn lambda_bound(p: u64, shape: &IntervalShape) -> usize {
    let dmin = shape.d().min(shape.e()).max(1) as u64;
    (p * (shape.d() + shape.e()) as u64 / dmin) as usize + 2
}

fn u_tau_with(
    series: &ArtinHasseSeries,
    shape: &IntervalShape,
    tau: &ConstrainedPermutation,
) -> Result<u64> {
    let p = series.p();
    let pi = p as i64;
    let mut acc = 1u64;
    for i in 1..=tau.n as i64 {
        acc =
            acc * lambda_pair(
                series,
                pi * i - tau.image(i as i32) as i64,
                shape.d() as i64,
            )? % p;
    }
    for i in 1..=tau.m as i64 {
        acc =
            acc * lambda_pair(
                series,
                pi * i + tau.image(-i as i32) as i64,
                shape.e() as i64,
            )? % p;
    }
    if tau.sign() < 0 {
        acc = (p - acc) % p;
    }
    Ok(acc)
}

/// `u_tau mod p`; a zero value is reported as a diagnostic.
pub fn unit_u_tau(
    p: u64,
    shape: &IntervalShape,
    k: u32,
    tau: &ConstrainedPermutation,
) -> Result<u64> {
    let r = r_vector(p, shape, k)?;
    if (tau.m, tau.n) != (r.m, r.n) {
        return Err(LabError::Invalid(
            "permutation domain does not match V_k".into(),
        ));
    }
    let series = artin_hasse(p, lambda_bound(p, shape))?;
    let u = u_tau_with(&series, shape, tau)?;
    if u == 0 {
        return Err(LabError::HasseDiagnostic(format!(
            "u_tau vanishes mod {p} at k = {k}"
        )));
    }
    Ok(u)
}

/// Everything computed for one `k` with singleton `V_k`.
#[derive(Clone, Debug)]
pub struct HasseComponent {
    pub k: u32,
    pub pair: IndexPair,
    pub r: RVector,
    pub permutations: Vec<ConstrainedPermutation>,
    pub units: Vec<u64>,
    pub polynomial: SparseFpPolynomial,
}

fn build_component(
    p: u64,
    shape: &IntervalShape,
    k: u32,
    series: &ArtinHasseSeries,
) -> Result<HasseComponent> {
    let r = r_vector(p, shape, k)?;
    let perms = enumerate_sk(p, shape, k)?;
    let mut poly = SparseFpPolynomial::zero(p, *shape);
    let mut units = Vec::with_capacity(perms.len());
    for tau in &perms {
        let u = u_tau_with(series, shape, tau)?;
        if u == 0 {
            return Err(LabError::HasseDiagnostic(format!(
                "u_tau vanishes mod {p} at k = {k} for {tau:?}"
            )));
        }
        units.push(u);
        let (pos, neg) = tau_monomial(&r, tau);
        let subs: Vec<i32> = pos.into_iter().chain(neg).collect();
        let mono = SparseFpPolynomial::monomial(p, *shape, &subs, u)?;
        for (exps, c) in mono.terms() {
            poly.add_term(exps.clone(), *c);
        }
    }
    if poly.is_zero() {
        return Err(LabError::HasseDiagnostic(format!("H_{k} vanishes mod {p}")));
    }
    Ok(HasseComponent {
        k,
        pair: IndexPair { m: r.m, n: r.n },
        r,
        permutations: perms,
        units,
        polynomial: poly,
    })
}

/// `H_k mod p`.
pub fn hasse_component(p: u64, shape: &IntervalShape, k: u32) -> Result<SparseFpPolynomial> {
    let series = artin_hasse(p, lambda_bound(p, shape))?;
    Ok(build_component(p, shape, k, &series)?.polynomial)
}

/// `H` together with its factors.
#[derive(Clone, Debug)]
pub struct HasseReport {
    pub p: u64,
    pub shape: IntervalShape,
    pub polynomial: SparseFpPolynomial,
    pub components: Vec<HasseComponent>,
    /// `p < 3D`: the characterization of genericity is not covered.
    pub threshold_warning: bool,
}

pub fn hasse_report(p: u64, shape: &IntervalShape) -> Result<HasseReport> {
    shape.check_prime(p)?;
    if shape.e() == 0 {
        return Err(LabError::OutOfRange(
            "the Hasse polynomial is defined for e > 0".into(),
        ));
    }
    let series = artin_hasse(p, lambda_bound(p, shape))?;
    let (d, e) = (shape.d() as i32, shape.e() as i32);
    let mut poly = SparseFpPolynomial::monomial(p, *shape, &[d, -e], 1)?;
    let mut components = Vec::new();
    for k in 1..shape.d() + shape.e() {
        if minimizing_pairs(p, shape, k)?.singleton().is_none() {
            continue;
        }
        let c = build_component(p, shape, k, &series)?;
        poly = poly.mul(&c.polynomial);
        components.push(c);
    }
    if poly.is_zero() {
        return Err(LabError::HasseDiagnostic(format!("H vanishes mod {p}")));
    }
    Ok(HasseReport {
        p,
        shape: *shape,
        polynomial: poly,
        components,
        threshold_warning: !Threshold::AtLeast3D.met(p, shape),
    })
}

pub fn hasse_polynomial(p: u64, shape: &IntervalShape) -> Result<SparseFpPolynomial> {
    Ok(hasse_report(p, shape)?.polynomial)
}

/// The minimal monomial of `H_k` and how often it occurs among `S_k`.
#[derive(Clone, Debug)]
pub struct MinimalMonomial {
    pub exponents: Exponents,
    pub multiplicity: usize,
    pub tau_zero: ConstrainedPermutation,
    pub tau_zero_attains: bool,
}

/// Descending subscript magnitudes: the comparison key of one sign part.
fn part_key(subs: &[i32]) -> Vec<u32> {
    let mut key: Vec<u32> = subs.iter().map(|s| s.unsigned_abs()).collect();
    key.sort_by(|a, b| b.cmp(a));
    key
}

pub fn minimal_monomial(p: u64, shape: &IntervalShape, k: u32) -> Result<MinimalMonomial> {
    let r = r_vector(p, shape, k)?;
    let perms = enumerate_sk(p, shape, k)?;
    let tau0 = tau_zero(&r);
    let keyed: Vec<(Vec<u32>, Vec<u32>, Exponents)> = perms
        .iter()
        .map(|tau| {
            let (pos, neg) = tau_monomial(&r, tau);
            let subs: Vec<i32> = pos.iter().chain(&neg).copied().collect();
            let mono =
                SparseFpPolynomial::monomial(p, *shape, &subs, 1).expect("subscripts in range");
            let exps = mono
                .terms()
                .keys()
                .next()
                .expect("nonzero monomial")
                .clone();
            (part_key(&pos), part_key(&neg), exps)
        })
        .collect();
    let min_pos = keyed
        .iter()
        .map(|k| &k.0)
        .min()
        .ok_or(LabError::HasseDiagnostic(format!("S_{k} is empty")))?;
    let min_neg = keyed.iter().map(|k| &k.1).min().expect("nonempty");
    let mut counts: BTreeMap<&Exponents, usize> = BTreeMap::new();
    for (pk, nk, exps) in &keyed {
        if pk == min_pos && nk == min_neg {
            *counts.entry(exps).or_default() += 1;
        }
    }
    let (exps, multiplicity) = match counts.len() {
        1 => counts.into_iter().next().unwrap(),
        0 => {
            return Err(LabError::HasseDiagnostic(format!(
                "no monomial of H_{k} is minimal in both sign parts; minima are incomparable"
            )))
        }
        _ => unreachable!("the keys determine the monomial"),
    };
    let (pos0, neg0) = tau_monomial(&r, &tau0);
    let tau_zero_attains =
        perms.contains(&tau0) && part_key(&pos0) == *min_pos && part_key(&neg0) == *min_neg;
    Ok(MinimalMonomial {
        exponents: exps.clone(),
        multiplicity,
        tau_zero: tau0,
        tau_zero_attains,
    })
}
