use serde_json::{json, Value};

use super::padic::{PadicCyclotomic, PadicValuation};
use super::splitting::{
    corollary_floor_violations, leading_term_violations, splitting_coeffs, LeadingTermCheck,
    SplittingCoeffs,
};
use crate::error::{LabError, Result};
use crate::oracle::{LPolynomial, LaurentCoeffVector};
use crate::polygons::{degree, IntervalShape, LowerPolygon, RationalValue};

/// `M_{ij} = gamma_{p i - j}` for `i, j` in `[-K, K]`.
#[derive(Clone, Debug)]
pub struct NuclearMatrix {
    pub k: i64,
    entries: Vec<PadicCyclotomic>,
}

impl NuclearMatrix {
    pub fn build(gammas: &SplittingCoeffs, p: u64, k: i64) -> Self {
        let p = p as i64;
        let entries = (-k..=k)
            .flat_map(|i| (-k..=k).map(move |j| (i, j)))
            .map(|(i, j)| gammas.get(p * i - j).clone())
            .collect();
        NuclearMatrix { k, entries }
    }

    pub fn dim(&self) -> usize {
        (2 * self.k + 1) as usize
    }

    pub fn entry(&self, i: i64, j: i64) -> &PadicCyclotomic {
        let n = self.dim();
        &self.entries[(i + self.k) as usize * n + (j + self.k) as usize]
    }

    pub fn trace(&self) -> PadicCyclotomic {
        let mut acc = self.entries[0].sub(&self.entries[0]);
        for i in -self.k..=self.k {
            acc.add_assign(self.entry(i, i));
        }
        acc
    }

    /// `(i, j, valuation)` for every entry.
    pub fn valuation_table(&self) -> Vec<(i64, i64, PadicValuation)> {
        (-self.k..=self.k)
            .flat_map(|i| (-self.k..=self.k).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, self.entry(i, j).valuation()))
            .collect()
    }
}

/// Flat arithmetic on power series over `Z_p[zeta] / p^M` truncated at `t^T`.
struct SeriesRing {
    p: usize,
    modulus: u64,
    len: usize,
}

impl SeriesRing {
    fn width(&self) -> usize {
        (self.p - 1) * self.len
    }

    fn coeff<'a>(&self, s: &'a [u64], i: usize) -> &'a [u64] {
        &s[i * (self.p - 1)..(i + 1) * (self.p - 1)]
    }

    fn is_zero(s: &[u64]) -> bool {
        s.iter().all(|&c| c == 0)
    }

    /// `sum` over degree-`n` products, folded into `out` with sign.
    fn product_terms(&self, a: &[u64], b: &[u64], n: usize, lo: usize) -> Vec<u64> {
        let p = self.p;
        let m = self.modulus as u128;
        let mut acc = vec![0u128; p];
        for i in lo..=n - lo {
            let (x, y) = (self.coeff(a, i), self.coeff(b, n - i));
            if Self::is_zero(x) || Self::is_zero(y) {
                continue;
            }
            for (u, &xu) in x.iter().enumerate() {
                if xu == 0 {
                    continue;
                }
                for (v, &yv) in y.iter().enumerate() {
                    let slot = if u + v >= p { u + v - p } else { u + v };
                    acc[slot] += xu as u128 * yv as u128;
                }
            }
            acc.iter_mut().for_each(|c| *c %= m);
        }
        let top = acc[p - 1];
        acc[..p - 1]
            .iter()
            .map(|&c| ((c + m - top) % m) as u64)
            .collect()
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.width()];
        for n in 0..self.len {
            let c = self.product_terms(a, b, n, 0);
            out[n * (self.p - 1)..(n + 1) * (self.p - 1)].copy_from_slice(&c);
        }
        out
    }

    /// `a -= b * c` where `b` and `c` have zero constant terms.
    fn sub_mul_shifted(&self, a: &mut [u64], b: &[u64], c: &[u64]) {
        let m = self.modulus;
        for n in 2..self.len {
            let prod = self.product_terms(b, c, n, 1);
            for (x, y) in a[n * (self.p - 1)..(n + 1) * (self.p - 1)]
                .iter_mut()
                .zip(prod)
            {
                *x = (*x + m - y) % m;
            }
        }
    }

    /// Inverse of a series with constant term 1.
    fn inverse(&self, a: &[u64]) -> Vec<u64> {
        let w = self.p - 1;
        let m = self.modulus;
        let mut inv = vec![0u64; self.width()];
        inv[0] = 1;
        for n in 1..self.len {
            // inv_n = -sum_{i=1}^{n} a_i inv_{n-i}
            let mut shifted = vec![0u64; self.width()];
            shifted[..n * w].copy_from_slice(&inv[..n * w]);
            let s = self.product_terms(a, &shifted, n, 0);
            for (x, y) in inv[n * w..(n + 1) * w].iter_mut().zip(s) {
                *x = (m - y) % m;
            }
        }
        inv
    }
}

/// Coefficients of `det(1 - t M)` up to `t^(T-1)`.
#[derive(Clone, Debug)]
pub struct CharSeries {
    pub coeffs: Vec<PadicCyclotomic>,
}

impl CharSeries {
    pub fn valuations(&self) -> Vec<PadicValuation> {
        self.coeffs.iter().map(PadicCyclotomic::valuation).collect()
    }
}

/// `det(1 - t M) mod t^len` by fraction-free elimination (every pivot is
/// a unit series).
pub fn fredholm_determinant(matrix: &NuclearMatrix, len: usize) -> Result<CharSeries> {
    let sample = matrix.entry(0, 0);
    let (p, precision) = (sample.p(), sample.precision());
    let ring = SeriesRing {
        p: p as usize,
        modulus: sample.modulus(),
        len,
    };
    let n = matrix.dim();
    let w = p as usize - 1;
    let m = sample.modulus();
    let mut rows: Vec<Vec<Vec<u64>>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let mut s = vec![0u64; ring.width()];
                    if r == c {
                        s[0] = 1;
                    }
                    if len > 1 {
                        let e = matrix.entry(r as i64 - matrix.k, c as i64 - matrix.k);
                        for (x, &y) in s[w..2 * w].iter_mut().zip(e.coords()) {
                            *x = (m - y) % m;
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    let mut det = vec![0u64; ring.width()];
    det[0] = 1;
    for k in 0..n {
        let pivot = rows[k][k].clone();
        det = ring.mul(&det, &pivot);
        let inv = ring.inverse(&pivot);
        let (upper, lower) = rows.split_at_mut(k + 1);
        let pivot_row = &upper[k];
        lower.iter_mut().for_each(|row| {
            if SeriesRing::is_zero(&row[k]) {
                return;
            }
            let factor = ring.mul(&row[k], &inv);
            for c in k + 1..n {
                if !SeriesRing::is_zero(&pivot_row[c]) {
                    ring.sub_mul_shifted(&mut row[c], &factor, &pivot_row[c]);
                }
            }
        });
    }
    let coeffs = (0..len)
        .map(|i| PadicCyclotomic::from_coords(p, precision, ring.coeff(&det, i)))
        .collect::<Result<_>>()?;
    Ok(CharSeries { coeffs })
}

/// The smallest `K` certified for precision `M`.
pub fn minimal_truncation(shape: &IntervalShape, precision: u32) -> i64 {
    precision as i64 * shape.d().max(shape.e()) as i64 - 1
}

fn certify(shape: &IntervalShape, k: i64, precision: u32) -> Result<()> {
    // rows beyond K have valuation >= (p-1)(K+1)/max(d,e) after the
    // diagonal conjugation; that must reach M(p-1)
    if k < minimal_truncation(shape, precision) {
        return Err(LabError::Truncation(format!(
            "K = {k} does not certify {precision} digits (need K >= {})",
            minimal_truncation(shape, precision)
        )));
    }
    Ok(())
}

/// Length of the characteristic series: degree `d + e + 2`.
fn series_len(shape: &IntervalShape) -> usize {
    (shape.d() + shape.e()) as usize + 3
}

pub fn fredholm_series(f: &LaurentCoeffVector, k: i64, precision: u32) -> Result<CharSeries> {
    Ok(compute(f, k, precision)?.series)
}

/// Everything one Dwork run produces.
#[derive(Clone, Debug)]
pub struct DworkRun {
    pub k: i64,
    pub precision: u32,
    pub gammas: SplittingCoeffs,
    pub matrix: NuclearMatrix,
    pub series: CharSeries,
    /// `L(t) = D(t) / D(pt)` up to degree `d + e + 2`.
    pub l_coeffs: Vec<PadicCyclotomic>,
    pub polygon: LowerPolygon,
}

impl DworkRun {
    pub fn l_valuations(&self) -> Vec<PadicValuation> {
        self.l_coeffs
            .iter()
            .map(PadicCyclotomic::valuation)
            .collect()
    }

    /// Coefficient agreement with an exact L-polynomial, mod `p^M`.
    pub fn matches_oracle(&self, l: &LPolynomial) -> Result<bool> {
        for (j, c) in self.l_coeffs.iter().enumerate() {
            let expected = match l.coeffs().get(j) {
                Some(z) => PadicCyclotomic::from_cyclotomic(z, self.precision)?,
                None => PadicCyclotomic::zero(c.p(), self.precision)?,
            };
            if *c != expected {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Coefficient of `t` equals `-Tr M`.
    pub fn trace_identity_holds(&self) -> bool {
        self.series.coeffs[1] == self.matrix.trace().neg()
    }

    /// Degree-`j` coefficients of `det(1 - tM)` with a certain valuation
    /// below the sum of the `j` smallest row floors `(p-1) deg(i)`.
    pub fn row_floor_violations(&self, shape: &IntervalShape) -> Result<Vec<usize>> {
        let p = self.matrix.entry(0, 0).p() as i64;
        let mut floors: Vec<RationalValue> = (-self.k..=self.k)
            .map(|i| Ok(degree(i, shape)? * RationalValue::from_integer(p - 1)))
            .collect::<Result<_>>()?;
        floors.sort();
        let mut bad = Vec::new();
        let mut bound = RationalValue::zero();
        for (j, v) in self.series.valuations().into_iter().enumerate() {
            if j > 0 {
                bound = bound + floors[j - 1].clone();
            }
            if let PadicValuation::Exact(v) = v {
                if RationalValue::from_integer(v as i64) < bound {
                    bad.push(j);
                }
            }
        }
        Ok(bad)
    }

    pub fn leading_terms(&self, f: &LaurentCoeffVector) -> Result<LeadingTermCheck> {
        leading_term_violations(f, &self.gammas, self.gammas.indices())
    }

    pub fn corollary_violations(&self, shape: &IntervalShape) -> Result<Vec<i64>> {
        corollary_floor_violations(shape, &self.gammas)
    }

    /// JSON dump: gamma table, matrix valuation heat data, series and L.
    pub fn diagnostics(&self, f: &LaurentCoeffVector) -> Value {
        let coeff_rows = |cs: &[PadicCyclotomic]| -> Vec<Value> {
            cs.iter()
                .enumerate()
                .map(|(j, c)| json!({"j": j, "coords": c.coords(), "valuation": c.valuation().to_string()}))
                .collect()
        };
        json!({
            "p": f.p(),
            "d": f.shape().d(),
            "e": f.shape().e(),
            "a": f.to_json(),
            "K": self.k,
            "M": self.precision,
            "gamma": self.gammas.to_json(),
            "matrix_valuations": self.matrix.valuation_table().into_iter()
                .map(|(i, j, v)| json!([i, j, v.to_string()])).collect::<Vec<_>>(),
            "char_series": coeff_rows(&self.series.coeffs),
            "l": coeff_rows(&self.l_coeffs),
            "polygon": self.polygon.to_json(),
        })
    }
}

fn compute(f: &LaurentCoeffVector, k: i64, precision: u32) -> Result<DworkRun> {
    let shape = f.shape();
    if f.b() != 1 {
        return Err(LabError::Invalid(
            "the Dwork engine handles q = p only".into(),
        ));
    }
    if !shape.is_laurent() {
        return Err(LabError::OutOfRange("the Dwork engine needs e > 0".into()));
    }
    certify(&shape, k, precision)?;
    let p = f.p();
    let window = (p as i64 + 1) * k;
    let gammas = splitting_coeffs(f, window, precision)?;
    let matrix = NuclearMatrix::build(&gammas, p, k);
    let len = series_len(&shape);
    let series = fredholm_determinant(&matrix, len)?;
    let l_coeffs = divide_by_twist(&series, p)?;
    let polygon = polygon_from_coeffs(&l_coeffs, &shape, p, precision)?;
    Ok(DworkRun {
        k,
        precision,
        gammas,
        matrix,
        series,
        l_coeffs,
        polygon,
    })
}

/// `D(t) / D(pt)`.
fn divide_by_twist(series: &CharSeries, p: u64) -> Result<Vec<PadicCyclotomic>> {
    let first = &series.coeffs[0];
    let (precision, len) = (first.precision(), series.coeffs.len());
    let ring = SeriesRing {
        p: p as usize,
        modulus: first.modulus(),
        len,
    };
    let w = p as usize - 1;
    let mut d = vec![0u64; ring.width()];
    let mut twisted = vec![0u64; ring.width()];
    let mut pj = 1u64;
    for (j, c) in series.coeffs.iter().enumerate() {
        d[j * w..(j + 1) * w].copy_from_slice(c.coords());
        twisted[j * w..(j + 1) * w].copy_from_slice(c.scale(pj).coords());
        pj = (pj as u128 * p as u128 % first.modulus() as u128) as u64;
    }
    let l = ring.mul(&d, &ring.inverse(&twisted));
    (0..len)
        .map(|j| PadicCyclotomic::from_coords(p, precision, ring.coeff(&l, j)))
        .collect()
}

/// Newton polygon of `L` from its first `d + e + 1` coefficients; higher
/// coefficients must vanish and unresolved coefficients must not matter.
fn polygon_from_coeffs(
    coeffs: &[PadicCyclotomic],
    shape: &IntervalShape,
    p: u64,
    precision: u32,
) -> Result<LowerPolygon> {
    let deg = shape.l_degree();
    if let Some(j) = (deg + 1..coeffs.len()).find(|&j| !coeffs[j].is_zero()) {
        return Err(LabError::Precision(format!(
            "L(t) has a nonzero coefficient at t^{j} mod p^{precision}"
        )));
    }
    let vals: Vec<PadicValuation> = coeffs[..=deg]
        .iter()
        .map(PadicCyclotomic::valuation)
        .collect();
    let scale = p as i64 - 1;
    let points: Vec<(usize, RationalValue)> = vals
        .iter()
        .enumerate()
        .filter_map(|(j, v)| v.exact().map(|v| (j, RationalValue::new(v as i64, scale))))
        .collect();
    if points.first().map(|x| x.0) != Some(0) || points.last().map(|x| x.0) != Some(deg) {
        return Err(LabError::Precision(format!(
            "an endpoint of L(t) is not resolved at {p}^{precision}"
        )));
    }
    let hull = LowerPolygon::lower_hull(&points, deg)?;
    for (j, v) in vals.iter().enumerate() {
        if let PadicValuation::AtLeast(b) = v {
            if RationalValue::new(*b as i64, scale) < *hull.ordinate(j) {
                return Err(LabError::Precision(format!(
                    "coefficient t^{j} vanishes mod {p}^{precision} below the polygon"
                )));
            }
        }
    }
    Ok(hull)
}

/// Truncation `K` and precision `M`; defaults follow the interval shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DworkBudget {
    pub k: i64,
    pub precision: u32,
    /// Precision escalation stops above this.
    pub max_precision: u32,
}

impl DworkBudget {
    pub fn for_shape(shape: &IntervalShape) -> Self {
        let precision = (shape.d() + shape.e()).div_ceil(2) + 3;
        let k = (shape.big_d() as i64 * (shape.d() + shape.e() + 2) as i64)
            .max(minimal_truncation(shape, precision));
        DworkBudget {
            k,
            precision,
            max_precision: precision + 8,
        }
    }

    /// Two more digits, with `K` raised to stay certified.
    pub fn escalated(&self, shape: &IntervalShape) -> Self {
        let precision = self.precision + 2;
        DworkBudget {
            k: self.k.max(minimal_truncation(shape, precision)),
            precision,
            ..*self
        }
    }
}

/// One run at exactly `(K, M)`.
pub fn dwork_run(f: &LaurentCoeffVector, k: i64, precision: u32) -> Result<DworkRun> {
    compute(f, k, precision)
}

/// Run with precision escalation on unresolved coefficients.
pub fn dwork_run_escalating(f: &LaurentCoeffVector, budget: DworkBudget) -> Result<DworkRun> {
    let shape = f.shape();
    let mut b = budget;
    loop {
        match compute(f, b.k, b.precision) {
            Err(LabError::Precision(msg)) => {
                let next = b.escalated(&shape);
                if next.precision > b.max_precision {
                    return Err(LabError::Precision(format!(
                        "{msg}; escalation limit {} reached",
                        b.max_precision
                    )));
                }
                b = next;
            }
            other => return other,
        }
    }
}

pub fn l_from_fredholm(f: &LaurentCoeffVector, k: i64, precision: u32) -> Result<LowerPolygon> {
    Ok(compute(f, k, precision)?.polygon)
}

/// Polygons at `(K, M)`, `(2K, M)` and `(K', M + 2)` coincide.
#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub base: DworkRun,
    pub doubled_k: LowerPolygon,
    pub raised_precision: LowerPolygon,
}

impl StabilityReport {
    pub fn stable(&self) -> bool {
        self.base.polygon == self.doubled_k && self.base.polygon == self.raised_precision
    }
}

pub fn stability_check(f: &LaurentCoeffVector, budget: DworkBudget) -> Result<StabilityReport> {
    let base = dwork_run_escalating(f, budget)?;
    let shape = f.shape();
    let doubled_k = compute(f, 2 * base.k, base.precision)?.polygon;
    let up = DworkBudget {
        k: base.k,
        precision: base.precision,
        ..budget
    }
    .escalated(&shape);
    let raised_precision = compute(f, up.k, up.precision)?.polygon;
    Ok(StabilityReport {
        base,
        doubled_k,
        raised_precision,
    })
}
