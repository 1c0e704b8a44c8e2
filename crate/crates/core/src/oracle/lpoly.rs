use num_bigint::BigInt;
use serde_json::{json, Value};

use super::charsum::{char_sum_twisted, DEFAULT_GUARD};
use super::coeffs::LaurentCoeffVector;
use super::cyclotomic::{CyclotomicInteger, Valuation};
use crate::error::{LabError, Result};
use crate::polygons::{IntervalShape, LowerPolygon, RationalValue};

/// `L(t, f) = 1 + c_1 t + ... + c_deg t^deg` with coefficients in `Z[zeta_p]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPolynomial {
    p: u32,
    b: usize,
    shape: IntervalShape,
    coeffs: Vec<CyclotomicInteger>,
}

/// Knobs for [`l_polynomial_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LOptions {
    /// Number of power sums beyond the degree checked against the
    /// reconstructed polynomial.
    pub extra_checks: usize,
    /// Additive character `t -> zeta^(c t)`.
    pub character: u32,
    pub guard: u64,
}

impl Default for LOptions {
    fn default() -> Self {
        LOptions {
            extra_checks: 1,
            character: 1,
            guard: DEFAULT_GUARD,
        }
    }
}

impl LPolynomial {
    pub fn from_coeffs(
        p: u32,
        b: usize,
        shape: IntervalShape,
        coeffs: Vec<CyclotomicInteger>,
    ) -> Result<Self> {
        if coeffs.len() != shape.l_degree() + 1 {
            return Err(LabError::LengthMismatch {
                left: coeffs.len(),
                right: shape.l_degree() + 1,
            });
        }
        if !coeffs[0].is_one() {
            return Err(LabError::Invalid(
                "L-polynomial constant term must be 1".into(),
            ));
        }
        Ok(LPolynomial {
            p,
            b,
            shape,
            coeffs,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn shape(&self) -> IntervalShape {
        self.shape
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[CyclotomicInteger] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &CyclotomicInteger {
        &self.coeffs[j]
    }

    /// `(1 - zeta)`-adic valuations of the coefficients.
    pub fn valuations(&self) -> Vec<Valuation> {
        self.coeffs
            .iter()
            .map(CyclotomicInteger::pi_adic_valuation)
            .collect()
    }

    /// Power sums `S_1..S_m` recovered from the coefficients.
    pub fn power_sums(&self, m: usize) -> Vec<CyclotomicInteger> {
        let mut sums: Vec<CyclotomicInteger> = Vec::with_capacity(m);
        for j in 1..=m {
            // j c_j = sum_{i=1}^{j} S_i c_{j-i}, with c_j = 0 past the degree
            let mut acc = self.coeff_or_zero(j).scale(&BigInt::from(j));
            for i in 1..j {
                acc = acc.sub(&sums[i - 1].mul(&self.coeff_or_zero(j - i)));
            }
            sums.push(acc);
        }
        sums
    }

    fn coeff_or_zero(&self, j: usize) -> CyclotomicInteger {
        self.coeffs
            .get(j)
            .cloned()
            .unwrap_or_else(|| CyclotomicInteger::zero(self.p))
    }

    /// Coordinates per coefficient, as stored in the cache.
    pub fn to_json(&self) -> Value {
        json!(self
            .coeffs
            .iter()
            .map(|c| c.coords().iter().map(|x| json!(x)).collect::<Vec<_>>())
            .collect::<Vec<_>>())
    }

    pub fn from_json(p: u32, b: usize, shape: IntervalShape, value: &Value) -> Result<Self> {
        let bad = || LabError::Invalid(format!("malformed L-polynomial {value}"));
        let rows = value.as_array().ok_or_else(bad)?;
        let mut coeffs = Vec::with_capacity(rows.len());
        for row in rows {
            let coords: Vec<BigInt> = serde_json::from_value(row.clone()).map_err(|_| bad())?;
            if coords.len() != p as usize - 1 {
                return Err(bad());
            }
            coeffs.push(CyclotomicInteger::from_coords(p, coords));
        }
        Self::from_coeffs(p, b, shape, coeffs)
    }
}

/// Convert power sums `S_1..S_m` to `c_0..c_m` by Newton's identities.
pub fn newton_coefficients(p: u32, sums: &[CyclotomicInteger]) -> Result<Vec<CyclotomicInteger>> {
    let mut coeffs = vec![CyclotomicInteger::one(p)];
    for j in 1..=sums.len() {
        let mut acc = CyclotomicInteger::zero(p);
        for i in 1..=j {
            acc = acc.add(&sums[i - 1].mul(&coeffs[j - i]));
        }
        let c = acc
            .div_exact(&BigInt::from(j))
            .ok_or(LabError::InexactDivision {
                step: j,
                divisor: j as u64,
            })?;
        coeffs.push(c);
    }
    Ok(coeffs)
}

pub fn l_polynomial(f: &LaurentCoeffVector) -> Result<LPolynomial> {
    l_polynomial_with(f, &LOptions::default())
}

pub fn l_polynomial_with(f: &LaurentCoeffVector, opts: &LOptions) -> Result<LPolynomial> {
    let deg = f.shape().l_degree();
    let p = f.p() as u32;
    let total = deg + opts.extra_checks;
    // fail fast on the largest field before doing any work
    super::charsum::torus_table(f.p(), f.b(), total.max(1), opts.guard)?;
    let sums: Vec<CyclotomicInteger> = (1..=total)
        .map(|k| char_sum_twisted(f, k, opts.character, opts.guard))
        .collect::<Result<_>>()?;
    let coeffs = newton_coefficients(p, &sums[..deg])?;
    if deg > 0 && coeffs[deg].is_zero() {
        return Err(LabError::DegreeMismatch(format!(
            "leading coefficient c_{deg} vanishes"
        )));
    }
    let l = LPolynomial::from_coeffs(p, f.b(), f.shape(), coeffs)?;
    let predicted = l.power_sums(total);
    for k in deg + 1..=total {
        if predicted[k - 1] != sums[k - 1] {
            return Err(LabError::PolynomialityFailure { k });
        }
    }
    Ok(l)
}

/// Lower hull of `(j, v_pi(c_j) / (b (p - 1)))`: the `q`-adic Newton polygon.
pub fn newton_polygon(l: &LPolynomial, b: usize) -> Result<LowerPolygon> {
    let scale = (b as i64) * (l.p() as i64 - 1);
    let mut points = Vec::new();
    for (j, v) in l.valuations().into_iter().enumerate() {
        if let Valuation::Finite(v) = v {
            points.push((j, RationalValue::new(v as i64, scale)));
        }
    }
    if points.last().map(|p| p.0) != Some(l.degree()) {
        return Err(LabError::DegreeMismatch(
            "leading coefficient has infinite valuation".into(),
        ));
    }
    LowerPolygon::lower_hull(&points, l.degree())
}

pub fn pi_adic_valuation(z: &CyclotomicInteger) -> Valuation {
    z.pi_adic_valuation()
}
