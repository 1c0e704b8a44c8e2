use num_bigint::BigInt;
use serde::Serialize;

use super::charsum::{char_sum_twisted, torus_table, DEFAULT_GUARD};
use super::coeffs::LaurentCoeffVector;
use super::cyclotomic::CyclotomicInteger;
use super::field::FieldElement;
use super::lpoly::{l_polynomial_with, newton_polygon, LOptions, LPolynomial};
use crate::error::{LabError, Result};
use crate::hasse::{hasse_polynomial, SparseFpPolynomial};
use crate::polygons::{
    arithmetic_polygon, hodge_polygon, lies_on_or_above, IntervalShape, LowerPolygon, Threshold,
};

/// Outcome of checking one coefficient vector against the polygon theory.
#[derive(Clone, Debug)]
pub struct InstanceReport {
    pub a: LaurentCoeffVector,
    pub l: LPolynomial,
    pub newton: LowerPolygon,
    /// `H(a)`, for `e > 0`.
    pub hasse_value: Option<FieldElement>,
    pub checks: InstanceChecks,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceChecks {
    /// NP on or above Hodge with the same endpoints.
    pub hodge_bound_ok: bool,
    pub np_equals_arithmetic: bool,
    /// `NP = arithmetic` iff `H(a) != 0`; `None` below `p >= 3D` or for `e = 0`.
    pub generic_match: Option<bool>,
    /// `NP = Hodge` when `p = 1 mod D`; `None` otherwise.
    pub stickelberger_ok: Option<bool>,
    /// NP on or above the arithmetic polygon (the `e = 0` lower bound).
    pub above_arithmetic: bool,
    pub threshold_met: bool,
}

impl InstanceReport {
    pub fn hasse_nonzero(&self) -> Option<bool> {
        self.hasse_value
            .as_ref()
            .map(|v| v.0.iter().any(|&c| c != 0))
    }
}

/// Precomputed polygons and Hasse polynomial for one `(p, b, d, e)`.
#[derive(Clone, Debug)]
pub struct Verifier {
    pub p: u64,
    pub b: usize,
    pub shape: IntervalShape,
    pub hodge: LowerPolygon,
    pub arithmetic: LowerPolygon,
    pub hasse: Option<SparseFpPolynomial>,
    pub threshold_met: bool,
    pub options: LOptions,
}

impl Verifier {
    pub fn new(p: u64, b: usize, shape: IntervalShape) -> Result<Self> {
        shape.check_prime(p)?;
        let hasse = if shape.is_laurent() {
            Some(hasse_polynomial(p, &shape)?)
        } else {
            None
        };
        Ok(Verifier {
            p,
            b,
            shape,
            hodge: hodge_polygon(&shape),
            arithmetic: arithmetic_polygon(p, &shape)?,
            hasse,
            threshold_met: Threshold::AtLeast3D.met(p, &shape),
            options: LOptions::default(),
        })
    }

    pub fn with_options(mut self, options: LOptions) -> Self {
        self.options = options;
        self
    }

    pub fn compute_l(&self, f: &LaurentCoeffVector) -> Result<LPolynomial> {
        self.check_vector(f)?;
        l_polynomial_with(f, &self.options)
    }

    fn check_vector(&self, f: &LaurentCoeffVector) -> Result<()> {
        if f.p() != self.p || f.b() != self.b || f.shape() != self.shape {
            return Err(LabError::Invalid(
                "coefficient vector does not match the verifier".into(),
            ));
        }
        Ok(())
    }

    pub fn verify(&self, f: &LaurentCoeffVector) -> Result<InstanceReport> {
        let l = self.compute_l(f)?;
        self.verify_with_l(f, l)
    }

    /// Checks for an already computed L-polynomial (e.g. from a cache).
    pub fn verify_with_l(&self, f: &LaurentCoeffVector, l: LPolynomial) -> Result<InstanceReport> {
        let newton = newton_polygon(&l, self.b)?;
        let (hasse_value, checks) = self.check_polygon(f, &newton)?;
        Ok(InstanceReport {
            a: f.clone(),
            l,
            newton,
            hasse_value,
            checks,
        })
    }

    /// `H(a)` and the polygon checks for a Newton polygon from any engine.
    pub fn check_polygon(
        &self,
        f: &LaurentCoeffVector,
        newton: &LowerPolygon,
    ) -> Result<(Option<FieldElement>, InstanceChecks)> {
        self.check_vector(f)?;
        let hasse_value = match &self.hasse {
            Some(h) => Some(h.evaluate(f)?),
            None => None,
        };
        let hodge_bound_ok = newton.len() == self.hodge.len()
            && newton.end_point() == self.hodge.end_point()
            && lies_on_or_above(newton, &self.hodge)?;
        let np_equals_arithmetic = *newton == self.arithmetic;
        let above_arithmetic = lies_on_or_above(newton, &self.arithmetic)?;
        let hasse_nonzero = hasse_value.as_ref().map(|v| v.0.iter().any(|&c| c != 0));
        let generic_match = match hasse_nonzero {
            Some(h) if self.threshold_met => Some(np_equals_arithmetic == h),
            _ => None,
        };
        let stickelberger_ok = (self.p % self.shape.big_d() == 1).then(|| *newton == self.hodge);
        let checks = InstanceChecks {
            hodge_bound_ok,
            np_equals_arithmetic,
            generic_match,
            stickelberger_ok,
            above_arithmetic,
            threshold_met: self.threshold_met,
        };
        Ok((hasse_value, checks))
    }
}

pub fn verify_instance(f: &LaurentCoeffVector) -> Result<InstanceReport> {
    Verifier::new(f.p(), f.b(), f.shape())?.verify(f)
}

/// Both sides of `(q^k - 1) + sum_alpha S(k, alpha f) = q #{x : Tr_{q^k/q} f(x) = 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveIdentity {
    pub lhs: CyclotomicInteger,
    pub rhs: BigInt,
}

impl CurveIdentity {
    pub fn holds(&self) -> bool {
        self.lhs.as_rational_integer() == Some(&self.rhs)
    }
}

pub fn curve_identity(f: &LaurentCoeffVector, k: usize, guard: u64) -> Result<CurveIdentity> {
    if !f.shape().is_laurent() {
        return Err(LabError::OutOfRange(
            "the curve identity is stated on the torus (e > 0)".into(),
        ));
    }
    let table = torus_table(f.p(), f.b(), k, guard)?;
    let base = f.field();
    let q = f.q();
    let n = table.group_order();
    let p = f.p() as u32;
    let mut lhs = CyclotomicInteger::from_integer(p, BigInt::from(n));
    for alpha in base.elements().filter(|x| !base.is_zero(x)) {
        lhs = lhs.add(&char_sum_twisted(&f.scaled(&alpha)?, k, 1, guard)?);
    }
    let field = table.field();
    let coeffs: Vec<(i32, FieldElement)> = f
        .shape()
        .subscripts()
        .map(|j| (j, table.embed(f.coeff(j))))
        .collect();
    let mut zeros = 0u64;
    let mut x = field.one();
    for _ in 0..n {
        let xinv = field.inv(&x).expect("torus point");
        let mut value = field.zero();
        for (j, a) in &coeffs {
            let pt = if *j >= 0 { &x } else { &xinv };
            value = field.add(
                &value,
                &field.mul(a, &field.pow(pt, j.unsigned_abs() as u64)),
            );
        }
        if field.is_zero(&field.relative_trace(&value, f.b())) {
            zeros += 1;
        }
        x = field.mul(&x, table.generator());
    }
    Ok(CurveIdentity {
        lhs,
        rhs: BigInt::from(q) * BigInt::from(zeros),
    })
}

pub fn curve_identity_check(f: &LaurentCoeffVector, k: usize) -> Result<bool> {
    let id = curve_identity(f, k, DEFAULT_GUARD)?;
    if id.lhs.as_rational_integer().is_none() {
        return Err(LabError::Invalid(format!(
            "curve identity left side {} is not a rational integer",
            id.lhs
        )));
    }
    Ok(id.holds())
}

/// NP is unchanged when `a_0` is replaced by `c`.
pub fn a0_independence_check(f: &LaurentCoeffVector, c: &FieldElement) -> Result<bool> {
    let base = newton_polygon(&l_polynomial_with(f, &LOptions::default())?, f.b())?;
    let moved = f.with_a0(c.clone())?;
    let other = newton_polygon(&l_polynomial_with(&moved, &LOptions::default())?, f.b())?;
    Ok(base == other)
}

/// Twisting the character by `c` applies `zeta -> zeta^c` to every
/// coefficient and leaves the Newton polygon unchanged.
pub fn galois_consistency_check(f: &LaurentCoeffVector, c: u32) -> Result<bool> {
    let l1 = l_polynomial_with(f, &LOptions::default())?;
    let lc = l_polynomial_with(
        f,
        &LOptions {
            character: c,
            ..LOptions::default()
        },
    )?;
    let permuted = l1
        .coeffs()
        .iter()
        .zip(lc.coeffs())
        .all(|(a, b)| a.galois(c) == *b);
    Ok(permuted && newton_polygon(&l1, f.b())? == newton_polygon(&lc, f.b())?)
}
