use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use super::field::{build_extension, ExtensionField, FieldElement};
use crate::error::{LabError, Result};
use crate::polygons::IntervalShape;

/// Coefficients `a_{-e}, ..., a_d` of a Laurent polynomial over `F_{p^b}`.
#[derive(Clone, Debug)]
pub struct LaurentCoeffVector {
    shape: IntervalShape,
    p: u64,
    field: Arc<ExtensionField>,
    coeffs: Vec<FieldElement>,
}

impl PartialEq for LaurentCoeffVector {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape
            && self.p == other.p
            && self.field.degree() == other.field.degree()
            && self.coeffs == other.coeffs
    }
}

impl Eq for LaurentCoeffVector {}

impl LaurentCoeffVector {
    /// Coefficients listed for subscripts `-e..=d` over `F_{p^b}`.
    pub fn new(p: u64, b: usize, shape: IntervalShape, coeffs: Vec<FieldElement>) -> Result<Self> {
        let field = Arc::new(build_extension(p, b)?);
        Self::with_field(shape, field, coeffs)
    }

    pub fn with_field(
        shape: IntervalShape,
        field: Arc<ExtensionField>,
        coeffs: Vec<FieldElement>,
    ) -> Result<Self> {
        let p = field.p() as u64;
        shape.check_prime(p)?;
        let expected = (shape.d() + shape.e()) as usize + 1;
        if coeffs.len() != expected {
            return Err(LabError::LengthMismatch {
                left: coeffs.len(),
                right: expected,
            });
        }
        for c in &coeffs {
            if c.0.len() != field.degree() || c.0.iter().any(|&x| x >= field.p()) {
                return Err(LabError::OutOfRange(format!(
                    "coefficient {c} not in F_{p}^{}",
                    field.degree()
                )));
            }
        }
        let v = LaurentCoeffVector {
            shape,
            p,
            field,
            coeffs,
        };
        if v.field.is_zero(v.coeff(shape.d() as i32)) {
            return Err(LabError::Degenerate(format!("a_{} = 0", shape.d())));
        }
        if shape.e() > 0 && v.field.is_zero(v.coeff(-(shape.e() as i32))) {
            return Err(LabError::Degenerate(format!("a_{{-{}}} = 0", shape.e())));
        }
        Ok(v)
    }

    /// Prime-field coefficients for subscripts `-e..=d`.
    pub fn from_residues(p: u64, shape: IntervalShape, residues: &[i64]) -> Result<Self> {
        let coeffs = residues
            .iter()
            .map(|&r| FieldElement(vec![r.rem_euclid(p as i64) as u32]))
            .collect();
        Self::new(p, 1, shape, coeffs)
    }

    pub fn shape(&self) -> IntervalShape {
        self.shape
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn b(&self) -> usize {
        self.field.degree()
    }

    /// `q = p^b`.
    pub fn q(&self) -> u64 {
        self.field.order()
    }

    pub fn field(&self) -> &Arc<ExtensionField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// `a_i` for `-e <= i <= d`.
    pub fn coeff(&self, i: i32) -> &FieldElement {
        &self.coeffs[(i + self.shape.e() as i32) as usize]
    }

    /// Prime-field residues, when `b = 1`.
    pub fn residues(&self) -> Option<Vec<u32>> {
        (self.b() == 1).then(|| self.coeffs.iter().map(|c| c.0[0]).collect())
    }

    /// The same vector with `a_0` replaced by `c`.
    pub fn with_a0(&self, c: FieldElement) -> Result<Self> {
        let mut coeffs = self.coeffs.clone();
        coeffs[self.shape.e() as usize] = c;
        Self::with_field(self.shape, self.field.clone(), coeffs)
    }

    /// `alpha * f` for `alpha` in `F_q^*`.
    pub fn scaled(&self, alpha: &FieldElement) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| self.field.mul(c, alpha))
            .collect();
        Self::with_field(self.shape, self.field.clone(), coeffs)
    }

    /// Sort key and serialization form: one coordinate list per coefficient.
    pub fn key(&self) -> Vec<Vec<u32>> {
        self.coeffs.iter().map(|c| c.0.clone()).collect()
    }

    /// JSON form: residues for `b = 1`, coordinate lists otherwise.
    pub fn to_json(&self) -> Value {
        match self.residues() {
            Some(r) => json!(r),
            None => json!(self.key()),
        }
    }

    pub fn from_json(p: u64, b: usize, shape: IntervalShape, value: &Value) -> Result<Self> {
        let bad = || LabError::Invalid(format!("malformed coefficient vector {value}"));
        let items = value.as_array().ok_or_else(bad)?;
        let mut coeffs = Vec::with_capacity(items.len());
        for item in items {
            let coords: Vec<u32> = match item {
                Value::Number(n) => vec![n.as_u64().ok_or_else(bad)? as u32],
                Value::Array(xs) => xs
                    .iter()
                    .map(|x| x.as_u64().map(|v| v as u32))
                    .collect::<Option<_>>()
                    .ok_or_else(bad)?,
                _ => return Err(bad()),
            };
            coeffs.push(FieldElement(coords));
        }
        Self::new(p, b, shape, coeffs)
    }
}

impl fmt::Display for LaurentCoeffVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}
