use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Map, Value};

use crate::error::{LabError, Result};
use crate::oracle::{FieldElement, LaurentCoeffVector};
use crate::polygons::IntervalShape;

/// Exponent vector indexed by variable subscript `-e..=d` (position `i + e`).
pub type Exponents = Vec<u32>;

/// Polynomial over `F_p` in the variables `x_{-e}, ..., x_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseFpPolynomial {
    p: u64,
    shape: IntervalShape,
    terms: BTreeMap<Exponents, u64>,
}

impl SparseFpPolynomial {
    pub fn zero(p: u64, shape: IntervalShape) -> Self {
        SparseFpPolynomial {
            p,
            shape,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(p: u64, shape: IntervalShape, c: u64) -> Self {
        let mut poly = Self::zero(p, shape);
        poly.add_term(vec![0; Self::nvars(&shape)], c);
        poly
    }

    /// `c * prod x_i^(k_i)` from a list of subscripts (repeats allowed).
    pub fn monomial(p: u64, shape: IntervalShape, subscripts: &[i32], c: u64) -> Result<Self> {
        let mut exps = vec![0; Self::nvars(&shape)];
        for &s in subscripts {
            if !shape.subscripts().contains(&s) {
                return Err(LabError::OutOfRange(format!(
                    "variable x_{s} outside [-{}, {}]",
                    shape.e(),
                    shape.d()
                )));
            }
            exps[(s + shape.e() as i32) as usize] += 1;
        }
        let mut poly = Self::zero(p, shape);
        poly.add_term(exps, c);
        Ok(poly)
    }

    fn nvars(shape: &IntervalShape) -> usize {
        (shape.d() + shape.e()) as usize + 1
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn shape(&self) -> IntervalShape {
        self.shape
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, u64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: Exponents, c: u64) {
        let c = c % self.p;
        let entry = self.terms.entry(exps).or_insert(0);
        *entry = (*entry + c) % self.p;
        self.terms.retain(|_, v| *v != 0);
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.p, self.shape);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(exps, ca * cb % self.p);
            }
        }
        out
    }

    /// Total degrees of the stored monomials.
    pub fn total_degrees(&self) -> Vec<u32> {
        self.terms.keys().map(|e| e.iter().sum()).collect()
    }

    /// Substitute `x_i = a_i`; the value lies in the coefficient field of `a`.
    pub fn evaluate(&self, a: &LaurentCoeffVector) -> Result<FieldElement> {
        if a.shape() != self.shape || a.p() != self.p {
            return Err(LabError::Invalid(
                "evaluation point has a different shape or prime".into(),
            ));
        }
        let field = a.field();
        let mut acc = field.zero();
        for (exps, &c) in &self.terms {
            let mut term = field.constant(c as i64);
            for (pos, &k) in exps.iter().enumerate() {
                if k > 0 {
                    let i = pos as i32 - self.shape.e() as i32;
                    term = field.mul(&term, &field.pow(a.coeff(i), k as u64));
                }
            }
            acc = field.add(&acc, &term);
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(exps, &c)| {
                let mut m = Map::new();
                for (pos, &k) in exps.iter().enumerate() {
                    if k > 0 {
                        let i = pos as i32 - self.shape.e() as i32;
                        m.insert(i.to_string(), json!(k));
                    }
                }
                json!({"exponents": Value::Object(m), "coeff": c})
            })
            .collect();
        json!({"p": self.p, "d": self.shape.d(), "e": self.shape.e(), "terms": terms})
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = || LabError::Invalid(format!("malformed polynomial {value}"));
        let p = value["p"].as_u64().ok_or_else(bad)?;
        let d = value["d"].as_u64().ok_or_else(bad)? as u32;
        let e = value["e"].as_u64().ok_or_else(bad)? as u32;
        let shape = IntervalShape::new(d, e)?;
        let mut poly = Self::zero(p, shape);
        for term in value["terms"].as_array().ok_or_else(bad)? {
            let c = term["coeff"].as_u64().ok_or_else(bad)?;
            let mut subs = Vec::new();
            for (k, v) in term["exponents"].as_object().ok_or_else(bad)? {
                let i: i32 = k.parse().map_err(|_| bad())?;
                let n = v.as_u64().ok_or_else(bad)?;
                subs.extend(std::iter::repeat_n(i, n as usize));
            }
            let mono = Self::monomial(p, shape, &subs, c)?;
            for (exps, c) in mono.terms {
                poly.add_term(exps, c);
            }
        }
        Ok(poly)
    }

    /// Render one monomial as `x_1·x_3³·x_{-1}`: positive subscripts
    /// ascending, then negative subscripts by absolute value.
    pub fn format_monomial(shape: &IntervalShape, exps: &[u32]) -> String {
        let e = shape.e() as i32;
        let mut order: Vec<i32> = (1..=shape.d() as i32).collect();
        order.insert(0, 0);
        order.extend((1..=e).map(|i| -i));
        let parts: Vec<String> = order
            .into_iter()
            .filter(|&i| exps[(i + e) as usize] > 0)
            .map(|i| {
                let k = exps[(i + e) as usize];
                let sub = if (0..10).contains(&i) {
                    i.to_string()
                } else {
                    format!("{{{i}}}")
                };
                if k == 1 {
                    format!("x_{sub}")
                } else {
                    format!("x_{sub}{}", superscript(k))
                }
            })
            .collect();
        parts.join("·")
    }
}

fn superscript(k: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    k.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

impl fmt::Display for SparseFpPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(exps, &c)| {
                let mono = Self::format_monomial(&self.shape, exps);
                match (c, mono.is_empty()) {
                    (_, true) => c.to_string(),
                    (1, false) => mono,
                    _ => format!("{c}·{mono}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
