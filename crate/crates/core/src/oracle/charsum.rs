use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use super::coeffs::LaurentCoeffVector;
use super::cyclotomic::CyclotomicInteger;
use super::field::{build_extension, ExtensionField, FieldElement};
use crate::error::{LabError, Result};

/// Default bound on `q^k` for enumerations.
pub const DEFAULT_GUARD: u64 = 100_000_000;

/// Multiplicative model of `F_{q^k}^*` with `q = p^b`: a primitive element
/// `g`, the absolute traces `Tr(g^s)` and discrete logs of the embedded
/// coefficient field.
#[derive(Debug)]
pub struct TorusTable {
    field: ExtensionField,
    generator: FieldElement,
    traces: Vec<u16>,
    /// Indexed by element index in `F_{p^b}`; `None` for zero.
    subfield_logs: Vec<Option<u64>>,
    embedding: Embedding,
}

impl TorusTable {
    fn build(p: u64, b: usize, k: usize) -> Result<Self> {
        let base = build_extension(p, b)?;
        let field = build_extension(p, b * k)?;
        let n = field.order() - 1;
        let generator = field.primitive_element();
        let mut traces = Vec::with_capacity(n as usize);
        let mut x = field.one();
        let mut by_index: HashMap<u64, u64> = HashMap::new();
        let q = base.order();
        let step = n / (q - 1);
        for s in 0..n {
            traces.push(field.trace_linear(&x) as u16);
            if s % step == 0 {
                by_index.insert(field.element_index(&x), s);
            }
            x = field.mul(&x, &generator);
        }
        let embed = Embedding::new(&base, &field, &generator, step);
        let subfield_logs = base
            .elements()
            .map(|a| {
                if base.is_zero(&a) {
                    None
                } else {
                    let image = embed.apply(&field, &a);
                    Some(
                        *by_index
                            .get(&field.element_index(&image))
                            .expect("subfield element"),
                    )
                }
            })
            .collect();
        Ok(TorusTable {
            field,
            generator,
            traces,
            subfield_logs,
            embedding: embed,
        })
    }

    pub fn field(&self) -> &ExtensionField {
        &self.field
    }

    pub fn generator(&self) -> &FieldElement {
        &self.generator
    }

    /// `|F_{q^k}^*|`.
    pub fn group_order(&self) -> u64 {
        self.traces.len() as u64
    }

    /// `Tr(g^s)`.
    pub fn trace_of_power(&self, s: u64) -> u32 {
        self.traces[(s % self.group_order()) as usize] as u32
    }

    /// Image of a coefficient-field element in `F_{q^k}`.
    pub fn embed(&self, a: &FieldElement) -> FieldElement {
        self.embedding.apply(&self.field, a)
    }

    /// Discrete log of the embedding of a coefficient-field element.
    pub fn subfield_log(&self, base: &ExtensionField, a: &FieldElement) -> Option<u64> {
        self.subfield_logs[base.element_index(a) as usize]
    }
}

/// `F_{p^b} -> F_{p^{bk}}`, sending the base generator to the smallest root
/// of the base modulus inside the subgroup of order `q - 1`.
#[derive(Debug)]
struct Embedding {
    root_powers: Vec<FieldElement>,
}

impl Embedding {
    fn new(base: &ExtensionField, field: &ExtensionField, g: &FieldElement, step: u64) -> Self {
        let b = base.degree();
        if b == 1 {
            return Embedding {
                root_powers: vec![field.one()],
            };
        }
        let h = field.pow(g, step);
        let mut rho = field.one();
        loop {
            let value = base.modulus().iter().rev().fold(field.zero(), |acc, &c| {
                field.add(&field.mul(&acc, &rho), &field.constant(c as i64))
            });
            if field.is_zero(&value) {
                break;
            }
            rho = field.mul(&rho, &h);
        }
        let mut root_powers = Vec::with_capacity(b);
        let mut cur = field.one();
        for _ in 0..b {
            root_powers.push(cur.clone());
            cur = field.mul(&cur, &rho);
        }
        Embedding { root_powers }
    }

    fn apply(&self, field: &ExtensionField, a: &FieldElement) -> FieldElement {
        a.0.iter()
            .zip(&self.root_powers)
            .fold(field.zero(), |acc, (&c, r)| {
                field.add(&acc, &field.scale(r, c))
            })
    }
}

type TableKey = (u64, usize, usize);
type TableSlot = Arc<OnceLock<Arc<TorusTable>>>;

fn table_cache() -> &'static Mutex<HashMap<TableKey, TableSlot>> {
    static CACHE: OnceLock<Mutex<HashMap<TableKey, TableSlot>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Shared table for `F_{(p^b)^k}`, built once per process.
pub fn torus_table(p: u64, b: usize, k: usize, guard: u64) -> Result<Arc<TorusTable>> {
    let size = checked_field_size(p, b * k, guard)?;
    if p > u16::MAX as u64 {
        return Err(LabError::GuardExceeded {
            size,
            guard: u16::MAX as u64,
        });
    }
    let slot = table_cache()
        .lock()
        .expect("table cache")
        .entry((p, b, k))
        .or_default()
        .clone();
    if let Some(t) = slot.get() {
        return Ok(t.clone());
    }
    let built = Arc::new(TorusTable::build(p, b, k)?);
    Ok(slot.get_or_init(|| built).clone())
}

fn checked_field_size(p: u64, n: usize, guard: u64) -> Result<u64> {
    let size = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > guard as u128 {
        return Err(LabError::GuardExceeded {
            size: size.min(u64::MAX as u128) as u64,
            guard,
        });
    }
    Ok(size as u64)
}

/// Exponent counts: `counts[r] = #{x : Tr(f(x)) = r}` over the torus, plus
/// the origin when the shape is polynomial.
pub fn trace_distribution(f: &LaurentCoeffVector, k: usize, guard: u64) -> Result<Vec<u64>> {
    let terms: Vec<(i32, FieldElement)> = f
        .shape()
        .subscripts()
        .map(|j| (j, f.coeff(j).clone()))
        .collect();
    monomial_distribution(f.field(), &terms, k, !f.shape().is_laurent(), guard)
}

/// Trace distribution of `sum a_j x^j` (coefficients in `base`) over
/// `F_{|base|^k}^*`, plus the origin when `include_origin` is set; the
/// origin only sees the `j = 0` coefficient.
pub fn monomial_distribution(
    base: &ExtensionField,
    monomials: &[(i32, FieldElement)],
    k: usize,
    include_origin: bool,
    guard: u64,
) -> Result<Vec<u64>> {
    let table = torus_table(base.p() as u64, base.degree(), k, guard)?;
    let p = base.p();
    let n = table.group_order();
    // (current index, step) per nonzero monomial a_j x^j
    let mut terms: Vec<(u64, u64)> = Vec::new();
    for (j, a) in monomials {
        if let Some(u) = table.subfield_log(base, a) {
            terms.push((u, (*j as i64).rem_euclid(n as i64) as u64));
        }
    }
    let traces = &table.traces;
    let count_range = |start: u64, end: u64| -> Vec<u64> {
        let mut counts = vec![0u64; p as usize];
        let mut idx: Vec<u64> = terms
            .iter()
            .map(|&(u, s)| (u + mulmod(s, start, n)) % n)
            .collect();
        for _ in start..end {
            let mut r = 0u32;
            for (i, &(_, s)) in idx.iter_mut().zip(&terms) {
                r += traces[*i as usize] as u32;
                *i += s;
                if *i >= n {
                    *i -= n;
                }
            }
            counts[(r % p) as usize] += 1;
        }
        counts
    };
    const CHUNK: u64 = 1 << 16;
    let mut counts = if n > 4 * CHUNK {
        let chunks: Vec<u64> = (0..n.div_ceil(CHUNK)).collect();
        chunks
            .par_iter()
            .map(|&c| count_range(c * CHUNK, ((c + 1) * CHUNK).min(n)))
            .reduce(
                || vec![0u64; p as usize],
                |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
            )
    } else {
        count_range(0, n)
    };
    if include_origin {
        let r = monomials
            .iter()
            .filter(|(j, _)| *j == 0)
            .filter_map(|(_, a)| table.subfield_log(base, a))
            .map(|u| table.trace_of_power(u))
            .sum::<u32>();
        counts[(r % p) as usize] += 1;
    }
    Ok(counts)
}

/// `sum zeta^(c r) counts[r]`.
pub fn twisted_sum(p: u32, counts: &[u64], c: u32) -> Result<CyclotomicInteger> {
    if c.is_multiple_of(p) {
        return Err(LabError::OutOfRange(format!(
            "character twist {c} is trivial mod {p}"
        )));
    }
    let mut twisted = vec![0i64; p as usize];
    for (r, &n) in counts.iter().enumerate() {
        twisted[(r as u64 * c as u64 % p as u64) as usize] += n as i64;
    }
    Ok(CyclotomicInteger::from_exponent_counts(p, &twisted))
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `S(k, f)` with additive character `psi_c(t) = zeta^(c t)`.
pub fn char_sum_twisted(
    f: &LaurentCoeffVector,
    k: usize,
    c: u32,
    guard: u64,
) -> Result<CyclotomicInteger> {
    twisted_sum(f.p() as u32, &trace_distribution(f, k, guard)?, c)
}

/// `S(k, f) = sum zeta^{Tr(f(x))}` over `F_{q^k}^*` (torus) or `F_{q^k}` (line).
pub fn char_sum(f: &LaurentCoeffVector, k: usize) -> Result<CyclotomicInteger> {
    char_sum_twisted(f, k, 1, DEFAULT_GUARD)
}

/// Literal summation with field arithmetic; used to validate the tables.
pub fn char_sum_direct(f: &LaurentCoeffVector, k: usize, guard: u64) -> Result<CyclotomicInteger> {
    checked_field_size(f.p(), f.b() * k, guard)?;
    let table = torus_table(f.p(), f.b(), k, guard)?;
    let field = table.field();
    let coeffs: Vec<(i32, FieldElement)> = f
        .shape()
        .subscripts()
        .map(|j| (j, table.embed(f.coeff(j))))
        .collect();
    let p = f.p() as u32;
    let mut counts = vec![0i64; p as usize];
    for x in field.elements() {
        let Some(xinv) = field.inv(&x) else {
            if !f.shape().is_laurent() {
                counts[field.absolute_trace(&coeffs[0].1).residue as usize] += 1;
            }
            continue;
        };
        let mut value = field.zero();
        for (j, a) in &coeffs {
            let base_pt = if *j >= 0 { &x } else { &xinv };
            let term = field.mul(a, &field.pow(base_pt, j.unsigned_abs() as u64));
            value = field.add(&value, &term);
        }
        counts[field.absolute_trace(&value).residue as usize] += 1;
    }
    Ok(CyclotomicInteger::from_exponent_counts(p, &counts))
}
