use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, prime_factors};
use crate::error::{LabError, Result};

/// Residue class in `F_p`, stored reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimeFieldElement {
    pub residue: u32,
    pub p: u32,
}

impl PrimeFieldElement {
    pub fn new(value: i64, p: u32) -> Self {
        PrimeFieldElement {
            residue: value.rem_euclid(p as i64) as u32,
            p,
        }
    }
}

/// Dense polynomials over `F_p`, ascending coefficients, no trailing zeros.
pub(crate) mod fpoly {
    use crate::arith::inv_mod;

    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = *a.get(i).unwrap_or(&0) as u64;
                let y = *b.get(i).unwrap_or(&0) as u64;
                ((x + p as u64 - y) % p as u64) as u32
            })
            .collect();
        trim(out)
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = trim(a.to_vec());
        let m = trim(m.to_vec());
        let lead_inv = inv_mod(*m.last().unwrap() as u64, p as u64).unwrap();
        while r.len() >= m.len() {
            let shift = r.len() - m.len();
            let c = (*r.last().unwrap() as u64 * lead_inv) % p as u64;
            for (i, &mi) in m.iter().enumerate() {
                let v = (r[shift + i] as u64 + p as u64 * p as u64 - c * mi as u64) % p as u64;
                r[shift + i] = v as u32;
            }
            r = trim(r);
        }
        r
    }

    pub fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        rem(
            &prod.into_iter().map(|v| v as u32).collect::<Vec<_>>(),
            m,
            p,
        )
    }

    pub fn pow_mod(base: &[u32], mut exp: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut acc = vec![1];
        let mut b = rem(base, m, p);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul_mod(&acc, &b, m, p);
            }
            b = mul_mod(&b, &b, m, p);
            exp >>= 1;
        }
        rem(&acc, m, p)
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }
}

/// Rabin's irreducibility test for a monic `f` of degree `k` over `F_p`.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let k = f.len() - 1;
    if k == 1 {
        return true;
    }
    let x = vec![0, 1];
    let pp = p as u64;
    // x^(p^k) == x mod f
    let mut frob = x.clone();
    for _ in 0..k {
        frob = fpoly::pow_mod(&frob, pp, f, p);
    }
    if fpoly::sub(&frob, &x, p) != Vec::<u32>::new() {
        return false;
    }
    for r in prime_factors(k as u64) {
        let mut h = x.clone();
        for _ in 0..k as u64 / r {
            h = fpoly::pow_mod(&h, pp, f, p);
        }
        let g = fpoly::gcd(f, &fpoly::sub(&h, &x, p), p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// `F_{p^k} = F_p[y] / (modulus)`.
///
/// The modulus is the first monic irreducible polynomial of degree `k` when
/// the lower coefficients are enumerated as a base-`p` counter with the
/// constant term as the least significant digit (lexicographic order read
/// from `y^(k-1)` down to `y^0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionField {
    p: u32,
    degree: usize,
    modulus: Vec<u32>,
    /// `Tr(y^i)` for `i < degree`; the trace is the dot product with this.
    basis_traces: Vec<u32>,
}

/// Element of an [`ExtensionField`]: `degree` coefficients, ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement(pub Vec<u32>);

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            write!(f, "{:?}", self.0)
        }
    }
}

pub fn build_extension(p: u64, k: usize) -> Result<ExtensionField> {
    if !is_prime(p) || p > u16::MAX as u64 {
        return Err(LabError::NotPrime(p));
    }
    if k == 0 {
        return Err(LabError::OutOfRange(
            "extension degree must be positive".into(),
        ));
    }
    let p32 = p as u32;
    let total = (p as u128).pow(k as u32);
    for t in 0..total {
        let mut m = Vec::with_capacity(k + 1);
        let mut rest = t;
        for _ in 0..k {
            m.push((rest % p as u128) as u32);
            rest /= p as u128;
        }
        m.push(1);
        if k > 1 && m[0] == 0 {
            continue;
        }
        if is_irreducible(&m, p32) {
            return Ok(ExtensionField::with_modulus(p32, m));
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

impl ExtensionField {
    fn with_modulus(p: u32, modulus: Vec<u32>) -> Self {
        let degree = modulus.len() - 1;
        let mut field = ExtensionField {
            p,
            degree,
            modulus,
            basis_traces: Vec::new(),
        };
        field.basis_traces = (0..degree)
            .map(|i| {
                let mut y = vec![0; degree];
                if degree == 1 {
                    // y is the constant root of the degree-one modulus
                    y[0] = (p - field.modulus[0]) % p;
                    let yi = field.pow(&FieldElement(y), i as u64);
                    return field.absolute_trace(&yi).residue;
                }
                y[i] = 1;
                field.absolute_trace(&FieldElement(y)).residue
            })
            .collect();
        field
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.degree as u32)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(vec![0; self.degree])
    }

    pub fn one(&self) -> FieldElement {
        self.constant(1)
    }

    pub fn constant(&self, c: i64) -> FieldElement {
        let mut v = vec![0; self.degree];
        v[0] = c.rem_euclid(self.p as i64) as u32;
        FieldElement(v)
    }

    pub fn is_zero(&self, a: &FieldElement) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    /// The `t`-th element in counter order (constant term least significant).
    pub fn element_from_index(&self, mut t: u64) -> FieldElement {
        let mut v = Vec::with_capacity(self.degree);
        for _ in 0..self.degree {
            v.push((t % self.p as u64) as u32);
            t /= self.p as u64;
        }
        FieldElement(v)
    }

    pub fn element_index(&self, a: &FieldElement) -> u64 {
        a.0.iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p as u64 + c as u64)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order()).map(move |t| self.element_from_index(t))
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| (x + y) % self.p)
                .collect(),
        )
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| (x + self.p - y) % self.p)
                .collect(),
        )
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement(a.0.iter().map(|&x| (self.p - x) % self.p).collect())
    }

    pub fn scale(&self, a: &FieldElement, c: u32) -> FieldElement {
        FieldElement(
            a.0.iter()
                .map(|&x| ((x as u64 * c as u64) % self.p as u64) as u32)
                .collect(),
        )
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let k = self.degree;
        let p = self.p as u64;
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        // reduce with the monic modulus from the top
        for top in (k..2 * k - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            for i in 0..k {
                let idx = top - k + i;
                prod[idx] = (prod[idx] + (p - c) * self.modulus[i] as u64) % p;
            }
            prod[top] = 0;
        }
        FieldElement(prod[..k].iter().map(|&v| v as u32).collect())
    }

    pub fn pow(&self, a: &FieldElement, mut exp: u64) -> FieldElement {
        let mut acc = self.one();
        let mut base = a.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, self.order() - 2))
    }

    pub fn frobenius(&self, a: &FieldElement) -> FieldElement {
        self.pow(a, self.p as u64)
    }

    /// `x + x^p + ... + x^(p^(k-1))`, computed literally by Frobenius steps.
    pub fn absolute_trace(&self, x: &FieldElement) -> PrimeFieldElement {
        let mut acc = self.zero();
        let mut cur = x.clone();
        for _ in 0..self.degree {
            acc = self.add(&acc, &cur);
            cur = self.frobenius(&cur);
        }
        debug_assert!(acc.0[1..].iter().all(|&c| c == 0), "trace must land in F_p");
        PrimeFieldElement {
            residue: acc.0[0],
            p: self.p,
        }
    }

    /// The same trace as an `F_p`-linear functional on coordinates.
    pub fn trace_linear(&self, x: &FieldElement) -> u32 {
        let p = self.p as u64;
        (x.0.iter()
            .zip(&self.basis_traces)
            .map(|(&c, &t)| c as u64 * t as u64)
            .sum::<u64>()
            % p) as u32
    }

    /// `Tr_{F_{p^k} / F_{p^s}}` for `s | k`, landed back in this field.
    pub fn relative_trace(&self, x: &FieldElement, s: usize) -> FieldElement {
        let q = (self.p as u64).pow(s as u32);
        let mut acc = self.zero();
        let mut cur = x.clone();
        for _ in 0..self.degree / s {
            acc = self.add(&acc, &cur);
            cur = self.pow(&cur, q);
        }
        acc
    }

    /// Smallest element (in counter order) generating the multiplicative group.
    pub fn primitive_element(&self) -> FieldElement {
        let n = self.order() - 1;
        let factors = prime_factors(n);
        (1..self.order())
            .map(|t| self.element_from_index(t))
            .find(|g| factors.iter().all(|&l| self.pow(g, n / l) != self.one()))
            .expect("multiplicative group is cyclic")
    }

    /// Evaluate a polynomial with `F_p` coefficients (ascending) at `x`.
    pub fn eval_base_poly(&self, coeffs: &[u32], x: &FieldElement) -> FieldElement {
        coeffs.iter().rev().fold(self.zero(), |acc, &c| {
            let shifted = self.mul(&acc, x);
            self.add(&shifted, &self.constant(c as i64))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_moduli() {
        assert_eq!(build_extension(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(build_extension(7, 1).unwrap().modulus(), &[0, 1]);
        assert_eq!(build_extension(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        assert!(matches!(build_extension(4, 2), Err(LabError::NotPrime(4))));
    }

    #[test]
    fn moduli_have_no_roots_brute_force() {
        for (p, k) in [(3u64, 2usize), (5, 2), (7, 3), (11, 2), (2, 4)] {
            let f = build_extension(p, k).unwrap();
            let m = f.modulus();
            for x in 0..p {
                let v = m
                    .iter()
                    .rev()
                    .fold(0u64, |acc, &c| (acc * x + c as u64) % p);
                assert_ne!(v, 0, "root {x} of modulus over F_{p}");
            }
        }
    }

    #[test]
    fn trace_examples() {
        for (p, k) in [(3u64, 2usize), (5, 3), (7, 1), (2, 4)] {
            let f = build_extension(p, k).unwrap();
            assert_eq!(f.absolute_trace(&f.zero()).residue, 0);
            assert_eq!(f.absolute_trace(&f.one()).residue as u64, k as u64 % p);
            for x in f.elements().take(60) {
                assert_eq!(f.absolute_trace(&x).residue, f.trace_linear(&x));
                let y = f.element_from_index(f.element_index(&x) * 7 % f.order());
                let lhs = f.absolute_trace(&f.add(&x, &y)).residue;
                let rhs = (f.absolute_trace(&x).residue + f.absolute_trace(&y).residue) % p as u32;
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn field_axioms_spot_checks() {
        let f = build_extension(5, 3).unwrap();
        let g = f.primitive_element();
        assert_eq!(f.pow(&g, f.order() - 1), f.one());
        for x in f.elements().skip(1).step_by(7) {
            let inv = f.inv(&x).unwrap();
            assert_eq!(f.mul(&x, &inv), f.one());
            assert_eq!(f.element_from_index(f.element_index(&x)), x);
        }
    }
}
