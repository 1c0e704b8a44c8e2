use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::oracle::CyclotomicInteger;

/// Largest supported `p^M`; keeps products and short sums inside `u128`.
pub const MAX_MODULUS: u64 = 1 << 56;

/// `(1 - zeta)`-adic valuation known at finite precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PadicValuation {
    Exact(u64),
    /// Indistinguishable from zero: the valuation is at least this.
    AtLeast(u64),
}

impl PadicValuation {
    pub fn exact(self) -> Option<u64> {
        match self {
            PadicValuation::Exact(v) => Some(v),
            PadicValuation::AtLeast(_) => None,
        }
    }

    /// The certain lower bound.
    pub fn lower_bound(self) -> u64 {
        match self {
            PadicValuation::Exact(v) | PadicValuation::AtLeast(v) => v,
        }
    }
}

impl fmt::Display for PadicValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PadicValuation::Exact(v) => write!(f, "{v}"),
            PadicValuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

/// `p^m`, if it stays below [`MAX_MODULUS`].
pub fn padic_modulus(p: u64, m: u32) -> Result<u64> {
    match p.checked_pow(m) {
        Some(v) if v <= MAX_MODULUS => Ok(v),
        _ => Err(LabError::Precision(format!(
            "{p}^{m} exceeds the supported modulus 2^56"
        ))),
    }
}

/// Element of `Z_p[zeta_p] / p^M`, in the basis `1, zeta, ..., zeta^(p-2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicCyclotomic {
    p: u64,
    precision: u32,
    modulus: u64,
    coords: Vec<u64>,
}

impl PadicCyclotomic {
    pub fn zero(p: u64, precision: u32) -> Result<Self> {
        let modulus = padic_modulus(p, precision)?;
        Ok(PadicCyclotomic {
            p,
            precision,
            modulus,
            coords: vec![0; p as usize - 1],
        })
    }

    fn zero_like(&self) -> Self {
        PadicCyclotomic {
            coords: vec![0; self.coords.len()],
            ..self.clone()
        }
    }

    pub fn from_integer(p: u64, precision: u32, n: i64) -> Result<Self> {
        let mut z = Self::zero(p, precision)?;
        z.coords[0] = n.rem_euclid(z.modulus as i64) as u64;
        Ok(z)
    }

    pub fn one(p: u64, precision: u32) -> Result<Self> {
        Self::from_integer(p, precision, 1)
    }

    /// `zeta^j`.
    pub fn zeta_power(p: u64, precision: u32, j: i64) -> Result<Self> {
        let mut full = vec![0u64; p as usize];
        full[j.rem_euclid(p as i64) as usize] = 1;
        let z = Self::zero(p, precision)?;
        Ok(z.reduce_full(full))
    }

    /// Element with coordinates in the basis `1, zeta, .., zeta^(p-2)`,
    /// already reduced mod `p^M`.
    pub fn from_coords(p: u64, precision: u32, coords: &[u64]) -> Result<Self> {
        let mut out = Self::zero(p, precision)?;
        if coords.len() != out.coords.len() {
            return Err(LabError::LengthMismatch {
                left: coords.len(),
                right: out.coords.len(),
            });
        }
        for (c, &x) in out.coords.iter_mut().zip(coords) {
            *c = x % out.modulus;
        }
        Ok(out)
    }

    /// Reduction of an exact cyclotomic integer.
    pub fn from_cyclotomic(z: &CyclotomicInteger, precision: u32) -> Result<Self> {
        let p = z.p() as u64;
        let mut out = Self::zero(p, precision)?;
        let m = BigInt::from(out.modulus);
        for (c, x) in out.coords.iter_mut().zip(z.coords()) {
            *c = x.mod_floor(&m).to_u64().expect("reduced below modulus");
        }
        Ok(out)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn check(&self, other: &Self) {
        assert!(
            self.p == other.p && self.precision == other.precision,
            "mixed p-adic rings"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let m = self.modulus;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (a + b) % m)
            .collect();
        PadicCyclotomic {
            coords,
            ..self.clone()
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.check(other);
        let m = self.modulus;
        for (a, &b) in self.coords.iter_mut().zip(&other.coords) {
            *a = (*a + b) % m;
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        let m = self.modulus;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (a + m - b) % m)
            .collect();
        PadicCyclotomic {
            coords,
            ..self.clone()
        }
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus;
        PadicCyclotomic {
            coords: self.coords.iter().map(|&a| (m - a) % m).collect(),
            ..self.clone()
        }
    }

    /// Multiply by a rational integer given mod `p^M`.
    pub fn scale(&self, c: u64) -> Self {
        let m = self.modulus as u128;
        let c = c as u128 % m;
        let coords = self
            .coords
            .iter()
            .map(|&a| (a as u128 * c % m) as u64)
            .collect();
        PadicCyclotomic {
            coords,
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let p = self.p as usize;
        let m = self.modulus as u128;
        let mut acc = vec![0u128; p];
        let mut pending = 0usize;
        for (i, &a) in self.coords.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coords.iter().enumerate() {
                if b != 0 {
                    let slot = if i + j >= p { i + j - p } else { i + j };
                    acc[slot] += a as u128 * b as u128;
                }
            }
            pending += 1;
            if pending == 1 << 14 {
                acc.iter_mut().for_each(|x| *x %= m);
                pending = 0;
            }
        }
        let full: Vec<u64> = acc.into_iter().map(|x| (x % m) as u64).collect();
        self.zero_like().reduce_full(full)
    }

    /// Fold a length-`p` vector over `1..zeta^(p-1)` into the power basis.
    fn reduce_full(mut self, mut full: Vec<u64>) -> Self {
        let m = self.modulus;
        let top = full.pop().expect("length p");
        for (c, x) in self.coords.iter_mut().zip(full) {
            *c = (x + m - top % m) % m;
        }
        self
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut acc = Self::one(self.p, self.precision).expect("valid ring");
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    /// Coordinates in the basis `1, w, ..., w^(p-2)` with `w = zeta - 1`.
    pub fn w_coords(&self) -> Vec<u64> {
        let n = self.coords.len();
        let m = self.modulus as u128;
        // zeta^j = sum_i C(j, i) w^i
        let mut binom = vec![vec![0u128; n]; n];
        for j in 0..n {
            binom[j][0] = 1;
            for i in 1..=j {
                binom[j][i] = (binom[j - 1][i - 1] + if i < j { binom[j - 1][i] } else { 0 }) % m;
            }
        }
        (0..n)
            .map(|i| {
                let s: u128 = (i..n)
                    .map(|j| binom[j][i] * self.coords[j] as u128 % m)
                    .sum();
                (s % m) as u64
            })
            .collect()
    }

    /// `min_i (i + (p-1) v_p(b_i))` over the `w`-coordinates; elements that
    /// vanish mod `p^M` report `AtLeast(M (p-1))`.
    pub fn valuation(&self) -> PadicValuation {
        let b = self.w_coords();
        let mut best: Option<u64> = None;
        for (i, &c) in b.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut v = 0u64;
            let mut x = c;
            while x % self.p == 0 {
                x /= self.p;
                v += 1;
            }
            let val = i as u64 + (self.p - 1) * v;
            best = Some(best.map_or(val, |b| b.min(val)));
        }
        match best {
            Some(v) => PadicValuation::Exact(v),
            None => PadicValuation::AtLeast(self.precision as u64 * (self.p - 1)),
        }
    }

    /// Same element at a lower precision.
    pub fn truncate(&self, precision: u32) -> Result<Self> {
        if precision > self.precision {
            return Err(LabError::Precision(
                "cannot raise precision by truncation".into(),
            ));
        }
        let mut out = Self::zero(self.p, precision)?;
        for (c, &x) in out.coords.iter_mut().zip(&self.coords) {
            *c = x % out.modulus;
        }
        Ok(out)
    }

    /// Exact quotient by `p^k`, if every coordinate is divisible; the
    /// result has precision `M - k`.
    pub fn div_p_power(&self, k: u32) -> Option<Self> {
        let pk = self.p.checked_pow(k)?;
        if k > self.precision || self.coords.iter().any(|&c| c % pk != 0) {
            return None;
        }
        let mut out = Self::zero(self.p, self.precision - k).ok()?;
        for (c, &x) in out.coords.iter_mut().zip(&self.coords) {
            *c = (x / pk) % out.modulus;
        }
        Some(out)
    }
}

impl fmt::Display for PadicCyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} mod {}^{}", self.coords, self.p, self.precision)
    }
}
