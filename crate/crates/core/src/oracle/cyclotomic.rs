use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact element of `Z[zeta_p]` in the power basis `1, zeta, ..., zeta^(p-2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclotomicInteger {
    p: u32,
    coords: Vec<BigInt>,
}

/// A valuation that may be infinite (for zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl CyclotomicInteger {
    pub fn zero(p: u32) -> Self {
        CyclotomicInteger {
            p,
            coords: vec![BigInt::zero(); p as usize - 1],
        }
    }

    pub fn from_integer(p: u32, n: impl Into<BigInt>) -> Self {
        let mut z = Self::zero(p);
        z.coords[0] = n.into();
        z
    }

    pub fn one(p: u32) -> Self {
        Self::from_integer(p, 1)
    }

    /// `zeta^j` for any integer `j`.
    pub fn zeta_power(p: u32, j: i64) -> Self {
        let mut counts = vec![0i64; p as usize];
        counts[j.rem_euclid(p as i64) as usize] = 1;
        Self::from_exponent_counts(p, &counts)
    }

    /// `sum_r counts[r] * zeta^r` over `r in 0..p`.
    pub fn from_exponent_counts(p: u32, counts: &[i64]) -> Self {
        assert_eq!(counts.len(), p as usize);
        let top = counts[p as usize - 1];
        let coords = counts[..p as usize - 1]
            .iter()
            .map(|&c| BigInt::from(c - top))
            .collect();
        CyclotomicInteger { p, coords }
    }

    pub fn from_coords(p: u32, coords: Vec<BigInt>) -> Self {
        assert_eq!(coords.len(), p as usize - 1);
        CyclotomicInteger { p, coords }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn coords_i64(&self) -> Option<Vec<i64>> {
        self.coords.iter().map(|c| c.to_i64()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// The rational integer this element equals, if it lies in `Z`.
    pub fn as_rational_integer(&self) -> Option<&BigInt> {
        self.coords[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| &self.coords[0])
    }

    pub fn add(&self, other: &Self) -> Self {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        CyclotomicInteger { p: self.p, coords }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        CyclotomicInteger { p: self.p, coords }
    }

    pub fn neg(&self) -> Self {
        CyclotomicInteger {
            p: self.p,
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        CyclotomicInteger {
            p: self.p,
            coords: self.coords.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.p as usize;
        let mut acc = vec![BigInt::zero(); p];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                acc[(i + j) % p] += a * b;
            }
        }
        Self::reduce_full(self.p, acc)
    }

    /// Map a length-`p` vector over `1, ..., zeta^(p-1)` onto the power basis.
    fn reduce_full(p: u32, mut acc: Vec<BigInt>) -> Self {
        let top = acc.pop().expect("length p");
        let coords = acc.into_iter().map(|c| c - &top).collect();
        CyclotomicInteger { p, coords }
    }

    /// Exact division by a rational integer; `None` if not exact in `Z[zeta_p]`.
    pub fn div_exact(&self, n: &BigInt) -> Option<Self> {
        let mut coords = Vec::with_capacity(self.coords.len());
        for c in &self.coords {
            let (q, r) = c.div_rem(n);
            if !r.is_zero() {
                return None;
            }
            coords.push(q);
        }
        Some(CyclotomicInteger { p: self.p, coords })
    }

    /// Galois action `zeta -> zeta^c` for `c` prime to `p`.
    pub fn galois(&self, c: u32) -> Self {
        let p = self.p as usize;
        assert!(!(c as usize).is_multiple_of(p));
        let mut acc = vec![BigInt::zero(); p];
        for (i, a) in self.coords.iter().enumerate() {
            acc[(i * c as usize) % p] += a;
        }
        Self::reduce_full(self.p, acc)
    }

    /// Exact quotient by `1 - zeta`, if it exists.
    ///
    /// `z` is divisible iff its image under `zeta -> 1` vanishes mod `p`. In
    /// that case `z(x) - s * Phi_p(x)` with `s = z(1)/p` vanishes at `x = 1`
    /// and is divided by `1 - x` as a polynomial.
    pub fn div_one_minus_zeta(&self) -> Option<Self> {
        let p = BigInt::from(self.p);
        let sum: BigInt = self.coords.iter().sum();
        let (s, r) = sum.div_rem(&p);
        if !r.is_zero() {
            return None;
        }
        // w(x) = z(x) - s * (1 + x + ... + x^(p-1)), degree p-1
        let mut w: Vec<BigInt> = self.coords.iter().map(|c| c - &s).collect();
        w.push(-s);
        // synthetic division of w by (x - 1), from the top
        let n = w.len();
        let mut q = vec![BigInt::zero(); n - 1];
        let mut carry = BigInt::zero();
        for i in (1..n).rev() {
            carry += &w[i];
            q[i - 1] = carry.clone();
        }
        debug_assert!((carry + &w[0]).is_zero());
        // w = (x - 1) q  =>  z = (1 - x)(-q)
        Some(CyclotomicInteger {
            p: self.p,
            coords: q.into_iter().map(|c| -c).collect(),
        })
    }

    /// `(1 - zeta)`-adic valuation by repeated exact division; in these units
    /// `ord_p = valuation / (p - 1)`.
    pub fn pi_adic_valuation(&self) -> Valuation {
        if self.is_zero() {
            return Valuation::Infinite;
        }
        let mut v = 0;
        let mut cur = self.clone();
        // strip whole powers of p first: p = unit * (1 - zeta)^(p-1)
        loop {
            let g = cur.coords.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
            if g.is_positive() && (&g % self.p).is_zero() {
                cur = cur.div_exact(&BigInt::from(self.p)).expect("gcd divisible");
                v += self.p as u64 - 1;
            } else {
                break;
            }
        }
        while let Some(next) = cur.div_one_minus_zeta() {
            cur = next;
            v += 1;
        }
        Valuation::Finite(v)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(Zero::is_zero)
    }
}

impl fmt::Display for CyclotomicInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match i {
                0 => c.to_string(),
                1 => format!("{c}*z"),
                _ => format!("{c}*z^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Norm as the determinant of multiplication-by-z on the power basis
    /// (fraction-free Bareiss elimination); `v_p(N(z))` equals the
    /// `(1 - zeta)`-adic valuation because `p` is totally ramified.
    fn norm(z: &CyclotomicInteger) -> BigInt {
        let n = z.p as usize - 1;
        let mut m: Vec<Vec<BigInt>> = (0..n)
            .map(|j| {
                z.mul(&CyclotomicInteger::zeta_power(z.p, j as i64))
                    .coords
                    .clone()
            })
            .collect();
        let mut prev = BigInt::one();
        let mut sign = BigInt::one();
        for k in 0..n {
            if m[k][k].is_zero() {
                let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                    return BigInt::zero();
                };
                m.swap(k, r);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        sign * &m[n - 1][n - 1]
    }

    fn vp(n: &BigInt, p: u32) -> u64 {
        let mut n = n.abs();
        let p = BigInt::from(p);
        let mut v = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            v += 1;
        }
        v
    }

    #[test]
    fn valuation_examples() {
        for p in [3u32, 5, 7, 11] {
            let one_minus = CyclotomicInteger::one(p).sub(&CyclotomicInteger::zeta_power(p, 1));
            assert_eq!(one_minus.pi_adic_valuation(), Valuation::Finite(1));
            assert_eq!(
                CyclotomicInteger::from_integer(p, p).pi_adic_valuation(),
                Valuation::Finite(p as u64 - 1)
            );
            assert_eq!(
                CyclotomicInteger::zero(p).pi_adic_valuation(),
                Valuation::Infinite
            );
            assert_eq!(
                CyclotomicInteger::zeta_power(p, 3).pi_adic_valuation(),
                Valuation::Finite(0)
            );
        }
    }

    #[test]
    fn zeta_sums() {
        // zeta + zeta^2 = -1 for p = 3
        let s = CyclotomicInteger::zeta_power(3, 1).add(&CyclotomicInteger::zeta_power(3, 2));
        assert_eq!(s, CyclotomicInteger::from_integer(3, -1));
        let z = CyclotomicInteger::zeta_power(7, 1);
        let mut acc = CyclotomicInteger::one(7);
        for _ in 0..7 {
            acc = acc.mul(&z);
        }
        assert!(acc.is_one());
    }

    proptest! {
        #[test]
        fn valuation_matches_norm(p in prop::sample::select(vec![3u32, 5, 7]),
                                  raw in prop::collection::vec(-30i64..30, 6),
                                  boost in 0u32..3) {
            let coords: Vec<BigInt> = raw[..p as usize - 1].iter().map(|&c| BigInt::from(c)).collect();
            let mut z = CyclotomicInteger::from_coords(p, coords);
            let pi = CyclotomicInteger::one(p).sub(&CyclotomicInteger::zeta_power(p, 1));
            for _ in 0..boost {
                z = z.mul(&pi);
            }
            prop_assume!(!z.is_zero());
            let v = z.pi_adic_valuation().finite().unwrap();
            prop_assert_eq!(v, vp(&norm(&z), p));
        }

        #[test]
        fn galois_is_a_ring_map(raw_a in prop::collection::vec(-9i64..9, 4),
                                raw_b in prop::collection::vec(-9i64..9, 4),
                                c in 1u32..5) {
            let a = CyclotomicInteger::from_coords(5, raw_a.into_iter().map(BigInt::from).collect());
            let b = CyclotomicInteger::from_coords(5, raw_b.into_iter().map(BigInt::from).collect());
            prop_assert_eq!(a.mul(&b).galois(c), a.galois(c).mul(&b.galois(c)));
            prop_assert_eq!(a.add(&b).galois(c), a.galois(c).add(&b.galois(c)));
        }
    }
}
