use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{inv_mod, is_prime};
use crate::error::{LabError, Result};

/// Coefficients `lambda_0..lambda_N` of the Artin-Hasse exponential
/// `E(t) = exp(sum_i t^(p^i) / p^i)` for a fixed prime `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArtinHasseSeries {
    p: u64,
    coeffs: Vec<BigRational>,
}

/// Exact coefficients via `n lambda_n = sum_{p^i <= n} lambda_{n - p^i}`,
/// the coefficient form of `E' = E * sum_i t^(p^i - 1)`.
pub fn artin_hasse(p: u64, n: usize) -> Result<ArtinHasseSeries> {
    if !is_prime(p) {
        return Err(LabError::NotPrime(p));
    }
    let mut coeffs: Vec<BigRational> = Vec::with_capacity(n + 1);
    coeffs.push(BigRational::one());
    for k in 1..=n {
        let mut acc = BigRational::zero();
        let mut pi = 1usize;
        while pi <= k {
            acc += &coeffs[k - pi];
            pi = match pi.checked_mul(p as usize) {
                Some(v) => v,
                None => break,
            };
        }
        coeffs.push(acc / BigRational::from_integer(BigInt::from(k)));
    }
    let series = ArtinHasseSeries { p, coeffs };
    for (k, c) in series.coeffs.iter().enumerate() {
        if (c.denom() % p).is_zero() {
            return Err(LabError::HasseDiagnostic(format!(
                "lambda_{k} is not {p}-integral"
            )));
        }
    }
    Ok(series)
}

impl ArtinHasseSeries {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, n: usize) -> &BigRational {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// `lambda_n` reduced into `Z / p^k Z`.
    pub fn coeff_mod(&self, n: usize, modulus: u64) -> u64 {
        reduce_rational(&self.coeffs[n], modulus).expect("coefficients are p-integral")
    }
}

/// `num / den` in `Z / mZ`, if the denominator is a unit.
pub fn reduce_rational(r: &BigRational, modulus: u64) -> Option<u64> {
    let m = BigInt::from(modulus);
    let num = r.numer().mod_floor(&m).to_u64()?;
    let den = r.denom().mod_floor(&m).to_u64()?;
    let inv = inv_mod(den, modulus)?;
    Some(((num as u128 * inv as u128) % modulus as u128) as u64)
}

/// `lambda_n mod p`.
pub fn lambda_mod_p(p: u64, n: usize) -> Result<u64> {
    let series = artin_hasse(p, n)?;
    Ok(series.coeff_mod(n, p))
}
