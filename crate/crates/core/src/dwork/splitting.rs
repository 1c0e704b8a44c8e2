use rayon::prelude::*;
use serde_json::{json, Value};

use super::padic::{padic_modulus, PadicCyclotomic, PadicValuation};
use crate::arith::pow_mod;
use crate::error::{LabError, Result};
use crate::hasse::artin_hasse;
use crate::oracle::LaurentCoeffVector;
use crate::polygons::{degree, IntervalShape};

/// Terms `lambda_n pi^n` with `n < M (p - 1)`; higher terms vanish mod `p^M`.
pub fn artin_hasse_terms(pi: &PadicCyclotomic) -> Result<Vec<PadicCyclotomic>> {
    let p = pi.p();
    let n_max = pi.precision() as usize * (p as usize - 1);
    let series = artin_hasse(p, n_max)?;
    let modulus = pi.modulus();
    let mut out = Vec::with_capacity(n_max);
    let mut power = PadicCyclotomic::one(p, pi.precision())?;
    for n in 0..n_max {
        out.push(power.scale(series.coeff_mod(n, modulus)));
        power = power.mul(pi);
    }
    Ok(out)
}

/// `E(x) = sum lambda_n x^n` for `x` of positive valuation, truncated at
/// `M (p - 1)` terms (exact mod `p^M` once `v(x) >= 1`).
pub fn artin_hasse_at(x: &PadicCyclotomic) -> Result<PadicCyclotomic> {
    let p = x.p();
    let n_max = x.precision() as usize * (p as usize - 1);
    let series = artin_hasse(p, n_max)?;
    let one = PadicCyclotomic::one(p, x.precision())?;
    let mut acc = PadicCyclotomic::zero(p, x.precision())?;
    for n in (0..n_max).rev() {
        acc = acc.mul(x).add(&one.scale(series.coeff_mod(n, x.modulus())));
    }
    Ok(acc)
}

/// Dwork's `pi` in `Z_p[zeta_p] / p^M`: the solution of `E(pi) = zeta`
/// reached from `zeta - 1`, which is also a root of
/// `sum_i pi^(p^i) / p^i = 0`. The relation is verified at `M + I` digits.
pub fn dwork_pi(p: u64, precision: u32) -> Result<PadicCyclotomic> {
    if precision < 2 {
        return Err(LabError::Precision(
            "Dwork's pi needs at least two digits".into(),
        ));
    }
    // I: the first omitted relation term pi^(p^(I+1)) / p^(I+1) has ord >= M
    let mut big_i = 0u32;
    while ((p as f64).powi(big_i as i32 + 1) / (p - 1) as f64 - (big_i + 1) as f64)
        < precision as f64
    {
        big_i += 1;
    }
    let work = precision + big_i;
    let pi = solve_pi(p, work)?;
    let mut residual = PadicCyclotomic::zero(p, work)?;
    let mut pow = pi.clone();
    for i in 0..=big_i {
        residual = residual.add(&pow.scale(p.pow(big_i - i)));
        if i < big_i {
            pow = pow.pow(p);
        }
    }
    match residual.valuation() {
        PadicValuation::AtLeast(_) => {}
        PadicValuation::Exact(v) if v >= work as u64 * (p - 1) => {}
        PadicValuation::Exact(v) => {
            return Err(LabError::Precision(format!(
                "pi relation residual has valuation {v}"
            )));
        }
    }
    pi.truncate(precision)
}

fn solve_pi(p: u64, precision: u32) -> Result<PadicCyclotomic> {
    let zeta = PadicCyclotomic::zeta_power(p, precision, 1)?;
    let one = PadicCyclotomic::one(p, precision)?;
    let mut pi = zeta.sub(&one);
    let limit = 2 * precision as usize * (p as usize - 1) + 4;
    for _ in 0..limit {
        let err = artin_hasse_at(&pi)?.sub(&zeta);
        if err.is_zero() {
            return Ok(pi);
        }
        pi = pi.sub(&err);
    }
    Err(LabError::Precision(format!(
        "E(pi) = zeta did not converge at {p}^{precision}"
    )))
}

/// Teichmuller lift of `a mod p` into `Z / p^M`, by `x -> x^p` to a fixed point.
pub fn teichmuller_scalar(a: u64, p: u64, precision: u32) -> Result<u64> {
    let m = padic_modulus(p, precision)?;
    let mut x = a % p;
    for _ in 0..=precision {
        x = pow_mod(x, p, m);
    }
    Ok(x)
}

pub fn teichmuller(a: u64, p: u64, precision: u32) -> Result<PadicCyclotomic> {
    Ok(PadicCyclotomic::one(p, precision)?.scale(teichmuller_scalar(a, p, precision)?))
}

/// `gamma_i` for `|i| <= window`: coefficients of `prod_j E(pi a_j x^j)`.
#[derive(Clone, Debug)]
pub struct SplittingCoeffs {
    pub window: i64,
    coeffs: Vec<PadicCyclotomic>,
}

impl SplittingCoeffs {
    pub fn get(&self, i: i64) -> &PadicCyclotomic {
        assert!(
            i.abs() <= self.window,
            "gamma_{i} outside the window {}",
            self.window
        );
        &self.coeffs[(i + self.window) as usize]
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        -self.window..=self.window
    }

    pub fn to_json(&self) -> Value {
        json!(self
            .indices()
            .map(|i| {
                let g = self.get(i);
                json!({"i": i, "coords": g.coords(), "valuation": g.valuation().to_string()})
            })
            .collect::<Vec<_>>())
    }
}

fn check_prime_coeffs(f: &LaurentCoeffVector) -> Result<Vec<u64>> {
    f.residues()
        .map(|r| r.into_iter().map(u64::from).collect())
        .ok_or_else(|| LabError::Invalid("the Dwork engine handles q = p only".into()))
}

/// `prod_j E(pi a_j x^step_j)` as a power series in `x`, truncated to `len` terms.
fn one_sided(
    terms: &[PadicCyclotomic],
    lifts: &[(usize, u64)],
    len: usize,
    zero: &PadicCyclotomic,
) -> Vec<PadicCyclotomic> {
    let mut acc = vec![zero.clone(); len];
    acc[0] = PadicCyclotomic::one(zero.p(), zero.precision()).expect("valid ring");
    for &(step, lift) in lifts {
        let modulus = zero.modulus();
        let mut factor = vec![zero.clone(); len];
        let mut lift_pow = 1u64;
        for (n, t) in terms.iter().enumerate() {
            if n * step >= len {
                break;
            }
            factor[n * step] = t.scale(lift_pow);
            lift_pow = (lift_pow as u128 * lift as u128 % modulus as u128) as u64;
        }
        let mut next = vec![zero.clone(); len];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in factor.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    next[i + j].add_assign(&a.mul(b));
                }
            }
        }
        acc = next;
    }
    acc
}

pub fn splitting_coeffs(
    f: &LaurentCoeffVector,
    window: i64,
    precision: u32,
) -> Result<SplittingCoeffs> {
    let residues = check_prime_coeffs(f)?;
    let p = f.p();
    let shape = f.shape();
    let pi = dwork_pi(p, precision)?;
    let terms = artin_hasse_terms(&pi)?;
    let zero = PadicCyclotomic::zero(p, precision)?;
    let lift = |j: i32| -> Result<u64> {
        teichmuller_scalar(residues[(j + shape.e() as i32) as usize], p, precision)
    };
    let pos: Vec<(usize, u64)> = (1..=shape.d() as i32)
        .map(|j| Ok((j as usize, lift(j)?)))
        .collect::<Result<_>>()?;
    let neg: Vec<(usize, u64)> = (1..=shape.e() as i32)
        .map(|j| Ok((j as usize, lift(-j)?)))
        .collect::<Result<_>>()?;
    // gamma_i = sum_{s - t = i} P_s N_t with t <= e n_max and s <= d n_max
    let n_max = terms.len() as i64;
    let (d, e) = (shape.d() as i64, shape.e() as i64);
    let pos_len = (window + e * n_max).min(d * n_max) as usize + 1;
    let neg_len = (window + d * n_max).min(e * n_max) as usize + 1;
    let (pos_series, neg_series) = rayon::join(
        || one_sided(&terms, &pos, pos_len, &zero),
        || one_sided(&terms, &neg, neg_len, &zero),
    );
    // E(pi a_0) is a scalar factor
    let a0 = lift(0)?;
    let mut const_factor = zero.clone();
    let mut lift_pow = 1u64;
    for t in &terms {
        const_factor.add_assign(&t.scale(lift_pow));
        lift_pow = (lift_pow as u128 * a0 as u128 % zero.modulus() as u128) as u64;
    }
    let coeffs: Vec<PadicCyclotomic> = (-window..=window)
        .into_par_iter()
        .map(|i| {
            // gamma_i = c0 * sum_{s - t = i} P_s N_t
            let mut acc = zero.clone();
            for (t, nt) in neg_series.iter().enumerate() {
                let s = i + t as i64;
                if s < 0 || nt.is_zero() {
                    continue;
                }
                let Some(ps) = pos_series.get(s as usize) else {
                    break;
                };
                if !ps.is_zero() {
                    acc.add_assign(&ps.mul(nt));
                }
            }
            acc.mul(&const_factor)
        })
        .collect();
    Ok(SplittingCoeffs { window, coeffs })
}

/// Leading-term identities for `gamma_i`: returns the indices where
/// `gamma_i - pi^c lambda lambda a^.. a_..` has valuation below `c + 1`,
/// with `c = ceil(i/d)` (`i >= 0`) or `ceil(-i/e)` (`i < 0`). Only indices
/// whose residual is exactly known are judged.
pub fn leading_term_violations(
    f: &LaurentCoeffVector,
    gammas: &SplittingCoeffs,
    indices: impl Iterator<Item = i64>,
) -> Result<LeadingTermCheck> {
    let residues = check_prime_coeffs(f)?;
    let shape = f.shape();
    let g0 = gammas.get(0);
    let (p, precision) = (g0.p(), g0.precision());
    let pi = dwork_pi(p, precision)?;
    let indices: Vec<i64> = indices.collect();
    let widest = indices.iter().map(|i| i.unsigned_abs()).max().unwrap_or(0) as usize;
    let series = artin_hasse(p, widest + 1)?;
    let modulus = g0.modulus();
    let lift = |j: i64| teichmuller_scalar(residues[(j + shape.e() as i64) as usize], p, precision);
    let mut out = LeadingTermCheck::default();
    for i in indices {
        if shape.e() == 0 && i < 0 {
            continue;
        }
        let (width, top) = if i >= 0 {
            (shape.d() as i64, shape.d() as i64)
        } else {
            (shape.e() as i64, -(shape.e() as i64))
        };
        let a = i.abs();
        let (q, r) = (a / width, a % width);
        let c = q + i64::from(r != 0);
        let rest_index = if i >= 0 { r } else { -r };
        let lam = series.coeff_mod(q as usize, modulus) as u128
            * series.coeff_mod(usize::from(r != 0), modulus) as u128
            % modulus as u128;
        let mut scalar = lam * pow_mod(lift(top)?, q as u64, modulus) as u128 % modulus as u128;
        if r != 0 {
            scalar = scalar * lift(rest_index)? as u128 % modulus as u128;
        }
        let main = pi.pow(c as u64).scale(scalar as u64);
        let residual = gammas.get(i).sub(&main);
        out.checked += 1;
        match residual.valuation() {
            PadicValuation::Exact(v) if v < c as u64 + 1 => out.violations.push(i),
            PadicValuation::Exact(_) => {}
            PadicValuation::AtLeast(v) if v < c as u64 + 1 => out.undecided.push(i),
            PadicValuation::AtLeast(_) => {}
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LeadingTermCheck {
    pub checked: usize,
    pub violations: Vec<i64>,
    /// Residual vanishes at this precision but the bound exceeds it.
    pub undecided: Vec<i64>,
}

/// Indices `i` where `v(gamma_i) < ceil(deg(i))` is certain.
pub fn corollary_floor_violations(
    shape: &IntervalShape,
    gammas: &SplittingCoeffs,
) -> Result<Vec<i64>> {
    let mut bad = Vec::new();
    for i in gammas.indices() {
        if shape.e() == 0 && i < 0 {
            continue;
        }
        let floor = ceil_degree(i, shape)?;
        if let PadicValuation::Exact(v) = gammas.get(i).valuation() {
            if (v as i64) < floor {
                bad.push(i);
            }
        }
    }
    Ok(bad)
}

pub(crate) fn ceil_degree(i: i64, shape: &IntervalShape) -> Result<i64> {
    let deg = degree(i, shape)?;
    let (n, d) = deg
        .to_i64_pair()
        .ok_or_else(|| LabError::Invalid("degree overflow".into()))?;
    Ok(crate::arith::ceil_div(n, d))
}
