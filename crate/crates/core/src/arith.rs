//! Small-integer number theory shared by every module.

/// Deterministic trial-division primality test; inputs here are desk-scale.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut f = 3;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// `p^k`, `None` on overflow.
pub fn checked_pow(p: u64, k: u32) -> Option<u64> {
    p.checked_pow(k)
}

/// Exponent of `p` in `n` (`n != 0`).
pub fn p_valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Floor and ceiling of `num / den` for `den > 0`.
pub fn floor_div(num: i64, den: i64) -> i64 {
    num.div_euclid(den)
}

pub fn ceil_div(num: i64, den: i64) -> i64 {
    -((-num).div_euclid(den))
}

/// `den * {num / den}`, the numerator of the fractional part, in `[0, den)`.
pub fn frac_numer(num: i64, den: i64) -> i64 {
    num.rem_euclid(den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_factors() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(prime_factors(360), vec![2, 3, 5]);
        assert_eq!(prime_factors(11u64.pow(5) - 1), vec![2, 5, 3221]);
    }

    #[test]
    fn modular_helpers() {
        assert_eq!(inv_mod(5040 % 11, 11), Some(6));
        assert_eq!(inv_mod(6, 9), None);
        assert_eq!(pow_mod(3, 4, 7), 4);
        assert_eq!(lcm(4, 6), 12);
    }

    #[test]
    fn floor_ceil_frac() {
        assert_eq!(floor_div(-10, 3), -4);
        assert_eq!(ceil_div(-10, 3), -3);
        assert_eq!(ceil_div(10, 3), 4);
        assert_eq!(frac_numer(-10, 3), 2);
        assert_eq!(frac_numer(9, 3), 0);
    }
}
