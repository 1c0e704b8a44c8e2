use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact rational in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RationalValue(BigRational);

impl RationalValue {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        RationalValue(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(n: i64) -> Self {
        RationalValue(BigRational::from_integer(n.into()))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Self {
        RationalValue(BigRational::new(numer, denom))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// `(numerator, denominator)` as machine integers, if they fit.
    pub fn to_i64_pair(&self) -> Option<(i64, i64)> {
        Some((self.numer().to_i64()?, self.denom().to_i64()?))
    }
}

impl From<BigRational> for RationalValue {
    fn from(r: BigRational) -> Self {
        RationalValue(r)
    }
}

impl fmt::Display for RationalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalValue {
            type Output = RationalValue;
            fn $m(self, rhs: RationalValue) -> RationalValue {
                RationalValue(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a RationalValue> for &'a RationalValue {
            type Output = RationalValue;
            fn $m(self, rhs: &'a RationalValue) -> RationalValue {
                RationalValue((&self.0).$m(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for RationalValue {
    type Output = RationalValue;
    fn neg(self) -> RationalValue {
        RationalValue(-self.0)
    }
}
