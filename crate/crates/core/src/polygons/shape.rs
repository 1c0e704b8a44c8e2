use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, lcm};
use crate::error::{LabError, Result};

/// The exponent interval `[-e, d]` of a Laurent polynomial, with `D = d` when
/// `e = 0` and `D = lcm(d, e)` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntervalShape {
    d: u32,
    e: u32,
    big_d: u64,
}

impl IntervalShape {
    pub fn new(d: u32, e: u32) -> Result<Self> {
        if d == 0 {
            return Err(LabError::InvalidShape("d must be positive".into()));
        }
        let big_d = if e == 0 {
            d as u64
        } else {
            lcm(d as u64, e as u64)
        };
        Ok(IntervalShape { d, e, big_d })
    }

    /// Shape validated against a prime: `p` must be prime and prime to `D`.
    pub fn for_prime(d: u32, e: u32, p: u64) -> Result<Self> {
        let shape = Self::new(d, e)?;
        shape.check_prime(p)?;
        Ok(shape)
    }

    pub fn check_prime(&self, p: u64) -> Result<()> {
        if !is_prime(p) {
            return Err(LabError::NotPrime(p));
        }
        if self.big_d.is_multiple_of(p) {
            return Err(LabError::PrimeDividesD {
                p,
                big_d: self.big_d,
            });
        }
        Ok(())
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn big_d(&self) -> u64 {
        self.big_d
    }

    pub fn is_laurent(&self) -> bool {
        self.e > 0
    }

    /// Degree of the L-polynomial: `d + e` on the torus, `d - 1` on the line.
    pub fn l_degree(&self) -> usize {
        if self.e > 0 {
            (self.d + self.e) as usize
        } else {
            self.d as usize - 1
        }
    }

    /// Variable subscripts `-e..=d`.
    pub fn subscripts(&self) -> std::ops::RangeInclusive<i32> {
        -(self.e as i32)..=self.d as i32
    }
}

/// Which form of the `3D` threshold a check relied on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Threshold {
    /// `p >= 3D`
    AtLeast3D,
    /// `p > 3D`
    Above3D,
}

impl Threshold {
    pub fn met(self, p: u64, shape: &IntervalShape) -> bool {
        let bound = 3 * shape.big_d();
        match self {
            Threshold::AtLeast3D => p >= bound,
            Threshold::Above3D => p > bound,
        }
    }
}
