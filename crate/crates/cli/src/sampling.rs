use std::sync::Arc;

use newton_lab::oracle::{build_extension, ExtensionField, LaurentCoeffVector};
use newton_lab::polygons::IntervalShape;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, Result};

/// Nondegenerate coefficient vectors `a_{-e}, .., a_d` over `F_{p^b}`,
/// indexed in mixed radix (`a_d`, `a_{-e}` nonzero).
#[derive(Clone, Debug)]
pub struct VectorSpace {
    shape: IntervalShape,
    field: Arc<ExtensionField>,
}

impl VectorSpace {
    pub fn new(p: u64, b: usize, shape: IntervalShape) -> Result<Self> {
        shape.check_prime(p)?;
        Ok(VectorSpace {
            shape,
            field: Arc::new(build_extension(p, b)?),
        })
    }

    fn q(&self) -> u64 {
        self.field.order()
    }

    fn radix(&self, i: i32) -> u64 {
        let pinned =
            i == self.shape.d() as i32 || (self.shape.e() > 0 && i == -(self.shape.e() as i32));
        if pinned {
            self.q() - 1
        } else {
            self.q()
        }
    }

    fn size(&self, skip_a0: bool) -> Result<u64> {
        self.shape
            .subscripts()
            .filter(|&i| !(skip_a0 && i == 0))
            .try_fold(1u64, |acc, i| acc.checked_mul(self.radix(i)))
            .ok_or_else(|| CliError::Validation("vector space too large to index".into()))
    }

    /// Vectors with `a_0 = 0`; the Newton polygon does not depend on `a_0`.
    pub fn exhaustive_len(&self) -> Result<u64> {
        self.size(true)
    }

    pub fn full_len(&self) -> Result<u64> {
        self.size(false)
    }

    fn decode(&self, mut index: u64, skip_a0: bool) -> Result<LaurentCoeffVector> {
        let mut coeffs = Vec::with_capacity(self.shape.subscripts().count());
        for i in self.shape.subscripts() {
            if skip_a0 && i == 0 {
                coeffs.push(self.field.zero());
                continue;
            }
            let radix = self.radix(i);
            let digit = index % radix;
            index /= radix;
            let offset = u64::from(radix != self.q());
            coeffs.push(self.field.element_from_index(digit + offset));
        }
        Ok(LaurentCoeffVector::with_field(
            self.shape,
            self.field.clone(),
            coeffs,
        )?)
    }

    /// All vectors with `a_0 = 0`, sorted by key.
    pub fn exhaustive(&self) -> Result<Vec<LaurentCoeffVector>> {
        let n = self.exhaustive_len()?;
        let mut out = (0..n)
            .map(|i| self.decode(i, true))
            .collect::<Result<Vec<_>>>()?;
        out.sort_by_key(LaurentCoeffVector::key);
        Ok(out)
    }

    /// `count` distinct vectors drawn uniformly with ChaCha8, sorted by key.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<LaurentCoeffVector>> {
        let total = self.full_len()?;
        if count as u64 > total {
            return Err(CliError::Validation(format!(
                "sample of {count} exceeds the {total} nondegenerate vectors"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let picks = rand::seq::index::sample(&mut rng, total as usize, count);
        let mut out = picks
            .into_iter()
            .map(|i| self.decode(i as u64, false))
            .collect::<Result<Vec<_>>>()?;
        out.sort_by_key(LaurentCoeffVector::key);
        Ok(out)
    }
}
