//! Generic Newton polygons of L-functions of one-variable Laurent exponential
//! sums.
//!
//! * [`polygons`]: Hodge and arithmetic polygons, exact rational combinatorics.
//! * [`hasse`]: Artin-Hasse coefficients and the Hasse polynomial over `F_p`.
//! * [`oracle`]: exact character sums in `Z[zeta_p]`, L-polynomials and their
//!   Newton polygons, plus per-instance theorem checks.
//! * [`dwork`]: an independent p-adic computation of the same Newton polygon
//!   through a truncated Fredholm determinant.

pub mod arith;
pub mod dwork;
pub mod error;
pub mod hasse;
pub mod oracle;
pub mod polygons;

pub use error::{LabError, Result};
