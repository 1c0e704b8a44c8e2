//! Dwork's p-adic engine for `q = p`: the splitting function, the nuclear
//! Frobenius matrix and its Fredholm determinant, cross-checking the exact
//! oracle.

mod fredholm;
mod padic;
mod splitting;

pub use fredholm::{
    dwork_run, dwork_run_escalating, fredholm_determinant, fredholm_series, l_from_fredholm,
    minimal_truncation, stability_check, CharSeries, DworkBudget, DworkRun, NuclearMatrix,
    StabilityReport,
};
pub use padic::{padic_modulus, PadicCyclotomic, PadicValuation, MAX_MODULUS};
pub use splitting::{
    artin_hasse_at, artin_hasse_terms, corollary_floor_violations, dwork_pi,
    leading_term_violations, splitting_coeffs, teichmuller, teichmuller_scalar, LeadingTermCheck,
    SplittingCoeffs,
};
