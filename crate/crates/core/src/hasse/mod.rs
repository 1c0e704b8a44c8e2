//! Artin-Hasse coefficients and the Hasse polynomial of `[-e, d]`.

mod artin;
mod components;
mod sparse;

pub use artin::{artin_hasse, lambda_mod_p, reduce_rational, ArtinHasseSeries};
pub use components::{
    enumerate_sk, hasse_component, hasse_polynomial, hasse_report, minimal_monomial, r_vector,
    tau_monomial, tau_zero, unit_u_tau, ConstrainedPermutation, HasseComponent, HasseReport,
    MinimalMonomial, RVector,
};
pub use sparse::{Exponents, SparseFpPolynomial};

#[cfg(test)]
mod tests;
