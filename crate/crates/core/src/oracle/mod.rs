//! Exact finite-field oracle: character sums, L-polynomials and Newton polygons.

mod charsum;
mod coeffs;
mod cyclotomic;
mod field;
mod lpoly;
mod verify;

pub use charsum::{
    char_sum, char_sum_direct, char_sum_twisted, monomial_distribution, torus_table,
    trace_distribution, twisted_sum, TorusTable, DEFAULT_GUARD,
};
pub use coeffs::LaurentCoeffVector;
pub use cyclotomic::{CyclotomicInteger, Valuation};
pub use field::{build_extension, is_irreducible, ExtensionField, FieldElement, PrimeFieldElement};
pub use lpoly::{
    l_polynomial, l_polynomial_with, newton_coefficients, newton_polygon, pi_adic_valuation,
    LOptions, LPolynomial,
};
pub use verify::{
    a0_independence_check, curve_identity, curve_identity_check, galois_consistency_check,
    verify_instance, CurveIdentity, InstanceChecks, InstanceReport, Verifier,
};
