//! The key estimate: the alpha map, the barycenter equation
//! `E2_H[alpha(zeta, Q)] = i`, both zeta finders, and the positivity check of
//! the logarithmic functional.

mod finder;
mod functional;

pub use finder::{
    find_zeta_general, find_zeta_general_with, find_zeta_symmetric, GeneralSearch, ZetaCertificate,
    ZetaMethod, DEFAULT_ZETA_TOL,
};
pub use functional::{
    alpha_law, alpha_map, g_map, jensen_chain, key_functional, key_functional_u, verify_key_estimate,
    KeyEstimate,
};
