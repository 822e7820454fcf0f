//! Random transversally periodic potentials on the rooted binary tree and
//! on the chain, forward Green functions, and fractional-moment estimates.

mod chain;
mod green;
mod montecarlo;
mod oracle;
mod potential;
pub mod stats;

pub use chain::{chain_green_1d, chain_moment_norm, mc_fractional_moment_1d, sample_chain_potential, tridiagonal_oracle};
pub use green::{forward_green, forward_green_with, moment_norm, log_moment_norm, GreenOptions, GreenProfile, LEAF_REGULARIZATION};
pub use montecarlo::{mc_fractional_moment, MomentEstimate, MomentQuery, TreeDisorder, CSV_HEADER};
pub use oracle::{dense_oracle, path_product, sphere_norm, DenseSolution, MAX_DENSE_DEPTH};
pub use potential::{sample_potential, PotentialRealization};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for sample `index` of a run keyed by `(seed, key)`. Streams are
/// independent of how work is scheduled.
pub fn sample_rng(seed: u64, key: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, key));
    rng.set_stream(index);
    rng
}

fn mix(seed: u64, key: u64) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = seed ^ key.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
