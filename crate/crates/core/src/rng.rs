//! All randomness in the crate comes from ChaCha8 (`rand_chacha`) seeded with
//! a single `u64`, so a seed reproduces a run on any platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Name recorded in run manifests.
pub const GENERATOR: &str = "ChaCha8Rng/rand_chacha-0.9/seed_from_u64";

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
