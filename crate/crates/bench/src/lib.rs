//! Fixed inputs shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wrapfloer::homalg::{random_complex, FilteredZ2Complex};
use wrapfloer::symplin::GeneratorPath;
use wrapfloer::verify::random_path;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` random generator paths in dimension `2n`.
pub fn random_paths(seed: u64, n: usize, count: usize) -> Vec<GeneratorPath> {
    let mut r = rng(seed);
    (0..count).map(|_| random_path(&mut r, n).expect("random paths are valid")).collect()
}

/// A random valid complex with `size` generators.
pub fn complex(seed: u64, size: usize) -> FilteredZ2Complex {
    random_complex(&mut rng(seed), size, 6)
}
