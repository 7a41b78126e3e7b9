//! Shared fixtures for the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use singer_core::instgen::{gen_instance, PlantedInstance};
use singer_core::{FieldCtx, Matrix, ModuleSpec};

/// A seeded random `n x n` matrix over `F_q`.
pub fn random_matrix(q: u64, n: usize, seed: u64) -> Matrix {
    let ctx = FieldCtx::for_q(q, 1).expect("valid q");
    Matrix::random(ctx.base(), n, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// A planted instance with a Singer cycle among two generators.
pub fn planted(spec: &str, seed: u64) -> (ModuleSpec, PlantedInstance) {
    let spec: ModuleSpec = spec.parse().expect("valid spec");
    let inst = gen_instance(&spec, 2, true, seed).expect("instance");
    (spec, inst)
}
