//! Shared inputs for the benchmarks.

use lrc_core::gf::FieldRef;
use lrc_core::{LinearCode, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A dense matrix with uniformly random entries.
pub fn random_matrix(f: &FieldRef, rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..rows * cols)
        .map(|_| rng.gen_range(0..f.order()) as u16)
        .collect();
    Matrix::from_flat(rows, cols, data)
}

pub fn random_code(f: &FieldRef, k: usize, n: usize, seed: u64) -> LinearCode {
    LinearCode::from_generator(f.clone(), random_matrix(f, k, n, seed), "bench")
}
