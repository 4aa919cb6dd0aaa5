//! Fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tensorlab_core::TensorMatrix;

/// A seeded matrix with entries uniform in `[-1, 1]`.
pub fn random_matrix(m: usize, n: usize, seed: u64) -> TensorMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    TensorMatrix::from_rows(&rows).expect("rows have equal length")
}
