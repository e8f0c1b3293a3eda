//! Seeded random draws. All randomness in the crate flows through here so that
//! identical seeds give identical runs on any platform.

use ndarray::{Array2, ArrayD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_array(rng: &mut impl Rng, dims: &[usize]) -> ArrayD<f64> {
    ArrayD::from_shape_simple_fn(dims.to_vec(), || rng.sample(StandardNormal))
}

pub fn normal_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || rng.sample(StandardNormal))
}
