//! Seeded synthetic instances for each problem family.
//!
//! Conventions: Gaussian matrices with unit-variance entries; sparse ground
//! truth with `⌈N/10⌉` entries of ±1; measurement noise, where present, with
//! standard deviation `0.01‖A x_true‖/√M`. Every instance is a pure function
//! of its dimensions and seed.

use ndarray::{Array1, Array2, ArrayD, Axis};
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::array::norm;
use crate::rng::{normal_matrix, seeded};

/// Relative noise level for the noisy regression variants.
pub const NOISE_LEVEL: f64 = 0.01;

#[derive(Clone, Debug)]
pub struct Regression {
    pub a: Array2<f64>,
    pub x_true: Array1<f64>,
    pub b: Array1<f64>,
}

pub fn sparsity(n: usize) -> usize {
    n.div_ceil(10)
}

fn sparse_truth(rng: &mut impl Rng, n: usize) -> Array1<f64> {
    let mut x = Array1::zeros(n);
    for i in sample(rng, n, sparsity(n)).into_iter() {
        x[i] = if rng.random::<bool>() { 1.0 } else { -1.0 };
    }
    x
}

/// `b = A x_true`, plus Gaussian noise when `noisy`.
pub fn sparse_regression(m: usize, n: usize, seed: u64, noisy: bool) -> Regression {
    let mut rng = seeded(seed);
    let a = normal_matrix(&mut rng, m, n);
    let x_true = sparse_truth(&mut rng, n);
    let mut b = a.dot(&x_true);
    if noisy {
        let sigma = NOISE_LEVEL * norm(&b) / (m as f64).sqrt();
        b.mapv_inplace(|v| v + sigma * rng.sample::<f64, _>(StandardNormal));
    }
    Regression { a, x_true, b }
}

/// Binary labels drawn as `b_i ~ Bernoulli(σ((A x_true)_i))`.
pub fn logistic_regression(m: usize, n: usize, seed: u64) -> Regression {
    let mut rng = seeded(seed);
    let a = normal_matrix(&mut rng, m, n);
    let x_true = sparse_truth(&mut rng, n);
    let z = a.dot(&x_true);
    let b = z.mapv(|zi| {
        let p = 1.0 / (1.0 + (-zi).exp());
        if rng.random::<f64>() < p {
            1.0
        } else {
            0.0
        }
    });
    Regression { a, x_true, b }
}

#[derive(Clone, Debug)]
pub struct Frame {
    pub a: Array2<f64>,
    pub b: Array1<f64>,
}

/// Gaussian `M×N` frame and a Gaussian signal of length `M` to represent in it.
pub fn frame(m: usize, n: usize, seed: u64) -> Frame {
    let mut rng = seeded(seed);
    let a = normal_matrix(&mut rng, m, n);
    let b = normal_matrix(&mut rng, m, 1).index_axis_move(Axis(1), 0);
    Frame { a, b }
}

#[derive(Clone, Debug)]
pub struct Completion {
    /// `1` where `u vᵀ > 0`, else `0`.
    pub labels: Array2<f64>,
    /// `1` on observed entries.
    pub mask: Array2<f64>,
}

/// Fraction of entries observed in [`completion`].
pub const OBSERVED_FRACTION: f64 = 0.8;

/// Rank-one sign pattern with a random 80% of entries observed.
pub fn completion(rows: usize, cols: usize, seed: u64) -> Completion {
    let mut rng = seeded(seed);
    let u = normal_matrix(&mut rng, rows, 1);
    let v = normal_matrix(&mut rng, cols, 1);
    let labels = u.dot(&v.t()).mapv(|x| if x > 0.0 { 1.0 } else { 0.0 });
    let total = rows * cols;
    let observed = ((OBSERVED_FRACTION * total as f64).round() as usize).min(total);
    let mut mask = Array2::zeros((rows, cols));
    for k in sample(&mut rng, total, observed).into_iter() {
        mask[[k / cols, k % cols]] = 1.0;
    }
    Completion { labels, mask }
}

#[derive(Clone, Debug)]
pub struct Phase {
    /// One Gaussian measurement vector per row.
    pub vectors: Array2<f64>,
    pub x_true: Array1<f64>,
    pub b: Array1<f64>,
}

/// Noiseless `b_i = (a_iᵀ x_true)²` with Gaussian `a_i` and `x_true`.
pub fn phase(m: usize, n: usize, seed: u64) -> Phase {
    let mut rng = seeded(seed);
    let vectors = normal_matrix(&mut rng, m, n);
    let x_true = normal_matrix(&mut rng, n, 1).index_axis_move(Axis(1), 0);
    let b = vectors.dot(&x_true).mapv(|v| v * v);
    Phase { vectors, x_true, b }
}

#[derive(Clone, Debug)]
pub struct Image {
    pub clean: ArrayD<f64>,
    pub noisy: ArrayD<f64>,
}

/// Noise standard deviation for [`piecewise_image`].
pub const IMAGE_NOISE: f64 = 0.1;

/// Unit box on the central half of every axis over a zero background, plus
/// Gaussian noise with standard deviation [`IMAGE_NOISE`].
pub fn piecewise_image(dims: &[usize], seed: u64) -> Image {
    let mut rng = seeded(seed);
    let clean = ArrayD::from_shape_fn(dims.to_vec(), |idx| {
        let inside = (0..dims.len()).all(|k| {
            let n = dims[k];
            idx[k] >= n / 4 && idx[k] < n - n / 4
        });
        if inside {
            1.0
        } else {
            0.0
        }
    });
    let noisy = clean.mapv(|v| v + IMAGE_NOISE * rng.sample::<f64, _>(StandardNormal));
    Image { clean, noisy }
}
