//! Small helpers on flat views of n-dimensional arrays.

use ndarray::{ArrayBase, ArrayD, Data, Dimension};

pub fn dot<S1, S2, D>(a: &ArrayBase<S1, D>, b: &ArrayBase<S2, D>) -> f64
where
    S1: Data<Elem = f64>,
    S2: Data<Elem = f64>,
    D: Dimension,
{
    debug_assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn norm_sq<S, D>(a: &ArrayBase<S, D>) -> f64
where
    S: Data<Elem = f64>,
    D: Dimension,
{
    a.iter().map(|x| x * x).sum()
}

pub fn norm<S, D>(a: &ArrayBase<S, D>) -> f64
where
    S: Data<Elem = f64>,
    D: Dimension,
{
    norm_sq(a).sqrt()
}

pub fn norm_l1<S, D>(a: &ArrayBase<S, D>) -> f64
where
    S: Data<Elem = f64>,
    D: Dimension,
{
    a.iter().map(|x| x.abs()).sum()
}

pub fn norm_inf<S, D>(a: &ArrayBase<S, D>) -> f64
where
    S: Data<Elem = f64>,
    D: Dimension,
{
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn all_finite<S, D>(a: &ArrayBase<S, D>) -> bool
where
    S: Data<Elem = f64>,
    D: Dimension,
{
    a.iter().all(|x| x.is_finite())
}

/// Elements in row-major order regardless of memory layout.
pub fn to_row_major_vec<S, D>(a: &ArrayBase<S, D>) -> Vec<f64>
where
    S: Data<Elem = f64>,
    D: Dimension,
{
    a.iter().copied().collect()
}

/// Builds an array of the given shape from row-major data.
pub fn from_row_major(dims: &[usize], data: Vec<f64>) -> ArrayD<f64> {
    ArrayD::from_shape_vec(dims.to_vec(), data).expect("data length matches shape")
}
