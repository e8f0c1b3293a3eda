//! Builders that turn common regularised models into a [`Problem`].
//!
//! | builder | f(z) | g(x) |
//! |---|---|---|
//! | [`sparse_least_squares`] | ½‖z − b‖² | μ‖x‖₁ |
//! | [`lasso`] | ½‖z − b‖² | indicator of ‖x‖₁ ≤ λ |
//! | [`sparse_logistic`] | logit(z, b) | μ‖x‖₁ |
//! | [`logistic_matrix_completion`] | logit over observed entries | μ‖X‖_* |
//! | [`phaselift`] | ‖z − b‖² | μ‖X‖_* on the PSD cone |
//! | [`democratic`] | ½‖z − b‖² | μ‖x‖∞ |
//! | [`total_variation`] | dual: ½‖div p − f‖² | indicator of per-pixel ‖p_i‖ ≤ μ |

mod matrix;
mod tv;

pub use matrix::{
    logistic_matrix_completion, phaselift, MeasurementMap, ObservationMask, RankOneMeasurements,
};
pub use tv::{total_variation, TotalVariation};

use std::sync::Arc;

use ndarray::ArrayD;

use crate::engine::Problem;
use crate::linop::LinearOperator;
use crate::prox::{HalfSquaredDistance, L1Ball, L1Norm, LinfNorm, Logistic};
use crate::{Error, Result};

fn check_data(op: &dyn LinearOperator, b: &ArrayD<f64>) -> Result<()> {
    op.out_shape().check(b.shape())
}

pub(crate) fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive, got {v}")))
    }
}

/// `min μ‖x‖₁ + ½‖Ax − b‖²`.
pub fn sparse_least_squares(
    op: Arc<dyn LinearOperator>,
    b: ArrayD<f64>,
    mu: f64,
    x0: ArrayD<f64>,
) -> Result<Problem> {
    positive("mu", mu)?;
    check_data(op.as_ref(), &b)?;
    Problem::new(
        op,
        Arc::new(HalfSquaredDistance::new(b)),
        Arc::new(L1Norm::new(mu)?),
        x0,
    )
}

/// `min ½‖Ax − b‖²` subject to `‖x‖₁ ≤ λ`.
pub fn lasso(
    op: Arc<dyn LinearOperator>,
    b: ArrayD<f64>,
    lambda: f64,
    x0: ArrayD<f64>,
) -> Result<Problem> {
    positive("lambda", lambda)?;
    check_data(op.as_ref(), &b)?;
    Problem::new(
        op,
        Arc::new(HalfSquaredDistance::new(b)),
        Arc::new(L1Ball::new(lambda)?),
        x0,
    )
}

/// `min μ‖x‖₁ + logit(Ax, b)` for binary `b`.
pub fn sparse_logistic(
    op: Arc<dyn LinearOperator>,
    b: ArrayD<f64>,
    mu: f64,
    x0: ArrayD<f64>,
) -> Result<Problem> {
    positive("mu", mu)?;
    check_data(op.as_ref(), &b)?;
    Problem::new(
        op,
        Arc::new(Logistic::new(b)?),
        Arc::new(L1Norm::new(mu)?),
        x0,
    )
}

/// `min μ‖x‖∞ + ½‖Ax − b‖²`: spreads the signal's energy evenly over the
/// coefficients of an overcomplete frame.
pub fn democratic(
    op: Arc<dyn LinearOperator>,
    b: ArrayD<f64>,
    mu: f64,
    x0: ArrayD<f64>,
) -> Result<Problem> {
    positive("mu", mu)?;
    check_data(op.as_ref(), &b)?;
    Problem::new(
        op,
        Arc::new(HalfSquaredDistance::new(b)),
        Arc::new(LinfNorm::new(mu)?),
        x0,
    )
}
