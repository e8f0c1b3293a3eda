use std::sync::Arc;

use ndarray::{ArrayD, ArrayViewD, Axis};

use super::positive;
use crate::array::norm_sq;
use crate::engine::Problem;
use crate::linop::{Divergence, Gradient, LinearOperator, Shape};
use crate::prox::{HalfSquaredDistance, MagnitudeBall};
use crate::Result;

/// Total-variation denoising posed on the dual field.
///
/// The primal model `min_x μ Σ_i ‖(∇x)_i‖ + ½‖x − f‖²` is solved through its
/// dual `min_p ½‖div p − f‖²` over fields with `‖p_i‖ ≤ μ`; the denoised image
/// is `x = f − div p`.
#[derive(Clone, Debug)]
pub struct TotalVariation {
    pub problem: Problem,
    noisy: ArrayD<f64>,
    mu: f64,
    gradient: Gradient,
    divergence: Divergence,
}

/// Builds the dual problem for an image of any rank ≥ 1, starting from
/// `p = 0`.
pub fn total_variation(noisy: ArrayD<f64>, mu: f64) -> Result<TotalVariation> {
    positive("mu", mu)?;
    let shape = Shape::new(noisy.shape().to_vec())?;
    let divergence = Divergence::new(shape.clone());
    let p0 = ArrayD::zeros(divergence.in_shape().dims());
    let problem = Problem::new(
        Arc::new(divergence.clone()),
        Arc::new(HalfSquaredDistance::new(noisy.clone())),
        Arc::new(MagnitudeBall::new(mu)?),
        p0,
    )?;
    Ok(TotalVariation {
        problem,
        noisy,
        mu,
        gradient: Gradient::new(shape),
        divergence,
    })
}

impl TotalVariation {
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn noisy(&self) -> &ArrayD<f64> {
        &self.noisy
    }

    /// Denoised image `f − div p` for a dual field `p`.
    pub fn recover(&self, p: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        &self.noisy - &self.divergence.forward(p)
    }

    /// `μ Σ_i ‖(∇x)_i‖ + ½‖x − f‖²`.
    pub fn primal_objective(&self, x: ArrayViewD<'_, f64>) -> f64 {
        let g = self.gradient.forward(x.view());
        let last = Axis(g.ndim() - 1);
        let tv: f64 = g.lanes(last).into_iter().map(|l| norm_sq(&l).sqrt()).sum();
        self.mu * tv + 0.5 * norm_sq(&(&x - &self.noisy))
    }

    /// `½‖f‖² − ½‖f − div p‖²`, a lower bound on the primal optimum for
    /// feasible `p`.
    pub fn dual_objective(&self, p: ArrayViewD<'_, f64>) -> f64 {
        0.5 * norm_sq(&self.noisy) - 0.5 * norm_sq(&self.recover(p))
    }

    pub fn duality_gap(&self, p: ArrayViewD<'_, f64>) -> f64 {
        self.primal_objective(self.recover(p.view()).view()) - self.dual_objective(p)
    }
}
