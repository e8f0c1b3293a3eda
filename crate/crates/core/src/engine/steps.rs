//! The individual pieces of one iteration, exposed for testing and reuse.

use ndarray::{ArrayD, ArrayViewD};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{Evaluated, Options, Problem, StopRule};
use crate::array::{all_finite, dot, norm, norm_sq};
use crate::rng::seeded;
use crate::{Error, Result};

/// Trailing window of smooth values used as the backtracking reference.
pub const BACKTRACK_WINDOW: usize = 10;
/// Stepsize halvings allowed per iteration before declaring stagnation.
pub const MAX_HALVINGS: usize = 20;
/// Added to the normalized-residual denominator.
pub const NORMALIZER_EPS: f64 = 1e-8;
/// Added to the largest residual in the ratio test.
pub const RATIO_EPS: f64 = 1e-8;

const LIPSCHITZ_FLOOR: f64 = 1e-6;
const STEP_FACTOR: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialStep {
    pub tau: f64,
    pub lipschitz: f64,
}

/// Picks the first stepsize.
///
/// An explicit `options.tau` wins. Otherwise `tau = 0.2 / L` with `L` taken
/// from `options.lipschitz` or, failing that, estimated as
/// `‖G(x0) − G(x0 + δ)‖ / ‖δ‖` for a seeded unit-norm `δ`, where
/// `G(x) = Aᵀ∇f(Ax)`, floored at `1e-6`.
pub fn estimate_initial_stepsize(problem: &Problem, options: &Options) -> Result<InitialStep> {
    let lipschitz = match options.lipschitz {
        Some(l) => l,
        None => estimate_lipschitz(problem, options.seed)?,
    };
    let tau = options.tau.unwrap_or(STEP_FACTOR / lipschitz);
    Ok(InitialStep { tau, lipschitz })
}

fn estimate_lipschitz(problem: &Problem, seed: u64) -> Result<f64> {
    let x1 = &problem.x0;
    let g1 = problem.gradient(x1.view());
    if !all_finite(&g1) {
        return Err(Error::Initialization(
            "gradient at the starting point is not finite".into(),
        ));
    }
    let mut rng = seeded(seed);
    let mut delta = ArrayD::from_shape_simple_fn(x1.shape(), || rng.sample::<f64, _>(StandardNormal));
    let n = norm(&delta);
    delta /= n;
    let x2 = x1 + &delta;
    let g2 = problem.gradient(x2.view());
    if !all_finite(&g2) {
        return Err(Error::Initialization(
            "gradient near the starting point is not finite".into(),
        ));
    }
    let l = norm(&(&g1 - &g2)) / norm(&(x1 - &x2));
    Ok(l.max(LIPSCHITZ_FLOOR))
}

/// One forward-backward step `prox(x − τ·G(x), τ)`; returns the new point
/// and `G(x)`.
pub fn fbs_step(
    problem: &Problem,
    x: ArrayViewD<'_, f64>,
    tau: f64,
    iteration: usize,
) -> Result<(ArrayD<f64>, ArrayD<f64>)> {
    let grad = problem.gradient(x.view());
    let next = forward_backward(problem, x, &grad, tau);
    if !all_finite(&grad) || !all_finite(&next) {
        return Err(Error::Divergence { iteration });
    }
    Ok((next, grad))
}

pub(crate) fn forward_backward(
    problem: &Problem,
    x: ArrayViewD<'_, f64>,
    grad: &ArrayD<f64>,
    tau: f64,
) -> ArrayD<f64> {
    let mut hat = x.to_owned();
    hat.scaled_add(-tau, grad);
    problem.prox.prox(hat.view(), tau)
}

#[derive(Clone, Debug)]
pub struct BacktrackOutcome {
    pub x_next: ArrayD<f64>,
    /// `f(A x_next)`.
    pub f_next: f64,
    pub tau: f64,
    pub halvings: usize,
    /// The decrease test still failed after [`MAX_HALVINGS`] halvings.
    pub exhausted: bool,
}

/// Forward-backward step with nonmonotone backtracking.
///
/// Halves `tau` until
/// `f(A x⁺) ≤ f_reference + ⟨G(x), x⁺ − x⟩ + ‖x⁺ − x‖² / (2τ)`,
/// at most [`MAX_HALVINGS`] times. With `enabled = false` this is a single
/// [`fbs_step`].
pub fn backtrack_step(
    problem: &Problem,
    x: ArrayViewD<'_, f64>,
    grad: &ArrayD<f64>,
    tau: f64,
    f_reference: f64,
    enabled: bool,
) -> BacktrackOutcome {
    let mut tau = tau;
    let mut halvings = 0;
    loop {
        let next = problem.evaluate(forward_backward(problem, x.view(), grad, tau));
        if !enabled {
            return outcome(next, tau, halvings, false);
        }
        let dx = &next.x - &x;
        let bound = f_reference + dot(grad, &dx) + norm_sq(&dx) / (2.0 * tau);
        let slack = 1e-12 * f_reference.abs().max(1.0);
        // non-finite trial values fail the test and shrink the step
        if next.f - slack <= bound {
            return outcome(next, tau, halvings, false);
        }
        if halvings == MAX_HALVINGS {
            return outcome(next, tau, halvings, true);
        }
        tau *= 0.5;
        halvings += 1;
    }
}

fn outcome(next: Evaluated, tau: f64, halvings: usize, exhausted: bool) -> BacktrackOutcome {
    BacktrackOutcome {
        x_next: next.x,
        f_next: next.f,
        tau,
        halvings,
        exhausted,
    }
}

/// Spectral stepsize from the secant pair `dx = x_k − x_{k−1}`,
/// `dg = G(x_k) − G(x_{k−1})`.
///
/// With `τ_s = ⟨dx,dx⟩/⟨dx,dg⟩` and `τ_m = ⟨dx,dg⟩/⟨dg,dg⟩`, returns `τ_m`
/// when `τ_m/τ_s > ½` and `τ_s − τ_m/2` otherwise. Falls back to `tau_prev`
/// on non-positive curvature or a non-finite or non-positive result.
pub fn adaptive_stepsize(dx: ArrayViewD<'_, f64>, dg: ArrayViewD<'_, f64>, tau_prev: f64) -> f64 {
    let curvature = dot(&dx, &dg);
    if !(curvature > 0.0) {
        return tau_prev;
    }
    let tau_s = norm_sq(&dx) / curvature;
    let tau_m = curvature / norm_sq(&dg);
    let tau = if tau_m / tau_s > 0.5 {
        tau_m
    } else {
        tau_s - 0.5 * tau_m
    };
    if tau > 0.0 && tau.is_finite() {
        tau
    } else {
        tau_prev
    }
}

/// Momentum update: `θ⁺ = (1 + √(1 + 4θ²))/2` and
/// `y = x_next + ((θ − 1)/θ⁺)(x_next − x_prev)`.
pub fn accelerate_step(
    x_next: ArrayViewD<'_, f64>,
    x_prev: ArrayViewD<'_, f64>,
    theta: f64,
) -> (ArrayD<f64>, f64) {
    let theta_next = 0.5 * (1.0 + (1.0 + 4.0 * theta * theta).sqrt());
    let coef = (theta - 1.0) / theta_next;
    let mut y = x_next.to_owned();
    if coef != 0.0 {
        y.scaled_add(coef, &(&x_next - &x_prev));
    }
    (y, theta_next)
}

/// Residual of the step from `x` to `x_next`.
///
/// `(x − x_next)/τ − G(x)` is a subgradient of `g` at `x_next`, so
/// `r = (x − x_next)/τ + G(x_next) − G(x)` is a subgradient of the whole
/// objective there. Returns `‖r‖` and
/// `‖r‖ / (max(‖G(x)‖, ‖(x − x_next)/τ − G(x)‖) + ε)`.
pub fn compute_residual(
    x: ArrayViewD<'_, f64>,
    x_next: ArrayViewD<'_, f64>,
    tau: f64,
    grad_x: ArrayViewD<'_, f64>,
    grad_next: ArrayViewD<'_, f64>,
) -> (f64, f64) {
    let step = (&x - &x_next) / tau;
    let prox_part = &step - &grad_x;
    let r = &prox_part + &grad_next;
    let residual = norm(&r);
    let normalizer = norm(&grad_x).max(norm(&prox_part)) + NORMALIZER_EPS;
    (residual, residual / normalizer)
}

/// Built-in stopping tests; `max_residual` includes the current residual.
pub fn should_stop(rule: StopRule, residual: f64, normalized: f64, max_residual: f64, tol: f64) -> bool {
    let ratio = residual / (max_residual + RATIO_EPS) < tol;
    let normalized = normalized < tol;
    match rule {
        StopRule::RatioResidual => ratio,
        StopRule::NormalizedResidual => normalized,
        StopRule::HybridResidual => ratio || normalized,
    }
}
