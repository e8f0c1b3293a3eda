//! The forward-backward iteration.
//!
//! Each iteration takes a gradient step on `f(Ax)` from a base point and a
//! proximal step on `g`; backtracking shrinks the stepsize until a nonmonotone
//! sufficient-decrease test passes. What happens between iterations (fixed
//! stepsize, spectral stepsize, or momentum) is delegated to a [`StepMode`]
//! picked from the [`Options`] flags.

mod modes;
mod options;
mod solve;
mod steps;
mod trace;

pub use modes::{
    mode_names, step_mode, AcceleratedMode, AcceptedStep, AdaptiveMode, NextBase, PlainMode,
    StepMode,
};
pub use options::{Monitor, Options, StopContext, StopNow, StopRule};
pub use solve::{solve, SolveResult, Termination};
pub use steps::{
    accelerate_step, adaptive_stepsize, backtrack_step, compute_residual, estimate_initial_stepsize,
    fbs_step, should_stop, BacktrackOutcome, InitialStep, BACKTRACK_WINDOW, MAX_HALVINGS,
    NORMALIZER_EPS, RATIO_EPS,
};
pub use trace::Trace;

use std::sync::Arc;

use ndarray::{ArrayD, ArrayViewD};

use crate::linop::LinearOperator;
use crate::prox::{ProxFn, SmoothFn};
use crate::Result;

/// `minimize f(Ax) + g(x)` from a starting point `x0`.
#[derive(Clone, Debug)]
pub struct Problem {
    pub op: Arc<dyn LinearOperator>,
    pub smooth: Arc<dyn SmoothFn>,
    pub prox: Arc<dyn ProxFn>,
    pub x0: ArrayD<f64>,
}

impl Problem {
    pub fn new(
        op: Arc<dyn LinearOperator>,
        smooth: Arc<dyn SmoothFn>,
        prox: Arc<dyn ProxFn>,
        x0: ArrayD<f64>,
    ) -> Result<Self> {
        let problem = Problem {
            op,
            smooth,
            prox,
            x0,
        };
        problem.validate()?;
        Ok(problem)
    }

    /// Checks that `x0`, the prox and the smooth term agree with the
    /// operator's shapes.
    pub fn validate(&self) -> Result<()> {
        self.op.in_shape().check(self.x0.shape())?;
        self.prox.check_shape(self.op.in_shape().dims())?;
        self.smooth.check_shape(self.op.out_shape().dims())?;
        Ok(())
    }

    /// `f(Ax)`.
    pub fn smooth_value(&self, x: ArrayViewD<'_, f64>) -> f64 {
        self.smooth.value(self.op.forward(x).view())
    }

    /// `Aᵀ∇f(Ax)`.
    pub fn gradient(&self, x: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        let ax = self.op.forward(x);
        self.op.adjoint(self.smooth.gradient(ax.view()).view())
    }

    /// `f(Ax) + g(x)`, when `g` can be evaluated.
    pub fn objective(&self, x: ArrayViewD<'_, f64>) -> Option<f64> {
        Some(self.smooth_value(x.view()) + self.prox.value(x)?)
    }

    pub(crate) fn evaluate(&self, x: ArrayD<f64>) -> Evaluated {
        let ax = self.op.forward(x.view());
        let f = self.smooth.value(ax.view());
        Evaluated { x, ax, f }
    }

    pub(crate) fn gradient_at(&self, p: &Evaluated) -> ArrayD<f64> {
        self.op.adjoint(self.smooth.gradient(p.ax.view()).view())
    }
}

/// A point with its image under `A` and the smooth value there.
#[derive(Clone, Debug)]
pub(crate) struct Evaluated {
    pub x: ArrayD<f64>,
    pub ax: ArrayD<f64>,
    pub f: f64,
}
