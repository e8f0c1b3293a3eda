//! Proximal maps for the nonsmooth term and value/gradient pairs for the
//! smooth term.
//!
//! The free functions in this module are the raw maps with argument checking.
//! [`ProxFn`] and [`SmoothFn`] wrap them into the objects a
//! [`Problem`](crate::engine::Problem) is made of, and [`catalog`] looks them
//! up by name.

pub mod catalog;
mod functions;
mod ops;
mod smooth;

pub use functions::{L1Ball, L1Norm, LinfNorm, MagnitudeBall, NuclearNorm, PsdNuclearNorm, ZeroProx};
pub use ops::{
    logit_gradient, logit_value, project_box_magnitude, project_l1_ball, prox_linf,
    prox_psd_nuclear, shrink, shrink_nuclear,
};
pub use smooth::{HalfSquaredDistance, LinearFn, Logistic, SquaredDistance};

use std::fmt;

use ndarray::{ArrayD, ArrayViewD};

use crate::Result;

/// The nonsmooth term `g`, accessed through its proximal map
/// `prox(x, t) = argmin_p g(p) + ‖p − x‖² / (2t)`.
pub trait ProxFn: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// Proximal map with stepsize `t ≥ 0`; `t = 0` is the identity.
    fn prox(&self, x: ArrayViewD<'_, f64>, t: f64) -> ArrayD<f64>;

    /// `g(x)`, if this term can be evaluated. Only needed when objective
    /// recording is on. Indicators return `+∞` outside their set.
    fn value(&self, _x: ArrayViewD<'_, f64>) -> Option<f64> {
        None
    }

    /// Rejects point shapes the map cannot act on.
    fn check_shape(&self, _dims: &[usize]) -> Result<()> {
        Ok(())
    }
}

/// The smooth term `f`, evaluated in the codomain of the operator.
pub trait SmoothFn: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn value(&self, z: ArrayViewD<'_, f64>) -> f64;

    fn gradient(&self, z: ArrayViewD<'_, f64>) -> ArrayD<f64>;

    fn check_shape(&self, _dims: &[usize]) -> Result<()> {
        Ok(())
    }
}
