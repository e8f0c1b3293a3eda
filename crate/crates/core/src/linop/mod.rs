//! Shape-checked linear operators.
//!
//! An operator is a forward map and its adjoint between two array shapes. The
//! solver only ever touches `A` through [`LinearOperator::apply`] and
//! [`LinearOperator::adjoint_apply`], so any matrix-free map can be plugged in.

mod dense;
mod gradient;
pub mod io;

pub use dense::DenseMatrix;
pub use gradient::{gradient_operator, Divergence, Gradient};

use std::fmt;
use std::sync::Arc;

use ndarray::{ArrayD, ArrayViewD};
use serde::{Deserialize, Serialize};

use crate::array::dot;
use crate::rng::{normal_array, seeded};
use crate::{Error, Result};

/// Extents of an array; rank at least one, every extent at least one.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Shape(Vec<usize>);

impl Shape {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(Error::invalid("shape must have rank at least 1"));
        }
        if dims.contains(&0) {
            return Err(Error::invalid(format!(
                "shape {dims:?} has a zero extent"
            )));
        }
        Ok(Shape(dims))
    }

    pub fn vector(len: usize) -> Result<Self> {
        Self::new(vec![len])
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// This shape with one more trailing axis of extent `extent`.
    pub fn with_trailing(&self, extent: usize) -> Result<Self> {
        let mut dims = self.0.clone();
        dims.push(extent);
        Self::new(dims)
    }

    pub fn check(&self, actual: &[usize]) -> Result<()> {
        if actual == self.dims() {
            Ok(())
        } else {
            Err(Error::Shape {
                expected: self.0.clone(),
                actual: actual.to_vec(),
            })
        }
    }
}

impl TryFrom<Vec<usize>> for Shape {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Shape::new(dims)
    }
}

impl From<Shape> for Vec<usize> {
    fn from(s: Shape) -> Self {
        s.0
    }
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        f.write_str(&parts.join("x"))
    }
}

/// A linear map `A` together with its adjoint `Aᵀ`.
///
/// Implementors provide the unchecked [`forward`](Self::forward) and
/// [`adjoint`](Self::adjoint) kernels; callers go through the checked
/// [`apply`](Self::apply) and [`adjoint_apply`](Self::adjoint_apply).
pub trait LinearOperator: Send + Sync + fmt::Debug {
    fn in_shape(&self) -> &Shape;

    fn out_shape(&self) -> &Shape;

    /// `A x` for `x` already known to have shape `in_shape`.
    fn forward(&self, x: ArrayViewD<'_, f64>) -> ArrayD<f64>;

    /// `Aᵀ y` for `y` already known to have shape `out_shape`.
    fn adjoint(&self, y: ArrayViewD<'_, f64>) -> ArrayD<f64>;

    fn apply(&self, x: ArrayViewD<'_, f64>) -> Result<ArrayD<f64>> {
        self.in_shape().check(x.shape())?;
        Ok(self.forward(x))
    }

    fn adjoint_apply(&self, y: ArrayViewD<'_, f64>) -> Result<ArrayD<f64>> {
        self.out_shape().check(y.shape())?;
        Ok(self.adjoint(y))
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for Arc<T> {
    fn in_shape(&self) -> &Shape {
        (**self).in_shape()
    }
    fn out_shape(&self) -> &Shape {
        (**self).out_shape()
    }
    fn forward(&self, x: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        (**self).forward(x)
    }
    fn adjoint(&self, y: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        (**self).adjoint(y)
    }
}

/// The identity on arrays of a fixed shape.
#[derive(Clone, Debug)]
pub struct Identity {
    shape: Shape,
}

impl Identity {
    pub fn new(shape: Shape) -> Self {
        Identity { shape }
    }
}

impl LinearOperator for Identity {
    fn in_shape(&self) -> &Shape {
        &self.shape
    }
    fn out_shape(&self) -> &Shape {
        &self.shape
    }
    fn forward(&self, x: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        x.to_owned()
    }
    fn adjoint(&self, y: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        y.to_owned()
    }
}

type Kernel = Arc<dyn Fn(ArrayViewD<'_, f64>) -> ArrayD<f64> + Send + Sync>;

/// An operator assembled from a pair of closures, for user-supplied `A`/`Aᵀ`.
///
/// Nothing ties the two closures together; run [`adjoint_consistency`] on
/// anything built this way.
#[derive(Clone)]
pub struct FnOperator {
    in_shape: Shape,
    out_shape: Shape,
    forward: Kernel,
    adjoint: Kernel,
}

impl FnOperator {
    pub fn new<F, G>(in_shape: Shape, out_shape: Shape, forward: F, adjoint: G) -> Self
    where
        F: Fn(ArrayViewD<'_, f64>) -> ArrayD<f64> + Send + Sync + 'static,
        G: Fn(ArrayViewD<'_, f64>) -> ArrayD<f64> + Send + Sync + 'static,
    {
        FnOperator {
            in_shape,
            out_shape,
            forward: Arc::new(forward),
            adjoint: Arc::new(adjoint),
        }
    }
}

impl fmt::Debug for FnOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnOperator")
            .field("in_shape", &self.in_shape)
            .field("out_shape", &self.out_shape)
            .finish_non_exhaustive()
    }
}

impl LinearOperator for FnOperator {
    fn in_shape(&self) -> &Shape {
        &self.in_shape
    }
    fn out_shape(&self) -> &Shape {
        &self.out_shape
    }
    fn forward(&self, x: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        (self.forward)(x)
    }
    fn adjoint(&self, y: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        (self.adjoint)(y)
    }
}

/// Dot-product test of an operator against its adjoint.
///
/// Draws `trials` seeded standard-normal pairs `(x, y)` and returns the largest
/// `|⟨Ax, y⟩ − ⟨x, Aᵀy⟩| / (|⟨Ax, y⟩| + |⟨x, Aᵀy⟩| + ε)`.
pub fn adjoint_consistency(op: &dyn LinearOperator, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::invalid("adjoint test needs at least one trial"));
    }
    let mut rng = seeded(seed);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let x = normal_array(&mut rng, op.in_shape().dims());
        let y = normal_array(&mut rng, op.out_shape().dims());
        let ax = op.apply(x.view())?;
        let aty = op.adjoint_apply(y.view())?;
        let lhs = dot(&ax, &y);
        let rhs = dot(&x, &aty);
        let rel = (lhs - rhs).abs() / (lhs.abs() + rhs.abs() + f64::EPSILON);
        worst = worst.max(rel);
    }
    Ok(worst)
}
