//! Forward-backward splitting for composite objectives `f(Ax) + g(x)`.
//!
//! The crate is organised around four pieces:
//!
//! * [`linop`]: matrix-free linear operators with shape checking and an
//!   adjoint dot-product test.
//! * [`prox`]: proximal maps for the nonsmooth term `g` and value/gradient
//!   pairs for the smooth term `f`.
//! * [`engine`]: the iteration itself, with plain, adaptive (spectral) and
//!   accelerated step modes, nonmonotone backtracking, residual-based stopping
//!   and a full convergence [`Trace`](engine::Trace).
//! * [`problems`]: builders for sparse least squares, lasso, sparse logistic
//!   regression, logistic matrix completion, PhaseLift, democratic
//!   representations and total-variation denoising.
//!
//! [`trace_io`] serialises runs for offline analysis.
//!
//! ```
//! use fbs_core::engine::{solve, Options};
//! use fbs_core::linop::{DenseMatrix, LinearOperator};
//! use fbs_core::problems::sparse_least_squares;
//! use ndarray::{arr1, arr2, ArrayD};
//! use std::sync::Arc;
//!
//! let a = DenseMatrix::new(arr2(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]));
//! let b = arr1(&[2.0, -0.5, 0.0]).into_dyn();
//! let x0 = ArrayD::zeros(a.in_shape().dims());
//! let problem = sparse_least_squares(Arc::new(a), b, 1.0, x0).unwrap();
//! let result = solve(&problem, &Options::default()).unwrap();
//! assert!((result.solution[[0]] - 1.0).abs() < 1e-3);
//! ```

pub mod array;
pub mod engine;
mod error;
pub mod linop;
pub mod problems;
pub mod prox;
pub mod rng;
pub mod synthetic;
pub mod trace_io;

pub use error::{Error, Result};
