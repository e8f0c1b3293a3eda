use std::collections::BTreeSet;
use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayD, ArrayViewD, Ix2};

use super::positive;
use crate::engine::Problem;
use crate::linop::{Identity, LinearOperator, Shape};
use crate::prox::{Logistic, NuclearNorm, PsdNuclearNorm, SquaredDistance};
use crate::{Error, Result};

/// Observed `(row, col)` positions in a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservationMask {
    rows: usize,
    cols: usize,
    indices: BTreeSet<(usize, usize)>,
}

impl ObservationMask {
    pub fn new(rows: usize, cols: usize, indices: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (i, j) in indices {
            if i >= rows || j >= cols {
                return Err(Error::invalid(format!(
                    "mask entry ({i}, {j}) is outside a {rows}x{cols} matrix"
                )));
            }
            if !set.insert((i, j)) {
                return Err(Error::invalid(format!("mask entry ({i}, {j}) is repeated")));
            }
        }
        Ok(ObservationMask {
            rows,
            cols,
            indices: set,
        })
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        ObservationMask {
            rows,
            cols,
            indices: (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).collect(),
        }
    }

    /// Positions where `m` is non-zero.
    pub fn from_indicator(m: &Array2<f64>) -> Self {
        let (rows, cols) = m.dim();
        ObservationMask {
            rows,
            cols,
            indices: m
                .indexed_iter()
                .filter(|(_, &v)| v != 0.0)
                .map(|(ij, _)| ij)
                .collect(),
        }
    }

    pub fn dim(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.indices.contains(&(i, j))
    }

    pub fn indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.indices.iter().copied()
    }

    pub fn to_bool(&self) -> Array2<bool> {
        Array2::from_shape_fn((self.rows, self.cols), |(i, j)| self.contains(i, j))
    }
}

/// `min μ‖X‖_* + Σ_{(i,j) observed} log(e^{X_ij} + 1) − Y_ij X_ij`.
///
/// `x0` defaults to zero.
pub fn logistic_matrix_completion(
    y: &Array2<f64>,
    mask: &ObservationMask,
    mu: f64,
    x0: Option<Array2<f64>>,
) -> Result<Problem> {
    positive("mu", mu)?;
    if mask.dim() != y.dim() {
        return Err(Error::Shape {
            expected: vec![y.nrows(), y.ncols()],
            actual: vec![mask.rows, mask.cols],
        });
    }
    let x0 = x0.unwrap_or_else(|| Array2::zeros(y.dim()));
    let shape = Shape::new(vec![y.nrows(), y.ncols()])?;
    Problem::new(
        Arc::new(Identity::new(shape)),
        Arc::new(Logistic::masked(y.clone().into_dyn(), mask.to_bool().into_dyn())?),
        Arc::new(NuclearNorm::new(mu)?),
        x0.into_dyn(),
    )
}

/// Measurements `b_i ≈ a_iᵀ X a_i` of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct RankOneMeasurements {
    /// One measurement vector per row.
    pub vectors: Array2<f64>,
    pub b: Array1<f64>,
}

impl RankOneMeasurements {
    pub fn new(vectors: Array2<f64>, b: Array1<f64>) -> Result<Self> {
        let (m, n) = vectors.dim();
        if m == 0 || n == 0 {
            return Err(Error::invalid("need at least one measurement of positive length"));
        }
        if b.len() != m {
            return Err(Error::Shape {
                expected: vec![m],
                actual: vec![b.len()],
            });
        }
        Ok(RankOneMeasurements { vectors, b })
    }

    /// Noiseless measurements of `x xᵀ`: `b_i = (a_iᵀ x)²`.
    pub fn of_signal(vectors: Array2<f64>, x: &Array1<f64>) -> Result<Self> {
        if vectors.ncols() != x.len() {
            return Err(Error::Shape {
                expected: vec![vectors.ncols()],
                actual: vec![x.len()],
            });
        }
        let b = vectors.dot(x).mapv(|v| v * v);
        Self::new(vectors, b)
    }

    pub fn count(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn signal_len(&self) -> usize {
        self.vectors.ncols()
    }
}

/// `X ↦ (a_iᵀ X a_i)_i` with adjoint `y ↦ Σ y_i a_i a_iᵀ`.
#[derive(Clone, Debug)]
pub struct MeasurementMap {
    vectors: Array2<f64>,
    in_shape: Shape,
    out_shape: Shape,
}

impl MeasurementMap {
    pub fn new(vectors: Array2<f64>) -> Result<Self> {
        let (m, n) = vectors.dim();
        Ok(MeasurementMap {
            in_shape: Shape::new(vec![n, n])?,
            out_shape: Shape::vector(m)?,
            vectors,
        })
    }
}

impl LinearOperator for MeasurementMap {
    fn in_shape(&self) -> &Shape {
        &self.in_shape
    }

    fn out_shape(&self) -> &Shape {
        &self.out_shape
    }

    fn forward(&self, x: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        let x = x.into_dimensionality::<Ix2>().expect("checked shape");
        // row i of V·X is a_iᵀX
        let vx = self.vectors.dot(&x);
        (&vx * &self.vectors).sum_axis(ndarray::Axis(1)).into_dyn()
    }

    fn adjoint(&self, y: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        let y = y.into_dimensionality::<ndarray::Ix1>().expect("checked shape");
        let scaled = &self.vectors * &y.insert_axis(ndarray::Axis(1));
        self.vectors.t().dot(&scaled).into_dyn()
    }
}

/// `min μ‖X‖_* + ‖𝒜(X) − b‖²` subject to `X ⪰ 0`, with the rank-one
/// measurement map `𝒜`.
pub fn phaselift(meas: &RankOneMeasurements, mu: f64, x0: Array2<f64>) -> Result<Problem> {
    positive("mu", mu)?;
    let n = meas.signal_len();
    if x0.dim() != (n, n) {
        return Err(Error::Shape {
            expected: vec![n, n],
            actual: x0.shape().to_vec(),
        });
    }
    let asym = (&x0 - &x0.t()).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if asym > 1e-10 {
        return Err(Error::invalid(format!(
            "starting matrix is not symmetric (max asymmetry {asym:e})"
        )));
    }
    Problem::new(
        Arc::new(MeasurementMap::new(meas.vectors.clone())?),
        Arc::new(SquaredDistance::new(meas.b.clone().into_dyn())),
        Arc::new(PsdNuclearNorm::new(mu)?),
        x0.into_dyn(),
    )
}
