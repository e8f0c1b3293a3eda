use ndarray::{Array1, Array2, ArrayD, ArrayViewD};

use super::{LinearOperator, Shape};
use crate::array::{from_row_major, to_row_major_vec};
use crate::{Error, Result};

/// A dense matrix acting on row-major flattenings of its input shape.
#[derive(Clone, Debug)]
pub struct DenseMatrix {
    matrix: Array2<f64>,
    in_shape: Shape,
    out_shape: Shape,
}

impl DenseMatrix {
    /// Vector-to-vector operator `x ↦ M x`.
    ///
    /// # Panics
    /// If `matrix` has a zero dimension.
    pub fn new(matrix: Array2<f64>) -> Self {
        let (m, n) = matrix.dim();
        DenseMatrix {
            in_shape: Shape::vector(n).expect("matrix has columns"),
            out_shape: Shape::vector(m).expect("matrix has rows"),
            matrix,
        }
    }

    /// Operator between arbitrary shapes; the matrix acts on row-major
    /// flattenings, so `in_shape.len()` must equal the column count and
    /// `out_shape.len()` the row count.
    pub fn with_shapes(matrix: Array2<f64>, in_shape: Shape, out_shape: Shape) -> Result<Self> {
        let (m, n) = matrix.dim();
        if in_shape.len() != n || out_shape.len() != m {
            return Err(Error::invalid(format!(
                "a {m}x{n} matrix cannot map {in_shape} to {out_shape}"
            )));
        }
        Ok(DenseMatrix {
            matrix,
            in_shape,
            out_shape,
        })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }
}

impl LinearOperator for DenseMatrix {
    fn in_shape(&self) -> &Shape {
        &self.in_shape
    }

    fn out_shape(&self) -> &Shape {
        &self.out_shape
    }

    fn forward(&self, x: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        let v = Array1::from(to_row_major_vec(&x));
        let y = self.matrix.dot(&v);
        from_row_major(self.out_shape.dims(), y.to_vec())
    }

    fn adjoint(&self, y: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        let v = Array1::from(to_row_major_vec(&y));
        let x = self.matrix.t().dot(&v);
        from_row_major(self.in_shape.dims(), x.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::adjoint_consistency;
    use crate::rng::{normal_array, normal_matrix, seeded};
    use ndarray::{arr1, arr2};

    #[test]
    fn hand_matvec() {
        let a = DenseMatrix::new(arr2(&[[1.0, 2.0], [3.0, 4.0]]));
        let x = arr1(&[1.0, 1.0]).into_dyn();
        assert_eq!(a.apply(x.view()).unwrap(), arr1(&[3.0, 7.0]).into_dyn());
        let y = arr1(&[1.0, 0.0]).into_dyn();
        assert_eq!(a.adjoint_apply(y.view()).unwrap(), arr1(&[1.0, 2.0]).into_dyn());
    }

    #[test]
    fn matches_explicit_double_loop() {
        let mut rng = seeded(11);
        let m = normal_matrix(&mut rng, 5, 10);
        let x = normal_array(&mut rng, &[10]);
        let a = DenseMatrix::new(m.clone());
        let got = a.apply(x.view()).unwrap();
        for i in 0..5 {
            let mut acc = 0.0;
            for j in 0..10 {
                acc += m[[i, j]] * x[[j]];
            }
            assert!((got[[i]] - acc).abs() <= 1e-12 * acc.abs().max(1.0));
        }
    }

    #[test]
    fn adjoint_matches_explicit_transpose_loop() {
        let mut rng = seeded(12);
        let m = normal_matrix(&mut rng, 4, 6);
        let y = normal_array(&mut rng, &[4]);
        let a = DenseMatrix::new(m.clone());
        let got = a.adjoint_apply(y.view()).unwrap();
        for j in 0..6 {
            let mut acc = 0.0;
            for i in 0..4 {
                acc += m[[i, j]] * y[[i]];
            }
            assert!((got[[j]] - acc).abs() <= 1e-12 * acc.abs().max(1.0));
        }
    }

    #[test]
    fn reshaped_operator_uses_row_major_order() {
        // [[1,2],[3,4]] flattened row-major is [1,2,3,4]; summing map
        let a = DenseMatrix::with_shapes(
            arr2(&[[1.0, 10.0, 100.0, 1000.0]]),
            Shape::new(vec![2, 2]).unwrap(),
            Shape::vector(1).unwrap(),
        )
        .unwrap();
        let x = arr2(&[[1.0, 2.0], [3.0, 4.0]]).into_dyn();
        assert_eq!(a.apply(x.view()).unwrap()[[0]], 4321.0);
        assert!(adjoint_consistency(&a, 20, 3).unwrap() <= 1e-12);
    }

    #[test]
    fn with_shapes_rejects_bad_sizes() {
        let r = DenseMatrix::with_shapes(
            arr2(&[[1.0, 2.0]]),
            Shape::vector(3).unwrap(),
            Shape::vector(1).unwrap(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn true_adjoint_passes_and_wrong_adjoint_fails() {
        let mut rng = seeded(5);
        let m = normal_matrix(&mut rng, 7, 9);
        let a = DenseMatrix::new(m.clone());
        assert!(adjoint_consistency(&a, 100, 9).unwrap() <= 1e-10);

        let other = normal_matrix(&mut rng, 7, 9);
        let wrong = crate::linop::FnOperator::new(
            Shape::vector(9).unwrap(),
            Shape::vector(7).unwrap(),
            move |x| m.dot(&x.into_dimensionality::<ndarray::Ix1>().unwrap()).into_dyn(),
            move |y| other.t().dot(&y.into_dimensionality::<ndarray::Ix1>().unwrap()).into_dyn(),
        );
        assert!(adjoint_consistency(&wrong, 100, 9).unwrap() > 1e-2);
    }

    #[test]
    fn apply_is_pure() {
        let mut rng = seeded(8);
        let a = DenseMatrix::new(normal_matrix(&mut rng, 6, 4));
        let x = normal_array(&mut rng, &[4]);
        let first = a.apply(x.view()).unwrap();
        let second = a.apply(x.view()).unwrap();
        assert_eq!(
            first.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            second.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }
}
