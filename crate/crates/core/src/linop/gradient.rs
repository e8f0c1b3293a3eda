use ndarray::{ArrayD, ArrayViewD, Axis, Zip};

use super::{LinearOperator, Shape};

/// Forward-difference gradient with Neumann boundary.
///
/// Maps an array of shape `dims` to one of shape `dims × d`, where the last
/// axis indexes the direction: `(∇x)[i, j] = x[i + e_j] − x[i]`, and zero at
/// the last index along axis `j`. The adjoint is the negative divergence.
#[derive(Clone, Debug)]
pub struct Gradient {
    in_shape: Shape,
    out_shape: Shape,
}

pub fn gradient_operator(shape: Shape) -> Gradient {
    Gradient::new(shape)
}

impl Gradient {
    pub fn new(shape: Shape) -> Self {
        let out_shape = shape
            .with_trailing(shape.rank())
            .expect("rank of a valid shape is positive");
        Gradient {
            in_shape: shape,
            out_shape,
        }
    }
}

impl LinearOperator for Gradient {
    fn in_shape(&self) -> &Shape {
        &self.in_shape
    }

    fn out_shape(&self) -> &Shape {
        &self.out_shape
    }

    fn forward(&self, x: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        let rank = self.in_shape.rank();
        let mut out = ArrayD::zeros(self.out_shape.dims());
        for axis in 0..rank {
            let n = x.len_of(Axis(axis));
            if n < 2 {
                continue;
            }
            let mut component = out.index_axis_mut(Axis(rank), axis);
            let head = x.slice_axis(Axis(axis), (0..n - 1).into());
            let tail = x.slice_axis(Axis(axis), (1..n).into());
            let mut dst = component.slice_axis_mut(Axis(axis), (0..n - 1).into());
            Zip::from(&mut dst)
                .and(&head)
                .and(&tail)
                .for_each(|d, &a, &b| *d = b - a);
        }
        out
    }

    fn adjoint(&self, p: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        let rank = self.in_shape.rank();
        let mut out = ArrayD::zeros(self.in_shape.dims());
        for axis in 0..rank {
            let n = out.len_of(Axis(axis));
            if n < 2 {
                continue;
            }
            let component = p.index_axis(Axis(rank), axis);
            let used = component.slice_axis(Axis(axis), (0..n - 1).into());
            {
                let mut dst = out.slice_axis_mut(Axis(axis), (0..n - 1).into());
                dst -= &used;
            }
            let mut dst = out.slice_axis_mut(Axis(axis), (1..n).into());
            dst += &used;
        }
        out
    }
}

/// Discrete divergence `div = −∇ᵀ`, mapping fields of shape `dims × d` back
/// to arrays of shape `dims`. Its adjoint is `−∇`.
#[derive(Clone, Debug)]
pub struct Divergence {
    gradient: Gradient,
}

impl Divergence {
    pub fn new(shape: Shape) -> Self {
        Divergence {
            gradient: Gradient::new(shape),
        }
    }
}

impl LinearOperator for Divergence {
    fn in_shape(&self) -> &Shape {
        self.gradient.out_shape()
    }

    fn out_shape(&self) -> &Shape {
        self.gradient.in_shape()
    }

    fn forward(&self, p: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        -self.gradient.adjoint(p)
    }

    fn adjoint(&self, x: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        -self.gradient.forward(x)
    }
}
