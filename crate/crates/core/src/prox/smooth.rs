use ndarray::{ArrayD, ArrayViewD};

use super::ops::{logit_term, sigmoid};
use super::SmoothFn;
use crate::array::{dot, norm_sq};
use crate::{Error, Result};

fn check_target(name: &str, target: &ArrayD<f64>, dims: &[usize]) -> Result<()> {
    if target.shape() == dims {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{name}: data has shape {:?} but the operator produces {dims:?}",
            target.shape()
        )))
    }
}

/// `f(z) = ½‖z − b‖²`.
#[derive(Clone, Debug)]
pub struct HalfSquaredDistance {
    target: ArrayD<f64>,
}

impl HalfSquaredDistance {
    pub fn new(target: ArrayD<f64>) -> Self {
        HalfSquaredDistance { target }
    }
}

impl SmoothFn for HalfSquaredDistance {
    fn name(&self) -> &'static str {
        "least-squares"
    }
    fn value(&self, z: ArrayViewD<'_, f64>) -> f64 {
        0.5 * norm_sq(&(&z - &self.target))
    }
    fn gradient(&self, z: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        &z - &self.target
    }
    fn check_shape(&self, dims: &[usize]) -> Result<()> {
        check_target(self.name(), &self.target, dims)
    }
}

/// `f(z) = ‖z − b‖²`, without the one-half.
#[derive(Clone, Debug)]
pub struct SquaredDistance {
    target: ArrayD<f64>,
}

impl SquaredDistance {
    pub fn new(target: ArrayD<f64>) -> Self {
        SquaredDistance { target }
    }
}

impl SmoothFn for SquaredDistance {
    fn name(&self) -> &'static str {
        "squared-distance"
    }
    fn value(&self, z: ArrayViewD<'_, f64>) -> f64 {
        norm_sq(&(&z - &self.target))
    }
    fn gradient(&self, z: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        (&z - &self.target) * 2.0
    }
    fn check_shape(&self, dims: &[usize]) -> Result<()> {
        check_target(self.name(), &self.target, dims)
    }
}

/// `f(z) = ⟨c, z⟩`; gradient is constant.
#[derive(Clone, Debug)]
pub struct LinearFn {
    coefficients: ArrayD<f64>,
}

impl LinearFn {
    pub fn new(coefficients: ArrayD<f64>) -> Self {
        LinearFn { coefficients }
    }
}

impl SmoothFn for LinearFn {
    fn name(&self) -> &'static str {
        "linear"
    }
    fn value(&self, z: ArrayViewD<'_, f64>) -> f64 {
        dot(&z, &self.coefficients)
    }
    fn gradient(&self, _z: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        self.coefficients.clone()
    }
    fn check_shape(&self, dims: &[usize]) -> Result<()> {
        check_target(self.name(), &self.coefficients, dims)
    }
}

/// Logistic loss `Σ log(e^{z_i} + 1) − b_i z_i` over the entries selected by
/// an optional mask; unselected entries contribute nothing.
#[derive(Clone, Debug)]
pub struct Logistic {
    labels: ArrayD<f64>,
    mask: Option<ArrayD<bool>>,
}

impl Logistic {
    pub fn new(labels: ArrayD<f64>) -> Result<Self> {
        Self::build(labels, None)
    }

    /// Only entries where `mask` is true enter the loss; labels elsewhere are
    /// ignored.
    pub fn masked(labels: ArrayD<f64>, mask: ArrayD<bool>) -> Result<Self> {
        if mask.shape() != labels.shape() {
            return Err(Error::Shape {
                expected: labels.shape().to_vec(),
                actual: mask.shape().to_vec(),
            });
        }
        Self::build(labels, Some(mask))
    }

    fn build(labels: ArrayD<f64>, mask: Option<ArrayD<bool>>) -> Result<Self> {
        for (i, &b) in labels.iter().enumerate() {
            let observed = mask.as_ref().is_none_or(|m| m.iter().nth(i) == Some(&true));
            if observed && b != 0.0 && b != 1.0 {
                return Err(Error::invalid(format!(
                    "labels must be 0 or 1; entry {i} is {b}"
                )));
            }
        }
        Ok(Logistic { labels, mask })
    }
}

impl SmoothFn for Logistic {
    fn name(&self) -> &'static str {
        "logistic"
    }

    fn value(&self, z: ArrayViewD<'_, f64>) -> f64 {
        match &self.mask {
            None => z
                .iter()
                .zip(self.labels.iter())
                .map(|(&z, &b)| logit_term(z, b))
                .sum(),
            Some(mask) => z
                .iter()
                .zip(self.labels.iter())
                .zip(mask.iter())
                .filter(|(_, &m)| m)
                .map(|((&z, &b), _)| logit_term(z, b))
                .sum(),
        }
    }

    fn gradient(&self, z: ArrayViewD<'_, f64>) -> ArrayD<f64> {
        let mut g = z.to_owned();
        g.zip_mut_with(&self.labels, |zi, &b| *zi = sigmoid(*zi) - b);
        if let Some(mask) = &self.mask {
            g.zip_mut_with(mask, |gi, &m| {
                if !m {
                    *gi = 0.0
                }
            });
        }
        g
    }

    fn check_shape(&self, dims: &[usize]) -> Result<()> {
        check_target(self.name(), &self.labels, dims)
    }
}
