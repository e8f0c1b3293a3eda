use ndarray::{ArrayD, ArrayViewD, Ix2};

use super::ops::{
    project_box_magnitude_unchecked, project_l1_ball_unchecked, prox_linf_unchecked,
    prox_psd_nuclear_unchecked, shrink_nuclear_unchecked, shrink_unchecked, symmetrize,
    to_nalgebra,
};
use super::ProxFn;
use crate::array::{norm_inf, norm_l1};
use crate::{Error, Result};

// indicator slack for rounding in projections
const FEASIBILITY_SLACK: f64 = 1e-9;

fn positive(what: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(format!("{what} must be positive and finite, got {v}")))
    }
}

fn non_negative(what: &str, v: f64) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(format!("{what} must be non-negative and finite, got {v}")))
    }
}

fn as_matrix(x: ArrayViewD<'_, f64>) -> ndarray::ArrayView2<'_, f64> {
    x.into_dimensionality::<Ix2>()
        .expect("shape checked when the problem was assembled")
}

fn require_matrix(name: &str, dims: &[usize], square: bool) -> Result<()> {
    match dims {
        [m, n] if !square || m == n => Ok(()),
        _ => Err(Error::invalid(format!(
            "{name} acts on {} matrices, got shape {dims:?}",
            if square { "square" } else { "2-d" }
        ))),
    }
}

/// `g ≡ 0`; the prox is the identity.
#[derive(Clone, Debug, Default)]
pub struct ZeroProx;

impl ProxFn for ZeroProx {
    fn name(&self) -> &'static str {
        "zero"
    }
    fn prox(&self, x: ArrayViewD<'_, f64>, _t: f64) -> ArrayD<f64> {
        x.to_owned()
    }
    fn value(&self, _x: ArrayViewD<'_, f64>) -> Option<f64> {
        Some(0.0)
    }
}

/// `g(x) = μ‖x‖₁`.
#[derive(Clone, Debug)]
pub struct L1Norm {
    mu: f64,
}

impl L1Norm {
    pub fn new(mu: f64) -> Result<Self> {
        Ok(L1Norm {
            mu: non_negative("l1 weight", mu)?,
        })
    }
}

impl ProxFn for L1Norm {
    fn name(&self) -> &'static str {
        "l1"
    }
    fn prox(&self, x: ArrayViewD<'_, f64>, t: f64) -> ArrayD<f64> {
        shrink_unchecked(x, self.mu * t)
    }
    fn value(&self, x: ArrayViewD<'_, f64>) -> Option<f64> {
        Some(self.mu * norm_l1(&x))
    }
}

/// Indicator of `{x : ‖x‖₁ ≤ radius}`.
#[derive(Clone, Debug)]
pub struct L1Ball {
    radius: f64,
}

impl L1Ball {
    pub fn new(radius: f64) -> Result<Self> {
        Ok(L1Ball {
            radius: positive("l1-ball radius", radius)?,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl ProxFn for L1Ball {
    fn name(&self) -> &'static str {
        "l1-ball"
    }
    fn prox(&self, x: ArrayViewD<'_, f64>, t: f64) -> ArrayD<f64> {
        if t == 0.0 {
            return x.to_owned();
        }
        project_l1_ball_unchecked(x, self.radius)
    }
    fn value(&self, x: ArrayViewD<'_, f64>) -> Option<f64> {
        let inside = norm_l1(&x) <= self.radius * (1.0 + FEASIBILITY_SLACK);
        Some(if inside { 0.0 } else { f64::INFINITY })
    }
}

/// `g(x) = μ‖x‖∞`.
#[derive(Clone, Debug)]
pub struct LinfNorm {
    mu: f64,
}

impl LinfNorm {
    pub fn new(mu: f64) -> Result<Self> {
        Ok(LinfNorm {
            mu: non_negative("l-infinity weight", mu)?,
        })
    }
}

impl ProxFn for LinfNorm {
    fn name(&self) -> &'static str {
        "linf"
    }
    fn prox(&self, x: ArrayViewD<'_, f64>, t: f64) -> ArrayD<f64> {
        prox_linf_unchecked(x, self.mu * t)
    }
    fn value(&self, x: ArrayViewD<'_, f64>) -> Option<f64> {
        Some(self.mu * norm_inf(&x))
    }
}

/// `g(X) = μ‖X‖_*` on matrices.
#[derive(Clone, Debug)]
pub struct NuclearNorm {
    mu: f64,
}

impl NuclearNorm {
    pub fn new(mu: f64) -> Result<Self> {
        Ok(NuclearNorm {
            mu: non_negative("nuclear-norm weight", mu)?,
        })
    }
}

impl ProxFn for NuclearNorm {
    fn name(&self) -> &'static str {
        "nuclear"
    }
    fn prox(&self, x: ArrayViewD<'_, f64>, t: f64) -> ArrayD<f64> {
        let m = as_matrix(x).to_owned();
        shrink_nuclear_unchecked(&m, self.mu * t).into_dyn()
    }
    fn value(&self, x: ArrayViewD<'_, f64>) -> Option<f64> {
        let m = as_matrix(x).to_owned();
        Some(self.mu * to_nalgebra(&m).singular_values().sum())
    }
    fn check_shape(&self, dims: &[usize]) -> Result<()> {
        require_matrix(self.name(), dims, false)
    }
}

/// `g(X) = μ‖X‖_*` restricted to the PSD cone (`+∞` off it).
#[derive(Clone, Debug)]
pub struct PsdNuclearNorm {
    mu: f64,
}

impl PsdNuclearNorm {
    pub fn new(mu: f64) -> Result<Self> {
        Ok(PsdNuclearNorm {
            mu: non_negative("PSD nuclear-norm weight", mu)?,
        })
    }
}

impl ProxFn for PsdNuclearNorm {
    fn name(&self) -> &'static str {
        "psd-nuclear"
    }
    fn prox(&self, x: ArrayViewD<'_, f64>, t: f64) -> ArrayD<f64> {
        let m = as_matrix(x).to_owned();
        prox_psd_nuclear_unchecked(&m, self.mu * t).into_dyn()
    }
    fn value(&self, x: ArrayViewD<'_, f64>) -> Option<f64> {
        let m = symmetrize(&as_matrix(x).to_owned());
        let eig = to_nalgebra(&m).symmetric_eigenvalues();
        let scale = eig.iter().fold(1.0_f64, |a, l| a.max(l.abs()));
        if eig.min() < -FEASIBILITY_SLACK * scale {
            Some(f64::INFINITY)
        } else {
            Some(self.mu * eig.iter().map(|l| l.abs()).sum::<f64>())
        }
    }
    fn check_shape(&self, dims: &[usize]) -> Result<()> {
        require_matrix(self.name(), dims, true)
    }
}

/// Indicator of fields whose per-pixel component vectors (last axis) have
/// Euclidean norm at most `bound`.
#[derive(Clone, Debug)]
pub struct MagnitudeBall {
    bound: f64,
}

impl MagnitudeBall {
    pub fn new(bound: f64) -> Result<Self> {
        Ok(MagnitudeBall {
            bound: non_negative("magnitude bound", bound)?,
        })
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }
}

impl ProxFn for MagnitudeBall {
    fn name(&self) -> &'static str {
        "magnitude-ball"
    }
    fn prox(&self, x: ArrayViewD<'_, f64>, t: f64) -> ArrayD<f64> {
        if t == 0.0 {
            return x.to_owned();
        }
        project_box_magnitude_unchecked(x, self.bound)
    }
    fn value(&self, x: ArrayViewD<'_, f64>) -> Option<f64> {
        let last = ndarray::Axis(x.ndim() - 1);
        let limit = self.bound * (1.0 + FEASIBILITY_SLACK) + f64::MIN_POSITIVE;
        let inside = x
            .lanes(last)
            .into_iter()
            .all(|l| l.iter().map(|v| v * v).sum::<f64>().sqrt() <= limit);
        Some(if inside { 0.0 } else { f64::INFINITY })
    }
    fn check_shape(&self, dims: &[usize]) -> Result<()> {
        if dims.len() >= 2 {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "magnitude-ball acts on fields with a trailing component axis, got {dims:?}"
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::norm;
    use crate::rng::{normal_array, seeded};
    use rand::Rng;

    /// Perturbation test of prox optimality:
    /// g(p) + ‖p−x‖²/2t ≤ g(q) + ‖q−x‖²/2t for q near p.
    fn assert_prox_optimal(g: &dyn ProxFn, dims: &[usize], seed: u64, trials: usize) {
        let mut rng = seeded(seed);
        for &t in &[0.1, 1.0, 10.0] {
            let x = normal_array(&mut rng, dims) * 2.0;
            let p = g.prox(x.view(), t);
            let obj = |q: &ArrayD<f64>| {
                g.value(q.view()).unwrap() + (q - &x).iter().map(|d| d * d).sum::<f64>() / (2.0 * t)
            };
            let base = obj(&p);
            let radius = (2.0 * norm(&(&x - &p))).max(1e-3);
            for _ in 0..trials {
                let d = normal_array(&mut rng, dims);
                let scale = radius * rng.random::<f64>() / norm(&d);
                let q = &p + &(d * scale);
                let other = obj(&q);
                assert!(base <= other + 1e-10, "{}: t={t} {base} > {other}", g.name());
            }
        }
    }

    #[test]
    fn each_prox_is_optimal_under_perturbation() {
        assert_prox_optimal(&ZeroProx, &[5], 1, 100);
        assert_prox_optimal(&L1Norm::new(0.8).unwrap(), &[6], 2, 100);
        assert_prox_optimal(&L1Ball::new(1.5).unwrap(), &[6], 3, 100);
        assert_prox_optimal(&LinfNorm::new(0.6).unwrap(), &[5], 4, 100);
        assert_prox_optimal(&NuclearNorm::new(0.5).unwrap(), &[4, 3], 5, 100);
        assert_prox_optimal(&PsdNuclearNorm::new(0.5).unwrap(), &[4, 4], 7, 100);
        assert_prox_optimal(&MagnitudeBall::new(0.7).unwrap(), &[3, 3, 2], 6, 100);
    }

    #[test]
    fn constructors_validate_weights() {
        assert!(L1Norm::new(-1.0).is_err());
        assert!(L1Ball::new(0.0).is_err());
        assert!(LinfNorm::new(f64::NAN).is_err());
        assert!(NuclearNorm::new(-0.1).is_err());
        assert!(PsdNuclearNorm::new(-0.1).is_err());
        assert!(MagnitudeBall::new(-2.0).is_err());
    }

    #[test]
    fn zero_step_is_identity() {
        let mut rng = seeded(9);
        let x = normal_array(&mut rng, &[4, 4]);
        let fns: Vec<Box<dyn ProxFn>> = vec![
            Box::new(L1Norm::new(1.0).unwrap()),
            Box::new(L1Ball::new(0.1).unwrap()),
            Box::new(LinfNorm::new(1.0).unwrap()),
            Box::new(NuclearNorm::new(1.0).unwrap()),
            Box::new(MagnitudeBall::new(0.1).unwrap()),
        ];
        for g in fns {
            let p = g.prox(x.view(), 0.0);
            assert!((&p - &x).iter().all(|d| d.abs() < 1e-12), "{}", g.name());
        }
    }

    #[test]
    fn shape_checks() {
        assert!(NuclearNorm::new(1.0).unwrap().check_shape(&[5]).is_err());
        assert!(PsdNuclearNorm::new(1.0).unwrap().check_shape(&[3, 4]).is_err());
        assert!(PsdNuclearNorm::new(1.0).unwrap().check_shape(&[3, 3]).is_ok());
        assert!(MagnitudeBall::new(1.0).unwrap().check_shape(&[3]).is_err());
    }
}
