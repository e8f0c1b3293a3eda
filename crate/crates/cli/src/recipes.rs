//! One [`Recipe`] per subcommand: how to synthesise an instance, which files it
//! reads, and how the loaded data becomes a [`Problem`].

use std::collections::BTreeMap;
use std::sync::Arc;

use fbs_core::array::{norm_inf, norm_l1};
use fbs_core::engine::Problem;
use fbs_core::linop::{gradient_operator, DenseMatrix, LinearOperator, Shape};
use fbs_core::problems::{
    democratic, lasso, logistic_matrix_completion, phaselift, sparse_least_squares,
    sparse_logistic, total_variation, ObservationMask, RankOneMeasurements,
};
use fbs_core::prox::catalog::{prox_by_name, smooth_by_name};
use fbs_core::synthetic;
use fbs_core::{Error, Result};
use ndarray::{Array1, Array2, ArrayD, ArrayViewD, Axis, Ix1};

/// Fraction of the data-dependent scale used when no weight is given.
pub const DEFAULT_WEIGHT_FRACTION: f64 = 0.1;

/// Model parameters that may come from flags or from the generator.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params {
    pub mu: Option<f64>,
    pub lambda: Option<f64>,
    pub weight: Option<f64>,
    pub smooth: Option<String>,
    pub prox: Option<String>,
}

/// Loaded input files, keyed by flag name.
pub type Data = BTreeMap<&'static str, Array2<f64>>;

/// A synthetic instance ready to be written to disk.
pub struct Generated {
    pub files: Vec<(&'static str, Array2<f64>)>,
    /// Ground truth, written for reference but never read back.
    pub truth: Option<Array2<f64>>,
    /// Generator constants recorded alongside the run.
    pub conventions: Vec<(&'static str, f64)>,
}

pub type Finish = Box<dyn Fn(ArrayViewD<'_, f64>) -> ArrayD<f64>>;

pub struct Built {
    pub problem: Problem,
    /// Builder name as recorded in the run document.
    pub builder: String,
    pub parameters: Vec<(&'static str, f64)>,
    /// Maps the solver's variable to the reported solution, when they differ.
    pub finish: Option<Finish>,
}

pub trait Recipe: Sync {
    fn name(&self) -> &'static str;
    /// Input flags in reading order, with whether each is required.
    fn inputs(&self) -> &'static [(&'static str, bool)];
    /// May fill parameters whose defaults depend on the ground truth.
    fn generate(&self, dims: &[usize], seed: u64, params: &mut Params) -> Result<Generated>;
    fn build(&self, data: &Data, params: &Params) -> Result<Built>;
}

static RECIPES: &[&dyn Recipe] = &[
    &SparseLeastSquares,
    &Lasso,
    &Logistic,
    &MatrixCompletion,
    &PhaseLift,
    &Democratic,
    &TotalVariation,
    &Generic,
];

pub fn recipe(name: &str) -> Result<&'static dyn Recipe> {
    RECIPES
        .iter()
        .copied()
        .find(|r| r.name() == name)
        .ok_or_else(|| Error::Configuration(format!("unknown recipe {name:?}")))
}

pub fn recipe_names() -> Vec<&'static str> {
    RECIPES.iter().map(|r| r.name()).collect()
}

fn two_dims(dims: &[usize], what: &str) -> Result<(usize, usize)> {
    match dims {
        [m, n] => Ok((*m, *n)),
        _ => Err(Error::InvalidArgument(format!(
            "--gen for {what} takes two dimensions like 20x50, got {}",
            dims.len()
        ))),
    }
}

fn column(v: &Array1<f64>) -> Array2<f64> {
    v.clone().insert_axis(Axis(1))
}

fn matrix<'a>(data: &'a Data, role: &str) -> Result<&'a Array2<f64>> {
    data.get(role)
        .ok_or_else(|| Error::InvalidArgument(format!("missing --{role}")))
}

fn vector(data: &Data, role: &str) -> Result<Array1<f64>> {
    let m = matrix(data, role)?;
    let (r, c) = m.dim();
    if r != 1 && c != 1 {
        return Err(Error::InvalidArgument(format!(
            "--{role} must hold a vector, found a {r}x{c} matrix"
        )));
    }
    Ok(m.iter().copied().collect())
}

/// The flag value if given, else `DEFAULT_WEIGHT_FRACTION * scale`.
fn weight_or_default(given: Option<f64>, flag: &str, scale: impl FnOnce() -> f64) -> Result<f64> {
    if let Some(w) = given {
        return Ok(w);
    }
    let w = DEFAULT_WEIGHT_FRACTION * scale();
    if w > 0.0 && w.is_finite() {
        Ok(w)
    } else {
        Err(Error::InvalidArgument(format!(
            "cannot derive a default from all-zero data; pass --{flag}"
        )))
    }
}

/// `‖Aᵀr‖∞`.
fn correlation(a: &Array2<f64>, r: &Array1<f64>) -> f64 {
    norm_inf(&a.t().dot(r).into_dyn())
}

fn dense(a: &Array2<f64>) -> Arc<dyn LinearOperator> {
    Arc::new(DenseMatrix::new(a.clone()))
}

fn regression_conventions(n: usize, noisy: bool) -> Vec<(&'static str, f64)> {
    let mut c = vec![("gen_sparsity", synthetic::sparsity(n) as f64)];
    if noisy {
        c.push(("gen_noise_level", synthetic::NOISE_LEVEL));
    }
    c
}

fn regression_files(r: &synthetic::Regression) -> Generated {
    Generated {
        files: vec![("matrix", r.a.clone()), ("rhs", column(&r.b))],
        truth: Some(column(&r.x_true)),
        conventions: Vec::new(),
    }
}

const MATRIX_RHS: &[(&str, bool)] = &[("matrix", true), ("rhs", true)];

struct SparseLeastSquares;

impl Recipe for SparseLeastSquares {
    fn name(&self) -> &'static str {
        "sls"
    }

    fn inputs(&self) -> &'static [(&'static str, bool)] {
        MATRIX_RHS
    }

    fn generate(&self, dims: &[usize], seed: u64, _: &mut Params) -> Result<Generated> {
        let (m, n) = two_dims(dims, self.name())?;
        let r = synthetic::sparse_regression(m, n, seed, true);
        Ok(Generated {
            conventions: regression_conventions(n, true),
            ..regression_files(&r)
        })
    }

    fn build(&self, data: &Data, params: &Params) -> Result<Built> {
        let a = matrix(data, "matrix")?;
        let b = vector(data, "rhs")?;
        let mu = weight_or_default(params.mu, "mu", || correlation(a, &b))?;
        let x0 = ArrayD::zeros(vec![a.ncols()]);
        Ok(Built {
            problem: sparse_least_squares(dense(a), b.into_dyn(), mu, x0)?,
            builder: "sparse_least_squares".into(),
            parameters: vec![("mu", mu)],
            finish: None,
        })
    }
}

struct Lasso;

impl Recipe for Lasso {
    fn name(&self) -> &'static str {
        "lasso"
    }

    fn inputs(&self) -> &'static [(&'static str, bool)] {
        MATRIX_RHS
    }

    fn generate(&self, dims: &[usize], seed: u64, params: &mut Params) -> Result<Generated> {
        let (m, n) = two_dims(dims, self.name())?;
        let r = synthetic::sparse_regression(m, n, seed, false);
        params.lambda.get_or_insert(norm_l1(&r.x_true.view().into_dyn()));
        Ok(Generated {
            conventions: regression_conventions(n, false),
            ..regression_files(&r)
        })
    }

    fn build(&self, data: &Data, params: &Params) -> Result<Built> {
        let a = matrix(data, "matrix")?;
        let b = vector(data, "rhs")?;
        let lambda = params.lambda.ok_or_else(|| {
            Error::InvalidArgument("--lambda is required when reading data from files".into())
        })?;
        let x0 = ArrayD::zeros(vec![a.ncols()]);
        Ok(Built {
            problem: lasso(dense(a), b.into_dyn(), lambda, x0)?,
            builder: "lasso".into(),
            parameters: vec![("lambda", lambda)],
            finish: None,
        })
    }
}

struct Logistic;

impl Recipe for Logistic {
    fn name(&self) -> &'static str {
        "logistic"
    }

    fn inputs(&self) -> &'static [(&'static str, bool)] {
        MATRIX_RHS
    }

    fn generate(&self, dims: &[usize], seed: u64, _: &mut Params) -> Result<Generated> {
        let (m, n) = two_dims(dims, self.name())?;
        let r = synthetic::logistic_regression(m, n, seed);
        Ok(Generated {
            conventions: regression_conventions(n, false),
            ..regression_files(&r)
        })
    }

    fn build(&self, data: &Data, params: &Params) -> Result<Built> {
        let a = matrix(data, "matrix")?;
        let b = vector(data, "rhs")?;
        // Gradient of the logit at the origin is σ(0) − b.
        let mu = weight_or_default(params.mu, "mu", || correlation(a, &b.mapv(|v| v - 0.5)))?;
        let x0 = ArrayD::zeros(vec![a.ncols()]);
        Ok(Built {
            problem: sparse_logistic(dense(a), b.into_dyn(), mu, x0)?,
            builder: "sparse_logistic".into(),
            parameters: vec![("mu", mu)],
            finish: None,
        })
    }
}

struct MatrixCompletion;

impl Recipe for MatrixCompletion {
    fn name(&self) -> &'static str {
        "matcomp"
    }

    fn inputs(&self) -> &'static [(&'static str, bool)] {
        &[("labels", true), ("mask", false)]
    }

    fn generate(&self, dims: &[usize], seed: u64, _: &mut Params) -> Result<Generated> {
        let (rows, cols) = two_dims(dims, self.name())?;
        let c = synthetic::completion(rows, cols, seed);
        Ok(Generated {
            files: vec![("labels", c.labels), ("mask", c.mask)],
            truth: None,
            conventions: vec![("gen_observed_fraction", synthetic::OBSERVED_FRACTION)],
        })
    }

    fn build(&self, data: &Data, params: &Params) -> Result<Built> {
        let y = matrix(data, "labels")?;
        let mask = match data.get("mask") {
            Some(m) => {
                if m.dim() != y.dim() {
                    return Err(Error::Shape {
                        expected: vec![y.nrows(), y.ncols()],
                        actual: vec![m.nrows(), m.ncols()],
                    });
                }
                if m.iter().any(|&v| v != 0.0 && v != 1.0) {
                    return Err(Error::InvalidArgument("--mask entries must be 0 or 1".into()));
                }
                ObservationMask::from_indicator(m)
            }
            None => ObservationMask::full(y.nrows(), y.ncols()),
        };
        let mu = weight_or_default(params.mu, "mu", || {
            mask.indices()
                .map(|(i, j)| (y[[i, j]] - 0.5).abs())
                .fold(0.0, f64::max)
        })?;
        Ok(Built {
            problem: logistic_matrix_completion(y, &mask, mu, None)?,
            builder: "logistic_matrix_completion".into(),
            parameters: vec![("mu", mu)],
            finish: None,
        })
    }
}

struct PhaseLift;

impl Recipe for PhaseLift {
    fn name(&self) -> &'static str {
        "phaselift"
    }

    fn inputs(&self) -> &'static [(&'static str, bool)] {
        &[("vectors", true), ("rhs", true)]
    }

    fn generate(&self, dims: &[usize], seed: u64, _: &mut Params) -> Result<Generated> {
        let (m, n) = two_dims(dims, self.name())?;
        let p = synthetic::phase(m, n, seed);
        Ok(Generated {
            files: vec![("vectors", p.vectors), ("rhs", column(&p.b))],
            truth: Some(column(&p.x_true)),
            conventions: Vec::new(),
        })
    }

    fn build(&self, data: &Data, params: &Params) -> Result<Built> {
        let vectors = matrix(data, "vectors")?.clone();
        let b = vector(data, "rhs")?;
        let meas = RankOneMeasurements::new(vectors, b)?;
        let n = meas.signal_len();
        let mu = weight_or_default(params.mu, "mu", || {
            // ‖𝒜ᵀb‖∞ with 𝒜ᵀb = Σ b_i a_i a_iᵀ.
            let weighted = &meas.vectors * &meas.b.view().insert_axis(Axis(1));
            norm_inf(&meas.vectors.t().dot(&weighted).into_dyn())
        })?;
        Ok(Built {
            problem: phaselift(&meas, mu, Array2::zeros((n, n)))?,
            builder: "phaselift".into(),
            parameters: vec![("mu", mu)],
            finish: None,
        })
    }
}

struct Democratic;

impl Recipe for Democratic {
    fn name(&self) -> &'static str {
        "democratic"
    }

    fn inputs(&self) -> &'static [(&'static str, bool)] {
        MATRIX_RHS
    }

    fn generate(&self, dims: &[usize], seed: u64, _: &mut Params) -> Result<Generated> {
        let (m, n) = two_dims(dims, self.name())?;
        let f = synthetic::frame(m, n, seed);
        Ok(Generated {
            files: vec![("matrix", f.a), ("rhs", column(&f.b))],
            truth: None,
            conventions: Vec::new(),
        })
    }

    fn build(&self, data: &Data, params: &Params) -> Result<Built> {
        let a = matrix(data, "matrix")?;
        let b = vector(data, "rhs")?;
        let mu = weight_or_default(params.mu, "mu", || correlation(a, &b))?;
        let x0 = ArrayD::zeros(vec![a.ncols()]);
        Ok(Built {
            problem: democratic(dense(a), b.into_dyn(), mu, x0)?,
            builder: "democratic".into(),
            parameters: vec![("mu", mu)],
            finish: None,
        })
    }
}

struct TotalVariation;

impl Recipe for TotalVariation {
    fn name(&self) -> &'static str {
        "tv"
    }

    fn inputs(&self) -> &'static [(&'static str, bool)] {
        &[("image", true)]
    }

    fn generate(&self, dims: &[usize], seed: u64, _: &mut Params) -> Result<Generated> {
        if dims.is_empty() || dims.len() > 2 {
            return Err(Error::InvalidArgument(format!(
                "--gen for tv takes one or two dimensions, got {}",
                dims.len()
            )));
        }
        let im = synthetic::piecewise_image(dims, seed);
        let as_matrix = |a: ArrayD<f64>| match a.ndim() {
            1 => a.insert_axis(Axis(0)).into_dimensionality().expect("rank 2"),
            _ => a.into_dimensionality().expect("rank 2"),
        };
        Ok(Generated {
            files: vec![("image", as_matrix(im.noisy))],
            truth: Some(as_matrix(im.clean)),
            conventions: vec![("gen_image_noise", synthetic::IMAGE_NOISE)],
        })
    }

    fn build(&self, data: &Data, params: &Params) -> Result<Built> {
        let image = matrix(data, "image")?;
        // A single row is a 1-d signal.
        let noisy = if image.nrows() == 1 {
            image.row(0).to_owned().into_dyn()
        } else {
            image.clone().into_dyn()
        };
        let mu = weight_or_default(params.mu, "mu", || {
            let grad = gradient_operator(Shape::new(noisy.shape().to_vec()).expect("non-empty"));
            norm_inf(&grad.forward(noisy.view()))
        })?;
        let tv = total_variation(noisy, mu)?;
        let problem = tv.problem.clone();
        Ok(Built {
            problem,
            builder: "total_variation".into(),
            parameters: vec![("mu", mu)],
            finish: Some(Box::new(move |p| tv.recover(p))),
        })
    }
}

struct Generic;

impl Recipe for Generic {
    fn name(&self) -> &'static str {
        "generic"
    }

    fn inputs(&self) -> &'static [(&'static str, bool)] {
        MATRIX_RHS
    }

    fn generate(&self, dims: &[usize], seed: u64, params: &mut Params) -> Result<Generated> {
        let (m, n) = two_dims(dims, self.name())?;
        let logistic = params.smooth.as_deref() == Some("logistic");
        let r = if logistic {
            synthetic::logistic_regression(m, n, seed)
        } else {
            synthetic::sparse_regression(m, n, seed, true)
        };
        Ok(Generated {
            conventions: regression_conventions(n, !logistic),
            ..regression_files(&r)
        })
    }

    fn build(&self, data: &Data, params: &Params) -> Result<Built> {
        let a = matrix(data, "matrix")?;
        let b = vector(data, "rhs")?;
        let smooth_name = params.smooth.as_deref().unwrap_or("least-squares");
        let prox_name = params.prox.as_deref().unwrap_or("l1");
        let weight = weight_or_default(params.weight, "weight", || correlation(a, &b))?;
        let smooth = smooth_by_name(smooth_name, b.into_dyn())?;
        let prox = prox_by_name(prox_name, weight)?;
        let x0 = ArrayD::zeros(vec![a.ncols()]);
        Ok(Built {
            problem: Problem::new(dense(a), smooth, prox, x0)?,
            builder: format!("generic:{smooth_name}+{prox_name}"),
            parameters: vec![("weight", weight)],
            finish: None,
        })
    }
}

/// Shapes a solution for CSV output: vectors become one column, higher ranks
/// keep their first axis as rows.
pub fn as_table(x: &ArrayD<f64>) -> Array2<f64> {
    match x.ndim() {
        1 => column(&x.clone().into_dimensionality::<Ix1>().expect("rank 1")),
        _ => {
            let rows = x.shape()[0];
            let cols = x.len() / rows;
            let flat: Vec<f64> = x.iter().copied().collect();
            Array2::from_shape_vec((rows, cols), flat).expect("sizes agree")
        }
    }
}
