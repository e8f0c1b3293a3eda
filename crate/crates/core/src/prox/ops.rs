use nalgebra::DMatrix;
use ndarray::{Array2, ArrayD, ArrayViewD, Axis};

use crate::array::norm_l1;
use crate::{Error, Result};

/// Soft thresholding `sign(x)·max(|x| − threshold, 0)`, componentwise.
pub fn shrink(x: ArrayViewD<'_, f64>, threshold: f64) -> Result<ArrayD<f64>> {
    if !(threshold >= 0.0) {
        return Err(Error::invalid(format!(
            "shrink threshold must be non-negative, got {threshold}"
        )));
    }
    Ok(shrink_unchecked(x, threshold))
}

pub(crate) fn shrink_unchecked(x: ArrayViewD<'_, f64>, threshold: f64) -> ArrayD<f64> {
    x.mapv(|v| v.signum() * (v.abs() - threshold).max(0.0))
}

/// Euclidean projection onto `{p : ‖p‖₁ ≤ radius}`.
///
/// Sorts magnitudes to find the shrink threshold that lands exactly on the
/// ball's surface. Points already inside are returned unchanged.
pub fn project_l1_ball(x: ArrayViewD<'_, f64>, radius: f64) -> Result<ArrayD<f64>> {
    if !(radius > 0.0) {
        return Err(Error::invalid(format!(
            "l1-ball radius must be positive, got {radius}"
        )));
    }
    Ok(project_l1_ball_unchecked(x, radius))
}

pub(crate) fn project_l1_ball_unchecked(x: ArrayViewD<'_, f64>, radius: f64) -> ArrayD<f64> {
    if norm_l1(&x) <= radius {
        return x.to_owned();
    }
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut threshold = 0.0;
    for (k, &u) in mags.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - radius) / (k as f64 + 1.0);
        if u > candidate {
            threshold = candidate;
        } else {
            break;
        }
    }
    shrink_unchecked(x, threshold.max(0.0))
}

/// Prox of `weight·‖·‖∞` via the Moreau decomposition
/// `x − project_l1_ball(x, weight)`.
pub fn prox_linf(x: ArrayViewD<'_, f64>, weight: f64) -> Result<ArrayD<f64>> {
    if !(weight >= 0.0) {
        return Err(Error::invalid(format!(
            "l-infinity prox weight must be non-negative, got {weight}"
        )));
    }
    Ok(prox_linf_unchecked(x, weight))
}

pub(crate) fn prox_linf_unchecked(x: ArrayViewD<'_, f64>, weight: f64) -> ArrayD<f64> {
    if weight == 0.0 {
        return x.to_owned();
    }
    &x - &project_l1_ball_unchecked(x.view(), weight)
}

pub(crate) fn to_nalgebra(x: &Array2<f64>) -> DMatrix<f64> {
    let (m, n) = x.dim();
    DMatrix::from_fn(m, n, |i, j| x[[i, j]])
}

pub(crate) fn from_nalgebra(x: &DMatrix<f64>) -> Array2<f64> {
    Array2::from_shape_fn((x.nrows(), x.ncols()), |(i, j)| x[(i, j)])
}

fn require_finite(x: &Array2<f64>, what: &str) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what}: input has non-finite entries")))
    }
}

/// Singular value thresholding: `U·shrink(Σ, threshold)·Vᵀ`.
pub fn shrink_nuclear(x: &Array2<f64>, threshold: f64) -> Result<Array2<f64>> {
    if !(threshold >= 0.0) {
        return Err(Error::invalid(format!(
            "nuclear shrink threshold must be non-negative, got {threshold}"
        )));
    }
    require_finite(x, "shrink_nuclear")?;
    Ok(shrink_nuclear_unchecked(x, threshold))
}

pub(crate) fn shrink_nuclear_unchecked(x: &Array2<f64>, threshold: f64) -> Array2<f64> {
    let svd = to_nalgebra(x).svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested Vᵀ");
    let sigma = svd.singular_values.map(|s| (s - threshold).max(0.0));
    let recon = u * DMatrix::from_diagonal(&sigma) * v_t;
    from_nalgebra(&recon)
}

/// Joint prox of `threshold·‖·‖_*` and the PSD-cone indicator:
/// `Q·diag(max(λ − threshold, 0))·Qᵀ` on the symmetrised input.
pub fn prox_psd_nuclear(x: &Array2<f64>, threshold: f64) -> Result<Array2<f64>> {
    if !(threshold >= 0.0) {
        return Err(Error::invalid(format!(
            "PSD prox threshold must be non-negative, got {threshold}"
        )));
    }
    let (m, n) = x.dim();
    if m != n {
        return Err(Error::invalid(format!(
            "PSD prox needs a square matrix, got {m}x{n}"
        )));
    }
    require_finite(x, "prox_psd_nuclear")?;
    Ok(prox_psd_nuclear_unchecked(x, threshold))
}

pub(crate) fn symmetrize(x: &Array2<f64>) -> Array2<f64> {
    (x + &x.t()) * 0.5
}

pub(crate) fn prox_psd_nuclear_unchecked(x: &Array2<f64>, threshold: f64) -> Array2<f64> {
    let eig = to_nalgebra(&symmetrize(x)).symmetric_eigen();
    let lambda = eig.eigenvalues.map(|l| (l - threshold).max(0.0));
    let q = &eig.eigenvectors;
    let recon = q * DMatrix::from_diagonal(&lambda) * q.transpose();
    // eigen-reconstruction is symmetric only up to rounding
    symmetrize(&from_nalgebra(&recon))
}

fn check_binary(b: &ArrayViewD<'_, f64>) -> Result<()> {
    match b.iter().position(|&v| v != 0.0 && v != 1.0) {
        None => Ok(()),
        Some(i) => Err(Error::invalid(format!(
            "labels must be 0 or 1; entry {i} is {}",
            b.iter().nth(i).unwrap()
        ))),
    }
}

fn check_pair(z: &ArrayViewD<'_, f64>, b: &ArrayViewD<'_, f64>) -> Result<()> {
    if z.shape() != b.shape() {
        return Err(Error::Shape {
            expected: b.shape().to_vec(),
            actual: z.shape().to_vec(),
        });
    }
    check_binary(b)
}

/// One logit term `log(e^z + 1) − b·z`, written to avoid overflow.
pub(crate) fn logit_term(z: f64, b: f64) -> f64 {
    // max(z,0) − b·z is exact for binary b
    (z.max(0.0) - b * z) + (-z.abs()).exp().ln_1p()
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Logistic loss `Σ log(e^{z_i} + 1) − b_i z_i` for binary labels `b`.
pub fn logit_value(z: ArrayViewD<'_, f64>, b: ArrayViewD<'_, f64>) -> Result<f64> {
    check_pair(&z, &b)?;
    Ok(z.iter().zip(b.iter()).map(|(&z, &b)| logit_term(z, b)).sum())
}

/// Gradient of [`logit_value`]: `σ(z_i) − b_i`.
pub fn logit_gradient(z: ArrayViewD<'_, f64>, b: ArrayViewD<'_, f64>) -> Result<ArrayD<f64>> {
    check_pair(&z, &b)?;
    let mut g = z.to_owned();
    g.zip_mut_with(&b, |zi, &bi| *zi = sigmoid(*zi) - bi);
    Ok(g)
}

/// Scales each pixel's vector of components (the last axis) to Euclidean
/// norm at most `bound`.
pub fn project_box_magnitude(p: ArrayViewD<'_, f64>, bound: f64) -> Result<ArrayD<f64>> {
    if !(bound >= 0.0) {
        return Err(Error::invalid(format!(
            "magnitude bound must be non-negative, got {bound}"
        )));
    }
    if p.ndim() < 2 {
        return Err(Error::invalid(
            "magnitude projection needs a field with a trailing component axis",
        ));
    }
    Ok(project_box_magnitude_unchecked(p, bound))
}

pub(crate) fn project_box_magnitude_unchecked(p: ArrayViewD<'_, f64>, bound: f64) -> ArrayD<f64> {
    let mut out = p.to_owned();
    let last = Axis(out.ndim() - 1);
    for mut lane in out.lanes_mut(last) {
        let mag = lane.iter().map(|v| v * v).sum::<f64>().sqrt();
        if mag > bound {
            let scale = if mag > 0.0 { bound / mag } else { 0.0 };
            lane.mapv_inplace(|v| v * scale);
        }
    }
    out
}
