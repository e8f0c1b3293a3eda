use std::sync::Arc;

use fbs_core::engine::{solve, Options};
use fbs_core::linop::{DenseMatrix, Identity, LinearOperator, Shape};
use fbs_core::problems::{
    democratic, lasso, logistic_matrix_completion, phaselift, sparse_logistic, total_variation,
    MeasurementMap, ObservationMask, RankOneMeasurements,
};
use fbs_core::rng::{normal_array, normal_matrix, seeded};
use fbs_core::synthetic;
use nalgebra::{DMatrix, DVector};
use ndarray::{arr1, Array1, Array2, ArrayD, Ix1, Ix2};

fn identity(n: usize) -> Arc<dyn LinearOperator> {
    Arc::new(Identity::new(Shape::vector(n).unwrap()))
}

fn dense(a: &Array2<f64>) -> Arc<dyn LinearOperator> {
    Arc::new(DenseMatrix::new(a.clone()))
}

fn to_na(a: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

fn tight() -> Options {
    Options {
        tol: 1e-10,
        max_iters: 50_000,
        ..Options::default()
    }
}

fn max_abs(a: &ArrayD<f64>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[test]
fn lasso_on_identity_projects_the_data() {
    let p = lasso(identity(2), arr1(&[3.0, 0.0]).into_dyn(), 1.0, ArrayD::zeros(vec![2])).unwrap();
    let x = solve(&p, &tight()).unwrap().solution;
    assert!((x[0] - 1.0).abs() <= 1e-9 && x[1].abs() <= 1e-9, "{x}");
}

#[test]
fn lasso_with_loose_radius_is_least_squares() {
    let mut rng = seeded(21);
    let a = normal_matrix(&mut rng, 5, 3);
    let b = normal_matrix(&mut rng, 5, 1).column(0).to_owned();
    // Normal equations AᵀA x = Aᵀb.
    let na = to_na(&a);
    let nb = DVector::from_iterator(5, b.iter().copied());
    let x_ls = (na.transpose() * &na).cholesky().unwrap().solve(&(na.transpose() * nb));
    let radius = 1.5 * x_ls.iter().map(|v| v.abs()).sum::<f64>();
    let p = lasso(dense(&a), b.into_dyn(), radius, ArrayD::zeros(vec![3])).unwrap();
    let x = solve(&p, &tight()).unwrap().solution;
    for i in 0..3 {
        assert!((x[i] - x_ls[i]).abs() <= 1e-5, "{x} vs {x_ls}");
    }
}

#[test]
fn logistic_weight_above_origin_gradient_gives_zero() {
    let r = synthetic::logistic_regression(10, 5, 6);
    let at_origin = r.a.t().dot(&r.b.mapv(|v| 0.5 - v));
    let mu = 1.01 * at_origin.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let p = sparse_logistic(dense(&r.a), r.b.into_dyn(), mu, ArrayD::zeros(vec![5])).unwrap();
    let x = solve(&p, &Options::default()).unwrap().solution;
    assert!(x.iter().all(|&v| v == 0.0), "{x}");
}

#[test]
fn logistic_with_zero_matrix_gives_zero() {
    let labels = arr1(&[1.0, 0.0, 1.0, 1.0]).into_dyn();
    let p = sparse_logistic(dense(&Array2::zeros((4, 3))), labels, 0.1, ArrayD::zeros(vec![3])).unwrap();
    let x = solve(&p, &Options::default()).unwrap().solution;
    assert!(x.iter().all(|&v| v == 0.0));
}

#[test]
fn logistic_modes_agree_with_a_tight_reference() {
    let r = synthetic::logistic_regression(30, 10, 2);
    let mu = 0.1 * r.a.t().dot(&r.b.mapv(|v| 0.5 - v)).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let p = sparse_logistic(dense(&r.a), r.b.into_dyn(), mu, ArrayD::zeros(vec![10])).unwrap();
    let reference = Options {
        tol: 1e-12,
        max_iters: 200_000,
        ..Options::plain()
    };
    let best = p.objective(solve(&p, &reference).unwrap().solution.view()).unwrap();
    for o in [Options::adaptive(), Options::accelerated()] {
        let x = solve(&p, &Options { tol: 1e-7, max_iters: 20_000, ..o }).unwrap().solution;
        let gap = p.objective(x.view()).unwrap() - best;
        assert!(gap.abs() <= 1e-8, "gap {gap:e}");
    }
}

#[test]
fn completion_with_heavy_weight_is_zero_and_locally_optimal() {
    let y = Array2::ones((6, 6));
    let mask = ObservationMask::full(6, 6);
    let p = logistic_matrix_completion(&y, &mask, 5.0, None).unwrap();
    let x = solve(&p, &Options::default()).unwrap().solution;
    assert!(max_abs(&x) <= 1e-12, "{x}");
    let at_zero = p.objective(ArrayD::zeros(vec![6, 6]).view()).unwrap();
    let mut rng = seeded(30);
    for _ in 0..200 {
        let u = normal_matrix(&mut rng, 6, 1);
        let v = normal_matrix(&mut rng, 1, 6);
        let delta = (u.dot(&v) * 0.1).into_dyn();
        assert!(at_zero <= p.objective(delta.view()).unwrap());
    }
}

#[test]
fn completion_with_empty_mask_is_zero() {
    let mut rng = seeded(3);
    let y = normal_matrix(&mut rng, 4, 5).mapv(|v| if v > 0.0 { 1.0 } else { 0.0 });
    let mask = ObservationMask::new(4, 5, []).unwrap();
    let x0 = normal_matrix(&mut rng, 4, 5);
    let p = logistic_matrix_completion(&y, &mask, 0.1, Some(x0)).unwrap();
    let x = solve(&p, &tight()).unwrap().solution;
    assert!(max_abs(&x) <= 1e-9, "{x}");
}

#[test]
fn completion_recovers_held_out_signs() {
    let c = synthetic::completion(6, 6, 1);
    let mask = ObservationMask::from_indicator(&c.mask);
    let p = logistic_matrix_completion(&c.labels, &mask, 0.05, None).unwrap();
    let x = solve(&p, &Options { tol: 1e-6, ..Options::default() }).unwrap().solution;
    let (mut held, mut agree) = (0, 0);
    for i in 0..6 {
        for j in 0..6 {
            if c.mask[[i, j]] == 0.0 {
                held += 1;
                if (x[[i, j]] > 0.0) == (c.labels[[i, j]] == 1.0) {
                    agree += 1;
                }
            }
        }
    }
    assert!(agree as f64 >= 0.9 * held as f64, "{agree}/{held}");
}

#[test]
fn measurement_map_adjoint_on_symmetric_inputs() {
    let mut rng = seeded(12);
    let map = MeasurementMap::new(normal_matrix(&mut rng, 9, 6)).unwrap();
    for _ in 0..100 {
        let g = normal_matrix(&mut rng, 6, 6);
        let x = ((&g + &g.t()) * 0.5).into_dyn();
        let y = normal_array(&mut rng, &[9]);
        let lhs: f64 = map.apply(x.view()).unwrap().iter().zip(y.iter()).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.iter().zip(map.adjoint_apply(y.view()).unwrap().iter()).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() <= 1e-10 * (lhs.abs() + rhs.abs()), "{lhs} {rhs}");
    }
}

#[test]
fn phaselift_iterates_stay_psd_and_recover_the_signal() {
    let ph = synthetic::phase(40, 8, 3);
    let meas = RankOneMeasurements::new(ph.vectors, ph.b).unwrap();
    let p = phaselift(&meas, 0.01, Array2::zeros((8, 8))).unwrap();
    let o = Options {
        tol: 1e-8,
        max_iters: 20_000,
        record_iterates: true,
        ..Options::default()
    };
    let res = solve(&p, &o).unwrap();
    for x in res.trace.iterates.as_ref().unwrap() {
        let m = to_na(&x.clone().into_dimensionality::<Ix2>().unwrap());
        assert!(m.symmetric_eigen().eigenvalues.min() >= -1e-9);
    }
    let m = to_na(&res.solution.into_dimensionality::<Ix2>().unwrap());
    let e = m.symmetric_eigen();
    let v = e.eigenvectors.column(e.eigenvalues.imax());
    let truth = DVector::from_iterator(8, ph.x_true.iter().copied());
    assert!(v.dot(&truth).abs() / truth.norm() >= 0.99);
}

fn democratic_objective(a: &Array2<f64>, b: &Array1<f64>, mu: f64, x: &Array1<f64>) -> f64 {
    let r = a.dot(x) - b;
    mu * x.iter().fold(0.0f64, |m, v| m.max(v.abs())) + 0.5 * r.dot(&r)
}

/// `Aᵀ(AAᵀ)⁻¹b` for a wide, full-row-rank `A`.
fn minimum_norm_solution(a: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let na = to_na(a);
    let nb = DVector::from_iterator(b.len(), b.iter().copied());
    let w = (&na * na.transpose()).cholesky().unwrap().solve(&nb);
    (na.transpose() * w).iter().copied().collect()
}

fn dynamic_range(x: &Array1<f64>) -> f64 {
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    peak / (x.dot(x).sqrt() / (x.len() as f64).sqrt())
}

#[test]
fn democratic_on_identity() {
    let p = democratic(identity(2), arr1(&[3.0, 0.0]).into_dyn(), 1.0, ArrayD::zeros(vec![2])).unwrap();
    let x = solve(&p, &tight()).unwrap().solution;
    assert!((x[0] - 2.0).abs() <= 1e-6 && x[1].abs() <= 1e-6, "{x}");

    let p = democratic(identity(3), ArrayD::zeros(vec![3]), 1.0, ArrayD::zeros(vec![3])).unwrap();
    assert!(solve(&p, &tight()).unwrap().solution.iter().all(|&v| v == 0.0));
}

#[test]
fn democratic_with_vanishing_weight_is_least_squares() {
    let f = synthetic::frame(5, 8, 9);
    let mu = 1e-6;
    let p = democratic(dense(&f.a), f.b.clone().into_dyn(), mu, ArrayD::zeros(vec![8])).unwrap();
    let x = solve(&p, &tight()).unwrap().solution.into_dimensionality::<Ix1>().unwrap();
    let x_ls = minimum_norm_solution(&f.a, &f.b);
    let gap = democratic_objective(&f.a, &f.b, mu, &x) - democratic_objective(&f.a, &f.b, mu, &x_ls);
    assert!(gap.abs() <= 1e-4, "gap {gap:e}");
}

#[test]
fn democratic_flattens_the_dynamic_range() {
    let f = synthetic::frame(4, 8, 1);
    let mu = 0.1 * f.a.t().dot(&f.b).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let p = democratic(dense(&f.a), f.b.clone().into_dyn(), mu, ArrayD::zeros(vec![8])).unwrap();
    let x = solve(&p, &tight()).unwrap().solution.into_dimensionality::<Ix1>().unwrap();
    let ls = minimum_norm_solution(&f.a, &f.b);
    assert!(dynamic_range(&x) < dynamic_range(&ls), "{} vs {}", dynamic_range(&x), dynamic_range(&ls));
}

#[test]
fn tv_with_vanishing_weight_keeps_the_data() {
    let im = synthetic::piecewise_image(&[8, 8], 4);
    let tv = total_variation(im.noisy.clone(), 1e-8).unwrap();
    let p = solve(&tv.problem, &Options::default()).unwrap().solution;
    assert!(max_abs(&(&tv.recover(p.view()) - &im.noisy)) <= 1e-6);
}

#[test]
fn tv_leaves_constant_images_alone() {
    let flat = ArrayD::from_elem(vec![5, 7], 2.5);
    let tv = total_variation(flat.clone(), 0.3).unwrap();
    let p = solve(&tv.problem, &Options::default()).unwrap().solution;
    assert_eq!(tv.recover(p.view()), flat);
}

#[test]
fn tv_step_signal() {
    let tv = total_variation(arr1(&[0.0, 0.0, 4.0, 4.0]).into_dyn(), 1.0).unwrap();
    let p = solve(&tv.problem, &tight()).unwrap().solution;
    let x = tv.recover(p.view());
    // Each two-sample plateau moves μ/2 towards the other.
    for (got, want) in x.iter().zip([0.5, 0.5, 3.5, 3.5]) {
        assert!((got - want).abs() <= 1e-3, "{x}");
    }
    assert!(tv.duality_gap(p.view()).abs() <= 1e-6);
}

#[test]
fn every_builder_is_deterministic() {
    let r = synthetic::sparse_regression(12, 20, 5, true);
    let c = synthetic::completion(5, 5, 5);
    let ph = synthetic::phase(20, 4, 5);
    let problems = [
        lasso(dense(&r.a), r.b.clone().into_dyn(), 2.0, ArrayD::zeros(vec![20])).unwrap(),
        logistic_matrix_completion(&c.labels, &ObservationMask::from_indicator(&c.mask), 0.1, None).unwrap(),
        phaselift(&RankOneMeasurements::new(ph.vectors, ph.b).unwrap(), 0.1, Array2::zeros((4, 4))).unwrap(),
        total_variation(synthetic::piecewise_image(&[6, 6], 5).noisy, 0.1).unwrap().problem,
    ];
    for p in &problems {
        let o = Options {
            tol: 1e-6,
            record_objective: true,
            ..Options::default()
        };
        let a = solve(p, &o).unwrap();
        let b = solve(p, &o).unwrap();
        assert!(a.trace.same_run(&b.trace));
    }
}
