use ndarray::ArrayD;
use serde::{Deserialize, Serialize};

/// Convergence history of one solve.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trace {
    /// Wall-clock seconds spent in the iteration loop.
    pub solve_time: f64,
    pub residuals: Vec<f64>,
    pub stepsizes: Vec<f64>,
    pub normalized_residuals: Vec<f64>,
    /// `f(Ax_k) + g(x_k)` per iteration; empty unless recording was requested.
    pub objective: Vec<f64>,
    /// Monitor outputs per iteration, zeros when no monitor is set.
    pub func_values: Vec<f64>,
    /// Total stepsize halvings.
    pub backtracks: usize,
    /// Halvings per iteration; sums to `backtracks`.
    pub halvings: Vec<usize>,
    pub lipschitz_estimate: f64,
    pub initial_stepsize: f64,
    pub iteration_count: usize,
    pub iterates: Option<Vec<ArrayD<f64>>>,
}

impl Trace {
    /// Equality ignoring `solve_time`, comparing floats bit for bit.
    pub fn same_run(&self, other: &Trace) -> bool {
        fn bits(v: &[f64]) -> Vec<u64> {
            v.iter().map(|x| x.to_bits()).collect()
        }
        bits(&self.residuals) == bits(&other.residuals)
            && bits(&self.stepsizes) == bits(&other.stepsizes)
            && bits(&self.normalized_residuals) == bits(&other.normalized_residuals)
            && bits(&self.objective) == bits(&other.objective)
            && bits(&self.func_values) == bits(&other.func_values)
            && self.backtracks == other.backtracks
            && self.halvings == other.halvings
            && self.lipschitz_estimate.to_bits() == other.lipschitz_estimate.to_bits()
            && self.initial_stepsize.to_bits() == other.initial_stepsize.to_bits()
            && self.iteration_count == other.iteration_count
            && self.iterates == other.iterates
    }
}
