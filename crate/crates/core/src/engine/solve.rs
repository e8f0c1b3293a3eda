use std::collections::VecDeque;
use std::fmt;
use std::time::Instant;

use ndarray::ArrayD;
use serde::{Deserialize, Serialize};

use super::modes::{step_mode, AcceptedStep};
use super::steps::{backtrack_step, compute_residual, estimate_initial_stepsize, should_stop, BACKTRACK_WINDOW};
use super::{Evaluated, Options, Problem, StopContext, Trace};
use crate::array::all_finite;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ToleranceReached,
    MaxIters,
    CustomStop,
    /// Backtracking ran out of halvings.
    Stagnation,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::ToleranceReached => "tolerance_reached",
            Termination::MaxIters => "max_iters",
            Termination::CustomStop => "custom_stop",
            Termination::Stagnation => "stagnation",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub solution: ArrayD<f64>,
    pub trace: Trace,
    pub termination: Termination,
}

struct Base {
    point: Evaluated,
    gradient: ArrayD<f64>,
}

/// Runs forward-backward splitting on `problem` until a stopping rule fires,
/// the iteration cap is hit, or backtracking stagnates.
pub fn solve(problem: &Problem, options: &Options) -> Result<SolveResult> {
    options.validate()?;
    problem.validate()?;
    if options.record_objective && problem.prox.value(problem.x0.view()).is_none() {
        return Err(Error::Configuration(format!(
            "objective recording needs g-values, but {} cannot be evaluated",
            problem.prox.name()
        )));
    }

    let started = Instant::now();
    let init = estimate_initial_stepsize(problem, options)?;
    let mut mode = step_mode(options.mode_name(), options, &init)?;
    let header = options.string_header.as_str();

    let mut trace = Trace {
        lipschitz_estimate: init.lipschitz,
        initial_stepsize: init.tau,
        iterates: options.record_iterates.then(Vec::new),
        ..Trace::default()
    };

    let start = problem.evaluate(problem.x0.clone());
    let gradient = problem.gradient_at(&start);
    if !start.f.is_finite() || !all_finite(&gradient) {
        return Err(Error::Initialization(
            "smooth term or its gradient is not finite at the starting point".into(),
        ));
    }
    let mut base = Base {
        point: start,
        gradient,
    };
    let mut previous = problem.x0.clone();
    let mut window: VecDeque<f64> = VecDeque::from([base.point.f]);
    let mut last_objective = if options.record_objective {
        problem.objective(problem.x0.view())
    } else {
        None
    };
    let mut tau = init.tau;
    let mut max_residual = 0.0_f64;
    let mut termination = Termination::MaxIters;
    let mut solution = problem.x0.clone();

    for iteration in 1..=options.max_iters {
        let reference = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let step = backtrack_step(
            problem,
            base.point.x.view(),
            &base.gradient,
            tau,
            reference,
            options.backtrack,
        );
        let next = problem.evaluate(step.x_next);
        let next_gradient = problem.gradient_at(&next);
        if !all_finite(&next.x) || !all_finite(&next_gradient) || !next.f.is_finite() {
            return Err(Error::Divergence { iteration });
        }

        let (residual, normalized) = compute_residual(
            base.point.x.view(),
            next.x.view(),
            step.tau,
            base.gradient.view(),
            next_gradient.view(),
        );
        max_residual = max_residual.max(residual);

        trace.residuals.push(residual);
        trace.normalized_residuals.push(normalized);
        trace.stepsizes.push(step.tau);
        trace.halvings.push(step.halvings);
        trace.backtracks += step.halvings;
        trace.iteration_count = iteration;
        let mut objective_increased = false;
        if options.record_objective {
            let g = problem.prox.value(next.x.view()).expect("checked before iterating");
            let objective = next.f + g;
            objective_increased = last_objective.is_some_and(|last| objective > last);
            last_objective = Some(objective);
            trace.objective.push(objective);
        }
        trace
            .func_values
            .push(options.monitor.as_ref().map_or(0.0, |m| m(next.x.view())));
        if let Some(iterates) = trace.iterates.as_mut() {
            iterates.push(next.x.clone());
        }
        if options.verbose >= 2 {
            println!(
                "{header}iter {iteration:>6}  residual {residual:.6e}  normalized {normalized:.6e}  stepsize {:.6e}",
                step.tau
            );
        }

        if step.exhausted {
            termination = Termination::Stagnation;
            solution = next.x;
            break;
        }
        let stop = match &options.stop_now {
            Some(stop_now) => stop_now(&StopContext {
                iterate: next.x.view(),
                iteration,
                residual,
                normalized_residual: normalized,
                max_residual,
                options,
            })
            .then_some(Termination::CustomStop),
            None => should_stop(options.stop_rule, residual, normalized, max_residual, options.tol)
                .then_some(Termination::ToleranceReached),
        };
        if let Some(reason) = stop {
            termination = reason;
            solution = next.x;
            break;
        }

        let advance = mode.advance(&AcceptedStep {
            base: base.point.x.view(),
            base_gradient: base.gradient.view(),
            next: next.x.view(),
            next_gradient: next_gradient.view(),
            previous: previous.view(),
            tau: step.tau,
            objective_increased,
        });
        previous = next.x.clone();
        solution = next.x.clone();
        base = match advance.point {
            None => Base {
                point: next,
                gradient: next_gradient,
            },
            Some(y) => {
                let point = problem.evaluate(y);
                let gradient = problem.gradient_at(&point);
                if !all_finite(&point.x) || !all_finite(&gradient) {
                    return Err(Error::Divergence { iteration });
                }
                Base { point, gradient }
            }
        };
        window.push_back(base.point.f);
        if window.len() > BACKTRACK_WINDOW {
            window.pop_front();
        }
        tau = advance.tau;
    }

    trace.solve_time = started.elapsed().as_secs_f64();
    if options.verbose >= 1 {
        println!(
            "{header}{}: {termination} after {} iterations, residual {:.6e}, normalized {:.6e}, {} backtracks, {:.3}s",
            mode.name(),
            trace.iteration_count,
            trace.residuals.last().copied().unwrap_or(0.0),
            trace.normalized_residuals.last().copied().unwrap_or(0.0),
            trace.backtracks,
            trace.solve_time,
        );
    }
    Ok(SolveResult {
        solution,
        trace,
        termination,
    })
}
