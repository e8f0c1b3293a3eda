//! Step modes: what the driver does between accepted steps.
//!
//! Modes are looked up by name in a small registry; [`Options::mode_name`]
//! maps the `adaptive`/`accelerate` flags onto a name.

use ndarray::{ArrayD, ArrayViewD};

use super::steps::{accelerate_step, adaptive_stepsize};
use super::{InitialStep, Options};
use crate::array::dot;
use crate::{Error, Result};

/// One accepted forward-backward step, as seen by a [`StepMode`].
pub struct AcceptedStep<'a> {
    /// Point the step was taken from (`y_k` in accelerated mode).
    pub base: ArrayViewD<'a, f64>,
    pub base_gradient: ArrayViewD<'a, f64>,
    /// Accepted new iterate `x_{k+1}`.
    pub next: ArrayViewD<'a, f64>,
    pub next_gradient: ArrayViewD<'a, f64>,
    /// Previous accepted iterate `x_k`.
    pub previous: ArrayViewD<'a, f64>,
    /// Stepsize after backtracking.
    pub tau: f64,
    /// Recorded objective went up; always false when not recording.
    pub objective_increased: bool,
}

/// Where the next iteration starts and with what stepsize.
pub struct NextBase {
    /// `None` means start from the accepted iterate itself.
    pub point: Option<ArrayD<f64>>,
    pub tau: f64,
}

pub trait StepMode: Send {
    fn name(&self) -> &'static str;

    fn advance(&mut self, step: &AcceptedStep<'_>) -> NextBase;
}

/// Keeps the (possibly backtracked) stepsize.
#[derive(Debug, Default)]
pub struct PlainMode;

impl StepMode for PlainMode {
    fn name(&self) -> &'static str {
        "plain"
    }

    fn advance(&mut self, step: &AcceptedStep<'_>) -> NextBase {
        NextBase {
            point: None,
            tau: step.tau,
        }
    }
}

/// Spectral stepsize from consecutive iterates and gradients.
#[derive(Debug, Default)]
pub struct AdaptiveMode;

impl StepMode for AdaptiveMode {
    fn name(&self) -> &'static str {
        "adaptive"
    }

    fn advance(&mut self, step: &AcceptedStep<'_>) -> NextBase {
        let dx = &step.next - &step.base;
        let dg = &step.next_gradient - &step.base_gradient;
        NextBase {
            point: None,
            tau: adaptive_stepsize(dx.view(), dg.view(), step.tau),
        }
    }
}

/// Momentum extrapolation with optional restart.
///
/// Restarts when the step from `y_k` to `x_{k+1}` points against the
/// direction of travel, `⟨y_k − x_{k+1}, x_{k+1} − x_k⟩ > 0`, or when the
/// recorded objective increased.
#[derive(Debug)]
pub struct AcceleratedMode {
    theta: f64,
    restart: bool,
    restarts: usize,
}

impl AcceleratedMode {
    pub fn new(restart: bool) -> Self {
        AcceleratedMode {
            theta: 1.0,
            restart,
            restarts: 0,
        }
    }

    pub fn restarts(&self) -> usize {
        self.restarts
    }
}

impl StepMode for AcceleratedMode {
    fn name(&self) -> &'static str {
        "accelerated"
    }

    fn advance(&mut self, step: &AcceptedStep<'_>) -> NextBase {
        if self.restart {
            let back = &step.base - &step.next;
            let travel = &step.next - &step.previous;
            if dot(&back, &travel) > 0.0 || step.objective_increased {
                self.theta = 1.0;
                self.restarts += 1;
            }
        }
        let momentum = self.theta > 1.0;
        let (y, theta) = accelerate_step(step.next.view(), step.previous.view(), self.theta);
        self.theta = theta;
        NextBase {
            point: momentum.then_some(y),
            tau: step.tau,
        }
    }
}

type ModeFactory = fn(&Options, &InitialStep) -> Box<dyn StepMode>;

static MODES: &[(&str, ModeFactory)] = &[
    ("plain", |_, _| Box::new(PlainMode)),
    ("adaptive", |_, _| Box::new(AdaptiveMode)),
    ("accelerated", |o, _| Box::new(AcceleratedMode::new(o.restart))),
];

pub fn mode_names() -> Vec<&'static str> {
    MODES.iter().map(|(n, _)| *n).collect()
}

/// Instantiates the named step mode.
pub fn step_mode(name: &str, options: &Options, init: &InitialStep) -> Result<Box<dyn StepMode>> {
    MODES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, make)| make(options, init))
        .ok_or_else(|| {
            Error::Configuration(format!(
                "unknown step mode {name:?}; choose one of {}",
                mode_names().join(", ")
            ))
        })
}
