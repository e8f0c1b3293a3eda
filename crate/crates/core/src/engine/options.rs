use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use ndarray::ArrayViewD;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Built-in stopping tests on the residual sequence.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopRule {
    /// Residual relative to the largest residual seen so far.
    #[serde(rename = "ratioResidual")]
    RatioResidual,
    /// Residual relative to the size of the gradient and prox terms.
    #[serde(rename = "normalizedResidual")]
    NormalizedResidual,
    /// Stop when either of the above would.
    #[default]
    #[serde(rename = "hybridResidual")]
    HybridResidual,
}

impl StopRule {
    pub const ALL: [StopRule; 3] = [
        StopRule::RatioResidual,
        StopRule::NormalizedResidual,
        StopRule::HybridResidual,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StopRule::RatioResidual => "ratioResidual",
            StopRule::NormalizedResidual => "normalizedResidual",
            StopRule::HybridResidual => "hybridResidual",
        }
    }
}

impl fmt::Display for StopRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StopRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StopRule::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| {
                Error::Configuration(format!(
                    "unknown stop rule {s:?}; expected ratioResidual, normalizedResidual or hybridResidual"
                ))
            })
    }
}

/// Everything a custom stopping predicate gets to look at.
pub struct StopContext<'a> {
    pub iterate: ArrayViewD<'a, f64>,
    pub iteration: usize,
    pub residual: f64,
    pub normalized_residual: f64,
    pub max_residual: f64,
    pub options: &'a Options,
}

pub type Monitor = Arc<dyn Fn(ArrayViewD<'_, f64>) -> f64 + Send + Sync>;
pub type StopNow = Arc<dyn Fn(&StopContext<'_>) -> bool + Send + Sync>;

/// Solver configuration. Defaults: `tol = 1e-3`, `max_iters = 1000`,
/// adaptive stepsizes and backtracking on, acceleration off (restart on when
/// it is enabled), hybrid residual stopping.
#[derive(Clone)]
pub struct Options {
    /// 0 silent, 1 summary at termination, 2 one line per iteration.
    pub verbose: u8,
    pub tol: f64,
    pub max_iters: usize,
    pub record_objective: bool,
    pub record_iterates: bool,
    pub adaptive: bool,
    pub accelerate: bool,
    pub restart: bool,
    /// Evaluated on every iterate; results land in `Trace::func_values`.
    pub monitor: Option<Monitor>,
    pub backtrack: bool,
    /// Initial stepsize; takes precedence over `lipschitz`.
    pub tau: Option<f64>,
    /// Lipschitz constant of the gradient of `f(Ax)`.
    pub lipschitz: Option<f64>,
    pub stop_rule: StopRule,
    /// Replaces the built-in stopping rule when set.
    pub stop_now: Option<StopNow>,
    pub string_header: String,
    /// Seeds the Lipschitz estimate.
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            verbose: 0,
            tol: 1e-3,
            max_iters: 1000,
            record_objective: false,
            record_iterates: false,
            adaptive: true,
            accelerate: false,
            restart: true,
            monitor: None,
            backtrack: true,
            tau: None,
            lipschitz: None,
            stop_rule: StopRule::HybridResidual,
            stop_now: None,
            string_header: String::new(),
            seed: 0,
        }
    }
}

impl Options {
    /// Fixed stepsize with backtracking.
    pub fn plain() -> Self {
        Options {
            adaptive: false,
            ..Options::default()
        }
    }

    /// Spectral stepsizes (the default).
    pub fn adaptive() -> Self {
        Options::default()
    }

    /// Momentum with restart.
    pub fn accelerated() -> Self {
        Options {
            adaptive: false,
            accelerate: true,
            ..Options::default()
        }
    }

    /// Registry name of the step mode these flags select.
    pub fn mode_name(&self) -> &'static str {
        if self.accelerate {
            "accelerated"
        } else if self.adaptive {
            "adaptive"
        } else {
            "plain"
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Configuration(m));
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        if self.verbose > 2 {
            return bad(format!("verbose must be 0, 1 or 2, got {}", self.verbose));
        }
        if let Some(tau) = self.tau {
            if !(tau > 0.0 && tau.is_finite()) {
                return bad(format!("tau must be positive, got {tau}"));
            }
        }
        if let Some(l) = self.lipschitz {
            if !(l > 0.0 && l.is_finite()) {
                return bad(format!("lipschitz must be positive, got {l}"));
            }
        }
        if self.adaptive && self.accelerate {
            return bad(
                "adaptive and accelerate are mutually exclusive; disable one of them".into(),
            );
        }
        Ok(())
    }
}

impl fmt::Debug for Options {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Options")
            .field("verbose", &self.verbose)
            .field("tol", &self.tol)
            .field("max_iters", &self.max_iters)
            .field("record_objective", &self.record_objective)
            .field("record_iterates", &self.record_iterates)
            .field("adaptive", &self.adaptive)
            .field("accelerate", &self.accelerate)
            .field("restart", &self.restart)
            .field("monitor", &self.monitor.is_some())
            .field("backtrack", &self.backtrack)
            .field("tau", &self.tau)
            .field("lipschitz", &self.lipschitz)
            .field("stop_rule", &self.stop_rule)
            .field("stop_now", &self.stop_now.is_some())
            .field("string_header", &self.string_header)
            .field("seed", &self.seed)
            .finish()
    }
}
