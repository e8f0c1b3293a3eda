//! Command-line grammar. Every subcommand shares the solver flags and the
//! `--gen`/`--seed`/`--out` trio; data flags differ per model.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use fbs_core::engine::{Options, StopRule};

use crate::recipes::Params;

#[derive(Debug, Parser)]
#[command(name = "fbs", version, about = "Forward-backward splitting solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sparse least squares: μ‖x‖₁ + ½‖Ax − b‖²
    Sls(RegressionArgs),
    /// Lasso: ½‖Ax − b‖² subject to ‖x‖₁ ≤ λ
    Lasso(LassoArgs),
    /// Sparse logistic regression: μ‖x‖₁ + logit(Ax, b)
    Logistic(RegressionArgs),
    /// Logistic matrix completion: μ‖X‖_* + logit over observed entries
    Matcomp(MatcompArgs),
    /// PhaseLift: μ‖X‖_* + ‖𝒜(X) − b‖² over PSD matrices
    Phaselift(PhaseliftArgs),
    /// Democratic representation: μ‖x‖∞ + ½‖Ax − b‖²
    Democratic(RegressionArgs),
    /// Total-variation denoising of a 1-d or 2-d signal
    Tv(TvArgs),
    /// Dense matrix with any smooth term and prox from the catalog
    Generic(GenericArgs),
}

#[derive(Debug, Args)]
pub struct RegressionArgs {
    /// Measurement matrix (CSV or Matrix Market)
    #[arg(long, conflicts_with = "gen")]
    pub matrix: Option<PathBuf>,
    /// Right-hand side vector
    #[arg(long, conflicts_with = "gen")]
    pub rhs: Option<PathBuf>,
    /// Regularisation weight [default: 0.1‖Aᵀb‖∞ or its logistic analogue]
    #[arg(long)]
    pub mu: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct LassoArgs {
    #[arg(long, conflicts_with = "gen")]
    pub matrix: Option<PathBuf>,
    #[arg(long, conflicts_with = "gen")]
    pub rhs: Option<PathBuf>,
    /// ℓ1-ball radius [default with --gen: ‖x_true‖₁]
    #[arg(long)]
    pub lambda: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct MatcompArgs {
    /// Binary label matrix
    #[arg(long, conflicts_with = "gen")]
    pub labels: Option<PathBuf>,
    /// 0/1 observation indicator [default: every entry observed]
    #[arg(long, conflicts_with = "gen")]
    pub mask: Option<PathBuf>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PhaseliftArgs {
    /// One measurement vector per row
    #[arg(long, conflicts_with = "gen")]
    pub vectors: Option<PathBuf>,
    /// Measured squared magnitudes
    #[arg(long, conflicts_with = "gen")]
    pub rhs: Option<PathBuf>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TvArgs {
    /// Noisy signal or image as a CSV matrix
    #[arg(long, conflicts_with = "gen")]
    pub image: Option<PathBuf>,
    /// Smoothing weight [default: 0.1 times the largest forward difference]
    #[arg(long)]
    pub mu: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct GenericArgs {
    #[arg(long, conflicts_with = "gen")]
    pub matrix: Option<PathBuf>,
    #[arg(long, conflicts_with = "gen")]
    pub rhs: Option<PathBuf>,
    /// Smooth term f, by catalog name
    #[arg(long, default_value = "least-squares")]
    pub smooth: String,
    /// Nonsmooth term g, by catalog name
    #[arg(long, default_value = "l1")]
    pub prox: String,
    /// Weight or radius handed to g [default: 0.1‖Aᵀb‖∞]
    #[arg(long)]
    pub weight: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Generate a seeded instance with these dimensions, e.g. 20x50
    #[arg(long, value_name = "DIMS", value_parser = parse_dims)]
    pub gen: Option<Dims>,
    /// Seed for instance generation and the Lipschitz probe
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run document path; the trace CSV and solution are written beside it
    #[arg(long, default_value = "run.json")]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Args)]
pub struct SolverFlags {
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iters: usize,
    /// Spectral stepsizes (on unless --accelerate or --no-adaptive)
    #[arg(long, conflicts_with_all = ["accelerate", "no_adaptive"])]
    pub adaptive: bool,
    #[arg(long)]
    pub no_adaptive: bool,
    /// Momentum with restart; switches spectral stepsizes off
    #[arg(long)]
    pub accelerate: bool,
    #[arg(long)]
    pub no_restart: bool,
    #[arg(long)]
    pub no_backtrack: bool,
    /// Initial stepsize; takes precedence over --lipschitz
    #[arg(long)]
    pub tau: Option<f64>,
    /// Lipschitz constant of the gradient; replaces the built-in estimate
    #[arg(long)]
    pub lipschitz: Option<f64>,
    #[arg(long, default_value = "hybridResidual", value_parser = parse_stop_rule)]
    pub stop_rule: StopRule,
    /// 0 silent, 1 summary, 2 every iteration
    #[arg(long, default_value_t = 0)]
    pub verbose: u8,
    #[arg(long)]
    pub record_objective: bool,
    #[arg(long)]
    pub record_iterates: bool,
    /// Prefix for log lines
    #[arg(long, default_value = "")]
    pub header: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dims(pub Vec<usize>);

fn parse_dims(s: &str) -> Result<Dims, String> {
    let dims = s
        .split(['x', 'X'])
        .map(|d| match d.trim().parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("`{d}` is not a positive integer")),
            Ok(v) => Ok(v),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Dims(dims))
}

fn parse_stop_rule(s: &str) -> Result<StopRule, String> {
    StopRule::from_str(s).map_err(|e| e.to_string())
}

impl SolverFlags {
    pub fn options(&self, seed: u64) -> Options {
        Options {
            verbose: self.verbose,
            tol: self.tol,
            max_iters: self.max_iters,
            record_objective: self.record_objective,
            record_iterates: self.record_iterates,
            adaptive: self.adaptive || !(self.no_adaptive || self.accelerate),
            accelerate: self.accelerate,
            restart: !self.no_restart,
            monitor: None,
            backtrack: !self.no_backtrack,
            tau: self.tau,
            lipschitz: self.lipschitz,
            stop_rule: self.stop_rule,
            stop_now: None,
            string_header: self.header.clone(),
            seed,
        }
    }
}

/// Where the data comes from.
#[derive(Clone, Debug)]
pub enum Source {
    Generate(Vec<usize>),
    Files(BTreeMap<&'static str, PathBuf>),
}

/// A parsed invocation, independent of which subcommand produced it.
#[derive(Clone, Debug)]
pub struct Request {
    pub recipe: &'static str,
    pub source: Source,
    pub params: Params,
    pub seed: u64,
    pub out: PathBuf,
    pub options: Options,
}

fn files<const N: usize>(entries: [(&'static str, &Option<PathBuf>); N]) -> BTreeMap<&'static str, PathBuf> {
    entries
        .into_iter()
        .filter_map(|(role, p)| p.clone().map(|p| (role, p)))
        .collect()
}

impl Command {
    pub fn into_request(self) -> Request {
        let (recipe, files, params, common) = match self {
            Command::Sls(a) => regression("sls", a),
            Command::Logistic(a) => regression("logistic", a),
            Command::Democratic(a) => regression("democratic", a),
            Command::Lasso(a) => (
                "lasso",
                files([("matrix", &a.matrix), ("rhs", &a.rhs)]),
                Params {
                    lambda: a.lambda,
                    ..Params::default()
                },
                a.common,
            ),
            Command::Matcomp(a) => (
                "matcomp",
                files([("labels", &a.labels), ("mask", &a.mask)]),
                Params {
                    mu: a.mu,
                    ..Params::default()
                },
                a.common,
            ),
            Command::Phaselift(a) => (
                "phaselift",
                files([("vectors", &a.vectors), ("rhs", &a.rhs)]),
                Params {
                    mu: a.mu,
                    ..Params::default()
                },
                a.common,
            ),
            Command::Tv(a) => (
                "tv",
                files([("image", &a.image)]),
                Params {
                    mu: a.mu,
                    ..Params::default()
                },
                a.common,
            ),
            Command::Generic(a) => (
                "generic",
                files([("matrix", &a.matrix), ("rhs", &a.rhs)]),
                Params {
                    smooth: Some(a.smooth),
                    prox: Some(a.prox),
                    weight: a.weight,
                    ..Params::default()
                },
                a.common,
            ),
        };
        let source = match common.gen {
            Some(Dims(dims)) => Source::Generate(dims),
            None => Source::Files(files),
        };
        Request {
            recipe,
            source,
            params,
            seed: common.seed,
            options: common.solver.options(common.seed),
            out: common.out,
        }
    }
}

fn regression(
    name: &'static str,
    a: RegressionArgs,
) -> (&'static str, BTreeMap<&'static str, PathBuf>, Params, Common) {
    (
        name,
        files([("matrix", &a.matrix), ("rhs", &a.rhs)]),
        Params {
            mu: a.mu,
            ..Params::default()
        },
        a.common,
    )
}
