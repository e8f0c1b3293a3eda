//! Front end for `fbs`: parse flags, ingest or generate data, solve, and write
//! the run document with its trace CSV and solution.

pub mod args;
pub mod recipes;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use fbs_core::engine::{solve, Termination};
use fbs_core::linop::io::{load_matrix, write_csv_matrix};
use fbs_core::trace_io::{csv_path, write_run, ProblemDescriptor, RunRecord};
use fbs_core::Error;

use args::{Cli, Request, Source};
use recipes::{as_table, recipe, Data};

pub const EXIT_CONVERGED: i32 = 0;
pub const EXIT_MAX_ITERS: i32 = 2;
pub const EXIT_STALLED: i32 = 3;
/// Output could not be written (sysexits `EX_CANTCREAT`).
pub const EXIT_CANT_WRITE: i32 = 73;
/// Bad flags or unusable input (sysexits `EX_USAGE`).
pub const EXIT_USAGE: i32 = 64;

pub fn exit_code(termination: Termination) -> i32 {
    match termination {
        Termination::ToleranceReached | Termination::CustomStop => EXIT_CONVERGED,
        Termination::MaxIters => EXIT_MAX_ITERS,
        Termination::Stagnation => EXIT_STALLED,
    }
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Diverged(String),
    Output(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Diverged(_) => EXIT_STALLED,
            Failure::Output(_) => EXIT_CANT_WRITE,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Diverged(m) | Failure::Output(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Divergence { .. } => Failure::Diverged(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn output(e: Error) -> Failure {
    Failure::Output(e.to_string())
}

/// Files produced by a successful run.
#[derive(Clone, Debug)]
pub struct Outputs {
    pub record: PathBuf,
    pub trace_csv: PathBuf,
    pub solution: PathBuf,
    /// Directory of generated inputs, when `--gen` was used.
    pub data_dir: Option<PathBuf>,
}

pub fn data_dir(out: &Path) -> PathBuf {
    out.with_extension("data")
}

pub fn solution_path(out: &Path) -> PathBuf {
    out.with_extension("solution.csv")
}

/// Parses `args` (program name first), runs, reports, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_CONVERGED };
        }
    };
    let request = cli.command.into_request();
    match execute(&request) {
        Ok((termination, _)) => exit_code(termination),
        Err(f) => {
            eprintln!("fbs: {f}");
            f.code()
        }
    }
}

/// Generates or loads the data, solves, and writes every output file.
pub fn execute(request: &Request) -> Result<(Termination, Outputs), Failure> {
    let recipe = recipe(request.recipe)?;
    let mut params = request.params.clone();
    let mut conventions = Vec::new();
    let (paths, generated_dir) = match &request.source {
        Source::Generate(dims) => {
            let generated = recipe.generate(dims, request.seed, &mut params)?;
            let dir = data_dir(&request.out);
            fs::create_dir_all(&dir).map_err(|e| output(Error::Io {
                path: dir.clone(),
                source: e,
            }))?;
            let mut paths = BTreeMap::new();
            for (role, m) in &generated.files {
                let p = dir.join(format!("{role}.csv"));
                write_csv_matrix(&p, m).map_err(output)?;
                paths.insert(*role, p);
            }
            if let Some(t) = &generated.truth {
                write_csv_matrix(dir.join("truth.csv"), t).map_err(output)?;
            }
            conventions = generated.conventions;
            (paths, Some(dir))
        }
        Source::Files(files) => (files.clone(), None),
    };

    // Digests are taken over the bytes actually parsed, generated or not.
    let mut data = Data::new();
    let mut digests = BTreeMap::new();
    for &(role, required) in recipe.inputs() {
        match paths.get(role) {
            Some(p) => {
                let loaded = load_matrix(p)?;
                digests.insert(role.to_string(), loaded.digest);
                data.insert(role, loaded.matrix);
            }
            None if required => {
                return Err(Failure::Usage(format!(
                    "{}: pass --gen DIMS or --{role}",
                    recipe.name()
                )))
            }
            None => {}
        }
    }

    let built = recipe.build(&data, &params)?;
    let result = solve(&built.problem, &request.options)?;

    let parameters = built
        .parameters
        .iter()
        .chain(conventions.iter())
        .map(|(k, v)| (k.to_string(), *v))
        .collect();
    let descriptor = ProblemDescriptor {
        builder: built.builder,
        parameters,
        data_digests: digests,
    };
    let record = RunRecord::new(descriptor, request.seed, &request.options, &result);
    write_run(&record, &request.out).map_err(output)?;
    let solution = match &built.finish {
        Some(finish) => finish(result.solution.view()),
        None => result.solution.clone(),
    };
    let solution_file = solution_path(&request.out);
    write_csv_matrix(&solution_file, &as_table(&solution)).map_err(output)?;

    let outputs = Outputs {
        record: request.out.clone(),
        trace_csv: csv_path(&request.out),
        solution: solution_file,
        data_dir: generated_dir,
    };
    if request.options.verbose >= 1 {
        println!(
            "{}wrote {}, {} and {}",
            request.options.string_header,
            outputs.record.display(),
            outputs.trace_csv.display(),
            outputs.solution.display()
        );
    }
    Ok((result.termination, outputs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Request, clap::Error> {
        Cli::try_parse_from(std::iter::once("fbs").chain(args.iter().copied()))
            .map(|c| c.command.into_request())
    }

    #[test]
    fn defaults_follow_the_solver_defaults() {
        let r = parse(&["sls", "--gen", "4x6"]).unwrap();
        let d = fbs_core::engine::Options::default();
        assert_eq!(r.options.tol, d.tol);
        assert_eq!(r.options.max_iters, d.max_iters);
        assert_eq!(
            (r.options.adaptive, r.options.accelerate, r.options.restart, r.options.backtrack),
            (d.adaptive, d.accelerate, d.restart, d.backtrack)
        );
        assert_eq!(r.options.stop_rule, d.stop_rule);
        assert!(matches!(r.source, Source::Generate(ref v) if v == &[4, 6]));
    }

    #[test]
    fn accelerate_switches_adaptive_off() {
        let r = parse(&["sls", "--gen", "4x6", "--accelerate"]).unwrap();
        assert!(r.options.accelerate && !r.options.adaptive);
        let r = parse(&["sls", "--gen", "4x6", "--no-adaptive"]).unwrap();
        assert!(!r.options.accelerate && !r.options.adaptive);
    }

    #[test]
    fn exclusive_flags_are_rejected() {
        let e = parse(&["sls", "--gen", "4x6", "--adaptive", "--accelerate"]).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("--adaptive") && msg.contains("--accelerate"), "{msg}");
        assert!(parse(&["sls", "--gen", "4x6", "--matrix", "a.csv"]).is_err());
    }

    #[test]
    fn bad_dims_and_stop_rules_are_rejected() {
        assert!(parse(&["sls", "--gen", "4x0"]).is_err());
        assert!(parse(&["sls", "--gen", "axb"]).is_err());
        assert!(parse(&["sls", "--gen", "4x6", "--stop-rule", "bogus"]).is_err());
        let r = parse(&["sls", "--gen", "4x6", "--stop-rule", "ratioResidual"]).unwrap();
        assert_eq!(r.options.stop_rule, fbs_core::engine::StopRule::RatioResidual);
    }

    #[test]
    fn exit_codes_cover_every_termination() {
        assert_eq!(exit_code(Termination::ToleranceReached), 0);
        assert_eq!(exit_code(Termination::CustomStop), 0);
        assert_eq!(exit_code(Termination::MaxIters), 2);
        assert_eq!(exit_code(Termination::Stagnation), 3);
        assert_eq!(Failure::from(Error::Divergence { iteration: 3 }).code(), 3);
        assert_eq!(Failure::from(Error::InvalidArgument("x".into())).code(), 64);
    }

    #[test]
    fn help_exits_cleanly_and_usage_errors_do_not() {
        assert_eq!(run(["fbs", "--help"]), 0);
        assert_eq!(run(["fbs", "sls", "--help"]), 0);
        assert_eq!(run(["fbs", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["fbs", "sls"]), EXIT_USAGE);
    }

    #[test]
    fn output_paths_sit_beside_the_record() {
        let out = Path::new("dir/run.json");
        assert_eq!(data_dir(out), Path::new("dir/run.data"));
        assert_eq!(solution_path(out), Path::new("dir/run.solution.csv"));
    }
}
