use std::path::Path;
use std::process::{Command, Output};

fn fbs(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbs"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read_vector(path: &Path) -> Vec<f64> {
    std::fs::read_to_string(path)
        .unwrap()
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().unwrap())
        .collect()
}

#[test]
fn generated_sparse_ls_converges_and_writes_everything() {
    let dir = tempfile::tempdir().unwrap();
    let out = fbs(dir.path(), &["sls", "--gen", "20x50", "--seed", "7", "--tol", "1e-6", "--out", "r.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["r.json", "r.csv", "r.solution.csv", "r.data/matrix.csv", "r.data/rhs.csv", "r.data/truth.csv"] {
        assert!(dir.path().join(f).is_file(), "missing {f}");
    }
    let run = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    assert!(run.contains("\"termination\":\"tolerance_reached\""));
    assert_eq!(read_vector(&dir.path().join("r.solution.csv")).len(), 50);
}

#[test]
fn same_seed_gives_identical_data_and_solutions() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a.json", "b.json"] {
        let o = fbs(dir.path(), &["logistic", "--gen", "30x20", "--seed", "3", "--out", out]);
        assert_eq!(code(&o), 0);
    }
    for f in ["data/matrix.csv", "data/rhs.csv", "data/truth.csv", "solution.csv", "csv"] {
        let a = std::fs::read(dir.path().join(format!("a.{f}"))).unwrap();
        let b = std::fs::read(dir.path().join(format!("b.{f}"))).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
}

#[test]
fn noiseless_lasso_recovers_the_truth() {
    let dir = tempfile::tempdir().unwrap();
    let o = fbs(dir.path(), &["lasso", "--gen", "47x50", "--seed", "1", "--tol", "1e-10", "--max-iters", "20000", "--out", "l.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let x = read_vector(&dir.path().join("l.solution.csv"));
    let truth = read_vector(&dir.path().join("l.data/truth.csv"));
    let err = x.iter().zip(&truth).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let size = truth.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(err <= 1e-4 * size, "relative error {}", err / size);
}

#[test]
fn file_inputs_reproduce_the_generated_run() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&fbs(dir.path(), &["sls", "--gen", "15x30", "--seed", "2", "--out", "g.json"])), 0);
    let o = fbs(
        dir.path(),
        &["sls", "--matrix", "g.data/matrix.csv", "--rhs", "g.data/rhs.csv", "--seed", "2", "--out", "f.json"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let g = std::fs::read(dir.path().join("g.solution.csv")).unwrap();
    let f = std::fs::read(dir.path().join("f.solution.csv")).unwrap();
    assert_eq!(g, f);
}

#[test]
fn generic_subcommand_accepts_catalog_names() {
    let dir = tempfile::tempdir().unwrap();
    let o = fbs(dir.path(), &["generic", "--gen", "20x12", "--prox", "linf", "--accelerate", "--out", "x.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let run = std::fs::read_to_string(dir.path().join("x.json")).unwrap();
    assert!(run.contains("generic:least-squares+linf"));

    let bad = fbs(dir.path(), &["generic", "--gen", "20x12", "--prox", "nope"]);
    assert_eq!(code(&bad), 64);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("nope"));
}

#[test]
fn exit_codes_follow_the_termination() {
    let dir = tempfile::tempdir().unwrap();
    let capped = fbs(dir.path(), &["sls", "--gen", "20x50", "--max-iters", "1", "--out", "c.json"]);
    assert_eq!(code(&capped), 2);
    assert_eq!(std::fs::read_to_string(dir.path().join("c.csv")).unwrap().lines().count(), 2);

    let both = fbs(dir.path(), &["sls", "--gen", "20x50", "--adaptive", "--accelerate"]);
    assert_eq!(code(&both), 64);

    let missing = fbs(dir.path(), &["sls", "--matrix", "nothing.csv", "--rhs", "nothing.csv"]);
    assert_eq!(code(&missing), 64);

    let no_lambda = fbs(dir.path(), &["lasso", "--matrix", "a.csv", "--rhs", "b.csv"]);
    assert_eq!(code(&no_lambda), 64);

    let help = fbs(dir.path(), &["--help"]);
    assert_eq!(code(&help), 0);
}

#[test]
fn unwritable_output_exits_with_cantcreat() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("plain"), "not a directory").unwrap();
    let o = fbs(dir.path(), &["sls", "--gen", "10x20", "--out", "plain/r.json"]);
    assert_eq!(code(&o), 73, "{}", String::from_utf8_lossy(&o.stderr));
}
