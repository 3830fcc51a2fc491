use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use flmm::output::load_trace;
use flmm::problems::{builtin_problem, ProblemParams};
use flmm_core::methods::Method;
use flmm_core::solver::{solve, Grid, NewtonConfig};
use flmm_core::FractionalOrder;

fn flmm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flmm")).args(args).output().expect("binary runs")
}

fn flmm_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flmm"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn weights_to_stdout() {
    let o = flmm(&["weights", "--method", "nflmm2", "--beta", "1", "--n", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "k,a,q");
    assert_eq!(lines[1], "0,1.5000000000000000e0,1.0000000000000000e0");
    assert_eq!(lines[2], "1,-2.0000000000000000e0,0.0000000000000000e0");
    assert_eq!(lines[3], "2,5.0000000000000000e-1,0.0000000000000000e0");
    assert_eq!(lines.len(), 6);
}

#[test]
fn weights_json_has_schema() {
    let o = flmm(&["weights", "--method", "fam1", "--beta", "0.5", "--n", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "flmm-kit/1");
    assert_eq!(v["meta"]["method"], "fam1");
    assert_eq!(v["q"].as_array().unwrap().len(), 2);
    assert_eq!(v["q"][1].as_f64(), Some(0.25));
}

#[test]
fn solve_trace_round_trips_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.json");
    let o = flmm(&[
        "solve", "--method", "nflmm2", "--beta", "0.6", "--problem", "paper-nonlinear", "--steps", "50", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let file = load_trace(&out).unwrap();
    assert_eq!(file.meta.method, "nflmm2");
    assert_eq!(file.meta.n, 50);
    assert_eq!(file.meta.h.0, 1.0 / 50.0);
    assert_eq!(file.newton_iters.len(), 50);

    let beta = FractionalOrder::new(0.6).unwrap();
    let bp = builtin_problem("paper-nonlinear", beta, ProblemParams::default()).unwrap();
    let trace = solve(&bp.problem, Method::Nflmm2, &Grid::new(0.0, 1.0, 50).unwrap(), &NewtonConfig::default()).unwrap();
    let loaded = file.y_values();
    assert_eq!(loaded.len(), trace.y.len());
    for (a, b) in loaded.iter().zip(&trace.y) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn same_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "kind = convergence\nmethod = nflmm2, fbdf2, ft2\nbeta = 0.3, 0.7\nproblem = poly2-linear\nmlist = 8..128\nout = eoc.csv\n",
    )
    .unwrap();
    let mut outputs = Vec::new();
    for _ in 0..3 {
        let o = flmm_in(dir.path(), &["run", "--config", "run.cfg"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(fs::read(dir.path().join("eoc.csv")).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    let text = String::from_utf8(outputs.pop().unwrap()).unwrap();
    assert!(text.starts_with("method,beta,M,h,max_error,order\n"));
    assert_eq!(text.lines().count(), 1 + 3 * 2 * 5);
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("w.cfg");
    fs::write(&cfg, "method = gl1\nbeta = 0.5\nn = 2\n").unwrap();
    let o = flmm(&["weights", "--config", cfg.to_str().unwrap(), "--beta", "0.25"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().nth(2).unwrap(), "1,-2.5000000000000000e-1,0.0000000000000000e0");
}

#[test]
fn eoc_orders_recompute_from_file() {
    let o = flmm(&["converge", "--method", "nflmm2", "--beta", "0.5", "--problem", "poly2-linear", "--mlist", "8,16,64"]);
    assert!(o.status.success());
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(reader.headers().unwrap(), vec!["M", "h", "max_error", "order"]);
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(|f| f.parse().unwrap_or(f64::NAN)).collect())
        .collect();
    assert!(rows[0][3].is_nan());
    for w in rows.windows(2) {
        let want = (w[1][2] / w[0][2]).ln() / (w[1][1] / w[0][1]).ln();
        assert!((w[1][3] - want).abs() < 1e-12);
    }
}

#[test]
fn constant_problem_flags_orders() {
    let o = flmm(&["converge", "--method", "gl1", "--problem", "constant", "--y0", "3", "--mlist", "8..32"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().skip(2).all(|l| l.ends_with(",NA")), "{text}");
}

#[test]
fn stability_outputs() {
    let o = flmm(&["stability", "boundary", "--method", "nflmm2", "--beta", "0.5", "--samples", "8"]);
    let text = stdout(&o);
    assert!(text.starts_with("theta,re,im\n0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0\n"));
    assert_eq!(text.lines().count(), 10);

    let o = flmm(&["stability", "boundary", "--method", "ft2", "--beta", "0.5", "--samples", "8"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains(",inf,"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("theta=pi"));

    let o = flmm(&["stability", "grid", "--beta", "0.5", "--points", "3", "--re-min", "-1", "--re-max", "1"]);
    let text = stdout(&o);
    assert!(text.starts_with("re_zeta,im_zeta,member\n"));
    assert_eq!(text.lines().count(), 10);
    assert!(text.contains("1.0000000000000000e0,0.0000000000000000e0,true"));
    assert!(text.contains("-1.0000000000000000e0,0.0000000000000000e0,false"));
    assert!(text.contains("0.0000000000000000e0,0.0000000000000000e0,indeterminate"));

    let o = flmm(&["stability", "compare", "--beta", "0.5,1"]);
    let text = stdout(&o);
    assert!(text.starts_with("beta,fbdf2,nflmm2,fam1,ft2,ordered\n5.0000000000000000e-1,2.0000000000000000e0,"));
    assert!(text.lines().nth(2).unwrap().ends_with("inf,inf,false"));
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        vec!["weights", "--beta", "1.5"],
        vec!["weights", "--method", "rk4"],
        vec!["converge", "--mlist", "8..12", "--problem", "poly2-linear"],
        vec!["converge", "--mlist", "12,16"],
        vec!["solve", "--problem", "nope"],
        vec!["solve", "--mlist", "8..16"],
        vec!["stability", "boundary", "--samples", "3"],
        vec!["weights", "--unknown-flag"],
    ] {
        let o = flmm(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = flmm(&["solve", "--problem", "nope"]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("paper-nonlinear") && err.contains("test-lambda"), "{err}");
}

#[test]
fn numerical_failures_exit_3() {
    // λ h^β = 1.5 = δ(0) for NFLMM2 at β = 1
    let o = flmm(&[
        "solve", "--problem", "test-lambda", "--beta", "1", "--lambda", "1.5", "--steps", "2", "--t-end", "2",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));

    // a one-iteration Newton budget fails every column but the file is still written
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = flmm(&[
        "converge", "--beta", "0.5,0.7", "--mlist", "8..16", "--newton-max-iters", "1", "--newton-tol", "1e-15", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("aborted at M=8"));
    assert!(fs::read_to_string(&out).unwrap().starts_with("method,beta,M,h,max_error,order"));
}

#[test]
fn io_failure_names_the_path() {
    let o = flmm(&["weights", "--out", "/nonexistent-dir/w.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent-dir/w.csv"));
}
