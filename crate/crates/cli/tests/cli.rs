//! Exit-code taxonomy and command examples.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn rfss() -> &'static str {
    env!("CARGO_BIN_EXE_rfss")
}

fn run(args: &[&str]) -> Output {
    Command::new(rfss())
        .args(args)
        .output()
        .expect("spawn rfss")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn scratch(label: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rfss-cli-{label}-{}", std::process::id()));
    fs::remove_dir_all(&dir).ok();
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn entropy_prints_exact_values() {
    let out = run(&["bounds", "entropy", "--x", "0.5"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "1.0");
    let out = run(&["bounds", "entropy", "--x", "0"]);
    assert_eq!(stdout(&out).trim(), "0.0");
}

#[test]
fn bound_subcommands_print_counts() {
    let out = run(&["bounds", "rfss", "--k", "1", "--epsilon", "0.5"]);
    assert_eq!(stdout(&out).trim(), "2");
    let out = run(&[
        "bounds",
        "lower",
        "--d",
        "1",
        "--k",
        "1",
        "--epsilon",
        "0.03125",
    ]);
    assert_eq!(stdout(&out).trim(), "3");
    let out = run(&[
        "bounds",
        "coverage",
        "--n",
        "30",
        "--k",
        "5",
        "--epsilon",
        "0.01",
    ]);
    assert_eq!(stdout(&out).trim(), "false");
}

#[test]
fn curve_csv_has_fixed_header_and_reference_rows() {
    let dir = scratch("curve");
    let dir_str = dir.to_str().unwrap();
    let out = run(&[
        "bounds",
        "curve",
        "--m-target",
        "64",
        "--epsilon",
        "0.1",
        "--out-dir",
        dir_str,
    ]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.join("curve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "gamma,overparameterization,regime_label"
    );
    // curve values decrease along the grid (which ends at 0.5)
    let values: Vec<f64> = csv
        .lines()
        .skip(1)
        .filter(|l| l.ends_with(",curve"))
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]));
    assert!(csv.contains(",constant_density"));
    assert!(csv.contains(",vanishing_density"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn solve_example_finds_the_known_pair() {
    let dir = scratch("solve");
    let instance = dir.join("i.json");
    fs::write(
        &instance,
        r#"{"values":[0.5,-0.3,0.2,-0.1],"k":2,"z":0.2,"epsilon":0.01,"seed":0,
            "spec":{"kind":"uniform","lo":-1.0,"hi":1.0}}"#,
    )
    .unwrap();
    let out = run(&[
        "solve",
        "--instance",
        instance.to_str().unwrap(),
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let solution: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("solution.json")).unwrap()).unwrap();
    assert_eq!(solution["indices"], serde_json::json!([0, 1]));
    assert_eq!(solution["residual"], 0.0);
    assert_eq!(solution["achieved_sum"], 0.2);
    assert_eq!(solution["solver"], "mitm");
    assert_eq!(solution["exact"], true);

    // an unreachable target writes a null solution
    let far = dir.join("far.json");
    fs::write(
        &far,
        r#"{"values":[0.5,-0.3],"k":2,"z":9.0,"epsilon":0.01,"seed":0,
            "spec":{"kind":"uniform","lo":-1.0,"hi":1.0}}"#,
    )
    .unwrap();
    let out = run(&[
        "solve",
        "--instance",
        far.to_str().unwrap(),
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = fs::read_to_string(dir.join("solution.json")).unwrap();
    assert_eq!(body.trim(), "null");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn exit_codes_follow_the_taxonomy() {
    // 2: usage (missing seed on a stochastic command)
    let out = run(&[
        "sweep",
        "--k",
        "2",
        "--epsilon",
        "0.1",
        "--n",
        "4:8:2",
        "--trials",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // 2: usage (exact solvers need no seed, the randomized one does)
    let dir0 = scratch("noseed");
    let inst = dir0.join("i.json");
    fs::write(
        &inst,
        r#"{"values":[0.5,-0.3,0.2,-0.1],"k":2,"z":0.2,"epsilon":0.5,"seed":0,
            "spec":{"kind":"uniform","lo":-1.0,"hi":1.0}}"#,
    )
    .unwrap();
    let out = run(&[
        "solve",
        "--instance",
        inst.to_str().unwrap(),
        "--solver",
        "heuristic",
        "--out-dir",
        dir0.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    fs::remove_dir_all(&dir0).ok();
    // 2: usage (unknown flag, handled by the parser)
    let out = run(&["bounds", "entropy", "--nope", "1"]);
    assert_eq!(out.status.code(), Some(2));
    // 3: domain
    let out = run(&[
        "bounds",
        "lower",
        "--d",
        "4",
        "--k",
        "16",
        "--epsilon",
        "0.2",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["bounds", "entropy", "--x", "1.5"]);
    assert_eq!(out.status.code(), Some(3));
    // 4: solver cap
    let dir = scratch("cap");
    let instance = dir.join("big.json");
    let values: Vec<String> = (0..80)
        .map(|i| format!("{}", (i as f64) / 80.0 - 0.5))
        .collect();
    fs::write(
        &instance,
        format!(
            r#"{{"values":[{}],"k":40,"z":0.0,"epsilon":0.000001,"seed":0,
                "spec":{{"kind":"uniform","lo":-1.0,"hi":1.0}}}}"#,
            values.join(",")
        ),
    )
    .unwrap();
    let out = run(&[
        "solve",
        "--instance",
        instance.to_str().unwrap(),
        "--solver",
        "bruteforce",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    // 5: construction failure (tolerance unreachable in one heuristic move)
    let out = run(&[
        "prune",
        "--target-widths",
        "2,2",
        "--epsilon",
        "0.001",
        "--gamma-prime",
        "0.1",
        "--budget",
        "1",
        "--seed",
        "1",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(5));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn density_summary_reports_envelopes() {
    let dir = scratch("density");
    let out = run(&[
        "density",
        "--n-max",
        "6",
        "--resolution",
        "256",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.join("density.csv")).unwrap();
    assert!(csv.starts_with("n,x,f,f_times_sqrt_n\n"));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("density_summary.json")).unwrap())
            .unwrap();
    assert!(summary["c_l_hat"].as_f64().unwrap() > 0.0);
    assert!(summary["c_u_hat"].as_f64().unwrap() <= 0.75);
    assert_eq!(summary["unimodal_all"], true);
    assert_eq!(summary["domination"]["holds"], true);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_csv_uses_the_documented_header() {
    let dir = scratch("sweepfmt");
    let out = run(&[
        "sweep",
        "--k",
        "2",
        "--epsilon",
        "0.2",
        "--n",
        "4:8:2",
        "--trials",
        "20",
        "--seed",
        "1",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.join("sweep.csv")).unwrap();
    assert!(csv.starts_with("n,k,epsilon,trials,p_hat,ci_lo,ci_hi,n_times_H2,seed\n"));
    assert_eq!(csv.lines().count(), 1 + 3);
    fs::remove_dir_all(&dir).ok();
}
