use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use dimlab::{run, MeasureDocument, EXIT_INPUT, EXIT_OK, EXIT_RUNTIME};

fn docs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples")
}

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("dimlab").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn doc(name: &str) -> String {
    docs().join(name).display().to_string()
}

#[test]
fn shipped_documents_round_trip() {
    let mut seen = 0;
    for entry in fs::read_dir(docs()).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let parsed = MeasureDocument::parse(&text).unwrap();
        assert_eq!(parsed.to_json(), text, "{}", path.display());
        parsed.to_measure().unwrap();
        seen += 1;
    }
    assert!(seen >= 2);
}

#[test]
fn exact_table_of_a_term() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let (code, stdout, _) = call(&["exact", "--example", "ex6", "--n", "10", "--out", &out]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.contains("dim_H^U   1") && stdout.contains("dim_H^L   0"));
    let csv = fs::read_to_string(dir.path().join("table.csv")).unwrap();
    assert!(csv.starts_with("mapping,value\n"));
    assert!(csv.contains("dim_H^U,1\n"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("table.json")).unwrap()).unwrap();
    assert_eq!(json["tool"], "dimlab");
    assert_eq!(json["config"]["source"]["n"], 10);
    assert_eq!(json["result"]["dim_H^U"], 1.0);
}

fn slope(dir: &Path) -> f64 {
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("estimate.json")).unwrap()).unwrap();
    json["result"]["estimates"][0][1]["slope"].as_f64().unwrap()
}

#[test]
fn estimates_from_documents() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let uniform = doc("uniform01.json");
    let args =
        ["estimate", "--measure", &uniform, "--method", "gp", "--samples", "10000", "--seed", "42", "--out", &out];
    assert_eq!(call(&args).0, EXIT_OK);
    assert!((slope(dir.path()) - 1.0).abs() < 0.05);
    let series = fs::read_to_string(dir.path().join("series.csv")).unwrap();
    assert!(series.starts_with("log10_r,log10_value\n"));
    assert_eq!(series.lines().count(), 25);

    let dirac = doc("dirac.json");
    assert_eq!(call(&["estimate", "--measure", &dirac, "--method", "gp", "--out", &out]).0, EXIT_OK);
    assert_eq!(slope(dir.path()), 0.0);
}

#[test]
fn other_methods() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let args = [
        "estimate",
        "--example",
        "ex8",
        "--method",
        "box",
        "--rmin",
        "1e-6",
        "--rmax",
        "1e-2",
        "--rsteps",
        "13",
        "--out",
        &out,
    ];
    assert_eq!(call(&args).0, EXIT_OK);
    assert!((slope(dir.path()) - 0.5).abs() < 0.05);

    let args = ["estimate", "--example", "ex6", "--n", "10", "--method", "local", "--rmin", "1e-5", "--out", &out];
    assert_eq!(call(&args).0, EXIT_OK);
    assert!(dir.path().join("series_q0.01.csv").exists() && dir.path().join("series_q0.99.csv").exists());

    let args = ["estimate", "--example", "ex5", "--n", "10", "--method", "mc", "--delta", "0.2", "--out", &out];
    assert_eq!(call(&args).0, EXIT_OK);
    assert!((slope(dir.path()) - 1.0).abs() < 0.05);
}

#[test]
fn convergence_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let (code, stdout, _) = call(&["converge", "--example", "ex6", "--mode", "tv", "--horizon", "50", "--out", &out]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.contains("Certified"));
    let series = fs::read_to_string(dir.path().join("series.csv")).unwrap();
    let rows: Vec<&str> = series.lines().collect();
    assert_eq!(rows[0], "n,tv_distance");
    for row in &rows[1..] {
        let (n, v) = row.split_once(',').unwrap();
        let (n, v): (f64, f64) = (n.parse().unwrap(), v.parse().unwrap());
        assert!((v - 1.0 / n).abs() < 1e-12);
    }

    let (code, stdout, _) = call(&["converge", "--example", "ex4", "--mode", "setwise"]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.contains("Refuted") && stdout.contains("witness"));

    let u = doc("uniform01.json");
    let (code, stdout, _) = call(&["tv", "--a", &u, "--b", &u]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.starts_with("tv distance 0 "));
}

#[test]
fn verify_single_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let (code, _, _) = call(&["verify", "ex4", "--out", &out]);
    assert_eq!(code, EXIT_OK);
    let claims = fs::read_to_string(dir.path().join("claims.csv")).unwrap();
    assert!(claims.lines().any(|l| l.starts_with("ex4,dims.jump,true,") && l.contains("Some(0.0) vs Some(1.0)")));

    let (code, stdout, _) = call(&["verify", "ex7", "--a", "0.5", "--out", &out]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.contains("n=5: 0.400000") && stdout.contains("n=10: 0.200000"));
    let series = fs::read_to_string(dir.path().join("ex7_concentration.csv")).unwrap();
    assert!(series.starts_with("n,exponent\n1,2\n2,1\n"));
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(call(&["verify", "ex2"]).0, EXIT_INPUT);
    assert_eq!(call(&["exact", "--example", "ex7", "--a", "1.5"]).0, EXIT_INPUT);
    assert_eq!(call(&["estimate", "--method", "gp"]).0, EXIT_INPUT);
    assert_eq!(call(&["frobnicate"]).0, EXIT_INPUT);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        "{\n  \"kind\": \"mixture\",\n  \"components\": [\n    {\"kind\": \"atoms\", \"atoms\": [[0.0]]}\n  ]\n}\n",
    )
    .unwrap();
    let (code, _, stderr) = call(&["exact", "--measure", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
    assert!(stderr.contains("line 5, column 3"), "{stderr}");
}

#[test]
fn estimator_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let spread = dir.path().join("spread.json");
    // 20 points spread over [0, 1000] have no pair within 1e-3
    fs::write(
        &spread,
        r#"{"kind":"mixture","components":[{"kind":"piecewise","pieces":[{"a":0.0,"b":1000.0,"height":0.001}]}]}"#,
    )
    .unwrap();
    let args = [
        "estimate",
        "--measure",
        spread.to_str().unwrap(),
        "--method",
        "gp",
        "--samples",
        "20",
        "--rmax",
        "1e-3",
        "--rmin",
        "1e-6",
    ];
    let (code, _, stderr) = call(&args);
    assert_eq!(code, EXIT_RUNTIME, "{stderr}");
    assert!(stderr.contains("correlation sum vanishes"));

    // the self-similar limit has no exact δ = 0 box count
    assert_eq!(call(&["estimate", "--example", "ex3", "--method", "box"]).0, EXIT_RUNTIME);
}

fn binary_run(threads: &str, dir: &Path, args: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_dimlab"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env("DIMLAB_THREADS", threads)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_threads() {
    let runs: [&[&str]; 2] = [
        &[
            "estimate",
            "--example",
            "ex5",
            "--n",
            "10",
            "--method",
            "mc",
            "--delta",
            "0.01",
            "--rmin",
            "1e-6",
            "--seed",
            "7",
        ],
        &["verify", "ex6", "ex8", "--horizon", "30"],
    ];
    for args in runs {
        let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
        binary_run("1", dirs[0].path(), args);
        binary_run("1", dirs[1].path(), args);
        binary_run("4", dirs[2].path(), args);
        let mut names: Vec<_> = fs::read_dir(dirs[0].path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert!(!names.is_empty());
        for name in &names {
            let first = fs::read(dirs[0].path().join(name)).unwrap();
            for d in &dirs[1..] {
                assert_eq!(fs::read(d.path().join(name)).unwrap(), first, "{name:?} differs");
            }
        }
    }
}

#[test]
fn bad_thread_count() {
    let out = Command::new(env!("CARGO_BIN_EXE_dimlab"))
        .args(["exact", "--example", "ex1"])
        .env("DIMLAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INPUT));
}
