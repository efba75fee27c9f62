use std::fs;
use std::path::{Path, PathBuf};

use bigness_core::cli::{run_cli, EXIT_ERROR, EXIT_OK};

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["bigness-lab"];
    argv.extend_from_slice(args);
    run_cli(argv)
}

const IDENTITY: &str = r#"{"id":"identity","grid":8,"alpha":{"re":[[1,0],[0,1]]},"beta":{"re":[[1,0],[0,1]]},"eps":[0.0]}"#;

fn report(out: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn identity_scenario_reports_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(dir.path(), "identity.json", IDENTITY);
    let out = dir.path().join("out");
    assert_eq!(
        run(&[
            "verify-estimate",
            "--scenario",
            sc.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ]),
        EXIT_OK
    );
    let v = report(&out);
    assert_eq!(v["schema_version"], 1);
    let e = &v["estimates"][0];
    assert!((e["lhs_product"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!((e["rhs"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let csv = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn sweep_writes_one_row_per_eps() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(
        dir.path(),
        "sweep.json",
        r#"{"grid":8,"alpha":{"re":[[2,0],[0,1]]},"beta":{"re":[[1,0],[0,1]]}}"#,
    );
    let out = dir.path().join("out");
    let code = run(&[
        "verify-estimate",
        "--scenario",
        sc.to_str().unwrap(),
        "--eps",
        "0.5,0.25,0.1,0.05",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let mut rdr = csv::Reader::from_path(out.join("summary.csv")).unwrap();
    let c: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[4].parse().unwrap())
        .collect();
    assert_eq!(c.len(), 4);
    assert!(c.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn zero_density_node_is_an_error_exit() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(
        dir.path(),
        "bad.json",
        r#"{"n":1,"grid":16,"density":{"kind":"trig","constant":1.0,"modes":[{"k":[1,0],"cos":1.0}]}}"#,
    );
    let out = dir.path().join("out");
    assert_eq!(
        run(&[
            "solve-ma",
            "--scenario",
            sc.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ]),
        EXIT_ERROR
    );
}

#[test]
fn solve_ma_writes_cache_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(
        dir.path(),
        "cos.json",
        r#"{"n":1,"grid":32,"density":{"kind":"trig","constant":1.0,"modes":[{"k":[1,0],"cos":0.5}]}}"#,
    );
    let out = dir.path().join("out");
    assert_eq!(
        run(&[
            "solve-ma",
            "--scenario",
            sc.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ]),
        EXIT_OK
    );
    let v = report(&out);
    assert!((v["solve"]["constant_C"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let grid = bigness_core::torus::TorusGrid::<f64>::new(1, 32).unwrap();
    let mut f = fs::File::open(out.join("u.bin")).unwrap();
    let u = bigness_core::torus::io::read_potential(&mut f, Some(grid)).unwrap();
    assert!(u.max().abs() < 1e-12);
}

#[test]
fn malformed_inputs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = out.to_str().unwrap();
    assert_eq!(run(&["frobnicate"]), EXIT_ERROR);
    assert_eq!(run(&["check-theorem", "--out", o]), EXIT_ERROR);
    assert_eq!(run(&["check-theorem", "--n", "7", "--out", o]), EXIT_ERROR);
    let sc = write(dir.path(), "typo.json", r#"{"alpah":{"re":[[1]]}}"#);
    assert_eq!(
        run(&[
            "verify-estimate",
            "--scenario",
            sc.to_str().unwrap(),
            "--out",
            o
        ]),
        EXIT_ERROR
    );
    let missing = dir.path().join("nope.json");
    assert_eq!(
        run(&[
            "dual-test",
            "--scenario",
            missing.to_str().unwrap(),
            "--out",
            o
        ]),
        EXIT_ERROR
    );
    assert_eq!(run(&["--help"]), EXIT_OK);
}

#[test]
fn unwritable_output_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = write(dir.path(), "file", "x");
    let out = blocker.join("sub");
    assert_eq!(
        run(&[
            "check-theorem",
            "--n",
            "2",
            "--samples",
            "10",
            "--out",
            out.to_str().unwrap()
        ]),
        EXIT_ERROR
    );
}

#[test]
fn oracle_commands_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let code = run(&[
            "check-theorem",
            "--n",
            "3",
            "--samples",
            "5000",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
    }
    assert_eq!(
        fs::read(a.join("report.json")).unwrap(),
        fs::read(b.join("report.json")).unwrap()
    );
    assert_eq!(report(&a)["counterexamples"].as_array().unwrap().len(), 0);

    let o = dir.path().join("opt");
    assert_eq!(
        run(&[
            "search-optimality",
            "--n",
            "2",
            "--c",
            "2.0",
            "--out",
            o.to_str().unwrap()
        ]),
        EXIT_OK
    );
    assert_eq!(report(&o)["result"], "no-witness-found");
    assert_eq!(
        run(&[
            "search-optimality",
            "--n",
            "2",
            "--c",
            "1.5",
            "--out",
            o.to_str().unwrap()
        ]),
        EXIT_OK
    );
    assert_eq!(report(&o)["result"], "witness");

    let sc = write(
        dir.path(),
        "ind.json",
        r#"{"alpha":{"re":[[1,0],[0,-0.5]]}}"#,
    );
    let d = dir.path().join("dual");
    assert_eq!(
        run(&[
            "dual-test",
            "--scenario",
            sc.to_str().unwrap(),
            "--samples",
            "100",
            "--out",
            d.to_str().unwrap()
        ]),
        EXIT_OK
    );
    assert_eq!(report(&d)["psef_sampled"], false);

    let f = dir.path().join("fuzz");
    assert_eq!(
        run(&[
            "fuzz-traces",
            "--n",
            "3",
            "--samples",
            "500",
            "--out",
            f.to_str().unwrap()
        ]),
        EXIT_OK
    );
    assert!(report(&f)["min_relative_slack"].as_f64().unwrap() >= -1e-9);
}
