use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn halfint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halfint"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = halfint(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn build(dir: &TempDir, form: &str, prec: u64) -> PathBuf {
    let path = dir.path().join(format!(
        "{}-{prec}.txt",
        form.replace(|c: char| !c.is_alphanumeric(), "_")
    ));
    ok(&[
        "build",
        "--form",
        form,
        "--prec",
        &prec.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    path
}

fn body(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(String::from)
        .collect()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn build_named_and_expression_forms() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        body(&build(&dir, "delta", 100))[..3],
        ["1\t1", "4\t-56", "5\t120"]
    );
    assert_eq!(body(&build(&dir, "g", 60))[..2], ["3\t1", "4\t-1"]);
    assert_eq!(body(&build(&dir, "eta(1)^24", 5))[..2], ["1\t1", "2\t-24"]);
    let halved = build(&dir, "1/2*(theta(1)^2 - 1)", 5);
    assert_eq!(body(&halved), ["1\t2", "2\t2", "4\t2", "5\t4"]);
    let via_rationals = build(&dir, "1/2*theta(1) + 1/2*theta(1)", 9);
    assert_eq!(body(&via_rationals), ["0\t1", "1\t2", "4\t2", "9\t2"]);
}

#[test]
fn build_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.txt");
    for form in ["eta(0)", "nope(1)", "1/2*theta(1)", "eta(1)"] {
        assert_eq!(
            halfint(&["build", "--form", form, "--prec", "5", "--out", p(&out)])
                .status
                .code(),
            Some(2),
            "{form}"
        );
    }
    let big = halfint(&[
        "build",
        "--form",
        "delta",
        "--prec",
        "2000000",
        "--out",
        p(&out),
    ]);
    assert_eq!(big.status.code(), Some(2));
}

#[test]
fn lift_metadata_and_values() {
    let dir = TempDir::new().unwrap();
    let delta = build(&dir, "delta", 10_000);
    let out = dir.path().join("lift.txt");
    ok(&["lift", "--in", p(&delta), "--t", "1", "--out", p(&out)]);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("#precision=100\n"));
    assert!(text.contains("#weight=24/2\n"));
    assert!(text.contains("\n3\t252\n"));

    let g = build(&dir, "g", 100);
    ok(&["lift", "--in", p(&g), "--t", "3", "--out", p(&out)]);
    assert_eq!(body(&out)[0], "1\t1");
    assert_eq!(
        halfint(&["lift", "--in", p(&g), "--t", "4", "--out", p(&out)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn hecke_eigen_reports() {
    let dir = TempDir::new().unwrap();
    let delta = build(&dir, "delta", 2000);
    let report: Value = serde_json::from_str(&ok(&[
        "hecke",
        "--in",
        p(&delta),
        "--op",
        "tsq",
        "--p",
        "3",
        "--verify-eigen",
    ]))
    .unwrap();
    assert_eq!(report["schema"], "halfint.eigen/1");
    assert_eq!(report["report"]["lambda"], "252");
    assert_eq!(report["report"]["is_eigen"], true);
    assert_eq!(report["report"]["deligne"], true);

    let g = build(&dir, "g", 2000);
    let report: Value = serde_json::from_str(&ok(&[
        "hecke",
        "--in",
        p(&g),
        "--op",
        "tsq",
        "--p",
        "3",
        "--verify-eigen",
    ]))
    .unwrap();
    assert_eq!(report["report"]["lambda"], "-1");

    let out = halfint(&["hecke", "--in", p(&delta), "--op", "tsq", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("divides the level"));

    let tau = build(&dir, "Delta", 500);
    let image = dir.path().join("t5.txt");
    let report: Value = serde_json::from_str(&ok(&[
        "hecke",
        "--in",
        p(&tau),
        "--op",
        "tp",
        "--p",
        "5",
        "--verify-eigen",
        "--out",
        p(&image),
    ]))
    .unwrap();
    assert_eq!(report["report"]["lambda"], "4830");
    assert!(fs::read_to_string(&image)
        .unwrap()
        .contains("#precision=100\n"));

    let u = dir.path().join("u.txt");
    ok(&[
        "hecke",
        "--in",
        p(&delta),
        "--op",
        "u",
        "--p",
        "4",
        "--out",
        p(&u),
    ]);
    assert_eq!(body(&u)[..2], ["1\t-56", "2\t-240"]);
}

#[test]
fn hecke_flags_non_eigenforms() {
    let dir = TempDir::new().unwrap();
    let sum = dir.path().join("sum.txt");
    ok(&[
        "build",
        "--form",
        "eta(1)^24 + E4(1)^3",
        "--prec",
        "200",
        "--out",
        p(&sum),
        "--weight",
        "12",
        "--level",
        "1",
    ]);
    let out = halfint(&[
        "hecke",
        "--in",
        p(&sum),
        "--op",
        "tp",
        "--p",
        "3",
        "--verify-eigen",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn signs_table_cells() {
    let dir = TempDir::new().unwrap();
    let delta = build(&dir, "delta", 10_000);
    let csv = dir.path().join("t.csv");
    ok(&[
        "signs",
        "--in",
        p(&delta),
        "--stats",
        "tot,fund",
        "--X-list",
        "10,100,10000",
        "--csv",
        p(&csv),
    ]);
    let text = fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "X,R_tot,R_fund");
    assert_eq!(rows[1], "10,0.600,0.667");
    assert!(rows[3].starts_with("10000,0.504600,"));

    let g = build(&dir, "g", 100);
    let out = ok(&["signs", "--in", p(&g), "--X-list", "100"]);
    assert!(out.lines().nth(1).unwrap().starts_with("100,0.500,"));
    assert_eq!(
        halfint(&["signs", "--in", p(&g), "--X-list", "101"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        halfint(&["signs", "--in", p(&g), "--stats", "median"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn signs_csv_is_stable_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let g = build(&dir, "g", 5000);
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_halfint"))
            .args(["signs", "--in", p(&g), "--X-list", "10,100,1000,5000"])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        out.stdout
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    assert_eq!(one, run("1"));
}

#[test]
fn signs_subsequence_reports() {
    let dir = TempDir::new().unwrap();
    let delta = build(&dir, "delta", 1000);
    let report: Value =
        serde_json::from_str(&ok(&["signs", "--in", p(&delta), "--t", "1"])).unwrap();
    assert_eq!(report["schema"], "halfint.signs/1");
    assert_eq!(report["t_n2"]["report"]["x"], 31);
    let report: Value =
        serde_json::from_str(&ok(&["signs", "--in", p(&delta), "--powers-p", "3"])).unwrap();
    assert_eq!(report["powers"]["terms"][2], "-174879");
    assert_eq!(report["powers"]["change_positions"][0], 2);
    let report: Value = serde_json::from_str(&ok(&[
        "signs",
        "--in",
        p(&delta),
        "--dprime",
        "3:1",
        "--X-list",
        "20",
    ]))
    .unwrap();
    let ts: Vec<u64> = report["dprime"]["survey"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["t"].as_u64().unwrap())
        .collect();
    assert_eq!(ts, [1, 7, 10, 13, 19]);
    assert_eq!(
        halfint(&["signs", "--in", p(&delta), "--dprime", "3:2"])
            .status
            .code(),
        Some(2)
    );
}

fn verify(file: &Path, suite: &str, extra: &[&str]) -> (Option<i32>, Value) {
    let mut args = vec!["verify", "--in", p(file), "--suite", suite];
    args.extend_from_slice(extra);
    let out = halfint(&args);
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code(), json)
}

#[test]
fn verify_suites_pass_on_genuine_forms() {
    let dir = TempDir::new().unwrap();
    let delta = build(&dir, "delta", 5000);
    let (code, report) = verify(&delta, "plus-space", &[]);
    assert_eq!(
        (code, &report["pass"], &report["schema"]),
        (
            Some(0),
            &Value::Bool(true),
            &Value::from("halfint.verify/1")
        )
    );
    let (code, report) = verify(&delta, "recurrence", &["--t", "1", "--p", "3"]);
    assert_eq!(code, Some(0));
    assert_eq!(report["results"][0]["m_max"], 3);
    let (code, _) = verify(&delta, "bounds", &[]);
    assert_eq!(code, Some(0));
    let (code, report) = verify(&delta, "prop2", &["--p", "3"]);
    assert_eq!(code, Some(0));
    let minus = &report["results"]["witnesses"][1];
    assert_eq!(minus["eps"], -1);
    assert_eq!(
        (&minus["positive"]["n"], &minus["positive"]["value"]),
        (&Value::from(5), &Value::from("120"))
    );
    assert_eq!(
        (&minus["negative"]["n"], &minus["negative"]["value"]),
        (&Value::from(8), &Value::from("-240"))
    );
}

#[test]
fn verify_suites_fail_with_exit_one() {
    let dir = TempDir::new().unwrap();
    let theta = dir.path().join("theta.txt");
    ok(&[
        "build",
        "--form",
        "theta(1)^3",
        "--prec",
        "400",
        "--out",
        p(&theta),
        "--weight",
        "3/2",
        "--level",
        "4",
    ]);
    assert_eq!(verify(&theta, "plus-space", &[]).0, Some(1));
    assert_eq!(verify(&theta, "prop2", &[]).0, Some(1));

    let mixed = dir.path().join("mixed.txt");
    ok(&[
        "build",
        "--form",
        "theta(1)^3 + eta(24)",
        "--prec",
        "400",
        "--out",
        p(&mixed),
        "--weight",
        "3/2",
        "--level",
        "4",
    ]);
    assert_eq!(verify(&mixed, "recurrence", &["--p", "3"]).0, Some(1));
    assert_eq!(verify(&mixed, "bounds", &["--p", "3"]).0, Some(1));
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.txt");
    assert_eq!(verify(&missing, "plus-space", &[]).0, Some(2));
    assert_eq!(
        halfint(&["verify", "--in", p(&missing), "--suite", "everything"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(halfint(&["frobnicate"]).status.code(), Some(2));
    let junk = dir.path().join("junk.txt");
    fs::write(&junk, "not a table\n").unwrap();
    assert_eq!(halfint(&["signs", "--in", p(&junk)]).status.code(), Some(2));
}
