use std::process::{Command, Output};

use rooted_forests::report::{Outcome, RunReport};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rooted-forests"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> (RunReport, i32) {
    let mut full = args.to_vec();
    full.push("--json");
    let out = run(&full);
    let text = String::from_utf8(out.stdout).unwrap();
    let report = RunReport::from_json(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (report, out.status.code().unwrap())
}

fn value<'a>(r: &'a RunReport, key: &str) -> &'a str {
    &r.instances[0].values[key]
}

#[test]
fn count_examples() {
    let (r, code) = report(&["count", "--sizes", "2,2"]);
    assert_eq!(code, 0);
    for route in ["formula", "oracle", "constructive"] {
        assert_eq!(value(&r, route), "6");
    }
    let (r, _) = report(&["count", "--sizes", "3"]);
    assert_eq!(value(&r, "formula"), "1");
    let (r, _) = report(&["count", "--sizes", "1,1,1,1"]);
    assert_eq!(value(&r, "oracle"), "16");
}

#[test]
fn census_examples() {
    let (r, code) = report(&["census", "--sizes", "2", "--extras", "2"]);
    assert_eq!(code, 0);
    assert_eq!(value(&r, "formula"), "4*lambda^2 + 4*lambda*a");
    assert_eq!(value(&r, "oracle"), "4*lambda^2 + 4*lambda*a");
    assert!(r.verdicts.iter().all(|v| v.outcome == Outcome::Pass));
    let poly = &r.polynomials["sizes=2 extras=2/formula"];
    assert_eq!(poly.terms["lambda^2"], "4");
    assert_eq!(poly.terms["lambda*a"], "4");

    let (r, _) = report(&["census", "--sizes", "1,1", "--extras", "1", "--no-interset"]);
    assert_eq!(value(&r, "oracle"), "1*lambda^2");
    assert_eq!(value(&r, "expansion"), "1*lambda^2");

    let (r, _) = report(&["census", "--sizes", "2", "--extras", "1"]);
    assert_eq!(value(&r, "formula"), "2*lambda");
}

#[test]
fn verify_identity_exit_codes() {
    assert_eq!(
        run(&["verify-identity", "--max-m", "6"]).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&["verify-identity", "--max-m", "1"]).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&["verify-identity", "--max-m", "9"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["verify-identity", "--mode", "numeric", "--max-m", "15"])
            .status
            .code(),
        Some(2)
    );
    let a = report(&[
        "verify-identity",
        "--mode",
        "numeric",
        "--max-m",
        "12",
        "--seed",
        "7",
    ]);
    let b = report(&[
        "verify-identity",
        "--mode",
        "numeric",
        "--max-m",
        "12",
        "--seed",
        "7",
    ]);
    assert_eq!(a.1, 0);
    assert_eq!(a.0.without_timings(), b.0.without_timings());
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["count"][..],
        &["count", "--sizes", "0,2"],
        &["count", "--sizes", "a"],
        &["census", "--sizes", "2", "--json", "--csv"],
        &["frobnicate"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn capacity_hit_skips_the_oracle() {
    let (r, code) = report(&["count", "--sizes", "3,3,2", "--max-nodes", "100"]);
    assert_eq!(code, 0);
    // 3 * (2^3 - 1) * (2^2 - 1) * 8
    assert_eq!(value(&r, "formula"), "504");
    assert!(!r.instances[0].values.contains_key("oracle"));
    assert!(!r.capacity_hits.is_empty());
    assert!(r.verdicts.iter().any(|v| v.outcome == Outcome::Skipped));
}

#[test]
fn json_round_trips() {
    let out = run(&["census", "--sizes", "1,2", "--extras", "2", "--json"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed = RunReport::from_json(&text).unwrap();
    let again = RunReport::from_json(&parsed.to_json()).unwrap();
    assert_eq!(parsed, again);
    let raw: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["command", "instances", "verdicts", "polynomials", "timings"] {
        assert!(raw.get(key).is_some(), "{key}");
    }
}

#[test]
fn grid_reports_do_not_depend_on_workers() {
    for grid in ["count", "census", "expansion"] {
        let (one, c1) = report(&["compare", "--grid", grid, "--workers", "1"]);
        let (four, c4) = report(&["compare", "--grid", grid, "--workers", "4"]);
        assert_eq!((c1, c4), (0, 0));
        assert_eq!(one.without_timings(), four.without_timings(), "{grid}");
    }
    let (one, _) = report(&[
        "census",
        "--sizes",
        "2,2",
        "--extras",
        "2",
        "--workers",
        "1",
    ]);
    let (four, _) = report(&[
        "census",
        "--sizes",
        "2,2",
        "--extras",
        "2",
        "--workers",
        "4",
    ]);
    assert_eq!(one.without_timings(), four.without_timings());
}

#[test]
fn csv_has_one_row_per_instance() {
    let out = run(&["count", "--sizes", "2,2", "--sizes", "1,2,3", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(headers, ["sizes", "n", "formula", "oracle", "agree"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[1][2], "126");
    assert_eq!(&rows[1][3], "126");
    assert_eq!(&rows[1][4], "true");
}

#[test]
fn bench_reports() {
    let (empty, code) = report(&["bench"]);
    assert_eq!(code, 0);
    assert!(empty.instances.is_empty() && empty.verdicts.is_empty());

    let (r, code) = report(&["bench", "--sizes", "2,2,2", "--workers", "1,4"]);
    assert_eq!(code, 0);
    assert!(r
        .verdicts
        .iter()
        .any(|v| v.check == "workers-identical" && v.outcome == Outcome::Pass));
    assert!(r.timings.keys().any(|k| k.ends_with("constructive")));

    assert_eq!(
        run(&["bench", "--sizes", "2,2,2", "--max-nodes", "10"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "sizes = [[2], \"1,1\"]\nextras = 1\nno-interset = true\n",
    )
    .unwrap();
    let (r, code) = report(&["census", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r.instances.len(), 2);
    assert_eq!(r.instances[1].values["oracle"], "1*lambda^2");

    std::fs::write(&path, "bogus = 1\n").unwrap();
    assert_eq!(
        run(&["count", "--config", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn plain_text_has_no_escape_codes() {
    let out = run(&["count", "--sizes", "2,2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\x1b'));
    assert!(text.contains("pass filter=formula"));
}
