use std::process::{Command, Output};

use serde_json::Value;

fn skm(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_skm"));
    for var in ["SKM_ORDER", "SKM_DIGITS", "SKM_FORMAT"] {
        cmd.env_remove(var);
    }
    cmd.args(args)
        .envs(env.iter().copied())
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn count_at_level_one() {
    let out = skm(&["count", "--length", "5", "--level", "1"], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "36");
}

#[test]
fn return_series_text() {
    let out = skm(&["series", "--gf", "sm", "--order", "11"], &[]);
    assert_eq!(
        stdout(&out).trim(),
        "1,1,2,5,13,35,97,275,794,2327,6905,20705"
    );
}

#[test]
fn bfile_is_offset_zero_pairs() {
    let out = skm(
        &[
            "--format", "bfile", "series", "--gf", "total", "--order", "4",
        ],
        &[],
    );
    assert_eq!(stdout(&out), "0 1\n1 2\n2 5\n3 14\n4 40\n");
}

#[test]
fn json_is_versioned_and_exact() {
    let v = json(&skm(&["--format", "json", "count", "--length", "30"], &[]));
    assert_eq!(v["schema"], "1");
    assert_eq!(v["command"], "count");
    let count = v["count"].as_str().expect("big integers are strings");
    assert!(count.chars().all(|c| c.is_ascii_digit()));
}

#[test]
fn flags_override_env_over_defaults() {
    let default = skm(&["series", "--gf", "sm"], &[]);
    assert_eq!(stdout(&default).trim().split(',').count(), 65);
    let env = skm(&["series", "--gf", "sm"], &[("SKM_ORDER", "3")]);
    assert_eq!(stdout(&env).trim(), "1,1,2,5");
    let flag = skm(
        &["series", "--gf", "sm", "--order", "2"],
        &[("SKM_ORDER", "3")],
    );
    assert_eq!(stdout(&flag).trim(), "1,1,2");
    let fmt = skm(
        &["series", "--gf", "sm", "--order", "1"],
        &[("SKM_FORMAT", "json")],
    );
    assert_eq!(json(&fmt)["schema"], "1");
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["bogus"][..],
        &["count", "--nope"],
        &["count"],
        &["series", "--gf", "zz"],
    ] {
        let out = skm(args, &[]);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn oracle_limit_is_enforced() {
    let out = skm(&["--oracle-limit", "4", "enumerate", "--length", "5"], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("oracle limit"));
}

#[test]
fn enumerate_lists_return_paths() {
    let out = skm(&["enumerate", "--length", "3", "--print"], &[]);
    assert_eq!(stdout(&out), "UDF\nUFD\nUFL\nFUD\nFFF\n5\n");
}

#[test]
fn heights_and_stats_are_exact() {
    let h = json(&skm(
        &["--format", "json", "heights", "--length", "4", "--expected"],
        &[],
    ));
    assert_eq!(h["expected_height"], "14/13");
    let out = skm(&["stats", "--length", "4"], &[]);
    assert_eq!(stdout(&out), "0 0 2\n0 1 1\n2 0 6\n2 1 3\n4 0 1\n");
}

#[test]
fn sample_metadata_and_determinism() {
    let args = [
        "--format", "json", "sample", "--length", "6", "--level", "0", "--count", "50", "--seed",
        "9",
    ];
    let (a, b) = (skm(&args, &[]), skm(&args, &[]));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["metadata"]["rng_id"], "chacha20");
    assert_eq!(v["metadata"]["seed"], 9);
    assert_eq!(v["samples"].as_array().unwrap().len(), 50);
    let empty = skm(
        &[
            "sample", "--length", "2", "--level", "5", "--count", "1", "--seed", "0",
        ],
        &[],
    );
    assert_ne!(empty.status.code(), Some(0));
}

#[test]
fn verify_passes() {
    let out = skm(&["verify", "--max-length", "10"], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn asymptotics_reports_requested_digits() {
    let v = json(&skm(
        &[
            "--format",
            "json",
            "--digits",
            "30",
            "asymptotics",
            "--check-n",
            "50",
        ],
        &[],
    ));
    assert_eq!(v["digits"], 30);
    let rows = v["constants"].as_array().unwrap();
    assert!(rows.iter().all(|r| r["within_tolerance"] == true));
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(skm(&["--help"], &[]).status.code(), Some(0));
    let v = skm(&["--version"], &[]);
    assert!(stdout(&v).contains(env!("CARGO_PKG_VERSION")));
}
