//! The `x0wp` binary as a user sees it: output, exit codes, results files.

use std::path::PathBuf;
use std::process::{Command, Output};

use x0_weierstrass::{Verdict, WeierstrassVerdict};

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("x0wp-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn x0wp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_x0wp"))
        .args(args)
        .env(
            "X0WP_CACHE_DIR",
            std::env::temp_dir().join(format!("x0wp-cli-cache-{}", std::process::id())),
        )
        .env("X0WP_BASE_URL", "http://127.0.0.1:9/api")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn level_34_is_not_weierstrass() {
    let o = x0wp(&["decide", "--level", "34", "--weight", "4", "--offline"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(
        out.trim_end()
            .ends_with("the cusp at infinity of X0(34) is NOT a 2-Weierstrass point"),
        "{out}"
    );
    assert!(out.contains("pivots: 2, 3, 4, 5, 6, 7"), "{out}");
}

#[test]
fn level_55_verbose_shows_the_rows() {
    let o = x0wp(&[
        "decide",
        "--level",
        "55",
        "--weight",
        "4",
        "--offline",
        "--verbose",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<&str> = out
        .lines()
        .filter(|l| l.starts_with("  ") && l.contains(" = "))
        .collect();
    assert_eq!(rows.len(), 12, "{out}");
    assert!(
        rows[11]
            .split(" = ")
            .nth(1)
            .unwrap()
            .trim_start()
            .starts_with("q^14"),
        "{}",
        rows[11]
    );
    assert!(
        out.trim_end().ends_with("IS a 2-Weierstrass point"),
        "{out}"
    );
}

#[test]
fn bad_weight_is_a_usage_error() {
    for w in ["3", "0", "x"] {
        let o = x0wp(&["decide", "--level", "34", "--weight", w, "--offline"]);
        assert_eq!(o.status.code(), Some(2), "weight {w}");
    }
    let o = x0wp(&["decide", "--level", "0", "--weight", "4", "--offline"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn short_precision_recommends_a_value() {
    let o = x0wp(&[
        "decide",
        "--level",
        "34",
        "--weight",
        "4",
        "--precision",
        "9",
        "--offline",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(
        stderr(&o).contains("recommended precision: 12"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn missing_basis_offline() {
    let o = x0wp(&["decide", "--level", "101", "--weight", "4", "--offline"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn hyperelliptic_level_is_not_applicable() {
    let o = x0wp(&[
        "decide",
        "--level",
        "40",
        "--weight",
        "4",
        "--offline",
        "--format",
        "jsonl",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: WeierstrassVerdict = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(matches!(v.verdict, Verdict::NotApplicable(_)));
    assert!(v.pivots.is_empty());
}

#[test]
fn text_and_jsonl_agree() {
    for level in ["34", "55", "97"] {
        let text = stdout(&x0wp(&[
            "decide",
            "--level",
            level,
            "--weight",
            "4",
            "--offline",
        ]));
        let json = stdout(&x0wp(&[
            "decide",
            "--level",
            level,
            "--weight",
            "4",
            "--offline",
            "--format",
            "jsonl",
        ]));
        let v: WeierstrassVerdict = serde_json::from_str(json.trim()).unwrap();
        assert_eq!(v.level.to_string(), level);
        assert_eq!(v.weight, 4);
        assert_eq!(text.lines().last().unwrap(), v.headline());
        let pivots = v
            .pivots
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        assert!(text.contains(&format!("pivots: {pivots}")), "{text}");
        assert_eq!(v.methods_run.len(), 2);
        assert!(v.agreement);
    }
}

#[test]
fn scan_writes_one_record_per_cell() {
    let dir = scratch("scan");
    let out = dir.join("grid.csv");
    let out_s = out.to_str().unwrap();
    let args = [
        "scan",
        "--levels",
        "34..60",
        "--weights",
        "4",
        "--offline",
        "--format",
        "csv",
        "-o",
        out_s,
    ];
    let o = x0wp(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let read = || {
        let mut rdr = csv::Reader::from_path(&out).unwrap();
        rdr.records().map(|r| r.unwrap()).collect::<Vec<_>>()
    };
    let rows = read();
    assert_eq!(rows.len(), 27);
    let verdict = |n: &str| rows.iter().find(|r| &r[0] == n).unwrap()[5].to_string();
    assert_eq!(verdict("55"), "IsWeierstrass");
    assert_eq!(verdict("34"), "NotWeierstrass");
    assert_eq!(verdict("40"), "NotApplicable");

    // A second run finds every cell already done.
    let before = std::fs::read_to_string(&out).unwrap();
    assert_eq!(x0wp(&args).status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), before);

    // --force recomputes without duplicating.
    let mut forced = args.to_vec();
    forced.push("--force");
    assert_eq!(x0wp(&forced).status.code(), Some(0));
    let again = read();
    assert_eq!(again.len(), 27);
    let mut levels: Vec<String> = again.iter().map(|r| r[0].to_string()).collect();
    levels.dedup();
    assert_eq!(levels.len(), 27);
}

#[test]
fn scan_jsonl_lines_parse() {
    let dir = scratch("scan-jsonl");
    let out = dir.join("grid.jsonl");
    let o = x0wp(&[
        "scan",
        "--levels",
        "43,55",
        "--weights",
        "2,4",
        "--offline",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l["status"] == "ok"));
}

#[test]
fn bundled_fixtures_verify() {
    let o = x0wp(&["verify-fixtures"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
}
