use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_selfish-bins"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn bins_in(path: &Path) -> usize {
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    doc["bins"].as_array().unwrap().len()
}

fn graham(dir: &Path) {
    let out = run(
        dir,
        &[
            "gen",
            "--family",
            "graham",
            "--r",
            "3",
            "--N",
            "3",
            "--out-dir",
            "g",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn version_reports_format() {
    let out = bin().arg("--version").output().unwrap();
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("format 1"));
}

#[test]
fn graham_instance_packs_into_four_and_three_bins() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    graham(dir);
    let instance = fs::read_to_string(dir.join("g/instance.txt")).unwrap();
    assert_eq!(instance.lines().count(), 10);

    let out = run(
        dir,
        &[
            "pack",
            "--algo",
            "ss",
            "--in",
            "g/instance.txt",
            "--out",
            "ss.json",
            "--trace",
            "tr.json",
        ],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(bins_in(&dir.join("ss.json")), 4);
    assert!(dir.join("tr.json").exists());

    let out = run(
        dir,
        &[
            "pack",
            "--algo",
            "opt",
            "--in",
            "g/instance.txt",
            "--out",
            "opt.json",
        ],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(bins_in(&dir.join("opt.json")), 3);

    let out = run(
        dir,
        &[
            "check",
            "--kind",
            "sne-direct",
            "--in",
            "g/instance.txt",
            "--packing",
            "ss.json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let out = run(
        dir,
        &[
            "check",
            "--kind",
            "sne-ss",
            "--in",
            "g/instance.txt",
            "--packing",
            "opt.json",
        ],
    );
    assert_eq!(code(&out), 1);
}

#[test]
fn first_fit_pairs_halves() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write(dir, "h.txt", "alpha 1\n1/2\n1/2\n1/2\n1/2\n");
    let out = run(dir, &["pack", "--algo", "ff", "--in", "h.txt"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), r#"{"bins":[[0,1],[2,3]]}"#);
}

#[test]
fn check_accepts_every_algorithm_output() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write(
        dir,
        "i.txt",
        "alpha 1\n3/5\n1/3\n1/4\n2/7\n1/2\n1/6\n5/12\n",
    );
    for algo in ["ss", "ff", "ffd", "opt"] {
        let packing = format!("{algo}.json");
        assert_eq!(
            code(&run(
                dir,
                &["pack", "--algo", algo, "--in", "i.txt", "--out", &packing]
            )),
            0
        );
        let out = run(
            dir,
            &[
                "check",
                "--kind",
                "ne",
                "--in",
                "i.txt",
                "--packing",
                &packing,
            ],
        );
        // Only SS is guaranteed to give an equilibrium; the others just need a verdict.
        let expected: &[i32] = if algo == "ss" { &[0] } else { &[0, 1] };
        assert!(expected.contains(&code(&out)), "{algo}: {}", stderr(&out));
    }
}

#[test]
fn quarter_bins_yield_a_move_witness() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write(dir, "q.txt", "alpha 1\n1/4\n1/4\n");
    write(dir, "two.json", r#"{"bins":[[0],[1]]}"#);
    let out = run(
        dir,
        &[
            "check",
            "--kind",
            "ne",
            "--in",
            "q.txt",
            "--packing",
            "two.json",
        ],
    );
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("item 0 bin 0 -> bin 1"));
}

#[test]
fn mismatched_packing_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write(dir, "q.txt", "alpha 1\n1/4\n1/4\n");
    write(dir, "one.json", r#"{"bins":[[0]]}"#);
    let out = run(
        dir,
        &[
            "check",
            "--kind",
            "ne",
            "--in",
            "q.txt",
            "--packing",
            "one.json",
        ],
    );
    assert_eq!(code(&out), 2);
    let out = run(
        dir,
        &[
            "check",
            "--kind",
            "ne",
            "--in",
            "missing.txt",
            "--packing",
            "one.json",
        ],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn exhausted_search_budget_exits_with_three() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    graham(dir);
    run(
        dir,
        &[
            "pack",
            "--algo",
            "opt",
            "--in",
            "g/instance.txt",
            "--out",
            "opt.json",
        ],
    );
    let out = run(
        dir,
        &[
            "check",
            "--kind",
            "sne-direct",
            "--in",
            "g/instance.txt",
            "--packing",
            "opt.json",
            "--budget",
            "1",
        ],
    );
    assert_eq!(code(&out), 3);
}

#[test]
fn poa_bundle_files_and_verification() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let out = run(
        dir,
        &[
            "gen",
            "--family",
            "poa",
            "--t",
            "2",
            "--s",
            "2",
            "--n",
            "264",
            "--out-dir",
            "printed",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for name in ["instance.txt", "opt.json", "ne.json", "manifest.json"] {
        assert!(dir.join("printed").join(name).exists(), "{name}");
    }
    assert_eq!(bins_in(&dir.join("printed/ne.json")), 1172);
    // The printed sequence leaves the phase bins short of pairs, so the
    // equilibrium check fails.
    let out = run(
        dir,
        &["audit", "--kind", "construction", "--bundle", "printed"],
    );
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("87 missing"));

    let out = run(
        dir,
        &[
            "gen",
            "--family",
            "poa",
            "--t",
            "2",
            "--s",
            "2",
            "--n",
            "274",
            "--recurrence",
            "balanced",
            "--out-dir",
            "b",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = run(dir, &["audit", "--kind", "construction", "--bundle", "b"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["ne_bins"], 1201);

    // Move one equilibrium item into a bin of its own.
    let ne_path = dir.join("b/ne.json");
    let mut ne: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&ne_path).unwrap()).unwrap();
    let bins = ne["bins"].as_array_mut().unwrap();
    let moved = bins[0].as_array_mut().unwrap().pop().unwrap();
    bins.push(serde_json::json!([moved]));
    fs::write(&ne_path, ne.to_string()).unwrap();
    let out = run(dir, &["audit", "--kind", "construction", "--bundle", "b"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn non_integral_size_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let out = run(
        tmp.path(),
        &[
            "gen",
            "--family",
            "poa",
            "--t",
            "2",
            "--s",
            "2",
            "--n",
            "263",
            "--out-dir",
            "x",
        ],
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("263/3"));
}

#[test]
fn ss_audit_passes_and_writes_report() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write(
        dir,
        "i.txt",
        "alpha 1/2\n1/2\n1/3\n1/3\n1/4\n2/9\n1/5\n3/7\n1/10\n",
    );
    let out = run(
        dir,
        &[
            "audit", "--kind", "ss", "--in", "i.txt", "--t", "2", "--out", "r.json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("r.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["kind"], "ss");
}

#[test]
fn poa_audit_writes_group_counts() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write(
        dir,
        "i.txt",
        "alpha 1/2\n1/2\n1/3\n1/3\n1/4\n2/9\n1/5\n3/7\n1/10\n",
    );
    run(dir, &["dynamics", "--in", "i.txt", "--out", "ne.json"]);
    let out = run(
        dir,
        &[
            "audit",
            "--kind",
            "poa",
            "--in",
            "i.txt",
            "--packing",
            "ne.json",
            "--csv",
            "g.csv",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let csv = fs::read_to_string(dir.join("g.csv")).unwrap();
    assert!(csv.starts_with("name,t,n_a,n_b,n_c,n_d\ni,2,"));
}

#[test]
fn bounds_outputs() {
    let out = bin().args(["bounds", "--table"]).output().unwrap();
    let table = stdout(&out);
    let row = table.lines().find(|l| l.starts_with("2,")).unwrap();
    assert!(row.contains(",1.376643,"));
    assert!(row.contains(",1.466667,"));

    let out = bin().args(["bounds", "--lambda", "3"]).output().unwrap();
    assert_eq!(stdout(&out), "lambda_3 19/12 1.583333\n");

    let out = bin().args(["bounds", "--poa", "2"]).output().unwrap();
    assert!(stdout(&out).contains("poa_2 upper 22/15 1.466667"));
    assert!(stdout(&out).contains("poa_2 lower "));

    let out = bin()
        .args(["bounds", "--lambda-t", "2", "--tol", "1/1000000"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let out = bin()
        .args(["bounds", "--lambda", "2", "--poa", "2"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn dynamics_is_deterministic_and_ends_in_equilibrium() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    write(dir, "f.txt", "alpha 1\n1/4\n1/4\n1/4\n1/4\n");
    let out = run(dir, &["dynamics", "--in", "f.txt", "--log", "log.txt"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), r#"{"bins":[[1,0,2,3]]}"#);
    assert_eq!(
        fs::read_to_string(dir.join("log.txt"))
            .unwrap()
            .lines()
            .count(),
        3
    );

    write(
        dir,
        "i.txt",
        "alpha 1\n3/5\n1/3\n1/4\n2/7\n1/2\n1/6\n5/12\n1/9\n2/11\n",
    );
    let args = [
        "dynamics", "--in", "i.txt", "--policy", "random", "--seed", "42", "--start", "ff",
    ];
    let first = run(dir, &args);
    let second = run(dir, &args);
    assert_eq!(first.stdout, second.stdout);
    fs::write(dir.join("ne.json"), &first.stdout).unwrap();
    let out = run(
        dir,
        &[
            "check",
            "--kind",
            "ne",
            "--in",
            "i.txt",
            "--packing",
            "ne.json",
        ],
    );
    assert_eq!(code(&out), 0);
}
