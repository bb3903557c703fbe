use std::path::Path;
use std::process::{Command, Output};

use foursq::decompose::{decompose, Constraint, Strategy};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foursq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn decompose_prints_record_and_human_line() {
    let out = run(&["decompose", "9996", "--constraint", "square", "--natural"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rec: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let [x, y, z, w] = ["x", "y", "z", "w"].map(|k| rec[k].as_i64().unwrap());
    assert_eq!(x * x + y * y + z * z + w * w, 9996);
    assert!(x >= 0 && y >= 0 && z >= 0 && w >= 0);
    let s = rec["s"].as_i64().unwrap();
    assert_eq!(x + 3 * y, s);
    assert!(stderr(&out).starts_with("9996 = "));
}

#[test]
fn decompose_matches_library() {
    for (args, constraint, natural) in [
        (vec!["decompose", "99999", "--constraint", "pow4"], Constraint::PowerOf4, false),
        (vec!["decompose", "12345", "--natural"], Constraint::Square, true),
        (vec!["decompose", "77", "--natural", "--method", "brute"], Constraint::Square, true),
    ] {
        let strategy = if args.contains(&"brute") { Strategy::Brute } else { Strategy::Auto };
        let n: u64 = args[1].parse().unwrap();
        let lib = decompose(n, constraint, natural, strategy).unwrap();
        let out = run(&args);
        assert_eq!(code(&out), 0);
        assert_eq!(
            stdout(&out).trim(),
            serde_json::to_string(&lib.record()).unwrap()
        );
        assert_eq!(stderr(&out).trim(), lib.human_line());
    }
}

#[test]
fn decompose_usage_errors() {
    assert_eq!(code(&run(&["decompose", "0"])), 1);
    assert_eq!(code(&run(&["decompose", "-5"])), 1);
    assert_eq!(code(&run(&["decompose", "abc"])), 1);
    assert_eq!(code(&run(&["decompose", "5", "--constraint", "cube"])), 1);
    assert_eq!(code(&run(&["decompose", "2000000000000000000"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    let out = run(&["decompose", "8", "--constraint", "pow4", "--natural", "--method", "constructive"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn decompose_natural_pow4_exception_fails_with_trace() {
    let out = run(&["decompose", "8", "--constraint", "pow4", "--natural"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("n = 8"), "{}", stderr(&out));
    assert!(stdout(&out).is_empty());
}

#[test]
fn version_flag() {
    let out = run(&["--version"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("library 0.1.0"));
    assert!(text.contains(&format!("schema {}", foursq::SCHEMA_VERSION)));
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(out).trim()).unwrap()
}

#[test]
fn verify_small_range() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.jsonl");
    let out = run(&[
        "verify", "--from", "1", "--to", "20000", "--constraint", "square", "--natural", "--jobs",
        "4", "--chunk", "777", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rep = report(&out);
    assert_eq!(rep["report"]["verified_count"], 20000);
    let lines = std::fs::read_to_string(&path).unwrap();
    assert_eq!(lines.lines().count(), 20000);
}

#[test]
fn verify_pow4_natural_separates_expected_family() {
    let out = run(&[
        "verify", "--from", "1", "--to", "3000", "--constraint", "pow4", "--natural", "--jobs", "2",
    ]);
    // natural entries also fail outside the 2*4^(2r+1) family, e.g. at 13
    assert_eq!(code(&out), 2);
    let rep = report(&out);
    assert_eq!(rep["expected_exceptions"], serde_json::json!([8, 128, 2048]));
    let unexpected = rep["unexpected_failures"].as_array().unwrap();
    assert_eq!(unexpected[0], 13);
    assert!(!unexpected.contains(&serde_json::json!(8)));
    assert!(stderr(&out).contains("expected exceptions"));

    for n in ["8", "128", "2048"] {
        let out = run(&["verify", "--from", n, "--to", n, "--constraint", "pow4", "--natural"]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        assert_eq!(report(&out)["expected_exceptions"][0].as_u64().unwrap().to_string(), n);
    }
}

#[test]
fn verify_usage_and_io_errors() {
    assert_eq!(code(&run(&["verify", "--from", "10", "--to", "5"])), 1);
    assert_eq!(code(&run(&["verify", "--from", "0", "--to", "5"])), 1);
    assert_eq!(code(&run(&["verify", "--from", "1"])), 1);
    let out = run(&[
        "verify", "--from", "1", "--to", "50", "--out", "/nonexistent/dir/out.jsonl",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn verify_resume_gives_same_output() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.jsonl");
    let part = dir.path().join("part.jsonl");
    let cp = dir.path().join("cp.txt");
    let base = ["verify", "--from", "1", "--to", "6000", "--natural", "--chunk", "500"];

    let mut args = base.to_vec();
    args.extend(["--out", full.to_str().unwrap()]);
    assert_eq!(code(&run(&args)), 0);

    // a checkpoint left by an earlier run that stopped at 3000
    let first_half = std::fs::read_to_string(&full).unwrap();
    let kept: String = first_half.lines().take(3500).map(|l| format!("{l}\n")).collect();
    std::fs::write(&part, kept).unwrap();
    write_checkpoint_for(&cp, 3000);

    let mut args = base.to_vec();
    args.extend(["--out", part.to_str().unwrap(), "--checkpoint", cp.to_str().unwrap()]);
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(
        std::fs::read(&full).unwrap(),
        std::fs::read(&part).unwrap()
    );
    assert_eq!(report(&out)["report"]["verified_count"], 6000);

    // a checkpoint for another configuration is refused
    let mut args = vec!["verify", "--from", "1", "--to", "6001", "--natural"];
    args.extend(["--checkpoint", cp.to_str().unwrap()]);
    assert_eq!(code(&run(&args)), 3);
}

fn write_checkpoint_for(path: &Path, last: u64) {
    use foursq::verify::{Checkpoint, MethodHistogram, SweepConfig};
    let cfg = SweepConfig::new(1, 6000, Constraint::Square, true);
    Checkpoint {
        fingerprint: cfg.fingerprint(),
        last,
        verified: last,
        failures: vec![],
        methods: MethodHistogram {
            brute: last,
            constructive: 0,
            recursive: 0,
        },
    }
    .write(path)
    .unwrap();
}

#[test]
fn local_cert_reports() {
    let out = run(&["local-cert", "7"]);
    assert_eq!(code(&out), 0);
    let first: serde_json::Value =
        serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
    assert_eq!(first["prime"], 2);
    assert_eq!(first["represented"], false);
    let out = run(&["local-cert", "11", "--form", "g"]);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&run(&["local-cert", "0"])), 1);
}

#[test]
fn lemma22_scan_lists_gap() {
    let out = run(&["lemma22-scan", "--case", "iii", "--n-bound", "100"]);
    assert_eq!(code(&out), 0);
    let first: serde_json::Value =
        serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
    assert_eq!(first["n"], 1);
    assert_eq!(first["param"], 2);
    assert_eq!(first["value"], 6);
    let out = run(&["lemma22-scan", "--case", "i", "--n-bound", "100"]);
    assert!(stdout(&out).is_empty());
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(!stderr(&out).contains("FAIL"));
    assert!(stdout(&out).lines().count() >= 12);
}
