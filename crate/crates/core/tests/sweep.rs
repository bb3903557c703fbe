use std::fs;

use foursq::decompose::Constraint;
use foursq::verify::{sweep, sweep_collect, Checkpoint, SweepConfig, SweepMethod};
use foursq::Error;

fn config(to: u64) -> SweepConfig {
    let mut cfg = SweepConfig::new(1, to, Constraint::Square, true);
    cfg.chunk = 1000;
    cfg
}

#[test]
fn output_independent_of_jobs_and_chunk() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (jobs, chunk) in [(1, 1000), (3, 777), (8, 64)] {
        let mut cfg = config(30_000);
        cfg.jobs = jobs;
        cfg.chunk = chunk;
        cfg.output_path = Some(dir.path().join(format!("out{jobs}.jsonl")));
        let report = sweep(&cfg).unwrap();
        assert!(report.failures.is_empty());
        outputs.push((report, fs::read(cfg.output_path.unwrap()).unwrap()));
    }
    for (report, bytes) in &outputs[1..] {
        assert!(report.same_outcome(&outputs[0].0));
        assert_eq!(bytes, &outputs[0].1);
    }
}

#[test]
fn theorem_method_sweep() {
    for constraint in [Constraint::Square, Constraint::PowerOf4] {
        let mut cfg = config(20_000);
        cfg.constraint = constraint;
        cfg.natural = constraint == Constraint::Square;
        cfg.method = SweepMethod::Theorem;
        cfg.jobs = 4;
        let (report, records) = sweep_collect(&cfg).unwrap();
        assert!(report.failures.is_empty());
        assert_eq!(records.len(), 20_000);
        assert!(report.methods.constructive > 0 && report.methods.recursive > 0);
    }
}

#[test]
fn interrupted_sweep_resumes_to_identical_result() {
    let dir = tempfile::tempdir().unwrap();
    let mut full = config(12_000);
    full.jobs = 2;
    full.output_path = Some(dir.path().join("full.jsonl"));
    let reference = sweep(&full).unwrap();

    let mut cfg = full.clone();
    cfg.output_path = Some(dir.path().join("resumed.jsonl"));
    cfg.checkpoint_path = Some(dir.path().join("cp"));
    cfg.halt_after = Some(5000);
    let halted = sweep(&cfg).unwrap();
    assert!(!halted.is_complete());
    assert!(halted.last >= 5000 && halted.last < 12_000);
    let cp = Checkpoint::read(cfg.checkpoint_path.as_ref().unwrap()).unwrap().unwrap();
    assert_eq!(cp.last, halted.last);
    assert_eq!(cp.verified, halted.last);

    // simulate output written past the checkpoint before the crash
    let mut text = fs::read_to_string(cfg.output_path.as_ref().unwrap()).unwrap();
    text.push_str("{\"n\":999999,\"x\":0,\"y\":0,\"z\":0,\"w\":0,\"s\":0,\"kind\":\"square\",\"method\":\"brute\"}\n");
    fs::write(cfg.output_path.as_ref().unwrap(), text).unwrap();

    cfg.halt_after = None;
    cfg.jobs = 5;
    let resumed = sweep(&cfg).unwrap();
    assert!(resumed.same_outcome(&reference));
    assert_eq!(
        fs::read(full.output_path.unwrap()).unwrap(),
        fs::read(cfg.output_path.unwrap()).unwrap()
    );
}

#[test]
fn resumed_failures_keep_traces() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = SweepConfig::new(1, 3000, Constraint::PowerOf4, true);
    cfg.chunk = 100;
    let reference = sweep(&cfg).unwrap();
    cfg.checkpoint_path = Some(dir.path().join("cp"));
    cfg.halt_after = Some(1000);
    sweep(&cfg).unwrap();
    cfg.halt_after = None;
    let resumed = sweep(&cfg).unwrap();
    assert!(resumed.same_outcome(&reference));
    assert!(resumed.failure_ns().contains(&8));
}

#[test]
fn checkpoint_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp");
    let mut cfg = config(2000);
    cfg.checkpoint_path = Some(path.clone());
    sweep(&cfg).unwrap();

    let mut other = cfg.clone();
    other.to = 2001;
    assert!(matches!(sweep(&other), Err(Error::CheckpointMismatch { .. })));

    fs::write(&path, "not a checkpoint").unwrap();
    assert!(matches!(sweep(&cfg), Err(Error::CorruptCheckpoint { .. })));

    let fp = cfg.fingerprint();
    fs::write(&path, format!("{fp:016x}\n5000\n10\n")).unwrap();
    assert!(matches!(sweep(&cfg), Err(Error::CorruptCheckpoint { .. })));
}

#[test]
fn completed_checkpoint_is_a_no_op() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(3000);
    cfg.checkpoint_path = Some(dir.path().join("cp"));
    cfg.output_path = Some(dir.path().join("out.jsonl"));
    let first = sweep(&cfg).unwrap();
    let bytes = fs::read(cfg.output_path.as_ref().unwrap()).unwrap();
    let second = sweep(&cfg).unwrap();
    assert!(second.same_outcome(&first));
    assert_eq!(fs::read(cfg.output_path.unwrap()).unwrap(), bytes);
}
