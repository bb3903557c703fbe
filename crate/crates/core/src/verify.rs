//! Range verification: every `n` in an interval gets a certificate, found
//! by the canonical exhaustive search accelerated with a two-square bitmap.
//!
//! Work is split into fixed-size chunks processed in parallel; results are
//! merged in ascending `n`, so output and report do not depend on the
//! number of workers. Progress is checkpointed after each batch of chunks.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{check_n, is_power_of_4};
use crate::decompose::{
    search, theorem13, theorem14, verify_certificate, CertificateRecord, Constraint, SearchSpec,
    SearchTrace, TwoSquareTest,
};
use crate::error::{Error, Result};

/// Default cap on sieve size, in bits.
pub const SIEVE_BIT_CAP: u64 = 1 << 33;

/// Bitmap of `{z^2 + w^2 <= limit}`.
#[derive(Clone, Debug)]
pub struct TwoSquareSieve {
    limit: u64,
    words: Vec<u64>,
}

impl TwoSquareSieve {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    #[inline]
    pub fn contains(&self, n: u64) -> bool {
        assert!(n <= self.limit, "{n} beyond sieve limit {}", self.limit);
        self.words[(n >> 6) as usize] >> (n & 63) & 1 == 1
    }
}

impl TwoSquareTest for TwoSquareSieve {
    #[inline]
    fn is_sum_of_two_squares(&self, n: u64) -> bool {
        self.contains(n)
    }
}

pub fn build_sieve(limit: u64) -> Result<TwoSquareSieve> {
    build_sieve_capped(limit, SIEVE_BIT_CAP)
}

pub fn build_sieve_capped(limit: u64, cap_bits: u64) -> Result<TwoSquareSieve> {
    if limit >= cap_bits {
        return Err(Error::CapExceeded {
            what: "two-square sieve",
            value: limit as u128 + 1,
            cap: cap_bits as u128,
        });
    }
    let mut words = vec![0u64; (limit / 64 + 1) as usize];
    let mut z = 0u64;
    while z * z <= limit {
        let mut w = z;
        loop {
            let v = z * z + w * w;
            if v > limit {
                break;
            }
            words[(v >> 6) as usize] |= 1 << (v & 63);
            w += 1;
        }
        z += 1;
    }
    Ok(TwoSquareSieve { limit, words })
}

/// How each `n` is certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMethod {
    /// Canonical exhaustive search (identical to `brute_force`).
    Search,
    /// The constructions, where one exists for the constraint.
    Theorem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepConfig {
    pub from: u64,
    pub to: u64,
    pub constraint: Constraint,
    pub natural: bool,
    pub jobs: usize,
    pub chunk: u64,
    pub method: SweepMethod,
    pub checkpoint_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    /// Stop after the chunk containing this `n` completes. Simulates an
    /// interruption; not part of the configuration fingerprint.
    pub halt_after: Option<u64>,
}

impl SweepConfig {
    pub fn new(from: u64, to: u64, constraint: Constraint, natural: bool) -> Self {
        SweepConfig {
            from,
            to,
            constraint,
            natural,
            jobs: 1,
            chunk: 10_000,
            method: SweepMethod::Search,
            checkpoint_path: None,
            output_path: None,
            halt_after: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_n(self.from)?;
        check_n(self.to)?;
        if self.from > self.to {
            return Err(Error::Precondition(format!(
                "empty range: from {} > to {}",
                self.from, self.to
            )));
        }
        if self.jobs == 0 || self.chunk == 0 {
            return Err(Error::Precondition("jobs and chunk must be at least 1".into()));
        }
        Ok(())
    }

    /// FNV-1a over the fields that determine the results.
    pub fn fingerprint(&self) -> u64 {
        let canon = format!(
            "from={};to={};constraint={:?};natural={};method={:?}",
            self.from, self.to, self.constraint, self.natural, self.method
        );
        canon.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
        })
    }

    fn spec(&self) -> SearchSpec {
        SearchSpec::for_constraint(self.constraint, self.natural)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MethodHistogram {
    pub brute: u64,
    pub constructive: u64,
    pub recursive: u64,
}

impl MethodHistogram {
    fn count(&mut self, tag: &str) {
        match tag {
            "brute" => self.brute += 1,
            "constructive" => self.constructive += 1,
            _ => self.recursive += 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepFailure {
    pub n: u64,
    pub trace: SearchTrace,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub from: u64,
    pub to: u64,
    /// Last `n` processed; equals `to` unless the run was halted.
    pub last: u64,
    pub verified_count: u64,
    pub failures: Vec<SweepFailure>,
    pub methods: MethodHistogram,
    pub elapsed_secs: f64,
    pub throughput: f64,
}

impl SweepReport {
    /// Equality ignoring timing.
    pub fn same_outcome(&self, other: &SweepReport) -> bool {
        self.from == other.from
            && self.to == other.to
            && self.last == other.last
            && self.verified_count == other.verified_count
            && self.failures == other.failures
            && self.methods == other.methods
    }

    pub fn is_complete(&self) -> bool {
        self.last == self.to
    }

    pub fn failure_ns(&self) -> Vec<u64> {
        self.failures.iter().map(|f| f.n).collect()
    }
}

/// `n = 2 * 4^(2r+1)`: the only partition is `(2*4^r)^2 + (2*4^r)^2`, so
/// no natural decomposition has `x + 3y` a power of 4.
pub fn is_natural_pow4_exception(n: u64) -> bool {
    n % 8 == 0 && is_power_of_4((n / 8) as i128).is_some_and(|k| k % 2 == 0)
}

/// Progress record: fingerprint, last completed `n`, verified count, then
/// the failing `n` and the method histogram so a resumed run reproduces the
/// full report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub fingerprint: u64,
    pub last: u64,
    pub verified: u64,
    pub failures: Vec<u64>,
    pub methods: MethodHistogram,
}

impl Checkpoint {
    pub fn to_text(&self) -> String {
        let failures: Vec<String> = self.failures.iter().map(u64::to_string).collect();
        format!(
            "{:016x}\n{}\n{}\nfailures={}\nmethods={},{},{}\n",
            self.fingerprint,
            self.last,
            self.verified,
            failures.join(","),
            self.methods.brute,
            self.methods.constructive,
            self.methods.recursive
        )
    }

    pub fn from_text(text: &str, path: &Path) -> Result<Checkpoint> {
        let corrupt = |reason: &str| Error::CorruptCheckpoint {
            path: path.display().to_string(),
            reason: reason.to_string(),
        };
        let lines: Vec<&str> = text.lines().collect();
        if lines.len() < 3 {
            return Err(corrupt("expected at least three lines"));
        }
        let fingerprint =
            u64::from_str_radix(lines[0].trim(), 16).map_err(|_| corrupt("bad fingerprint"))?;
        let last = lines[1].trim().parse().map_err(|_| corrupt("bad last n"))?;
        let verified = lines[2]
            .trim()
            .parse()
            .map_err(|_| corrupt("bad verified count"))?;
        let mut failures = Vec::new();
        let mut methods = MethodHistogram::default();
        for line in &lines[3..] {
            if let Some(list) = line.strip_prefix("failures=") {
                failures = list
                    .split(',')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse().map_err(|_| corrupt("bad failure list")))
                    .collect::<Result<_>>()?;
            } else if let Some(counts) = line.strip_prefix("methods=") {
                let v: Vec<u64> = counts
                    .split(',')
                    .map(|s| s.parse().map_err(|_| corrupt("bad method counts")))
                    .collect::<Result<_>>()?;
                let [brute, constructive, recursive] = v[..] else {
                    return Err(corrupt("expected three method counts"));
                };
                methods = MethodHistogram {
                    brute,
                    constructive,
                    recursive,
                };
            } else if !line.trim().is_empty() {
                return Err(corrupt("unrecognised line"));
            }
        }
        Ok(Checkpoint {
            fingerprint,
            last,
            verified,
            failures,
            methods,
        })
    }

    pub fn read(path: &Path) -> Result<Option<Checkpoint>> {
        match fs::read_to_string(path) {
            Ok(text) => Checkpoint::from_text(&text, path).map(Some),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, self.to_text())?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

enum Outcome {
    Verified(CertificateRecord),
    Failed(SweepFailure),
}

fn certify_one(n: u64, cfg: &SweepConfig, sieve: &TwoSquareSieve) -> Outcome {
    let spec = cfg.spec();
    let constructive = match (cfg.method, cfg.constraint, cfg.natural) {
        (SweepMethod::Search, ..) | (_, Constraint::PowerOf4, true) => None,
        (SweepMethod::Theorem, Constraint::Square, _) => Some(theorem13(n)),
        (SweepMethod::Theorem, Constraint::PowerOf4, false) => Some(theorem14(n)),
    };
    let found = match constructive {
        Some(Ok(mut cert)) => {
            cert.natural = cfg.natural;
            Ok(cert)
        }
        Some(Err(_)) | None => search(n, spec, sieve),
    };
    match found {
        Ok(cert) if verify_certificate(&cert) => Outcome::Verified(cert.record()),
        Ok(_) => Outcome::Failed(SweepFailure {
            n,
            trace: SearchTrace::default(),
        }),
        Err(trace) => Outcome::Failed(SweepFailure { n, trace }),
    }
}

fn process_chunk(lo: u64, hi: u64, cfg: &SweepConfig, sieve: &TwoSquareSieve) -> Vec<Outcome> {
    (lo..=hi).map(|n| certify_one(n, cfg, sieve)).collect()
}

/// Runs the sweep, streaming certificate records to `sink` in ascending
/// `n`.
pub fn sweep_with_sink(
    cfg: &SweepConfig,
    mut sink: impl FnMut(&CertificateRecord) -> Result<()>,
) -> Result<SweepReport> {
    cfg.validate()?;
    let started = Instant::now();
    let fingerprint = cfg.fingerprint();
    let sieve = build_sieve(cfg.to)?;

    let mut last = cfg.from - 1;
    let mut verified = 0u64;
    let mut failures: Vec<SweepFailure> = Vec::new();
    let mut methods = MethodHistogram::default();

    if let Some(path) = &cfg.checkpoint_path {
        if let Some(cp) = Checkpoint::read(path)? {
            if cp.fingerprint != fingerprint {
                return Err(Error::CheckpointMismatch {
                    path: path.display().to_string(),
                });
            }
            if cp.last < last || cp.last > cfg.to {
                return Err(Error::CorruptCheckpoint {
                    path: path.display().to_string(),
                    reason: format!("last n {} outside the configured range", cp.last),
                });
            }
            last = cp.last;
            verified = cp.verified;
            methods = cp.methods;
            // traces are recomputed; the search is deterministic
            failures = cp
                .failures
                .iter()
                .map(|&n| match certify_one(n, cfg, &sieve) {
                    Outcome::Failed(f) => f,
                    Outcome::Verified(_) => SweepFailure {
                        n,
                        trace: SearchTrace::default(),
                    },
                })
                .collect();
        }
    }
    let resumed_from = last;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    let batch = cfg.jobs * 4;

    'outer: while last < cfg.to {
        let mut chunks = Vec::with_capacity(batch);
        let mut lo = last + 1;
        while chunks.len() < batch && lo <= cfg.to {
            let hi = lo.saturating_add(cfg.chunk - 1).min(cfg.to);
            chunks.push((lo, hi));
            lo = hi + 1;
        }
        let results: Vec<Vec<Outcome>> = pool.install(|| {
            chunks
                .par_iter()
                .map(|&(lo, hi)| process_chunk(lo, hi, cfg, &sieve))
                .collect()
        });
        for (&(_, hi), outcomes) in chunks.iter().zip(results) {
            for outcome in outcomes {
                match outcome {
                    Outcome::Verified(rec) => {
                        methods.count(&rec.method);
                        verified += 1;
                        sink(&rec)?;
                    }
                    Outcome::Failed(f) => failures.push(f),
                }
            }
            last = hi;
            if cfg.halt_after.is_some_and(|h| hi >= h) {
                write_checkpoint(cfg, fingerprint, last, verified, &failures, &methods)?;
                break 'outer;
            }
        }
        write_checkpoint(cfg, fingerprint, last, verified, &failures, &methods)?;
    }

    let elapsed = started.elapsed().as_secs_f64();
    let processed = (last - resumed_from) as f64;
    Ok(SweepReport {
        from: cfg.from,
        to: cfg.to,
        last,
        verified_count: verified,
        failures,
        methods,
        elapsed_secs: elapsed,
        throughput: if elapsed > 0.0 { processed / elapsed } else { 0.0 },
    })
}

fn write_checkpoint(
    cfg: &SweepConfig,
    fingerprint: u64,
    last: u64,
    verified: u64,
    failures: &[SweepFailure],
    methods: &MethodHistogram,
) -> Result<()> {
    let Some(path) = &cfg.checkpoint_path else {
        return Ok(());
    };
    Checkpoint {
        fingerprint,
        last,
        verified,
        failures: failures.iter().map(|f| f.n).collect(),
        methods: methods.clone(),
    }
    .write(path)
}

/// Runs the sweep, writing JSON lines to `cfg.output_path` when set. On
/// resume the output file is first truncated to the checkpointed prefix.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let Some(out_path) = &cfg.output_path else {
        return sweep_with_sink(cfg, |_| Ok(()));
    };
    let resume_last = match &cfg.checkpoint_path {
        Some(p) => Checkpoint::read(p)?.map(|cp| cp.last),
        None => None,
    };
    let file = match resume_last {
        Some(last) => truncate_output(out_path, last)?,
        None => File::create(out_path)?,
    };
    let mut writer = BufWriter::new(file);
    let report = sweep_with_sink(cfg, |rec| {
        serde_json::to_writer(&mut writer, rec).map_err(std::io::Error::from)?;
        writer.write_all(b"\n")?;
        Ok(())
    })?;
    writer.flush()?;
    Ok(report)
}

/// Keeps lines with `n <= last`, leaving the file open for appending.
fn truncate_output(path: &Path, last: u64) -> Result<File> {
    let mut kept = Vec::new();
    if path.exists() {
        let reader = BufReader::new(File::open(path)?);
        for line in reader.lines() {
            let line = line?;
            let rec: CertificateRecord = serde_json::from_str(&line).map_err(|e| {
                Error::CorruptCheckpoint {
                    path: path.display().to_string(),
                    reason: format!("unreadable output line: {e}"),
                }
            })?;
            if rec.n <= last {
                kept.push(line);
            }
        }
    }
    let mut file = OpenOptions::new()
        .create(true)
        .write(true)
        .truncate(true)
        .open(path)?;
    for line in kept {
        writeln!(file, "{line}")?;
    }
    Ok(file)
}

/// Runs the sweep and returns every record in memory.
pub fn sweep_collect(cfg: &SweepConfig) -> Result<(SweepReport, Vec<CertificateRecord>)> {
    let mut records = Vec::new();
    let report = sweep_with_sink(cfg, |rec| {
        records.push(rec.clone());
        Ok(())
    })?;
    Ok((report, records))
}
