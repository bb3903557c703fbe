//! `foursq`: find, verify and explain restricted four-square decompositions.
//!
//! Machine output is JSON lines on stdout; human-readable lines go to
//! stderr. Exit codes: 0 success, 1 usage error, 2 search or check failure,
//! 3 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use foursq::decompose::{
    decompose, lemma22_scan, Constraint, Strategy, TernaryAnomaly, TernaryCase,
};
use foursq::forms::{NamedForms, F, G, H};
use foursq::local::local_certificate;
use foursq::selftest::{all_pass, run_selftest};
use foursq::verify::{is_natural_pow4_exception, sweep, SweepConfig, SweepMethod};
use foursq::{Error, SCHEMA_VERSION};

const EXIT_USAGE: u8 = 1;
const EXIT_FAILURE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "foursq", version = VERSION, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

// must match SCHEMA_VERSION; checked by a test below
const VERSION: &str = concat!("library ", env!("CARGO_PKG_VERSION"), ", schema 1");

#[derive(Subcommand)]
enum Command {
    /// Decompose one integer.
    Decompose {
        n: u64,
        #[arg(long, value_enum, default_value_t = ConstraintArg::Square)]
        constraint: ConstraintArg,
        /// Require x, y, z, w >= 0.
        #[arg(long)]
        natural: bool,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// Certify every integer in a range.
    Verify {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, value_enum, default_value_t = ConstraintArg::Square)]
        constraint: ConstraintArg,
        #[arg(long)]
        natural: bool,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        chunk: u64,
        #[arg(long, value_enum, default_value_t = SweepMethodArg::Search)]
        method: SweepMethodArg,
        /// Resume from and update this checkpoint file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Write one JSON line per certificate to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Local (2-adic and 5-adic) representability of n by a ternary form.
    LocalCert {
        n: u64,
        #[arg(long, value_enum, default_value_t = FormArg::F)]
        form: FormArg,
    },
    /// List parameters for which 10n - p^2 is not represented by
    /// x^2 + 10y^2 + 10z^2.
    Lemma22Scan {
        #[arg(long, value_enum, default_value_t = CaseArg::All)]
        case: CaseArg,
        #[arg(long, default_value_t = 100)]
        n_bound: u64,
        #[arg(long)]
        param_bound: Option<u64>,
    },
    /// Run the built-in consistency checks.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstraintArg {
    Square,
    Pow4,
}

impl From<ConstraintArg> for Constraint {
    fn from(c: ConstraintArg) -> Self {
        match c {
            ConstraintArg::Square => Constraint::Square,
            ConstraintArg::Pow4 => Constraint::PowerOf4,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Brute,
    Constructive,
}

impl From<MethodArg> for Strategy {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => Strategy::Auto,
            MethodArg::Brute => Strategy::Brute,
            MethodArg::Constructive => Strategy::Constructive,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepMethodArg {
    Search,
    Theorem,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    F,
    G,
    H,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    I,
    Ii,
    Iii,
    All,
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Counterexample { .. } => EXIT_FAILURE,
        Error::Io(_) | Error::CorruptCheckpoint { .. } | Error::CheckpointMismatch { .. } => {
            EXIT_IO
        }
        _ => EXIT_USAGE,
    }
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_for(&err))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Decompose {
            n,
            constraint,
            natural,
            method,
        } => cmd_decompose(n, constraint.into(), natural, method.into()),
        Command::Verify {
            from,
            to,
            constraint,
            natural,
            jobs,
            chunk,
            method,
            checkpoint,
            out,
        } => {
            let mut cfg = SweepConfig::new(from, to, constraint.into(), natural);
            cfg.jobs = jobs.unwrap_or_else(|| {
                std::thread::available_parallelism().map_or(1, |p| p.get())
            });
            cfg.chunk = chunk;
            cfg.method = match method {
                SweepMethodArg::Search => SweepMethod::Search,
                SweepMethodArg::Theorem => SweepMethod::Theorem,
            };
            cfg.checkpoint_path = checkpoint;
            cfg.output_path = out;
            cmd_verify(&cfg)
        }
        Command::LocalCert { n, form } => {
            let form = match form {
                FormArg::F => F,
                FormArg::G => G,
                FormArg::H => H,
            };
            match local_certificate(&form, n) {
                Ok(reports) => {
                    for r in &reports {
                        println!("{}", json!(r));
                        eprintln!(
                            "p = {}: {} (mod {}) {}",
                            r.prime,
                            if r.represented { "represented" } else { "not represented" },
                            r.modulus,
                            r.note
                        );
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Lemma22Scan {
            case,
            n_bound,
            param_bound,
        } => {
            let cases: Vec<TernaryCase> = match case {
                CaseArg::I => vec![TernaryCase::I],
                CaseArg::Ii => vec![TernaryCase::Ii],
                CaseArg::Iii => vec![TernaryCase::Iii],
                CaseArg::All => TernaryCase::ALL.to_vec(),
            };
            for case in cases {
                let found: Vec<TernaryAnomaly> = match lemma22_scan(case, n_bound, param_bound) {
                    Ok(v) => v,
                    Err(e) => return fail(e),
                };
                for a in &found {
                    println!("{}", json!(a));
                }
                eprintln!("case {}: {} anomalies up to n = {n_bound}", case.label(), found.len());
            }
            ExitCode::SUCCESS
        }
        Command::Selftest => {
            let results = run_selftest(&NamedForms::default());
            for r in &results {
                println!("{}", json!(r));
                eprintln!(
                    "{:<4} {:<20} {}",
                    if r.pass { "ok" } else { "FAIL" },
                    r.name,
                    r.detail
                );
            }
            if all_pass(&results) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILURE)
            }
        }
    }
}

fn cmd_decompose(n: u64, constraint: Constraint, natural: bool, strategy: Strategy) -> ExitCode {
    match decompose(n, constraint, natural, strategy) {
        Ok(cert) => {
            println!("{}", json!(cert.record()));
            eprintln!("{}", cert.human_line());
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn cmd_verify(cfg: &SweepConfig) -> ExitCode {
    if let Err(e) = cfg.validate() {
        return fail(e);
    }
    let report = match sweep(cfg) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let expected_family = cfg.constraint == Constraint::PowerOf4 && cfg.natural;
    let (expected, unexpected): (Vec<u64>, Vec<u64>) = report
        .failure_ns()
        .into_iter()
        .partition(|&n| expected_family && is_natural_pow4_exception(n));
    println!(
        "{}",
        json!({
            "schema": SCHEMA_VERSION,
            "report": report,
            "expected_exceptions": expected,
            "unexpected_failures": unexpected,
        })
    );
    eprintln!(
        "verified {} of [{}, {}] in {:.2}s ({:.0} n/s); methods: brute {}, constructive {}, recursive {}",
        report.verified_count,
        report.from,
        report.last,
        report.elapsed_secs,
        report.throughput,
        report.methods.brute,
        report.methods.constructive,
        report.methods.recursive
    );
    if !expected.is_empty() {
        eprintln!("expected exceptions (2*4^(2r+1)): {expected:?}");
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        for f in report.failures.iter().filter(|f| unexpected.contains(&f.n)) {
            eprintln!("FAILED n = {}: {}", f.n, f.trace);
        }
        ExitCode::from(EXIT_FAILURE)
    }
}
