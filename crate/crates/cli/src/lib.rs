//! Command-line front end. Every run writes one output file (CSV or JSON)
//! and one JSON manifest into `--out`; every output row carries the
//! manifest id.
//!
//! Exit codes: 0 success, 1 usage error, 2 verification failure, 3 resource
//! abort.

mod args;
mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;
use latpoly::io::{CsvTable, OutputRecord, RunManifest};
use latpoly::Error;

pub use args::{Cli, Cmd, Common, Format, VerifyCmd};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// What a command produced.
pub struct Outcome {
    pub table: CsvTable,
    /// Human-readable lines for stdout.
    pub lines: Vec<String>,
    pub rigor: Vec<String>,
    pub seeds: Vec<u64>,
    /// False when any verification failed.
    pub verified: bool,
}

pub enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let threads = cli
        .common
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return EXIT_USAGE;
        }
    };
    pool.install(|| execute(&cli, argv, threads))
}

fn execute(cli: &Cli, argv: Vec<String>, threads: usize) -> i32 {
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis());
    let clock = Instant::now();
    let outcome = match commands::dispatch(cli) {
        Ok(o) => o,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            return EXIT_USAGE;
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            return match e {
                Error::ResourceLimit { .. } => EXIT_RESOURCE,
                _ => EXIT_USAGE,
            };
        }
    };
    let mut manifest = RunManifest::new(&cli.cmd.name(), argv, cli.config());
    manifest.animal_convention = cli.common.animal_convention.map(|c| c.name().to_string());
    manifest.seeds = outcome.seeds.clone();
    manifest.threads = threads;
    manifest.started_unix_ms = started;

    let out: &PathBuf = &cli.common.out;
    let ext = match cli.common.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let file = out.join(format!("{}-{}.{ext}", cli.cmd.name().replace(' ', "-"), manifest.id));
    let body = match cli.common.format {
        Format::Csv => outcome.table.to_csv(&manifest.id),
        Format::Json => serde_json::to_string_pretty(&outcome.table.to_json(&manifest.id))
            .map(|s| s + "\n")
            .map_err(|e| Error::Io(e.to_string())),
    };
    let written = body.and_then(|b| {
        std::fs::create_dir_all(out)?;
        std::fs::write(&file, b)?;
        manifest.outputs.push(OutputRecord {
            path: file.display().to_string(),
            rigor: outcome.rigor.clone(),
        });
        manifest.elapsed_ms = clock.elapsed().as_millis();
        manifest.write(out)
    });
    // a closed stdout (e.g. piped into `head`) is not an error
    let mut stdout = std::io::stdout().lock();
    for l in &outcome.lines {
        let _ = writeln!(stdout, "{l}");
    }
    match written {
        Ok(m) => {
            let _ = writeln!(stdout, "manifest {}", m.display());
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    }
    if outcome.verified {
        EXIT_OK
    } else {
        EXIT_VERIFY
    }
}
