//! Command-line front end: parameter inspection, file encode/decode,
//! verification, repair scenarios, and bandwidth sweeps.
//!
//! Exit codes are a stable scripting contract: 0 success, 2 parameter error,
//! 3 verification failure, 4 I/O error.

mod cmds;
mod shard_file;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn param(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            code: 4,
            message: message.into(),
        }
    }
}

impl From<coopmsr::Error> for CliError {
    fn from(e: coopmsr::Error) -> Self {
        CliError::param(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "coopmsr",
    version,
    about = "Hadamard MSR erasure coding with cooperative multi-failure repair"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Show the code and repair-scheme parameters for (n, k, q, h).
    Params {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: u16,
        #[arg(long)]
        h: usize,
        /// Emit the summary as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Encode a file into n shard files.
    Encode {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: u16,
        /// Failure count the shards should later support; sets the instance
        /// count (omit for single-instance shards).
        #[arg(long)]
        h: Option<usize>,
        /// Instance parameter l (instances = 2l+1); alternative to --h.
        #[arg(long)]
        ell: Option<usize>,
        /// Input file.
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        /// Output directory for shard_NN.hmsr files.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Rebuild the original file from any k shard files.
    Decode {
        /// Output file.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Shard files (at least k).
        #[arg(required = true)]
        shards: Vec<PathBuf>,
    },
    /// Cross-check shard files against the code's parity equations.
    Verify {
        /// Shard files (at least k+1 for a meaningful check).
        #[arg(required = true)]
        shards: Vec<PathBuf>,
    },
    /// Simulate failures and repair them cooperatively; prints the report as JSON.
    Repair {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: u16,
        /// Expected failure count (defaults to the size of --erased).
        #[arg(long)]
        h: Option<usize>,
        /// Instance parameter l; checked against the one derived from h.
        #[arg(long)]
        ell: Option<usize>,
        /// Nodes to erase, e.g. --erased 0,1,2 (omit for a no-op repair).
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        erased: Option<Vec<usize>>,
        /// Helper override, e.g. --helpers 3,4,5 (default: lowest k+1 survivors).
        #[arg(long, value_delimiter = ',')]
        helpers: Option<Vec<usize>>,
        /// Seed for the deterministic random data stream.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Repair existing shard files from this directory instead of seeded data.
        #[arg(long, value_name = "DIR")]
        r#in: Option<PathBuf>,
        /// Write the restored shard files here.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Print only the JSON report (suppress the human summary on stderr).
        #[arg(long)]
        json: bool,
        /// Write every transferred message as one JSON line to this file.
        #[arg(long, value_name = "FILE")]
        transcript: Option<PathBuf>,
    },
    /// Sweep (n, k, h) points, repairing once per point; prints CSV.
    Bench {
        /// n values, e.g. --n 6,8,10.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        h: Vec<usize>,
        /// Field modulus for all points (default: smallest prime >= 2n+1).
        #[arg(long)]
        q: Option<u16>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(raw) = std::env::var("COOPMSR_THREADS") {
        let threads: usize = raw
            .parse()
            .map_err(|_| CliError::param(format!("COOPMSR_THREADS={raw} is not a number")))?;
        if threads > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .map_err(|e| CliError::param(format!("thread pool: {e}")))?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Params { n, k, q, h, json } => cmds::params(n, k, q, h, json),
        Command::Encode {
            n,
            k,
            q,
            h,
            ell,
            r#in,
            out,
        } => cmds::encode(n, k, q, h, ell, &r#in, &out),
        Command::Decode { out, shards } => cmds::decode(&out, &shards),
        Command::Verify { shards } => cmds::verify(&shards),
        Command::Repair {
            n,
            k,
            q,
            h,
            ell,
            erased,
            helpers,
            seed,
            r#in,
            out,
            json,
            transcript,
        } => cmds::repair(cmds::RepairArgs {
            n,
            k,
            q,
            h,
            ell,
            erased: erased.unwrap_or_default(),
            helpers,
            seed,
            input: r#in,
            out,
            json,
            transcript,
        }),
        Command::Bench { n, k, h, q, seed } => cmds::bench(&n, &k, &h, q, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {}", e.message);
        return ExitCode::from(e.code);
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
