//! `polyw`: polygonality checks, invariants and reports from the shell.
//!
//! Exit codes: 0 affirmative, 1 negative with evidence, 2 inconclusive or
//! not applicable, 3 usage or parse error.

mod check;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use polyw::covers::{double_surface_report, stallings_complete, CoverError, LabeledGraph};
use polyw::invariants::{rho, tn_membership};
use polyw::search::SearchBounds;
use polyw::stats::run_trials_with;
use polyw::whitehead::{equivalent_with, is_diskbusting_with, minimize, DEFAULT_ORBIT_CAP};
use polyw::words::infer_rank;
use polyw::{parse_cyclic, CyclicWord, Executor, PolygonalityCertificate};

use check::{Strategy, DEFAULT_TIME_BUDGET};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot parse word: {0}")]
    Word(#[from] polyw::WordError),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid certificate: {0}")]
    Certificate(#[from] polyw::complex::CertificateParseError),
    #[error("{0}")]
    Cover(#[from] CoverError),
    #[error("{0}")]
    Inconclusive(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Cover(CoverError::Declarative) | CliError::Cover(CoverError::NotPolygonal) => 2,
            CliError::Inconclusive(_) => 2,
            _ => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "polyw", version, about = "Polygonal words in free groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct WordArg {
    /// Word such as "a b a^-1 b^-1" or "a (a^2)^b".
    word: String,
    /// Rank of the free group; inferred from the letters when omitted.
    #[arg(long)]
    rank: Option<u32>,
}

impl WordArg {
    fn parse(&self) -> Result<CyclicWord, CliError> {
        Ok(parse_cyclic(&self.word, self.rank.unwrap_or_else(|| infer_rank(&self.word)))?)
    }
}

#[derive(clap::Args)]
struct SearchArgs {
    /// Largest number of disks.
    #[arg(long, default_value_t = 2)]
    max_disks: usize,
    /// Largest total number of boundary edges (default: 4|w|).
    #[arg(long)]
    max_edges: Option<usize>,
    /// Largest absolute disk power.
    #[arg(long, default_value_t = 2)]
    powers: u32,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_budget: Option<f64>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long)]
    allow_negative_powers: bool,
}

impl SearchArgs {
    fn bounds(&self, w: &CyclicWord) -> SearchBounds {
        let budget = self.time_budget.map_or(DEFAULT_TIME_BUDGET, Duration::from_secs_f64);
        SearchBounds::new(self.max_disks, self.max_edges.unwrap_or(4 * w.len()))
            .with_max_power(self.powers)
            .with_negative_powers(self.allow_negative_powers)
            .with_time_budget(budget)
            .with_jobs(self.jobs)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Decide polygonality; prints a certificate or the evidence as JSON.
    Check {
        #[command(flatten)]
        word: WordArg,
        #[arg(long, value_enum, default_value_t = Strategy::Auto)]
        strategy: Strategy,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print ρ(w) and whether it lies in T_n.
    Rho {
        #[command(flatten)]
        word: WordArg,
        #[arg(long)]
        json: bool,
    },
    /// Whitehead-minimize a word, printing each move.
    Minimize {
        #[command(flatten)]
        word: WordArg,
        #[arg(long)]
        json: bool,
    },
    /// Exit 0 if the word is diskbusting, 1 if not.
    Diskbusting {
        #[command(flatten)]
        word: WordArg,
        #[arg(long, default_value_t = DEFAULT_ORBIT_CAP)]
        orbit_cap: usize,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Exit 0 if two words are related by an automorphism, 1 if not.
    Equivalent {
        first: String,
        second: String,
        #[arg(long)]
        rank: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_ORBIT_CAP)]
        orbit_cap: usize,
    },
    /// Cover degree and doubled-surface Euler characteristic of a certificate.
    Cover {
        certificate: PathBuf,
        /// Print the completed cover as DOT instead.
        #[arg(long)]
        dot: bool,
    },
    /// Monte Carlo statistics of random height-one words.
    Stats {
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        /// Defaults to $POLYW_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// DOT rendering of a certificate's 1-skeleton.
    Render { certificate: PathBuf },
    /// Re-run the certifier on a certificate file.
    Verify { certificate: PathBuf },
}

fn read_certificate(path: &Path) -> Result<PolygonalityCertificate, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    Ok(PolygonalityCertificate::from_json(&text)?)
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn run(cmd: Command) -> Result<u8, CliError> {
    match cmd {
        Command::Check { word, strategy, search, output } => {
            let w = word.parse()?;
            let outcome = check::run(&w, strategy, &search.bounds(&w));
            let json = pretty(&outcome.to_json());
            match output {
                Some(path) => std::fs::write(&path, json + "\n").map_err(|source| CliError::Io { path, source })?,
                None => println!("{json}"),
            }
            match &outcome {
                check::Outcome::Polygonal { strategy, .. } => eprintln!("polygonal ({strategy})"),
                other => eprintln!("{}", other.status()),
            }
            Ok(outcome.exit_code())
        }
        Command::Rho { word, json } => {
            let w = word.parse()?;
            let r = rho(&w);
            let tn = tn_membership(&r).map_err(|e| CliError::Inconclusive(e.to_string()))?;
            if json {
                println!("{}", pretty(&serde_json::json!({"rho": r.pairs(), "tn_certificate": tn})));
            } else {
                println!("{r}");
                match tn {
                    Some(c) => println!("in T_{}: {} cycle(s)", w.rank(), c.cycles.len()),
                    None => println!("not in T_{}", w.rank()),
                }
            }
            Ok(0)
        }
        Command::Minimize { word, json } => {
            let trace = minimize(&word.parse()?);
            if json {
                println!("{}", pretty(&trace));
            } else {
                println!("start: {}", trace.start);
                for step in &trace.steps {
                    println!("{} -> {}", serde_json::to_string(&step.mv).expect("serializable"), step.result);
                }
                println!("final: {} (length {})", trace.final_word, trace.final_word.len());
            }
            Ok(0)
        }
        Command::Diskbusting { word, orbit_cap, jobs } => {
            let w = word.parse()?;
            match is_diskbusting_with(&w, orbit_cap, &Executor::with_jobs(jobs)) {
                Ok(true) => {
                    println!("diskbusting");
                    Ok(0)
                }
                Ok(false) => {
                    println!("not diskbusting");
                    Ok(1)
                }
                Err(e) => Err(CliError::Inconclusive(e.to_string())),
            }
        }
        Command::Equivalent { first, second, rank, orbit_cap } => {
            let rank = rank.unwrap_or_else(|| infer_rank(&first).max(infer_rank(&second)));
            let (u, v) = (parse_cyclic(&first, rank)?, parse_cyclic(&second, rank)?);
            match equivalent_with(&u, &v, orbit_cap, &Executor::default()) {
                Ok(eq) => {
                    println!("{}", if eq { "equivalent" } else { "not equivalent" });
                    Ok(if eq { 0 } else { 1 })
                }
                Err(e) => Err(CliError::Inconclusive(e.to_string())),
            }
        }
        Command::Cover { certificate, dot } => {
            let cert = read_certificate(&certificate)?;
            if dot {
                let s = cert.complex().ok_or(CoverError::Declarative)?.map_err(|_| CoverError::NotPolygonal)?;
                println!("{}", stallings_complete(&LabeledGraph::from_complex(&s)?)?.to_dot());
            } else {
                println!("{}", pretty(&double_surface_report(&cert)?));
            }
            Ok(0)
        }
        Command::Stats { length, samples, seed, format, jobs } => {
            if length < 2 || samples == 0 {
                return Err(CliError::Usage("need --length ≥ 2 and --samples ≥ 1".into()));
            }
            let seed = match seed {
                Some(s) => s,
                None => match std::env::var("POLYW_SEED") {
                    Ok(v) => {
                        v.trim().parse().map_err(|_| CliError::Usage(format!("POLYW_SEED is not an integer: {v}")))?
                    }
                    Err(_) => 0,
                },
            };
            let report = run_trials_with(length, samples, seed, &Executor::with_jobs(jobs));
            match format {
                Format::Csv => print!("{}", report.to_csv()),
                Format::Json => println!("{}", report.to_json()),
            }
            Ok(0)
        }
        Command::Render { certificate } => {
            let cert = read_certificate(&certificate)?;
            let s = cert.complex().ok_or(CoverError::Declarative)?.map_err(|_| CoverError::NotPolygonal)?;
            print!("{}", s.to_dot());
            Ok(0)
        }
        Command::Verify { certificate } => {
            let cert = read_certificate(&certificate)?;
            let ok = cert.verify() && cert.is_polygonal();
            println!("{}", if ok { "valid" } else { "invalid" });
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
