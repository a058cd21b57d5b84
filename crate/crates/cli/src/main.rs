use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qgh_core::eval::{self, report_emit, EvalReport, FlipStrategy, SeedPolicy};
use qgh_core::qpe::{Evolution, InputStrategy, Mode};
use qgh_core::{FingerprintConfig, HashConfig, Hasher};

mod config;

use config::{parse_formats, resolve, CliError};

#[derive(Parser, Debug)]
#[command(name = "qgh", version, about = "QGH-256 spectral graph hash")]
struct Cli {
    #[command(flatten)]
    hash: HashArgs,

    #[command(subcommand)]
    command: Command,
}

/// Pipeline settings shared by every subcommand.
#[derive(Args, Debug, Clone, Default)]
pub struct HashArgs {
    /// key=value config file; flags override its entries
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Torus side length
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    /// Counting qubits
    #[arg(long, global = true)]
    pub qubits: Option<u32>,
    /// uniform | node:<idx> | ramp
    #[arg(long, global = true)]
    pub input_state: Option<InputStrategy>,
    /// exact | trotter:<n_steps>
    #[arg(long, global = true)]
    pub evolution: Option<Evolution>,
    /// exact | shots
    #[arg(long, global = true)]
    pub mode: Option<Mode>,
    #[arg(long, global = true)]
    pub shots: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Eight comma-separated, strictly increasing heat-trace times
    #[arg(long, global = true)]
    pub taus: Option<FingerprintConfig>,
    /// Direction map permutation id in 0..24
    #[arg(long, global = true)]
    pub direction_map: Option<usize>,
    #[arg(long, global = true)]
    pub start_node: Option<usize>,
}

#[derive(Args, Debug)]
struct MessageArgs {
    /// Message text
    message: Option<String>,
    /// Read the message bytes from a file
    #[arg(long, conflicts_with_all = ["message", "stdin"])]
    file: Option<PathBuf>,
    /// Read the message bytes from standard input
    #[arg(long, conflicts_with = "message")]
    stdin: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the 64-digit hex digest
    Hash(MessageArgs),
    /// Print the heat-trace fingerprint as JSON
    Fingerprint(MessageArgs),
    /// Print the message graph as JSON or DOT
    Graph {
        #[command(flatten)]
        input: MessageArgs,
        #[arg(long)]
        dot: bool,
    },
    /// Print the counting-register distribution (histogram in shot mode)
    Qpe(MessageArgs),
    /// Run an evaluation experiment and write its report
    Eval(EvalArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Experiment {
    Determinism,
    Avalanche,
    Collision,
    Timing,
    Cospectral,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FlipArg {
    OneBit,
    OneChar,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SeedPolicyArg {
    Fixed,
    PerRepeat,
}

#[derive(Args, Debug)]
struct EvalArgs {
    experiment: Experiment,
    /// Directory the reports are written to
    #[arg(long, default_value = "reports")]
    out: PathBuf,
    /// json | csv | both
    #[arg(long, default_value = "both")]
    format: String,
    #[arg(long, default_value_t = 0x5eed)]
    corpus_seed: u64,
    /// Corpus size for determinism and avalanche
    #[arg(long)]
    count: Option<usize>,
    /// Message length in bytes for random corpora
    #[arg(long, default_value_t = 16)]
    length: usize,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, value_enum, default_value_t = SeedPolicyArg::Fixed)]
    seed_policy: SeedPolicyArg,
    #[arg(long, value_enum, default_value_t = FlipArg::OneBit)]
    flip: FlipArg,
    /// Comma-separated message lengths for timing
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000,100000")]
    lengths: Vec<usize>,
    #[arg(long, default_value_t = 9)]
    trials: usize,
    #[arg(long, default_value_t = 6)]
    max_vertices: usize,
    /// Exit with status 1 when the experiment's verdict is a failure
    #[arg(long)]
    strict: bool,
}

fn read_message(args: &MessageArgs) -> Result<Vec<u8>, CliError> {
    if let Some(path) = &args.file {
        return std::fs::read(path).map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())));
    }
    if args.stdin {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| CliError::Runtime(format!("cannot read stdin: {e}")))?;
        return Ok(buf);
    }
    args.message
        .as_ref()
        .map(|m| m.clone().into_bytes())
        .ok_or_else(|| CliError::Usage("provide a MESSAGE, --file PATH or --stdin".into()))
}

fn write_reports(report: &EvalReport, out: &Path, formats: &str) -> Result<Vec<PathBuf>, CliError> {
    let formats = parse_formats(formats)?;
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", out.display())))?;
    let mut written = Vec::new();
    for f in formats {
        let path = out.join(format!("{}.{}", report.experiment, f.extension()));
        std::fs::write(&path, report_emit(report, f)?)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}

fn run_eval(cfg: &HashConfig, args: &EvalArgs) -> Result<EvalReport, CliError> {
    let report = match args.experiment {
        Experiment::Determinism => {
            let msgs = eval::random_messages(args.count.unwrap_or(100), args.length, args.corpus_seed);
            let policy = match args.seed_policy {
                SeedPolicyArg::Fixed => SeedPolicy::Fixed,
                SeedPolicyArg::PerRepeat => SeedPolicy::PerRepeat,
            };
            eval::determinism_test(cfg, &msgs, args.repeats, policy)?
        }
        Experiment::Avalanche => {
            let msgs = eval::random_messages(args.count.unwrap_or(1000), args.length, args.corpus_seed);
            let flip = match args.flip {
                FlipArg::OneBit => FlipStrategy::OneBit { seed: args.corpus_seed },
                FlipArg::OneChar => FlipStrategy::OneChar { seed: args.corpus_seed },
            };
            eval::avalanche_test(cfg, &msgs, flip)?
        }
        Experiment::Collision => eval::collision_scan(cfg, &eval::printable_pairs())?,
        Experiment::Timing => eval::timing_profile(cfg, &args.lengths, args.trials, args.corpus_seed)?,
        Experiment::Cospectral => {
            if args.max_vertices > eval::graphs::MAX_VERTICES {
                return Err(CliError::Usage(format!(
                    "invalid value for --max-vertices: at most {}",
                    eval::graphs::MAX_VERTICES
                )));
            }
            eval::cospectral_test(cfg, args.max_vertices)?
        }
    };
    Ok(report)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = resolve(&cli.hash)?;
    let hasher = Hasher::new(cfg.clone())?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let io = |e: std::io::Error| CliError::Runtime(format!("cannot write output: {e}"));

    match &cli.command {
        Command::Hash(m) => {
            let digest = hasher.hash_bytes(&read_message(m)?)?;
            writeln!(out, "{digest}").map_err(io)?;
        }
        Command::Fingerprint(m) => {
            let fp = hasher.fingerprint_bytes(&read_message(m)?)?;
            writeln!(out, "{}", fp.to_json()).map_err(io)?;
        }
        Command::Graph { input, dot } => {
            let g = hasher.graph_bytes(&read_message(input)?);
            if *dot {
                write!(out, "{}", g.to_dot()).map_err(io)?;
            } else {
                writeln!(out, "{}", g.to_json()).map_err(io)?;
            }
        }
        Command::Qpe(m) => {
            let analysis = hasher.analyze(&hasher.graph_bytes(&read_message(m)?))?;
            let text = match &analysis.histogram {
                Some(h) => h.to_json(),
                None => analysis.distribution.to_json(),
            };
            writeln!(out, "{text}").map_err(io)?;
        }
        Command::Eval(args) => {
            let report = run_eval(&cfg, args)?;
            for path in write_reports(&report, &args.out, &args.format)? {
                writeln!(out, "{}", path.display()).map_err(io)?;
            }
            let summary: Vec<String> = report.summary.iter().map(|(k, v)| format!("{k}={v}")).collect();
            eprintln!(
                "{}: {} ({})",
                report.experiment,
                if report.passed { "pass" } else { "fail" },
                summary.join(", ")
            );
            if args.strict && !report.passed {
                return Err(CliError::Runtime(format!("{} verdict: fail", report.experiment)));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
