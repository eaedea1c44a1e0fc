use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rcslab::circuit::{grid_layout, near_square_grid, GridScheme};
use rcslab::emit_qasm;
use rcslab_bench::amplitudes::{load_samples, write_samples};
use rcslab_bench::config::{ConfigFile, Overrides, Source};
use rcslab_bench::harness::{bench_sweep_to_file, load_circuit, run, score_external, MissingPolicy};
use rcslab_bench::mem::CountingAlloc;
use rcslab_bench::record::{CsvRow, CsvSink};
use rcslab_bench::{AmplitudeTable, HarnessError};

#[global_allocator]
static ALLOC: CountingAlloc = CountingAlloc;

#[derive(Parser)]
#[command(name = "rcslab", version, about = "Random circuit sampling simulator and XEB harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate, sample and score one circuit.
    Run(RunArgs),
    /// Write a generated random circuit as OpenQASM 2.0.
    Generate {
        #[arg(long, value_name = "PATH")]
        rcs_config: PathBuf,
        /// Override the circuit seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output file; stdout when omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print sampled bitstrings, one per line.
    Sample(SampleArgs),
    /// Score a sample file against an amplitude table.
    Xeb {
        /// Bitstrings, one per line.
        #[arg(long, value_name = "PATH")]
        samples: PathBuf,
        /// Ideal amplitudes or probabilities.
        #[arg(long, value_name = "PATH")]
        amplitudes: PathBuf,
        /// Qubit count; defaults to the table's width.
        #[arg(long)]
        n: Option<usize>,
        /// Fail on samples missing from the table instead of scoring them as zero.
        #[arg(long)]
        strict_amplitudes: bool,
    },
    /// Run every spec of a sweep config and write a CSV.
    Bench {
        /// Config with a [sweep] table.
        #[arg(long, value_name = "PATH")]
        rcs_config: PathBuf,
        /// Consolidated results file.
        #[arg(long, value_name = "PATH")]
        csv: PathBuf,
        /// Directory receiving one subdirectory of outputs per run.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        #[command(flatten)]
        run: RunOverrides,
    },
    /// Print a grid layout in the layout text format.
    Layout {
        #[arg(long, requires = "cols", conflicts_with = "n")]
        rows: Option<usize>,
        #[arg(long, requires = "rows")]
        cols: Option<usize>,
        /// Qubit count laid out on the most nearly square grid.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "EFGH")]
        scheme: String,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// OpenQASM 2.0 circuit file.
    #[arg(long, value_name = "PATH")]
    qasm: Option<PathBuf>,
    /// TOML config describing a generated random circuit.
    #[arg(long, value_name = "PATH")]
    rcs_config: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct RunOverrides {
    /// Samples to draw (per trajectory for noisy runs).
    #[arg(long)]
    k: Option<usize>,
    /// Sampling seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Per-gate, per-qubit Pauli error probability; enables noisy trajectories.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Seed of the error stream; defaults to the sampling seed.
    #[arg(long)]
    noise_seed: Option<u64>,
    /// Noisy executions to pool.
    #[arg(long)]
    trajectories: Option<usize>,
}

impl From<RunOverrides> for Overrides {
    fn from(r: RunOverrides) -> Self {
        Overrides {
            k: r.k,
            seed: r.seed,
            epsilon: r.epsilon,
            noise_seed: r.noise_seed,
            trajectories: r.trajectories,
            record_amplitudes: None,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    run: RunOverrides,
    /// Directory for record.json, samples.txt and amplitudes.txt.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// CSV file receiving the result row.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Skip the full amplitude dump.
    #[arg(long)]
    no_amplitudes: bool,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    run: RunOverrides,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn resolve(source: &SourceArgs, ov: Overrides) -> Result<rcslab_bench::RunSpec, HarnessError> {
    match (&source.qasm, &source.rcs_config) {
        (Some(path), None) => ConfigFile::default().run_spec(Source::Qasm(path.clone()), &ov),
        (None, Some(cfg_path)) => {
            let cfg = ConfigFile::load(cfg_path)?;
            cfg.run_spec(Source::Rcs(cfg.rcs_spec()?), &ov)
        }
        _ => Err(HarnessError::Config("give exactly one of --qasm and --rcs-config".into())),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), HarnessError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| HarnessError::io(p, e)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| HarnessError::io("<stdout>", e)),
    }
}

fn dispatch(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Run(args) => {
            let mut ov: Overrides = args.run.into();
            ov.record_amplitudes = args.no_amplitudes.then_some(false);
            let spec = resolve(&args.source, ov)?.with_out_dir(args.out);
            let outcome = run(&spec)?;
            if let Some(csv_path) = &args.csv {
                let file = std::fs::File::create(csv_path).map_err(|e| HarnessError::io(csv_path, e))?;
                let csv_err = |e: csv::Error| HarnessError::io(csv_path, std::io::Error::other(e));
                let mut sink = CsvSink::new(file).map_err(csv_err)?;
                sink.push(&CsvRow::from(&outcome.record)).map_err(csv_err)?;
            }
            let json = serde_json::to_string_pretty(&outcome.record).map_err(|e| HarnessError::Internal(e.to_string()))?;
            write_output(None, &(json + "\n"))
        }
        Command::Generate { rcs_config, seed, output } => {
            let cfg = ConfigFile::load(&rcs_config)?;
            let mut spec = cfg.rcs_spec()?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            let loaded = load_circuit(&Source::Rcs(spec))?;
            write_output(output.as_deref(), &emit_qasm(&loaded.circuit))
        }
        Command::Sample(args) => {
            let spec = resolve(&args.source, args.run.into())?;
            let outcome = run(&spec)?;
            write_output(args.output.as_deref(), &write_samples(outcome.samples.bitstrings(), outcome.samples.n()))
        }
        Command::Xeb { samples, amplitudes, n, strict_amplitudes } => {
            let table = AmplitudeTable::load(&amplitudes)?;
            let (bits, width) = load_samples(&samples)?;
            let n = n.or(width).unwrap_or(table.n());
            let policy = if strict_amplitudes { MissingPolicy::Strict } else { MissingPolicy::Lenient };
            let score = score_external(&bits, &table, n, policy)?;
            if score.missing > 0 {
                eprintln!("warning: {} of {} samples missing from the table were scored as 0", score.missing, bits.len());
            }
            let r = &score.report;
            let doc = serde_json::json!({
                "n": r.n,
                "k": r.k,
                "f_xeb": r.f_xeb,
                "std_dev": r.std_dev,
                "std_error": r.std_error,
                "missing": score.missing,
            });
            write_output(None, &format!("{doc:#}\n"))
        }
        Command::Bench { rcs_config, csv, out, run } => {
            let cfg = ConfigFile::load(&rcs_config)?;
            let specs = cfg.sweep_specs(&run.into())?;
            let results = bench_sweep_to_file(&specs, &csv, out.as_deref())?;
            let failed = results.iter().filter(|r| r.is_err()).count();
            eprintln!("{} runs, {} failed; results in {}", results.len(), failed, csv.display());
            match results.into_iter().find_map(Result::err) {
                Some(first) => Err(first),
                None => Ok(()),
            }
        }
        Command::Layout { rows, cols, n, scheme } => {
            let scheme: GridScheme = scheme.parse().map_err(|e| HarnessError::Config(format!("{e}")))?;
            let (rows, cols) = match (rows, cols, n) {
                (Some(r), Some(c), None) => (r, c),
                (None, None, Some(n)) => near_square_grid(n),
                _ => return Err(HarnessError::Config("give --rows and --cols, or --n".into())),
            };
            let layout = grid_layout(rows, cols, scheme).map_err(|e| HarnessError::Config(e.to_string()))?;
            write_output(None, &layout.to_text())
        }
    }
}
