mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirgram::boundary::EntropyUnit;
use dirgram::synth::{SynthKind, SynthSpec};

use crate::config::{OutputFormat, Overrides, RunConfig, SmoothingDefault, SmoothingName};
use crate::error::{CliError, CliResult};

/// Reading-direction asymmetry of grapheme streams.
#[derive(Parser)]
#[command(name = "dirgram", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Directional Δ with paired bootstrap intervals for every (corpus, n, smoothing).
    Analyze(AnalyzeArgs),
    /// Original against within-sentence shuffled Δ.
    ShuffleControl(RunArgs),
    /// Held-out per-sentence direction classification.
    Predict(RunArgs),
    /// Word-initial and word-final grapheme diagnostics and rank-frequency curves.
    Boundary(BoundaryArgs),
    /// Write a seeded synthetic plain-text corpus.
    Synth(SynthArgs),
    /// Merge the JSON reports in a directory into one Markdown document.
    Report(ReportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// n-gram orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', value_enum)]
    smoothing: Option<Vec<SmoothingName>>,
    /// Base seed; every per-cell seed is derived from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Bootstrap replicates.
    #[arg(long = "bootstrap-B")]
    bootstrap_b: Option<usize>,
    /// Interval level is 1 - alpha.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Number of shuffle seeds (shuffle-control).
    #[arg(long)]
    shuffle_seeds: Option<usize>,
    /// Keep whole sentences up to this many graphemes per corpus.
    #[arg(long)]
    max_graphemes: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', value_enum)]
    format: Option<Vec<OutputFormat>>,
}

impl RunArgs {
    fn load(&self, default: SmoothingDefault) -> CliResult<RunConfig> {
        let overrides = Overrides {
            n: self.n.clone(),
            smoothing: self.smoothing.clone(),
            seed: self.seed,
            bootstrap_replicates: self.bootstrap_b,
            alpha: self.alpha,
            train_fraction: self.train_fraction,
            shuffle_seeds: self.shuffle_seeds,
            max_graphemes: self.max_graphemes,
            out: self.out.clone(),
            formats: self.format.clone(),
        };
        RunConfig::load(self.config.as_deref(), &overrides, default)
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Also write the LTR and RTL count tables under <out>/counts.
    #[arg(long)]
    dump_counts: bool,
}

#[derive(Args)]
struct BoundaryArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Report entropies in bits instead of nats.
    #[arg(long)]
    bits: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    UniformIid,
    MarkovBiased,
    ZipfWords,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 20)]
    vocab_size: usize,
    #[arg(long, default_value_t = 5000)]
    sentences: usize,
    /// Shortest sentence, in graphemes (words for zipf-words).
    #[arg(long, default_value_t = 5)]
    min_length: usize,
    #[arg(long, default_value_t = 15)]
    max_length: usize,
    #[arg(long, default_value_t = 0.9)]
    bias: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Corpus file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory holding earlier reports; report.md is written there.
    #[arg(long, default_value = "reports")]
    out: PathBuf,
}

fn init_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("DIRGRAM_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            CliError::Config(format!(
                "DIRGRAM_THREADS must be a positive integer, got `{value}`"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the worker pool: {e}")))
}

fn announce(paths: &[PathBuf]) {
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    match cli.command {
        Command::Analyze(args) => {
            let cfg = args.run.load(SmoothingDefault::Both)?;
            let rendered = commands::analyze(&cfg, args.dump_counts)?;
            announce(&report::emit(&cfg.output, &rendered)?);
        }
        Command::ShuffleControl(args) => {
            let cfg = args.load(SmoothingDefault::Both)?;
            announce(&report::emit(
                &cfg.output,
                &commands::shuffle_control(&cfg)?,
            )?);
        }
        Command::Predict(args) => {
            let cfg = args.load(SmoothingDefault::LaplaceOnly)?;
            announce(&report::emit(&cfg.output, &commands::predict(&cfg)?)?);
        }
        Command::Boundary(args) => {
            let cfg = args.run.load(SmoothingDefault::Both)?;
            let unit = if args.bits {
                EntropyUnit::Bits
            } else {
                EntropyUnit::Nats
            };
            announce(&report::emit(
                &cfg.output,
                &commands::boundary(&cfg, unit)?,
            )?);
        }
        Command::Synth(args) => {
            let spec = SynthSpec {
                kind: match args.kind {
                    KindArg::UniformIid => SynthKind::UniformIid,
                    KindArg::MarkovBiased => SynthKind::MarkovBiased,
                    KindArg::ZipfWords => SynthKind::ZipfWords,
                },
                vocab_size: args.vocab_size,
                sentences: args.sentences,
                min_length: args.min_length,
                max_length: args.max_length,
                bias_strength: args.bias,
                seed: args.seed,
            };
            spec.validate()
                .map_err(|e| CliError::Config(e.to_string()))?;
            announce(&[commands::synth(&spec, &args.out)?]);
        }
        Command::Report(args) => announce(&[commands::report(&args.out)?]),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dirgram: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
