use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use driftbag::experiment::{rank_reports, run_experiment, to_json, ExperimentConfig, Summary};
use driftbag::generator::{validate_scenario, write_stream_csv, MIN_VALIDATION_SAMPLE};
use driftbag::{parse_scenario, ClassifierKind, GeneratorState};

/// Usage or scenario errors.
const EXIT_USAGE: u8 = 2;
/// Output could not be written.
const EXIT_OUTPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "driftbag", version, about = "Online bagging experiments on imbalanced drifting streams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every scenario x classifier x seed of a config file.
    Run {
        config: PathBuf,
        /// Replace the config's scenarios (repeatable).
        #[arg(long = "scenario")]
        scenarios: Vec<String>,
        /// Replace the config's classifiers (repeatable).
        #[arg(long = "classifier")]
        classifiers: Vec<ClassifierKind>,
        /// Replace the config's seeds (repeatable).
        #[arg(long = "seed")]
        seeds: Vec<u64>,
        #[arg(long)]
        length: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate one stream and dump it as CSV.
    Gen {
        scenario: String,
        #[arg(long, default_value_t = driftbag::generator::scenario::DEFAULT_LENGTH)]
        length: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Destination file; `-` writes to stdout.
        #[arg(long, value_name = "PATH")]
        dump_stream: PathBuf,
    },
    /// Check a scenario's realized class ratio and example types.
    Validate {
        scenario: String,
        #[arg(long, default_value_t = 5_000)]
        sample: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Friedman ranks over the runs of one or more summary files.
    Ranks {
        #[arg(required = true)]
        summaries: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failure with its exit status.
struct Failure(u8, String);

impl Failure {
    fn usage(msg: impl ToString) -> Self {
        Failure(EXIT_USAGE, msg.to_string())
    }

    fn output(path: &Path, e: io::Error) -> Self {
        Failure(EXIT_OUTPUT, format!("cannot write {}: {e}", path.display()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            scenarios,
            classifiers,
            seeds,
            length,
            out,
        } => run(&config, scenarios, classifiers, seeds, length, out),
        Command::Gen {
            scenario,
            length,
            seed,
            dump_stream,
        } => generate(&scenario, length, seed, &dump_stream),
        Command::Validate { scenario, sample, seed } => validate(&scenario, sample, seed),
        Command::Ranks { summaries, out } => ranks(&summaries, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("driftbag: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(
    path: &Path,
    scenarios: Vec<String>,
    classifiers: Vec<ClassifierKind>,
    seeds: Vec<u64>,
    length: Option<u64>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let mut config = ExperimentConfig::load(path).map_err(Failure::usage)?;
    if !scenarios.is_empty() {
        config.scenarios = scenarios;
    }
    if !classifiers.is_empty() {
        config.classifiers = classifiers;
    }
    if !seeds.is_empty() {
        config.seeds = seeds;
    }
    if let Some(n) = length {
        config.stream_length = n;
    }
    if let Some(dir) = out {
        config.output_dir = dir;
    }
    let outcome = run_experiment(&config).map_err(|e| Failure(e.exit_code() as u8, e.to_string()))?;
    println!(
        "{} runs; wrote {} and {}",
        outcome.summary.runs.len(),
        outcome.summary_path.display(),
        outcome.ranks_path.display()
    );
    Ok(())
}

fn generate(scenario: &str, length: u64, seed: u64, dest: &Path) -> Result<(), Failure> {
    let spec = parse_scenario(scenario)
        .map_err(Failure::usage)?
        .with_length(length)
        .with_seed(seed);
    let d = spec.dimensions;
    let stream = GeneratorState::new(spec);
    let written = if dest == Path::new("-") {
        write_stream_csv(io::stdout().lock(), d, stream)
    } else {
        File::create(dest).and_then(|f| {
            let mut w = BufWriter::new(f);
            write_stream_csv(&mut w, d, stream)?;
            w.flush()
        })
    };
    written.map_err(|e| Failure::output(dest, e))
}

fn validate(scenario: &str, sample: usize, seed: u64) -> Result<(), Failure> {
    if sample < MIN_VALIDATION_SAMPLE {
        return Err(Failure::usage(format!("--sample must be at least {MIN_VALIDATION_SAMPLE}")));
    }
    let spec = parse_scenario(scenario).map_err(Failure::usage)?.with_seed(seed);
    let report = validate_scenario(&spec, sample).map_err(Failure::usage)?;
    print!("{}", to_json(&report));
    if report.pass {
        Ok(())
    } else {
        Err(Failure(1, format!("{scenario} does not match its specified profile")))
    }
}

fn ranks(paths: &[PathBuf], out: Option<&Path>) -> Result<(), Failure> {
    let mut runs = Vec::new();
    for p in paths {
        let text = std::fs::read_to_string(p).map_err(|e| Failure::usage(format!("cannot read {}: {e}", p.display())))?;
        let summary: Summary =
            serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{} is not a summary: {e}", p.display())))?;
        runs.extend(summary.runs);
    }
    runs.sort_by(|a, b| (&a.scenario, a.classifier, a.seed).cmp(&(&b.scenario, b.classifier, b.seed)));
    runs.dedup_by(|a, b| a.id() == b.id());
    let json = to_json(&rank_reports(&runs));
    match out {
        Some(p) => std::fs::write(p, json).map_err(|e| Failure::output(p, e)),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}
