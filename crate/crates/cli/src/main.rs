use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Debug, Parser)]
#[command(name = "re2nli", version, about = "Adapt relation-extraction data to NLI and score NLI predictions")]
struct Cli {
    /// Worker threads for per-instance work (default: all cores). Output is
    /// identical for any value.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Accepted for forward compatibility; the pipeline is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expand a split into premise-hypothesis pairs.
    Adapt(AdaptArgs),
    /// Build a feasibility index from a training split.
    BuildIndex(BuildIndexArgs),
    /// Select relation predictions from pair-level model outputs.
    Select(SelectArgs),
    /// Score predictions against a labeled split.
    Eval(EvalArgs),
    /// Concatenate adapted corpora.
    Merge(MergeArgs),
    /// Per-class and per-type-pair counts for a split.
    Stats(StatsArgs),
    /// Check the rule-built exclusivity matrix against the bundled fixture.
    VerifyMatrix(VerifyMatrixArgs),
}

#[derive(Debug, Args)]
struct SchemaArg {
    /// Bundled pack name (biored, chemprot, ...) or path to a schema JSON file.
    #[arg(long)]
    schema: String,
}

#[derive(Debug, Args)]
struct SplitArgs {
    /// Canonical instance JSONL file.
    #[arg(long)]
    split: PathBuf,
    /// Split kind; inferred from the file name when omitted, falling back to
    /// `test` (labels optional).
    #[arg(long, value_parser = ["train", "dev", "test"])]
    kind: Option<String>,
}

#[derive(Debug, Args)]
struct AdaptArgs {
    #[command(flatten)]
    schema: SchemaArg,
    #[command(flatten)]
    split: SplitArgs,
    /// Feasibility index built from training data.
    #[arg(long, conflicts_with = "no_filter")]
    index: Option<PathBuf>,
    /// Emit a pair for every class.
    #[arg(long)]
    no_filter: bool,
    /// Use neutral instead of contradict between positive classes.
    #[arg(long)]
    no_metaclass: bool,
    /// Leave `target` null even when gold labels are present.
    #[arg(long)]
    no_targets: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BuildIndexArgs {
    #[command(flatten)]
    schema: SchemaArg,
    #[command(flatten)]
    split: SplitArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[command(flatten)]
    schema: SchemaArg,
    /// Prediction JSONL (`pair_id` with `probs` or `generated`).
    #[arg(long)]
    pred: PathBuf,
    /// Keep every entailed class instead of the most confident one.
    #[arg(long)]
    no_group_selection: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    schema: SchemaArg,
    /// Pair-level predictions, or the output of `select`.
    #[arg(long)]
    pred: PathBuf,
    /// Labeled split to score against.
    #[arg(long)]
    split: PathBuf,
    #[arg(long)]
    no_group_selection: bool,
    /// Score the negative class like a positive class.
    #[arg(long)]
    include_negative: bool,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MergeArgs {
    /// Adapted corpus files, merged in the order given.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Namespace ids as `dataset/id` before merging.
    #[arg(long)]
    prefix_dataset: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[command(flatten)]
    schema: SchemaArg,
    #[command(flatten)]
    split: SplitArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyMatrixArgs {
    #[command(flatten)]
    schema: SchemaArg,
    /// Fixture to compare against instead of the bundled one.
    #[arg(long)]
    fixture: Option<PathBuf>,
}

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_IO: u8 = 3;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    if let Some(jobs) = cli.jobs {
        if let Err(err) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            log::warn!("could not size thread pool: {err}");
        }
    }
    if let Some(seed) = cli.seed {
        log::debug!("--seed {seed} ignored: pipeline is deterministic");
    }

    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            let (kind, code) = match &err {
                commands::CliError::Usage(_) => ("usage", EXIT_USAGE),
                commands::CliError::Core(e) => match e.kind() {
                    re2nli_core::ErrorKind::Io => ("io", EXIT_IO),
                    re2nli_core::ErrorKind::Validation => ("validation", EXIT_VALIDATION),
                },
            };
            let line = serde_json::json!({
                "error": err.code(),
                "kind": kind,
                "message": err.to_string(),
            });
            eprintln!("{line}");
            ExitCode::from(code)
        }
    }
}
