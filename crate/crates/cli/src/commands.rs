use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use re2nli_core::adapt::{self, AdaptConfig};
use re2nli_core::ingest::{self, DatasetSplit, SplitName};
use re2nli_core::metaclass::{build_matrix, ExclusivityMatrix};
use re2nli_core::select_eval::{self, RePrediction};
use re2nli_core::{packs, DatasetSchema, Error, FeasibilityIndex};

use crate::{
    AdaptArgs, BuildIndexArgs, Command, EvalArgs, MergeArgs, SelectArgs, SplitArgs, StatsArgs,
    VerifyMatrixArgs, EXIT_VALIDATION,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Core(e) => e.code(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: Command) -> Result<u8> {
    match command {
        Command::Adapt(args) => adapt(args),
        Command::BuildIndex(args) => build_index(args),
        Command::Select(args) => select(args),
        Command::Eval(args) => eval(args),
        Command::Merge(args) => merge(args),
        Command::Stats(args) => stats(args),
        Command::VerifyMatrix(args) => return verify_matrix(args),
    }
    .map(|()| 0)
}

fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Core(Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| io_err(path, e))
}

fn load_split(args: &SplitArgs, schema: &DatasetSchema) -> Result<DatasetSplit> {
    let kind = match &args.kind {
        Some(k) => k.parse::<SplitName>().map_err(CliError::Usage)?,
        None => SplitName::infer(&args.split).unwrap_or(SplitName::Test),
    };
    let split = ingest::load_split(&args.split, kind, schema)?;
    log::info!("loaded {} {} instances from {}", split.len(), kind, args.split.display());
    Ok(split)
}

fn write_json<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_err(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| io_err(Path::new("<stdout>"), e)),
    }
}

fn adapt(args: AdaptArgs) -> Result<()> {
    let schema = packs::resolve_schema(&args.schema.schema)?;
    let split = load_split(&args.split, &schema)?;
    let index = match (&args.index, args.no_filter) {
        (Some(path), false) => Some(FeasibilityIndex::load(path, &schema)?),
        (None, true) => None,
        (None, false) => {
            return Err(CliError::Usage(
                "adapt needs --index <file> (from build-index) or --no-filter".into(),
            ))
        }
        (Some(_), true) => unreachable!("clap rejects --index with --no-filter"),
    };
    let labeled = split.instances.iter().all(|i| i.gold_label.is_some());
    if !labeled && !args.no_targets {
        log::info!("split has unlabeled instances; writing pairs without targets");
    }
    let config = AdaptConfig {
        use_filter: !args.no_filter,
        use_metaclass: !args.no_metaclass,
        emit_targets: labeled && !args.no_targets,
    };
    let matrix = build_matrix(&schema);
    let corpus = adapt::adapt_split(&split, &schema, &matrix, index.as_ref(), config)?;
    adapt::write_corpus(&corpus, create(&args.out)?)?;
    log::info!(
        "wrote {} pairs for {} instances to {} ({} with no feasible hypothesis)",
        corpus.len(),
        split.len(),
        args.out.display(),
        corpus.empty_instances.len()
    );
    Ok(())
}

fn build_index(args: BuildIndexArgs) -> Result<()> {
    let schema = packs::resolve_schema(&args.schema.schema)?;
    let split = load_split(&args.split, &schema)?;
    if split.name == SplitName::Test {
        log::warn!("building a feasibility index from a test split");
    }
    let index = re2nli_core::build_index(&split, &schema)?;
    index.save(&args.out)?;
    let empty: Vec<&str> = schema
        .classes
        .iter()
        .filter(|c| index.valid_pairs(c).is_some_and(|s| s.is_empty()))
        .map(String::as_str)
        .collect();
    if !empty.is_empty() {
        log::warn!("classes absent from training data: {}", empty.join(", "));
    }
    log::info!("wrote index to {}", args.out.display());
    Ok(())
}

fn selections(pred: &Path, schema: &DatasetSchema, grouped: bool) -> Result<Vec<RePrediction>> {
    let records = select_eval::load_predictions(pred)?;
    let n = records.len();
    let selected = select_eval::select_all(records, schema, grouped)?;
    log::info!("selected over {} predictions in {} groups", n, selected.len());
    Ok(select_eval::back_map(&selected, schema))
}

fn select(args: SelectArgs) -> Result<()> {
    let schema = packs::resolve_schema(&args.schema.schema)?;
    let predictions = selections(&args.pred, &schema, !args.no_group_selection)?;
    select_eval::write_re_predictions(&predictions, create(&args.out)?)?;
    let abstained = predictions.iter().filter(|p| p.abstained).count();
    log::info!(
        "wrote {} relation predictions to {} ({} abstentions)",
        predictions.len(),
        args.out.display(),
        abstained
    );
    Ok(())
}

enum PredictionFile {
    Pairs,
    Relations,
}

fn sniff(path: &Path) -> Result<PredictionFile> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| {
            Error::MalformedLine {
                line_no: 1,
                reason: e.to_string(),
            }
        })?;
        return Ok(if value.get("pair_id").is_some() {
            PredictionFile::Pairs
        } else {
            PredictionFile::Relations
        });
    }
    Ok(PredictionFile::Pairs)
}

fn eval(args: EvalArgs) -> Result<()> {
    let schema = packs::resolve_schema(&args.schema.schema)?;
    let gold = ingest::load_split(&args.split, SplitName::Test, &schema)?;
    let predictions = match sniff(&args.pred)? {
        PredictionFile::Pairs => selections(&args.pred, &schema, !args.no_group_selection)?,
        PredictionFile::Relations => {
            let file = File::open(&args.pred).map_err(|e| io_err(&args.pred, e))?;
            select_eval::read_re_predictions(file)?
        }
    };
    let report = select_eval::evaluate(&predictions, &gold, &schema, args.include_negative)?;
    log::info!(
        "micro P={:.4} R={:.4} F1={:.4} (tp={} fp={} fn={}, {} abstentions)",
        report.micro_precision,
        report.micro_recall,
        report.micro_f1,
        report.tp,
        report.fp,
        report.fn_,
        report.abstention_count
    );
    write_json(&report, args.out.as_deref())
}

fn merge(args: MergeArgs) -> Result<()> {
    let corpora = args
        .inputs
        .iter()
        .map(adapt::load_corpus)
        .collect::<re2nli_core::Result<Vec<_>>>()?;
    let merged = adapt::merge(corpora, args.prefix_dataset)?;
    adapt::write_corpus(&merged, create(&args.out)?)?;
    log::info!("merged {} files into {} pairs", args.inputs.len(), merged.len());
    Ok(())
}

fn stats(args: StatsArgs) -> Result<()> {
    let schema = packs::resolve_schema(&args.schema.schema)?;
    let split = load_split(&args.split, &schema)?;
    write_json(&ingest::split_stats(&split, &schema), args.out.as_deref())
}

/// Prints PASS/FAIL; a mismatch exits with the validation code.
fn verify_matrix(args: VerifyMatrixArgs) -> Result<u8> {
    let schema = packs::resolve_schema(&args.schema.schema)?;
    let fixture = match &args.fixture {
        Some(path) => {
            let json = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            ExclusivityMatrix::from_fixture_json(&json)?
        }
        None => packs::fixture_matrix(&schema.name)?,
    };
    let built = build_matrix(&schema);
    let mut out = std::io::stdout().lock();
    let write_err = |e| io_err(Path::new("<stdout>"), e);
    if built.classes() != fixture.classes() {
        writeln!(out, "FAIL {}: class lists differ", schema.name).map_err(write_err)?;
        return Ok(EXIT_VALIDATION);
    }
    let diff = built.diff(&fixture);
    if diff.is_empty() {
        writeln!(
            out,
            "PASS {}: {}x{} cells match",
            schema.name,
            built.len(),
            built.len()
        )
        .map_err(write_err)?;
        Ok(0)
    } else {
        writeln!(out, "FAIL {}: {} cell(s) differ", schema.name, diff.len()).map_err(write_err)?;
        for (gold, hyp, rule, fixed) in diff {
            writeln!(out, "  gold={gold} hypothesis={hyp} rule={rule} fixture={fixed}")
                .map_err(write_err)?;
        }
        Ok(EXIT_VALIDATION)
    }
}
