//! Converts relation-extraction datasets into premise-hypothesis corpora for
//! natural language inference, and maps NLI model predictions back to
//! relation labels for scoring.
//!
//! The pipeline, stage by stage:
//!
//! 1. [`ingest`] loads canonical JSONL instance files against a
//!    [`DatasetSchema`](model::DatasetSchema).
//! 2. [`verbalizer`] builds premises (optionally masking head and tail
//!    mentions as `@Type$`) and fills per-class hypothesis templates.
//! 3. [`feasibility`] records which (head type, tail type) pairs each class
//!    was seen with in training data, and drops hypotheses that never were.
//! 4. [`metaclass`] assigns entail / neutral / contradict targets from an
//!    exclusivity matrix.
//! 5. [`adapt`] ties the above together into an adapted corpus.
//! 6. [`select_eval`] picks one relation per instance from pair-level
//!    predictions and computes micro-F1.

pub mod adapt;
pub mod error;
pub mod feasibility;
pub mod ingest;
pub mod metaclass;
pub mod model;
pub mod packs;
pub mod select_eval;
pub mod synthetic;
pub mod verbalizer;

pub use adapt::{adapt_instance, adapt_split, merge, AdaptConfig, AdaptedCorpus};
pub use error::{Error, ErrorKind, Result};
pub use feasibility::{build_index, FeasibilityIndex};
pub use ingest::{load_split, split_stats, DatasetSplit, SplitName, StatsReport};
pub use metaclass::{build_matrix, degrade_matrix, nli_target, ExclusivityMatrix};
pub use model::{
    DatasetSchema, EntityMention, HypothesisTemplate, NliLabel, Payload, PredictionRecord,
    PremiseHypothesisPair, RelationInstance, Span, TypePair,
};
pub use select_eval::{
    back_map, evaluate, parse_nli_label, select_group, EvalReport, ParsedLabel, RePrediction,
    Selection, SelectionResult,
};
pub use verbalizer::{build_premise, fill_hypothesis};
