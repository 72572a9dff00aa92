//! Prediction parsing, group-based selection, back-mapping to relation
//! labels, and micro-F1 scoring.

mod evaluate;
mod parse;
mod select;

pub use evaluate::{evaluate, f1, ClassScore, Counts, EvalReport};
pub use parse::{parse_nli_label, ParsedLabel};
pub use select::{
    argmax_label, back_map, group_by_instance, load_predictions, read_predictions,
    read_re_predictions, select_all, select_group, write_predictions, write_re_predictions,
    RePrediction, Selection, SelectionResult,
};
