use serde::{Deserialize, Serialize};

use crate::model::NliLabel;

/// Label recovered from generated text; `None` when nothing matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParsedLabel {
    Entail,
    Neutral,
    Contradict,
    None,
}

impl ParsedLabel {
    /// Label used for scoring: an unmatched output counts as neutral.
    pub fn effective(self) -> NliLabel {
        match self {
            ParsedLabel::Entail => NliLabel::Entail,
            ParsedLabel::Contradict => NliLabel::Contradict,
            ParsedLabel::Neutral | ParsedLabel::None => NliLabel::Neutral,
        }
    }
}

impl From<NliLabel> for ParsedLabel {
    fn from(label: NliLabel) -> Self {
        match label {
            NliLabel::Entail => ParsedLabel::Entail,
            NliLabel::Neutral => ParsedLabel::Neutral,
            NliLabel::Contradict => ParsedLabel::Contradict,
        }
    }
}

const PREFIXES: [(&str, ParsedLabel); 3] = [
    ("ent", ParsedLabel::Entail),
    ("con", ParsedLabel::Contradict),
    ("neu", ParsedLabel::Neutral),
];

/// Partial string match on the first three letters of each label,
/// case-insensitive, anywhere in the text. The earliest match wins.
pub fn parse_nli_label(text: &str) -> ParsedLabel {
    let lower = text.to_lowercase();
    PREFIXES
        .iter()
        .filter_map(|(prefix, label)| lower.find(prefix).map(|pos| (pos, *label)))
        .min_by_key(|(pos, _)| *pos)
        .map_or(ParsedLabel::None, |(_, label)| label)
}
