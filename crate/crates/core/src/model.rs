//! Domain types shared by every pipeline stage.
//!
//! Character offsets in [`Span`] count Unicode scalar values, not bytes, so
//! files produced by other tooling stay portable.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Separator between instance id and class id inside a pair id.
pub const PAIR_ID_SEPARATOR: &str = "::";

/// Tolerance on the sum of a probability triple.
pub const PROB_SUM_TOLERANCE: f64 = 1e-6;

/// End-exclusive character range into an instance text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }
}

impl From<(usize, usize)> for Span {
    fn from((start, end): (usize, usize)) -> Self {
        Span { start, end }
    }
}

impl From<Span> for (usize, usize) {
    fn from(span: Span) -> Self {
        (span.start, span.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityMention {
    pub surface: String,
    #[serde(rename = "type")]
    pub entity_type: String,
    pub spans: Vec<Span>,
}

impl EntityMention {
    pub fn new(surface: impl Into<String>, entity_type: impl Into<String>, spans: Vec<Span>) -> Self {
        EntityMention {
            surface: surface.into(),
            entity_type: entity_type.into(),
            spans,
        }
    }
}

/// One labeled (or unlabeled) relation example with its head/tail pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationInstance {
    pub id: String,
    pub text: String,
    pub head: EntityMention,
    pub tail: EntityMention,
    #[serde(default)]
    pub gold_label: Option<String>,
    pub dataset: String,
}

impl RelationInstance {
    /// Checks every structural invariant, and label membership when a schema
    /// is supplied.
    pub fn validate(&self, schema: Option<&DatasetSchema>) -> Result<()> {
        let chars: Vec<char> = self.text.chars().collect();
        for entity in [&self.head, &self.tail] {
            let mut prev_end = 0usize;
            for (i, span) in entity.spans.iter().enumerate() {
                if span.is_empty() || span.end > chars.len() {
                    return Err(Error::SpanOutOfBounds(self.id.clone()));
                }
                if i > 0 && span.start < prev_end {
                    return Err(Error::OverlappingSpans(self.id.clone()));
                }
                prev_end = span.end;
                let found: String = chars[span.start..span.end].iter().collect();
                if found != entity.surface {
                    return Err(Error::SpanMismatch {
                        id: self.id.clone(),
                        surface: entity.surface.clone(),
                        found,
                    });
                }
            }
        }
        for h in &self.head.spans {
            if self.tail.spans.iter().any(|t| h.overlaps(t)) {
                return Err(Error::OverlappingSpans(self.id.clone()));
            }
        }
        if self.head.surface == self.tail.surface && self.head.entity_type == self.tail.entity_type {
            return Err(Error::SelfRelation(self.id.clone()));
        }
        if let (Some(schema), Some(label)) = (schema, &self.gold_label) {
            if schema.class_index(label).is_none() {
                return Err(Error::UnknownLabel {
                    id: self.id.clone(),
                    label: label.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn type_pair(&self) -> TypePair {
        TypePair::new(&self.head.entity_type, &self.tail.entity_type)
    }
}

/// Directed (head type, tail type) pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(String, String)", into = "(String, String)")]
pub struct TypePair {
    pub head: String,
    pub tail: String,
}

impl TypePair {
    pub fn new(head: impl Into<String>, tail: impl Into<String>) -> Self {
        TypePair {
            head: head.into(),
            tail: tail.into(),
        }
    }
}

impl From<(String, String)> for TypePair {
    fn from((head, tail): (String, String)) -> Self {
        TypePair { head, tail }
    }
}

impl From<TypePair> for (String, String) {
    fn from(pair: TypePair) -> Self {
        (pair.head, pair.tail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NliLabel {
    Entail,
    Neutral,
    Contradict,
}

impl NliLabel {
    pub const ALL: [NliLabel; 3] = [NliLabel::Entail, NliLabel::Neutral, NliLabel::Contradict];

    /// Integer code used by matrix fixtures: 0 contradict, 1 neutral, 2 entail.
    pub fn code(self) -> u8 {
        match self {
            NliLabel::Contradict => 0,
            NliLabel::Neutral => 1,
            NliLabel::Entail => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(NliLabel::Contradict),
            1 => Some(NliLabel::Neutral),
            2 => Some(NliLabel::Entail),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NliLabel::Entail => "entail",
            NliLabel::Neutral => "neutral",
            NliLabel::Contradict => "contradict",
        }
    }
}

impl fmt::Display for NliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const SUBJ_PLACEHOLDER: &str = "{subj}";
pub const OBJ_PLACEHOLDER: &str = "{obj}";

/// Hypothesis text with optional `{subj}` / `{obj}` placeholders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HypothesisTemplate(pub String);

impl HypothesisTemplate {
    pub fn new(text: impl Into<String>) -> Self {
        HypothesisTemplate(text.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn check(&self) -> std::result::Result<(), String> {
        for ph in [SUBJ_PLACEHOLDER, OBJ_PLACEHOLDER] {
            if self.0.matches(ph).count() > 1 {
                return Err(format!("template {:?} repeats {}", self.0, ph));
            }
        }
        Ok(())
    }
}

/// Per-dataset contract: classes, templates, exclusivity structure, masking.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSchema {
    pub name: String,
    pub classes: Vec<String>,
    #[serde(default)]
    pub negative_class: Option<String>,
    pub templates: BTreeMap<String, HypothesisTemplate>,
    #[serde(default)]
    pub exclusivity_cliques: Vec<Vec<String>>,
    pub mask_entities: bool,
}

impl DatasetSchema {
    pub fn from_json(json: &str) -> Result<Self> {
        let schema: DatasetSchema = serde_json::from_str(json)?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let json = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&json)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Error::InvalidSchema {
            schema: self.name.clone(),
            reason,
        };
        if self.classes.is_empty() {
            return Err(bad("no classes".into()));
        }
        let mut seen = HashSet::new();
        for class in &self.classes {
            if !seen.insert(class.as_str()) {
                return Err(bad(format!("duplicate class {class:?}")));
            }
            match self.templates.get(class) {
                Some(t) => t.check().map_err(bad)?,
                None => return Err(bad(format!("class {class:?} has no template"))),
            }
        }
        if let Some(extra) = self.templates.keys().find(|k| !seen.contains(k.as_str())) {
            return Err(bad(format!("template for unknown class {extra:?}")));
        }
        if let Some(neg) = &self.negative_class {
            if !seen.contains(neg.as_str()) {
                return Err(bad(format!("negative class {neg:?} not in classes")));
            }
        }
        for clique in &self.exclusivity_cliques {
            if clique.len() < 2 {
                return Err(bad(format!("clique {clique:?} has fewer than two members")));
            }
            let mut members = HashSet::new();
            for class in clique {
                if !seen.contains(class.as_str()) {
                    return Err(bad(format!("clique member {class:?} not in classes")));
                }
                if Some(class) == self.negative_class.as_ref() {
                    return Err(bad(format!("clique {clique:?} contains the negative class")));
                }
                if !members.insert(class) {
                    return Err(bad(format!("clique {clique:?} repeats {class:?}")));
                }
            }
        }
        Ok(())
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_index(&self, class: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == class)
    }

    pub fn is_negative(&self, class: &str) -> bool {
        self.negative_class.as_deref() == Some(class)
    }

    pub fn template(&self, class: &str) -> Result<&HypothesisTemplate> {
        self.templates
            .get(class)
            .ok_or_else(|| Error::UnknownClass(class.to_string()))
    }
}

/// One adapted NLI example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PremiseHypothesisPair {
    pub pair_id: String,
    pub instance_id: String,
    pub premise: String,
    pub hypothesis: String,
    pub hypothesis_class: String,
    pub target: Option<NliLabel>,
    pub dataset: String,
}

pub fn pair_id(instance_id: &str, class: &str) -> String {
    let mut id = String::with_capacity(instance_id.len() + PAIR_ID_SEPARATOR.len() + class.len());
    id.push_str(instance_id);
    id.push_str(PAIR_ID_SEPARATOR);
    id.push_str(class);
    id
}

/// Splits a pair id into (instance id, class id), matching the longest schema
/// class that terminates it.
pub fn split_pair_id<'a>(pair_id: &'a str, schema: &DatasetSchema) -> Option<(&'a str, &'a str)> {
    schema
        .classes
        .iter()
        .filter(|c| {
            pair_id.len() > c.len() + PAIR_ID_SEPARATOR.len()
                && pair_id.ends_with(c.as_str())
                && pair_id[..pair_id.len() - c.len()].ends_with(PAIR_ID_SEPARATOR)
        })
        .max_by_key(|c| c.len())
        .map(|c| {
            let cut = pair_id.len() - c.len();
            (&pair_id[..cut - PAIR_ID_SEPARATOR.len()], &pair_id[cut..])
        })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Probabilities {
        entail: f64,
        neutral: f64,
        contradict: f64,
    },
    GeneratedText(String),
}

/// Model output for one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPrediction", into = "RawPrediction")]
pub struct PredictionRecord {
    pub pair_id: String,
    pub payload: Payload,
}

impl PredictionRecord {
    pub fn probs(pair_id: impl Into<String>, entail: f64, neutral: f64, contradict: f64) -> Self {
        PredictionRecord {
            pair_id: pair_id.into(),
            payload: Payload::Probabilities {
                entail,
                neutral,
                contradict,
            },
        }
    }

    pub fn generated(pair_id: impl Into<String>, text: impl Into<String>) -> Self {
        PredictionRecord {
            pair_id: pair_id.into(),
            payload: Payload::GeneratedText(text.into()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Payload::Probabilities {
            entail,
            neutral,
            contradict,
        } = self.payload
        {
            let bad = |reason: &str| Error::InvalidPrediction {
                pair_id: self.pair_id.clone(),
                reason: reason.to_string(),
            };
            if [entail, neutral, contradict]
                .iter()
                .any(|p| !(0.0..=1.0).contains(p))
            {
                return Err(bad("probability outside [0, 1]"));
            }
            if (entail + neutral + contradict - 1.0).abs() > PROB_SUM_TOLERANCE {
                return Err(bad("probabilities do not sum to 1"));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RawPrediction {
    pair_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probs: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generated: Option<String>,
}

impl TryFrom<RawPrediction> for PredictionRecord {
    type Error = String;

    fn try_from(raw: RawPrediction) -> std::result::Result<Self, String> {
        let payload = match (raw.probs, raw.generated) {
            (Some([e, n, c]), None) => Payload::Probabilities {
                entail: e,
                neutral: n,
                contradict: c,
            },
            (None, Some(text)) => Payload::GeneratedText(text),
            (Some(_), Some(_)) => return Err("record has both `probs` and `generated`".into()),
            (None, None) => return Err("record has neither `probs` nor `generated`".into()),
        };
        let record = PredictionRecord {
            pair_id: raw.pair_id,
            payload,
        };
        record.validate().map_err(|e| e.to_string())?;
        Ok(record)
    }
}

impl From<PredictionRecord> for RawPrediction {
    fn from(record: PredictionRecord) -> Self {
        match record.payload {
            Payload::Probabilities {
                entail,
                neutral,
                contradict,
            } => RawPrediction {
                pair_id: record.pair_id,
                probs: Some([entail, neutral, contradict]),
                generated: None,
            },
            Payload::GeneratedText(text) => RawPrediction {
                pair_id: record.pair_id,
                probs: None,
                generated: Some(text),
            },
        }
    }
}
