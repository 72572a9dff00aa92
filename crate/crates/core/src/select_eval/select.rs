use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::parse::parse_nli_label;
use crate::error::{Error, Result};
use crate::ingest::write_jsonl;
use crate::model::{split_pair_id, DatasetSchema, NliLabel, Payload, PredictionRecord};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    /// Grouped mode: the single most confident entailed class.
    Class(String),
    /// Ungrouped mode: every entailed class, in schema order. May be empty.
    Classes(Vec<String>),
    Abstain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionResult {
    pub instance_id: String,
    pub predicted: Selection,
}

/// Argmax over (entail, neutral, contradict); exact ties go to the earlier
/// label in that order.
pub fn argmax_label(entail: f64, neutral: f64, contradict: f64) -> NliLabel {
    let mut best = (NliLabel::Entail, entail);
    for (label, p) in [(NliLabel::Neutral, neutral), (NliLabel::Contradict, contradict)] {
        if p > best.1 {
            best = (label, p);
        }
    }
    best.0
}

struct Entailed {
    class_idx: usize,
    confidence: Option<f64>,
}

/// Picks the prediction(s) for one instance's group of pair predictions.
pub fn select_group(
    predictions: &[PredictionRecord],
    schema: &DatasetSchema,
    grouped: bool,
) -> Result<SelectionResult> {
    let first = predictions.first().ok_or(Error::EmptyGroup)?;
    let (instance_id, _) = split_pair_id(&first.pair_id, schema)
        .ok_or_else(|| Error::UnresolvablePairId(first.pair_id.clone()))?;

    let mut has_probs = false;
    let mut has_text = false;
    let mut entailed = Vec::new();
    for record in predictions {
        let (inst, class) = split_pair_id(&record.pair_id, schema)
            .ok_or_else(|| Error::UnresolvablePairId(record.pair_id.clone()))?;
        if inst != instance_id {
            return Err(Error::MixedInstanceIds(instance_id.to_string(), inst.to_string()));
        }
        let class_idx = schema.class_index(class).expect("split_pair_id returns schema classes");
        match &record.payload {
            Payload::Probabilities {
                entail,
                neutral,
                contradict,
            } => {
                has_probs = true;
                if argmax_label(*entail, *neutral, *contradict) == NliLabel::Entail {
                    entailed.push(Entailed {
                        class_idx,
                        confidence: Some(*entail),
                    });
                }
            }
            Payload::GeneratedText(text) => {
                has_text = true;
                if parse_nli_label(text).effective() == NliLabel::Entail {
                    entailed.push(Entailed {
                        class_idx,
                        confidence: None,
                    });
                }
            }
        }
    }
    if has_probs && has_text {
        return Err(Error::MixedPayloads);
    }

    entailed.sort_by_key(|e| e.class_idx);
    entailed.dedup_by_key(|e| e.class_idx);
    let predicted = if grouped {
        // highest confidence; equal (or absent) confidence goes to the lowest
        // class index, which is first after the sort above
        let mut best: Option<&Entailed> = None;
        for e in &entailed {
            match best {
                None => best = Some(e),
                Some(b) if e.confidence.unwrap_or(0.0) > b.confidence.unwrap_or(0.0) => best = Some(e),
                _ => {}
            }
        }
        match best {
            Some(e) => Selection::Class(schema.classes[e.class_idx].clone()),
            None => Selection::Abstain,
        }
    } else {
        Selection::Classes(
            entailed
                .iter()
                .map(|e| schema.classes[e.class_idx].clone())
                .collect(),
        )
    };
    Ok(SelectionResult {
        instance_id: instance_id.to_string(),
        predicted,
    })
}

/// Partitions prediction records by instance id, keeping first-appearance
/// order of instances and input order within each group.
pub fn group_by_instance(
    predictions: Vec<PredictionRecord>,
    schema: &DatasetSchema,
) -> Result<Vec<(String, Vec<PredictionRecord>)>> {
    let mut order: Vec<(String, Vec<PredictionRecord>)> = Vec::new();
    let mut slot: HashMap<String, usize> = HashMap::new();
    for record in predictions {
        let (inst, _) = split_pair_id(&record.pair_id, schema)
            .ok_or_else(|| Error::UnresolvablePairId(record.pair_id.clone()))?;
        let idx = match slot.get(inst) {
            Some(&i) => i,
            None => {
                slot.insert(inst.to_string(), order.len());
                order.push((inst.to_string(), Vec::new()));
                order.len() - 1
            }
        };
        order[idx].1.push(record);
    }
    Ok(order)
}

/// Groups and selects over a whole prediction file.
pub fn select_all(
    predictions: Vec<PredictionRecord>,
    schema: &DatasetSchema,
    grouped: bool,
) -> Result<Vec<SelectionResult>> {
    group_by_instance(predictions, schema)?
        .par_iter()
        .map(|(_, group)| select_group(group, schema, grouped))
        .collect()
}

/// Relation-level prediction for one instance after back-mapping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RePrediction {
    pub instance_id: String,
    pub predicted: Vec<String>,
    pub abstained: bool,
}

/// Maps selections to relation labels. An abstention (or an empty ungrouped
/// list) becomes the negative class when the schema has one, and no
/// prediction otherwise.
pub fn back_map(selections: &[SelectionResult], schema: &DatasetSchema) -> Vec<RePrediction> {
    selections
        .iter()
        .map(|s| {
            let (predicted, abstained) = match &s.predicted {
                Selection::Class(c) => (vec![c.clone()], false),
                Selection::Classes(cs) if !cs.is_empty() => (cs.clone(), false),
                Selection::Classes(_) | Selection::Abstain => {
                    (schema.negative_class.iter().cloned().collect(), true)
                }
            };
            RePrediction {
                instance_id: s.instance_id.clone(),
                predicted,
                abstained,
            }
        })
        .collect()
}

pub fn read_predictions<R: Read>(reader: R) -> Result<Vec<PredictionRecord>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::io("<input>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
            line_no: i + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn load_predictions(path: impl AsRef<Path>) -> Result<Vec<PredictionRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_predictions(file)
}

pub fn write_predictions<W: Write>(records: &[PredictionRecord], writer: W) -> Result<()> {
    write_jsonl(records, writer)
}

pub fn write_re_predictions<W: Write>(predictions: &[RePrediction], writer: W) -> Result<()> {
    write_jsonl(predictions, writer)
}

pub fn read_re_predictions<R: Read>(reader: R) -> Result<Vec<RePrediction>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::io("<input>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
            line_no: i + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packs;

    fn p(id: &str, e: f64, n: f64, c: f64) -> PredictionRecord {
        PredictionRecord::probs(id, e, n, c)
    }

    #[test]
    fn single_entail_wins() {
        let s = packs::schema("biored").unwrap();
        let group = [p("d::Bind", 0.9, 0.05, 0.05), p("d::Association", 0.2, 0.7, 0.1)];
        let r = select_group(&group, &s, true).unwrap();
        assert_eq!(r.instance_id, "d");
        assert_eq!(r.predicted, Selection::Class("Bind".into()));
    }

    #[test]
    fn two_entails_grouped_vs_ungrouped() {
        let s = packs::schema("biored").unwrap();
        let group = [
            p("d::Association", 0.6, 0.3, 0.1),
            p("d::Positive_Correlation", 0.8, 0.1, 0.1),
        ];
        assert_eq!(
            select_group(&group, &s, true).unwrap().predicted,
            Selection::Class("Positive_Correlation".into())
        );
        assert_eq!(
            select_group(&group, &s, false).unwrap().predicted,
            Selection::Classes(vec!["Positive_Correlation".into(), "Association".into()])
        );
    }

    #[test]
    fn all_neutral_abstains() {
        let s = packs::schema("biored").unwrap();
        let group = [p("d::Bind", 0.1, 0.8, 0.1), p("d::Association", 0.2, 0.7, 0.1)];
        assert_eq!(select_group(&group, &s, true).unwrap().predicted, Selection::Abstain);
        assert_eq!(
            select_group(&group, &s, false).unwrap().predicted,
            Selection::Classes(vec![])
        );
    }

    #[test]
    fn equal_confidence_goes_to_lowest_class_index() {
        let s = packs::schema("biored").unwrap();
        let group = [p("d::Bind", 0.7, 0.2, 0.1), p("d::Comparison", 0.7, 0.2, 0.1)];
        assert_eq!(
            select_group(&group, &s, true).unwrap().predicted,
            Selection::Class("Comparison".into())
        );
    }

    #[test]
    fn generated_text_breaks_ties_by_class_order() {
        let s = packs::schema("ddi13").unwrap();
        let group = [
            PredictionRecord::generated("d::DDI-mechanism", "Entailment"),
            PredictionRecord::generated("d::DDI-effect", "entail."),
            PredictionRecord::generated("d::DDI-advise", "maybe"),
        ];
        assert_eq!(
            select_group(&group, &s, true).unwrap().predicted,
            Selection::Class("DDI-effect".into())
        );
    }

    #[test]
    fn group_errors() {
        let s = packs::schema("biored").unwrap();
        assert!(matches!(select_group(&[], &s, true), Err(Error::EmptyGroup)));
        let mixed = [p("a::Bind", 0.9, 0.05, 0.05), p("b::Bind", 0.9, 0.05, 0.05)];
        assert!(matches!(select_group(&mixed, &s, true), Err(Error::MixedInstanceIds(..))));
        let payloads = [p("a::Bind", 0.9, 0.05, 0.05), PredictionRecord::generated("a::Comparison", "ent")];
        assert!(matches!(select_group(&payloads, &s, true), Err(Error::MixedPayloads)));
        assert!(matches!(
            select_group(&[p("a::Nope", 1.0, 0.0, 0.0)], &s, true),
            Err(Error::UnresolvablePairId(_))
        ));
    }

    #[test]
    fn argmax_ties_prefer_entail() {
        assert_eq!(argmax_label(0.5, 0.5, 0.0), NliLabel::Entail);
        assert_eq!(argmax_label(0.2, 0.4, 0.4), NliLabel::Neutral);
        assert_eq!(argmax_label(0.1, 0.2, 0.7), NliLabel::Contradict);
    }

    #[test]
    fn back_mapping() {
        let bc5 = packs::schema("bc5cdr").unwrap();
        let ddi = packs::schema("ddi13").unwrap();
        let abstain = [SelectionResult {
            instance_id: "x".into(),
            predicted: Selection::Abstain,
        }];
        assert_eq!(back_map(&abstain, &bc5)[0].predicted, vec!["Not Associated".to_string()]);
        assert!(back_map(&abstain, &bc5)[0].abstained);
        assert!(back_map(&abstain, &ddi)[0].predicted.is_empty());
        let chosen = [SelectionResult {
            instance_id: "x".into(),
            predicted: Selection::Class("DDI-int".into()),
        }];
        assert_eq!(
            back_map(&chosen, &ddi)[0],
            RePrediction {
                instance_id: "x".into(),
                predicted: vec!["DDI-int".into()],
                abstained: false
            }
        );
    }

    #[test]
    fn grouping_keeps_first_appearance_order() {
        let s = packs::schema("gad").unwrap();
        let records = vec![
            p("b::Associated", 1.0, 0.0, 0.0),
            p("a::Associated", 1.0, 0.0, 0.0),
            p("b::Not Associated", 0.0, 1.0, 0.0),
        ];
        let groups = group_by_instance(records, &s).unwrap();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].0, "b");
        assert_eq!(groups[0].1.len(), 2);
    }
}
