use std::collections::{HashMap, HashSet};
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use super::select::RePrediction;
use crate::error::{Error, Result};
use crate::ingest::DatasetSplit;
use crate::model::DatasetSchema;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Counts {
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        f1(self.precision(), self.recall())
    }
}

impl Add for Counts {
    type Output = Counts;

    fn add(self, rhs: Counts) -> Counts {
        Counts {
            tp: self.tp + rhs.tp,
            fp: self.fp + rhs.fp,
            fn_: self.fn_ + rhs.fn_,
        }
    }
}

impl AddAssign for Counts {
    fn add_assign(&mut self, rhs: Counts) {
        *self = *self + rhs;
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Harmonic mean with 0/0 defined as 0.
pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScore {
    pub class: String,
    #[serde(flatten)]
    pub counts: Counts,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub micro_precision: f64,
    pub micro_recall: f64,
    pub micro_f1: f64,
    pub per_class: Vec<ClassScore>,
    pub abstention_count: u64,
    pub instances: u64,
    pub include_negative: bool,
}

/// Micro-averaged scoring of relation predictions against a labeled split.
///
/// By default the negative class is not a scoring class: predicting it adds
/// no true or false positive, and a gold negative adds no false negative.
/// With `include_negative` it is scored like any other class. Each class in a
/// multi-class (ungrouped) prediction is scored on its own. Gold instances
/// with no prediction record count as abstentions.
pub fn evaluate(
    predicted: &[RePrediction],
    gold: &DatasetSplit,
    schema: &DatasetSchema,
    include_negative: bool,
) -> Result<EvalReport> {
    let gold_index: HashMap<&str, usize> = gold
        .instances
        .iter()
        .enumerate()
        .map(|(i, inst)| (inst.id.as_str(), i))
        .collect();

    let mut by_instance: Vec<Option<&RePrediction>> = vec![None; gold.len()];
    for pred in predicted {
        let idx = *gold_index
            .get(pred.instance_id.as_str())
            .ok_or_else(|| Error::UnknownInstanceId(pred.instance_id.clone()))?;
        if by_instance[idx].replace(pred).is_some() {
            return Err(Error::DuplicateId(pred.instance_id.clone()));
        }
        for class in &pred.predicted {
            if schema.class_index(class).is_none() {
                return Err(Error::UnknownClass(class.clone()));
            }
        }
    }

    let scored = |class: &str| include_negative || !schema.is_negative(class);
    let mut per_class = vec![Counts::default(); schema.num_classes()];
    let mut abstentions = 0u64;
    let fallback: Vec<String> = schema.negative_class.iter().cloned().collect();

    for (inst, pred) in gold.instances.iter().zip(&by_instance) {
        let gold_label = inst
            .gold_label
            .as_deref()
            .ok_or_else(|| Error::UnlabeledInstance(inst.id.clone()))?;
        let classes: &[String] = match pred {
            Some(p) => {
                if p.abstained {
                    abstentions += 1;
                }
                &p.predicted
            }
            None => {
                abstentions += 1;
                &fallback
            }
        };
        let mut seen = HashSet::new();
        let mut hit = false;
        for class in classes.iter().filter(|c| seen.insert(c.as_str())) {
            if !scored(class) {
                continue;
            }
            let idx = schema.class_index(class).expect("checked above");
            if class == gold_label {
                per_class[idx].tp += 1;
                hit = true;
            } else {
                per_class[idx].fp += 1;
            }
        }
        if scored(gold_label) && !hit {
            let idx = schema.class_index(gold_label).expect("split validated");
            per_class[idx].fn_ += 1;
        }
    }

    let total = per_class.iter().fold(Counts::default(), |acc, c| acc + *c);
    Ok(EvalReport {
        tp: total.tp,
        fp: total.fp,
        fn_: total.fn_,
        micro_precision: total.precision(),
        micro_recall: total.recall(),
        micro_f1: total.f1(),
        per_class: schema
            .classes
            .iter()
            .zip(per_class)
            .map(|(class, counts)| ClassScore {
                class: class.clone(),
                counts,
                precision: counts.precision(),
                recall: counts.recall(),
                f1: counts.f1(),
            })
            .collect(),
        abstention_count: abstentions,
        instances: gold.len() as u64,
        include_negative,
    })
}
