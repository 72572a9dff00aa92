//! Instance-to-pair expansion, corpus serialization and corpus merging.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::FeasibilityIndex;
use crate::ingest::{write_jsonl, DatasetSplit};
use crate::metaclass::ExclusivityMatrix;
use crate::model::{pair_id, DatasetSchema, NliLabel, PremiseHypothesisPair, RelationInstance};
use crate::verbalizer::{build_premise, fill_hypothesis};

/// Pipeline switches. The defaults run the full method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptConfig {
    pub use_filter: bool,
    /// When false, contradictions between positive classes are replaced by
    /// neutral; negative-class contradictions stay.
    pub use_metaclass: bool,
    pub emit_targets: bool,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        AdaptConfig {
            use_filter: true,
            use_metaclass: true,
            emit_targets: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AdaptedCorpus {
    pub pairs: Vec<PremiseHypothesisPair>,
    /// Instances for which the filter left no feasible class. They produce no
    /// pairs and end up as abstentions downstream.
    pub empty_instances: Vec<String>,
}

impl AdaptedCorpus {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn target_for(
    matrix: &ExclusivityMatrix,
    schema: &DatasetSchema,
    gold: usize,
    hyp: usize,
    use_metaclass: bool,
) -> NliLabel {
    let label = matrix.cell(gold, hyp);
    if use_metaclass || label != NliLabel::Contradict {
        return label;
    }
    let is_neg = |i: usize| schema.is_negative(&matrix.classes()[i]);
    if is_neg(gold) || is_neg(hyp) {
        label
    } else {
        NliLabel::Neutral
    }
}

/// Expands one instance into premise-hypothesis pairs, one per candidate class
/// in schema order.
pub fn adapt_instance(
    instance: &RelationInstance,
    schema: &DatasetSchema,
    matrix: &ExclusivityMatrix,
    index: Option<&FeasibilityIndex>,
    config: AdaptConfig,
) -> Result<Vec<PremiseHypothesisPair>> {
    let index = match (config.use_filter, index) {
        (true, Some(index)) => Some(index),
        (false, None) => None,
        (true, None) => return Err(Error::Config("filtering enabled but no index supplied".into())),
        (false, Some(_)) => return Err(Error::Config("index supplied but filtering disabled".into())),
    };
    if matrix.classes() != schema.classes.as_slice() {
        return Err(Error::InvalidMatrix(format!(
            "matrix classes do not match schema {}",
            schema.name
        )));
    }
    let gold = if config.emit_targets {
        let label = instance
            .gold_label
            .as_deref()
            .ok_or_else(|| Error::UnlabeledInstance(instance.id.clone()))?;
        Some(
            schema
                .class_index(label)
                .ok_or_else(|| Error::UnknownLabel {
                    id: instance.id.clone(),
                    label: label.to_string(),
                })?,
        )
    } else {
        None
    };

    let type_pair = instance.type_pair();
    let premise = build_premise(instance, schema)?;
    let mut pairs = Vec::new();
    for (h, class) in schema.classes.iter().enumerate() {
        if let Some(index) = index {
            if !index.is_feasible(h, &type_pair) {
                continue;
            }
        }
        let template = schema.template(class)?;
        pairs.push(PremiseHypothesisPair {
            pair_id: pair_id(&instance.id, class),
            instance_id: instance.id.clone(),
            premise: premise.clone(),
            hypothesis: fill_hypothesis(template, instance, schema),
            hypothesis_class: class.clone(),
            target: gold.map(|g| target_for(matrix, schema, g, h, config.use_metaclass)),
            dataset: instance.dataset.clone(),
        });
    }
    Ok(pairs)
}

/// Adapts every instance of a split. Work is spread over the rayon pool; the
/// output keeps input order.
pub fn adapt_split(
    split: &DatasetSplit,
    schema: &DatasetSchema,
    matrix: &ExclusivityMatrix,
    index: Option<&FeasibilityIndex>,
    config: AdaptConfig,
) -> Result<AdaptedCorpus> {
    let groups: Vec<Vec<PremiseHypothesisPair>> = split
        .instances
        .par_iter()
        .map(|inst| {
            adapt_instance(inst, schema, matrix, index, config).map_err(|e| Error::InInstance {
                id: inst.id.clone(),
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut corpus = AdaptedCorpus::default();
    for (inst, group) in split.instances.iter().zip(groups) {
        if group.is_empty() {
            corpus.empty_instances.push(inst.id.clone());
        }
        corpus.pairs.extend(group);
    }
    if !corpus.empty_instances.is_empty() {
        log::warn!(
            "{} instance(s) have no feasible hypothesis and will abstain",
            corpus.empty_instances.len()
        );
    }
    Ok(corpus)
}

fn prefixed(dataset: &str, id: &str) -> String {
    format!("{dataset}/{id}")
}

/// Concatenates corpora in order. With `prefix_dataset`, instance and pair ids
/// are namespaced as `dataset/id` first.
pub fn merge(corpora: Vec<AdaptedCorpus>, prefix_dataset: bool) -> Result<AdaptedCorpus> {
    let mut out = AdaptedCorpus::default();
    let mut seen = HashSet::new();
    for corpus in corpora {
        for mut pair in corpus.pairs {
            if prefix_dataset {
                pair.instance_id = prefixed(&pair.dataset, &pair.instance_id);
                pair.pair_id = pair_id(&pair.instance_id, &pair.hypothesis_class);
            }
            if !seen.insert(pair.pair_id.clone()) {
                return Err(Error::DuplicatePairId(pair.pair_id));
            }
            out.pairs.push(pair);
        }
        out.empty_instances.extend(corpus.empty_instances);
    }
    Ok(out)
}

pub fn write_corpus<W: Write>(corpus: &AdaptedCorpus, writer: W) -> Result<()> {
    write_jsonl(&corpus.pairs, writer)
}

pub fn save_corpus(corpus: &AdaptedCorpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_corpus(corpus, file)
}

pub fn read_corpus<R: Read>(reader: R) -> Result<AdaptedCorpus> {
    let mut pairs = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::io("<input>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let pair: PremiseHypothesisPair =
            serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
                line_no: i + 1,
                reason: e.to_string(),
            })?;
        if pair.pair_id != pair_id(&pair.instance_id, &pair.hypothesis_class) {
            return Err(Error::MalformedLine {
                line_no: i + 1,
                reason: format!("pair_id {:?} is not instance_id::hypothesis_class", pair.pair_id),
            });
        }
        pairs.push(pair);
    }
    Ok(AdaptedCorpus {
        pairs,
        empty_instances: Vec::new(),
    })
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<AdaptedCorpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(file)
}
