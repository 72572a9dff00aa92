//! Feasible-hypothesis filter: the (head type, tail type) pairs observed with
//! each relation class in training data.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::ingest::DatasetSplit;
use crate::model::{DatasetSchema, TypePair};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityIndex {
    classes: Vec<String>,
    /// Parallel to `classes`.
    pairs: Vec<BTreeSet<TypePair>>,
}

impl FeasibilityIndex {
    pub fn empty(schema: &DatasetSchema) -> Self {
        FeasibilityIndex {
            classes: schema.classes.clone(),
            pairs: vec![BTreeSet::new(); schema.num_classes()],
        }
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn valid_pairs(&self, class: &str) -> Option<&BTreeSet<TypePair>> {
        self.classes
            .iter()
            .position(|c| c == class)
            .map(|i| &self.pairs[i])
    }

    pub fn insert(&mut self, class: &str, pair: TypePair) -> Result<()> {
        let idx = self
            .classes
            .iter()
            .position(|c| c == class)
            .ok_or_else(|| Error::UnknownClass(class.to_string()))?;
        self.pairs[idx].insert(pair);
        Ok(())
    }

    /// Classes whose valid set contains the given type pair, in schema order.
    pub fn feasible_classes(&self, head_type: &str, tail_type: &str) -> Vec<&str> {
        let key = TypePair::new(head_type, tail_type);
        self.classes
            .iter()
            .zip(&self.pairs)
            .filter(|(_, set)| set.contains(&key))
            .map(|(c, _)| c.as_str())
            .collect()
    }

    pub fn is_feasible(&self, class_idx: usize, pair: &TypePair) -> bool {
        self.pairs.get(class_idx).is_some_and(|s| s.contains(pair))
    }

    /// Serializes as a JSON object keyed by class with sorted pair arrays.
    /// Keys are emitted in sorted order so the file diffs cleanly.
    pub fn to_json(&self) -> String {
        let map: BTreeMap<&str, &BTreeSet<TypePair>> = self
            .classes
            .iter()
            .map(String::as_str)
            .zip(&self.pairs)
            .collect();
        let mut out = serde_json::to_string_pretty(&map).expect("index serializes");
        out.push('\n');
        out
    }

    /// Parses an index file against a schema. Classes missing from the file
    /// get empty sets; unknown classes are rejected.
    pub fn from_json(json: &str, schema: &DatasetSchema) -> Result<Self> {
        let map: BTreeMap<String, Vec<TypePair>> = serde_json::from_str(json)?;
        let mut index = FeasibilityIndex::empty(schema);
        for (class, pairs) in map {
            let idx = schema
                .class_index(&class)
                .ok_or_else(|| Error::InvalidIndex(format!("class {class:?} not in schema {}", schema.name)))?;
            index.pairs[idx].extend(pairs);
        }
        Ok(index)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>, schema: &DatasetSchema) -> Result<Self> {
        let path = path.as_ref();
        let json = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&json, schema)
    }
}

/// Aggregates type pairs per gold class. Every instance must be labeled.
pub fn build_index(train: &DatasetSplit, schema: &DatasetSchema) -> Result<FeasibilityIndex> {
    let mut index = FeasibilityIndex::empty(schema);
    for inst in &train.instances {
        let label = inst
            .gold_label
            .as_deref()
            .ok_or_else(|| Error::UnlabeledInstance(inst.id.clone()))?;
        index.insert(label, inst.type_pair())?;
    }
    Ok(index)
}
