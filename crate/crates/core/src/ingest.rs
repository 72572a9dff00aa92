//! Loading, validating and summarizing canonical instance files.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DatasetSchema, RelationInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitName {
    Train,
    Dev,
    Test,
}

impl SplitName {
    /// Guesses the split from a file name (`train.jsonl`, `biored_dev.jsonl`, ...).
    pub fn infer(path: &Path) -> Option<SplitName> {
        let stem = path.file_stem()?.to_str()?.to_ascii_lowercase();
        [
            ("train", SplitName::Train),
            ("dev", SplitName::Dev),
            ("valid", SplitName::Dev),
            ("test", SplitName::Test),
        ]
        .into_iter()
        .find(|(key, _)| stem.contains(key))
        .map(|(_, name)| name)
    }

    pub fn requires_labels(self) -> bool {
        !matches!(self, SplitName::Test)
    }
}

impl fmt::Display for SplitName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitName::Train => "train",
            SplitName::Dev => "dev",
            SplitName::Test => "test",
        })
    }
}

impl FromStr for SplitName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "train" => Ok(SplitName::Train),
            "dev" => Ok(SplitName::Dev),
            "test" => Ok(SplitName::Test),
            other => Err(format!("unknown split name {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSplit {
    pub name: SplitName,
    pub instances: Vec<RelationInstance>,
}

impl DatasetSplit {
    /// Builds a split, enforcing id uniqueness and every instance invariant.
    pub fn new(
        name: SplitName,
        instances: Vec<RelationInstance>,
        schema: &DatasetSchema,
    ) -> Result<Self> {
        let mut ids = HashSet::with_capacity(instances.len());
        for inst in &instances {
            check_instance(inst, name, schema)?;
            if !ids.insert(inst.id.as_str()) {
                return Err(Error::DuplicateId(inst.id.clone()));
            }
        }
        Ok(DatasetSplit { name, instances })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }
}

fn check_instance(inst: &RelationInstance, split: SplitName, schema: &DatasetSchema) -> Result<()> {
    inst.validate(Some(schema))?;
    if inst.gold_label.is_none() && split.requires_labels() {
        return Err(Error::UnlabeledInstance(inst.id.clone()));
    }
    Ok(())
}

pub fn load_split(path: impl AsRef<Path>, name: SplitName, schema: &DatasetSchema) -> Result<DatasetSplit> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_split(file, name, schema).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Parses JSONL from any reader. Blank lines are skipped; line numbers are
/// 1-based.
pub fn read_split<R: Read>(reader: R, name: SplitName, schema: &DatasetSchema) -> Result<DatasetSplit> {
    let mut instances = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::io("<input>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let inst: RelationInstance =
            serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
                line_no: i + 1,
                reason: e.to_string(),
            })?;
        check_instance(&inst, name, schema)?;
        if !ids.insert(inst.id.clone()) {
            return Err(Error::DuplicateId(inst.id));
        }
        instances.push(inst);
    }
    Ok(DatasetSplit { name, instances })
}

pub fn write_split<W: Write>(split: &DatasetSplit, writer: W) -> Result<()> {
    write_jsonl(&split.instances, writer)
}

pub(crate) fn write_jsonl<T: Serialize, W: Write>(items: &[T], writer: W) -> Result<()> {
    let mut out = BufWriter::new(writer);
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
    }
    out.flush().map_err(|e| Error::io("<output>", e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypePairCount {
    pub head_type: String,
    pub tail_type: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatsReport {
    pub total: usize,
    pub unlabeled: usize,
    /// Counts in schema class order; zero-count classes included.
    pub per_class: Vec<(String, usize)>,
    /// Sorted by (head type, tail type).
    pub per_type_pair: Vec<TypePairCount>,
}

pub fn split_stats(split: &DatasetSplit, schema: &DatasetSchema) -> StatsReport {
    let mut class_counts = vec![0usize; schema.num_classes()];
    let mut unlabeled = 0;
    let mut pairs: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for inst in &split.instances {
        match inst.gold_label.as_deref().and_then(|l| schema.class_index(l)) {
            Some(idx) => class_counts[idx] += 1,
            None => unlabeled += 1,
        }
        *pairs
            .entry((inst.head.entity_type.as_str(), inst.tail.entity_type.as_str()))
            .or_default() += 1;
    }
    StatsReport {
        total: split.len(),
        unlabeled,
        per_class: schema.classes.iter().cloned().zip(class_counts).collect(),
        per_type_pair: pairs
            .into_iter()
            .map(|((h, t), count)| TypePairCount {
                head_type: h.to_string(),
                tail_type: t.to_string(),
                count,
            })
            .collect(),
    }
}
