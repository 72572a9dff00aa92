//! Bundled schema packs and exclusivity-matrix fixtures for the eight
//! supported datasets.

use std::path::Path;

use crate::error::{Error, Result};
use crate::metaclass::ExclusivityMatrix;
use crate::model::DatasetSchema;

struct Pack {
    name: &'static str,
    schema: &'static str,
    matrix: &'static str,
}

macro_rules! pack {
    ($name:literal) => {
        Pack {
            name: $name,
            schema: include_str!(concat!("../data/schemas/", $name, ".json")),
            matrix: include_str!(concat!("../data/matrices/", $name, ".json")),
        }
    };
}

const PACKS: &[Pack] = &[
    pack!("bc5cdr"),
    pack!("biored"),
    pack!("biored_novel"),
    pack!("chemprot"),
    pack!("ddi13"),
    pack!("gad"),
    pack!("retacred"),
    pack!("semeval"),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PACKS.iter().map(|p| p.name)
}

fn find(name: &str) -> Result<&'static Pack> {
    let key = name.to_ascii_lowercase().replace('-', "_");
    PACKS
        .iter()
        .find(|p| p.name == key)
        .ok_or_else(|| Error::UnknownSchema(name.to_string()))
}

pub fn schema(name: &str) -> Result<DatasetSchema> {
    DatasetSchema::from_json(find(name)?.schema)
}

/// Hand-encoded matrix fixture shipped with a pack.
pub fn fixture_matrix(name: &str) -> Result<ExclusivityMatrix> {
    ExclusivityMatrix::from_fixture_json(find(name)?.matrix)
}

/// Resolves a schema argument: an existing file path wins, otherwise the
/// argument is looked up among the bundled packs.
pub fn resolve_schema(name_or_path: &str) -> Result<DatasetSchema> {
    let path = Path::new(name_or_path);
    if path.is_file() {
        DatasetSchema::load(path)
    } else {
        schema(name_or_path)
    }
}
