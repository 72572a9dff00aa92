//! Exclusivity matrices: NLI targets indexed by (gold class, hypothesis class).
//!
//! A matrix is derived from three rules. The diagonal entails. A negative
//! class contradicts every positive class in both directions. Members of the
//! same exclusivity clique contradict each other. Everything else is neutral.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DatasetSchema, NliLabel};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExclusivityMatrix {
    classes: Vec<String>,
    cells: Vec<Vec<NliLabel>>,
}

#[derive(Serialize, Deserialize)]
struct FixtureFile {
    classes: Vec<String>,
    cells: Vec<Vec<u8>>,
}

impl ExclusivityMatrix {
    /// Builds a matrix from explicit cells, checking shape and the diagonal
    /// and contradiction-symmetry invariants.
    pub fn new(classes: Vec<String>, cells: Vec<Vec<NliLabel>>) -> Result<Self> {
        let m = classes.len();
        if cells.len() != m || cells.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidMatrix(format!("expected a {m}x{m} grid")));
        }
        let matrix = ExclusivityMatrix { classes, cells };
        for g in 0..m {
            if matrix.cells[g][g] != NliLabel::Entail {
                return Err(Error::InvalidMatrix(format!(
                    "diagonal cell for {:?} is not entail",
                    matrix.classes[g]
                )));
            }
            for h in 0..m {
                if h != g && matrix.cells[g][h] == NliLabel::Entail {
                    return Err(Error::InvalidMatrix(format!(
                        "off-diagonal entail at ({:?}, {:?})",
                        matrix.classes[g], matrix.classes[h]
                    )));
                }
                let c1 = matrix.cells[g][h] == NliLabel::Contradict;
                let c2 = matrix.cells[h][g] == NliLabel::Contradict;
                if c1 != c2 {
                    return Err(Error::InvalidMatrix(format!(
                        "contradiction between {:?} and {:?} is not symmetric",
                        matrix.classes[g], matrix.classes[h]
                    )));
                }
            }
        }
        Ok(matrix)
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn index_of(&self, class: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == class)
    }

    /// Cell by index. Panics when out of range.
    pub fn cell(&self, gold: usize, hypothesis: usize) -> NliLabel {
        self.cells[gold][hypothesis]
    }

    pub fn rows(&self) -> &[Vec<NliLabel>] {
        &self.cells
    }

    /// Checks the negative-class row/column rule against a schema.
    pub fn check_against(&self, schema: &DatasetSchema) -> Result<()> {
        if self.classes != schema.classes {
            return Err(Error::InvalidMatrix(format!(
                "class order differs from schema {}",
                schema.name
            )));
        }
        if let Some(n) = schema.negative_class.as_deref().and_then(|n| self.index_of(n)) {
            for h in (0..self.len()).filter(|&h| h != n) {
                if self.cells[n][h] != NliLabel::Contradict || self.cells[h][n] != NliLabel::Contradict {
                    return Err(Error::InvalidMatrix(format!(
                        "negative class does not contradict {:?}",
                        self.classes[h]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Parses the fixture format: `classes` plus `cells` of 0/1/2 codes.
    pub fn from_fixture_json(json: &str) -> Result<Self> {
        let file: FixtureFile = serde_json::from_str(json)?;
        let cells = file
            .cells
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&code| {
                        NliLabel::from_code(code)
                            .ok_or_else(|| Error::InvalidMatrix(format!("bad cell code {code}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.classes, cells)
    }

    pub fn to_fixture_json(&self) -> String {
        let file = FixtureFile {
            classes: self.classes.clone(),
            cells: self
                .cells
                .iter()
                .map(|row| row.iter().map(|l| l.code()).collect())
                .collect(),
        };
        serde_json::to_string(&file).expect("matrix serializes")
    }

    /// Cells where `self` and `other` disagree, as (gold, hypothesis, ours, theirs).
    pub fn diff<'a>(&'a self, other: &'a ExclusivityMatrix) -> Vec<(&'a str, &'a str, NliLabel, NliLabel)> {
        let mut out = Vec::new();
        for (g, row) in self.cells.iter().enumerate() {
            for (h, &ours) in row.iter().enumerate() {
                let theirs = other
                    .cells
                    .get(g)
                    .and_then(|r| r.get(h))
                    .copied()
                    .unwrap_or(NliLabel::Neutral);
                if ours != theirs {
                    out.push((self.classes[g].as_str(), self.classes[h].as_str(), ours, theirs));
                }
            }
        }
        out
    }
}

fn rule_matrix(schema: &DatasetSchema, use_cliques: bool) -> ExclusivityMatrix {
    let m = schema.num_classes();
    let mut cells = vec![vec![NliLabel::Neutral; m]; m];
    for (g, row) in cells.iter_mut().enumerate() {
        row[g] = NliLabel::Entail;
    }
    if let Some(n) = schema.negative_class.as_deref().and_then(|n| schema.class_index(n)) {
        for h in (0..m).filter(|&h| h != n) {
            cells[n][h] = NliLabel::Contradict;
            cells[h][n] = NliLabel::Contradict;
        }
    }
    if use_cliques {
        for clique in &schema.exclusivity_cliques {
            let idx: Vec<usize> = clique.iter().filter_map(|c| schema.class_index(c)).collect();
            for &a in &idx {
                for &b in idx.iter().filter(|&&b| b != a) {
                    cells[a][b] = NliLabel::Contradict;
                }
            }
        }
    }
    ExclusivityMatrix {
        classes: schema.classes.clone(),
        cells,
    }
}

/// Rule-constructed matrix for a (validated) schema.
pub fn build_matrix(schema: &DatasetSchema) -> ExclusivityMatrix {
    rule_matrix(schema, true)
}

/// Looks up the NLI target for a gold class and a hypothesis class.
pub fn nli_target(matrix: &ExclusivityMatrix, gold: &str, hypothesis: &str) -> Result<NliLabel> {
    let g = matrix
        .index_of(gold)
        .ok_or_else(|| Error::UnknownClass(gold.to_string()))?;
    let h = matrix
        .index_of(hypothesis)
        .ok_or_else(|| Error::UnknownClass(hypothesis.to_string()))?;
    Ok(matrix.cells[g][h])
}

/// Ablation matrix: contradictions between positive classes become neutral;
/// the diagonal and negative-class contradictions are kept.
pub fn degrade_matrix(matrix: &ExclusivityMatrix, schema: &DatasetSchema) -> ExclusivityMatrix {
    let neg = schema
        .negative_class
        .as_deref()
        .and_then(|n| matrix.index_of(n));
    let mut out = matrix.clone();
    for (g, row) in out.cells.iter_mut().enumerate() {
        for (h, cell) in row.iter_mut().enumerate() {
            if *cell == NliLabel::Contradict && Some(g) != neg && Some(h) != neg {
                *cell = NliLabel::Neutral;
            }
        }
    }
    out
}
