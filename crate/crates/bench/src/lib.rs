//! Seeded workloads shared by the pipeline benchmarks.

use rand::rngs::StdRng;
use rand::SeedableRng;
use re2nli_core::ingest::{DatasetSplit, SplitName};
use re2nli_core::model::PredictionRecord;
use re2nli_core::synthetic::{random_schema, random_split};
use re2nli_core::{adapt_split, build_matrix, AdaptConfig, DatasetSchema, NliLabel};

pub struct Workload {
    pub schema: DatasetSchema,
    pub split: DatasetSplit,
}

/// Random schema with `m` classes (first one negative) and `n` labeled instances.
pub fn workload(m: usize, n: usize) -> Workload {
    let mut rng = StdRng::seed_from_u64(m as u64 * 1_000_003 + n as u64);
    let schema = random_schema(&mut rng, m, true, 3);
    let split = random_split(&mut rng, &schema, n, SplitName::Train);
    Workload { schema, split }
}

/// Unfiltered pair predictions that agree with the gold-derived targets.
pub fn oracle_predictions(w: &Workload) -> Vec<PredictionRecord> {
    let matrix = build_matrix(&w.schema);
    let config = AdaptConfig {
        use_filter: false,
        ..AdaptConfig::default()
    };
    let corpus = adapt_split(&w.split, &w.schema, &matrix, None, config).expect("synthetic split adapts");
    corpus
        .pairs
        .iter()
        .map(|p| {
            let (e, n, c) = match p.target.expect("labeled split") {
                NliLabel::Entail => (0.8, 0.1, 0.1),
                NliLabel::Neutral => (0.1, 0.8, 0.1),
                NliLabel::Contradict => (0.1, 0.1, 0.8),
            };
            PredictionRecord::probs(p.pair_id.clone(), e, n, c)
        })
        .collect()
}
