//! Random schemas and labeled splits for property tests, acceptance checks
//! and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::ingest::{DatasetSplit, SplitName};
use crate::model::{DatasetSchema, EntityMention, HypothesisTemplate, RelationInstance, Span};

const TEMPLATE_SHAPES: [&str; 4] = [
    "{subj} relates to {obj} as {class}.",
    "{obj} is the {class} of {subj}.",
    "{subj} shows {class}.",
    "A {class} relation is described.",
];

/// Schema with `m` classes, an optional negative class (the first class) and
/// up to `max_cliques` random cliques over the positive classes.
pub fn random_schema<R: Rng>(rng: &mut R, m: usize, with_negative: bool, max_cliques: usize) -> DatasetSchema {
    assert!(m >= 1);
    let classes: Vec<String> = (0..m).map(|i| format!("rel_{i:02}")).collect();
    let negative_class = (with_negative && m >= 2).then(|| classes[0].clone());
    let templates = classes
        .iter()
        .map(|c| {
            let shape = TEMPLATE_SHAPES.choose(rng).unwrap();
            (c.clone(), HypothesisTemplate::new(shape.replace("{class}", c)))
        })
        .collect();

    let mut positives: Vec<String> = classes
        .iter()
        .filter(|c| Some(*c) != negative_class.as_ref())
        .cloned()
        .collect();
    positives.shuffle(rng);
    let mut exclusivity_cliques = Vec::new();
    let mut rest = positives.as_slice();
    for _ in 0..max_cliques {
        if rest.len() < 2 {
            break;
        }
        let size = rng.gen_range(2..=rest.len().min(5));
        exclusivity_cliques.push(rest[..size].to_vec());
        rest = &rest[size..];
    }

    DatasetSchema {
        name: format!("synthetic_{m}"),
        classes,
        negative_class,
        templates,
        exclusivity_cliques,
        mask_entities: rng.gen_bool(0.5),
    }
}

/// Labeled split where each class draws its (head type, tail type) from a
/// small class-specific pool, so the feasibility filter has work to do.
/// Some instances mention the head twice.
pub fn random_split<R: Rng>(rng: &mut R, schema: &DatasetSchema, n: usize, name: SplitName) -> DatasetSplit {
    const TYPES: [&str; 5] = ["Gene", "Disease", "Chemical", "Variant", "Organism"];
    let pools: Vec<Vec<(usize, usize)>> = (0..schema.num_classes())
        .map(|_| {
            let k = rng.gen_range(1..=3);
            (0..k)
                .map(|_| (rng.gen_range(0..TYPES.len()), rng.gen_range(0..TYPES.len())))
                .collect()
        })
        .collect();

    let instances = (0..n)
        .map(|i| {
            let class_idx = rng.gen_range(0..schema.num_classes());
            let &(h, t) = pools[class_idx].choose(rng).unwrap();
            let head_surface = format!("h{i}x");
            let tail_surface = format!("t{i}y");
            let repeat = rng.gen_bool(0.3);

            let mut text = String::new();
            let mut head_spans = Vec::new();
            let mut tail_spans = Vec::new();
            let push = |text: &mut String, s: &str| -> Span {
                let start = text.chars().count();
                text.push_str(s);
                Span::new(start, start + s.chars().count())
            };
            push(&mut text, "Über ");
            head_spans.push(push(&mut text, &head_surface));
            push(&mut text, " we see ");
            tail_spans.push(push(&mut text, &tail_surface));
            if repeat {
                push(&mut text, "; again ");
                head_spans.push(push(&mut text, &head_surface));
            }
            push(&mut text, ".");

            RelationInstance {
                id: format!("syn{i:05}"),
                text,
                head: EntityMention::new(head_surface, TYPES[h], head_spans),
                tail: EntityMention::new(tail_surface, TYPES[t], tail_spans),
                gold_label: Some(schema.classes[class_idx].clone()),
                dataset: schema.name.clone(),
            }
        })
        .collect();
    DatasetSplit { name, instances }
}
