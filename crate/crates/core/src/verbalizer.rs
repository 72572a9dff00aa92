//! Premise construction (entity-type masking) and hypothesis filling.

use crate::error::{Error, Result};
use crate::model::{
    DatasetSchema, EntityMention, HypothesisTemplate, RelationInstance, Span, OBJ_PLACEHOLDER,
    SUBJ_PLACEHOLDER,
};

pub const MARKER_START: char = '@';
pub const MARKER_END: char = '$';

/// `@Type$`
pub fn type_marker(entity_type: &str) -> String {
    let mut out = String::with_capacity(entity_type.len() + 2);
    out.push(MARKER_START);
    out.push_str(entity_type);
    out.push(MARKER_END);
    out
}

/// Returns the premise for an instance. With masking enabled every head and
/// tail mention span is replaced by its type marker; otherwise the text is
/// returned unchanged.
///
/// Only defined on raw instance text: the spans refer to the original text,
/// so feeding a premise back in would mask the wrong ranges.
pub fn build_premise(instance: &RelationInstance, schema: &DatasetSchema) -> Result<String> {
    if !schema.mask_entities {
        return Ok(instance.text.clone());
    }

    let mut spans: Vec<(Span, &EntityMention)> = instance
        .head
        .spans
        .iter()
        .map(|s| (*s, &instance.head))
        .chain(instance.tail.spans.iter().map(|s| (*s, &instance.tail)))
        .collect();
    spans.sort_by_key(|(s, _)| *s);
    if spans.windows(2).any(|w| w[0].0.end > w[1].0.start) {
        return Err(Error::OverlappingSpans(instance.id.clone()));
    }

    // char offset -> byte offset, with one trailing entry for end-of-text
    let byte_at: Vec<usize> = instance
        .text
        .char_indices()
        .map(|(b, _)| b)
        .chain(std::iter::once(instance.text.len()))
        .collect();
    if spans.last().is_some_and(|(s, _)| s.end >= byte_at.len()) {
        return Err(Error::SpanOutOfBounds(instance.id.clone()));
    }

    let mut premise = instance.text.clone();
    for (span, entity) in spans.iter().rev() {
        premise.replace_range(
            byte_at[span.start]..byte_at[span.end],
            &type_marker(&entity.entity_type),
        );
    }
    Ok(premise)
}

/// Substitutes the head and tail into a hypothesis template: type markers in
/// masked mode, surface forms otherwise.
pub fn fill_hypothesis(
    template: &HypothesisTemplate,
    instance: &RelationInstance,
    schema: &DatasetSchema,
) -> String {
    let (subj, obj) = if schema.mask_entities {
        (
            type_marker(&instance.head.entity_type),
            type_marker(&instance.tail.entity_type),
        )
    } else {
        (instance.head.surface.clone(), instance.tail.surface.clone())
    };
    // placeholders are replaced in a single left-to-right pass so that a
    // surface form containing "{obj}" is never re-expanded
    let text = template.as_str();
    let mut out = String::with_capacity(text.len() + subj.len() + obj.len());
    let mut rest = text;
    loop {
        let next = [(SUBJ_PLACEHOLDER, &subj), (OBJ_PLACEHOLDER, &obj)]
            .into_iter()
            .filter_map(|(ph, val)| rest.find(ph).map(|pos| (pos, ph, val)))
            .min_by_key(|(pos, _, _)| *pos);
        match next {
            Some((pos, ph, val)) => {
                out.push_str(&rest[..pos]);
                out.push_str(val);
                rest = &rest[pos + ph.len()..];
            }
            None => {
                out.push_str(rest);
                return out;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packs;

    fn brca() -> RelationInstance {
        RelationInstance {
            id: "d1".into(),
            text: "BRCA1 causes cancer".into(),
            head: EntityMention::new("BRCA1", "GeneOrGeneProduct", vec![Span::new(0, 5)]),
            tail: EntityMention::new("cancer", "DiseaseOrPhenotypicFeature", vec![Span::new(13, 19)]),
            gold_label: None,
            dataset: "biored".into(),
        }
    }

    #[test]
    fn masks_head_and_tail() {
        let schema = packs::schema("biored").unwrap();
        assert_eq!(
            build_premise(&brca(), &schema).unwrap(),
            "@GeneOrGeneProduct$ causes @DiseaseOrPhenotypicFeature$"
        );
    }

    #[test]
    fn unmasked_is_identity() {
        let mut schema = packs::schema("biored").unwrap();
        schema.mask_entities = false;
        assert_eq!(build_premise(&brca(), &schema).unwrap(), "BRCA1 causes cancer");
    }

    #[test]
    fn masks_every_mention_with_multibyte_text() {
        let schema = packs::schema("biored").unwrap();
        // "é" is two bytes but one char
        let text = "TP53 é reduces tumor growth; TP53 loss";
        let inst = RelationInstance {
            id: "d2".into(),
            text: text.into(),
            head: EntityMention::new("TP53", "Gene", vec![Span::new(0, 4), Span::new(29, 33)]),
            tail: EntityMention::new("tumor", "Disease", vec![Span::new(15, 20)]),
            gold_label: None,
            dataset: "biored".into(),
        };
        inst.validate(None).unwrap();
        assert_eq!(
            build_premise(&inst, &schema).unwrap(),
            "@Gene$ é reduces @Disease$ growth; @Gene$ loss"
        );
    }

    #[test]
    fn overlapping_spans_rejected() {
        let schema = packs::schema("biored").unwrap();
        let mut inst = brca();
        inst.tail.spans = vec![Span::new(3, 8)];
        assert!(matches!(build_premise(&inst, &schema), Err(Error::OverlappingSpans(_))));
    }

    #[test]
    fn fill_masked() {
        let schema = packs::schema("biored").unwrap();
        let inst = RelationInstance {
            id: "d3".into(),
            text: "aspirin binds COX1".into(),
            head: EntityMention::new("aspirin", "ChemicalEntity", vec![Span::new(0, 7)]),
            tail: EntityMention::new("COX1", "GeneOrGeneProduct", vec![Span::new(14, 18)]),
            gold_label: None,
            dataset: "biored".into(),
        };
        let template = schema.template("Bind").unwrap();
        assert_eq!(template.as_str(), "{subj} binds to {obj}.");
        assert_eq!(
            fill_hypothesis(template, &inst, &schema),
            "@ChemicalEntity$ binds to @GeneOrGeneProduct$."
        );
    }

    #[test]
    fn fill_zero_placeholder_template() {
        let schema = packs::schema("ddi13").unwrap();
        let template = schema.template("DDI-advise").unwrap();
        assert_eq!(
            fill_hypothesis(template, &brca(), &schema),
            "Advice regarding two drugs is described."
        );
    }

    #[test]
    fn fill_unmasked_surfaces() {
        let schema = packs::schema("retacred").unwrap();
        let inst = RelationInstance {
            id: "r1".into(),
            text: "Ann married Bo".into(),
            head: EntityMention::new("Ann", "PERSON", vec![Span::new(0, 3)]),
            tail: EntityMention::new("Bo", "PERSON", vec![Span::new(12, 14)]),
            gold_label: None,
            dataset: "retacred".into(),
        };
        let template = schema.template("per:spouse").unwrap();
        assert_eq!(fill_hypothesis(template, &inst, &schema), "Ann's spouse is Bo.");
    }

    #[test]
    fn surface_containing_placeholder_is_not_reexpanded() {
        let mut schema = packs::schema("retacred").unwrap();
        schema.mask_entities = false;
        let mut inst = brca();
        inst.head.surface = "{obj}".into();
        let t = HypothesisTemplate::new("{subj} vs {obj}");
        assert_eq!(fill_hypothesis(&t, &inst, &schema), "{obj} vs cancer");
    }
}
