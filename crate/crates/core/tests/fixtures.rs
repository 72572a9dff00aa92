//! Rule-built matrices against the hand-encoded fixtures shipped with each pack.

use re2nli_core::metaclass::{build_matrix, nli_target};
use re2nli_core::model::NliLabel;
use re2nli_core::packs;

#[test]
fn every_pack_matches_its_fixture() {
    for name in packs::names() {
        let schema = packs::schema(name).unwrap();
        let built = build_matrix(&schema);
        let fixture = packs::fixture_matrix(name).unwrap();
        assert_eq!(built.classes(), fixture.classes(), "{name}");
        let diff = built.diff(&fixture);
        assert!(diff.is_empty(), "{name}: {diff:?}");
        fixture.check_against(&schema).unwrap();
    }
}

#[test]
fn retacred_familial_and_membership_cliques() {
    let schema = packs::schema("retacred").unwrap();
    let fixture = packs::fixture_matrix("retacred").unwrap();
    let familial = [
        "per:children",
        "per:identity",
        "per:other_family",
        "per:parents",
        "per:siblings",
        "per:spouse",
    ];
    for a in familial {
        for b in familial {
            let expected = if a == b { NliLabel::Entail } else { NliLabel::Contradict };
            assert_eq!(nli_target(&fixture, a, b).unwrap(), expected, "{a} / {b}");
        }
        assert_eq!(nli_target(&fixture, a, "per:title").unwrap(), NliLabel::Neutral);
    }
    assert_eq!(
        nli_target(&fixture, "org:members", "org:member_of").unwrap(),
        NliLabel::Contradict
    );
    for class in schema.classes.iter().skip(1) {
        assert_eq!(nli_target(&fixture, "no_relation", class).unwrap(), NliLabel::Contradict);
        assert_eq!(nli_target(&fixture, class, "no_relation").unwrap(), NliLabel::Contradict);
    }
    let contradictions = fixture
        .rows()
        .iter()
        .flatten()
        .filter(|l| **l == NliLabel::Contradict)
        .count();
    // 39 * 2 negative cells + 30 familial + 2 membership
    assert_eq!(contradictions, 78 + 30 + 2);
}

#[test]
fn ddi13_and_semeval_have_no_contradictions() {
    for name in ["ddi13", "semeval"] {
        let fixture = packs::fixture_matrix(name).unwrap();
        assert!(fixture.rows().iter().flatten().all(|l| *l != NliLabel::Contradict), "{name}");
    }
}
