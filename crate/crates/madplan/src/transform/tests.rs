use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::model::tests::{arb_structure, coin_two_states};
use crate::model::{
    frame_check, FluentAtom, Formula, FrameClass, Interpretation, Vocabulary,
};

fn coin() -> KripkeStructure {
    coin_two_states().structure().clone()
}

fn sid(s: &str) -> StateId {
    StateId::new(s)
}

fn aid(a: &str) -> AgentId {
    AgentId::new(a)
}

#[test]
fn state_remove_identity_and_total() {
    let m = coin();
    assert_eq!(state_remove(&m, &BTreeSet::new()).unwrap(), m);
    let all: BTreeSet<_> = m.state_ids().cloned().collect();
    let empty = state_remove(&m, &all).unwrap();
    assert_eq!(empty.state_count(), 0);
    assert_eq!(empty.arc_count(), 0);
}

#[test]
fn state_remove_drops_incident_arcs() {
    let m = coin();
    let out = state_remove(&m, &[sid("s2")].into_iter().collect()).unwrap();
    assert_eq!(out.state_count(), 1);
    for agent in ["a", "b", "c"] {
        assert_eq!(
            out.relation_pairs(&aid(agent)),
            [(sid("s1"), sid("s1"))].into_iter().collect()
        );
    }
}

#[test]
fn state_remove_rejects_unknown_states() {
    let m = coin();
    assert_eq!(
        state_remove(&m, &[sid("s9")].into_iter().collect()),
        Err(TransformError::MissingState(sid("s9")))
    );
}

#[test]
fn arc_remove_is_selective_and_tolerant() {
    let m = coin();
    assert_eq!(arc_remove(&m, &BTreeSet::new()), m);
    let out = arc_remove(&m, &[(sid("s1"), aid("a"), sid("s2"))].into_iter().collect());
    assert_eq!(out.relation_pairs(&aid("a")).len(), 3);
    assert_eq!(out.relation_pairs(&aid("b")).len(), 4);
    // Arcs that are not present are ignored.
    let out = arc_remove(&m, &[(sid("s9"), aid("a"), sid("s1"))].into_iter().collect());
    assert_eq!(out, m);
    // Removing every a-arc leaves the states intact.
    let all_a: BTreeSet<_> = m
        .relation_pairs(&aid("a"))
        .into_iter()
        .map(|(u, v)| (u, aid("a"), v))
        .collect();
    let out = arc_remove(&m, &all_a);
    assert!(out.relation_pairs(&aid("a")).is_empty());
    assert_eq!(out.state_count(), 2);
}

#[test]
fn replica_renames_with_one_generation() {
    let m = coin();
    let mut names = NameGen::seeded_from(&m);
    let (copy, map) = replica(&m, &mut names);
    let expected: Vec<_> = vec![sid("s1#1"), sid("s2#1")];
    assert_eq!(copy.state_ids().cloned().collect::<Vec<_>>(), expected);
    assert!(c_equivalent(&m, &copy, &map));
    // Name sets are disjoint and a second round stays disjoint from both.
    assert_disjoint(&m, &copy);
    let (copy2, _) = replica(&copy, &mut names);
    assert_eq!(copy2.state_ids().next().unwrap(), &sid("s1#1#2"));
}

fn assert_disjoint(m1: &KripkeStructure, m2: &KripkeStructure) {
    for s in m1.state_ids() {
        assert!(!m2.has_state(s), "shared state {s}");
    }
}

#[test]
fn name_gen_skips_past_existing_suffixes() {
    let m = coin();
    let mut names = NameGen::seeded_from(&m);
    let (copy, _) = replica(&m, &mut names);
    let union = kappa_union(&m, &copy).unwrap();
    // A generator seeded from the union must not reuse generation 1.
    let mut fresh = NameGen::seeded_from(&union);
    let (copy2, _) = replica(&union, &mut fresh);
    assert!(copy2.has_state(&sid("s1#2")));
    assert!(copy2.has_state(&sid("s1#1#2")));
}

#[test]
fn c_equivalence_examples() {
    let m = coin();
    let ident = RenamingMap::identity_on(m.state_ids());
    assert!(c_equivalent(&m, &m, &ident));
    // Flipping a fluent value breaks it.
    let mut other = KripkeStructure::new(m.vocabulary().clone());
    other
        .add_state(sid("s1"), Interpretation::default())
        .unwrap();
    other
        .add_state(sid("s2"), Interpretation::default())
        .unwrap();
    for (from, agent, to) in m.arcs() {
        other.add_arc(from, agent, to).unwrap();
    }
    assert!(!c_equivalent(&m, &other, &ident));
    // Dropping one arc breaks it.
    let thinner = arc_remove(&m, &[(sid("s1"), aid("a"), sid("s2"))].into_iter().collect());
    assert!(!c_equivalent(&m, &thinner, &ident));
}

#[test]
fn compatibility_examples() {
    let m = coin();
    assert!(compatible(&m, &m));
    let mut names = NameGen::seeded_from(&m);
    let (copy, _) = replica(&m, &mut names);
    assert!(compatible(&m, &copy));
    let mut flipped = KripkeStructure::new(m.vocabulary().clone());
    flipped.add_state(sid("s1"), Interpretation::default()).unwrap();
    assert!(!compatible(&m, &flipped));
}

#[test]
fn kappa_union_idempotent_unit_and_disjoint() {
    let m = coin();
    assert_eq!(kappa_union(&m, &m).unwrap(), m);
    let empty = KripkeStructure::new(m.vocabulary().clone());
    assert_eq!(kappa_union(&m, &empty).unwrap(), m);
    let mut names = NameGen::seeded_from(&m);
    let (copy, _) = replica(&m, &mut names);
    let union = kappa_union(&m, &copy).unwrap();
    assert_eq!(union.state_count(), 4);
    // No arcs cross between the original and the copy.
    for (from, _, to) in union.arcs() {
        assert_eq!(m.has_state(from), m.has_state(to));
    }
}

#[test]
fn kappa_union_rejects_incompatible_inputs() {
    let m = coin();
    let mut flipped = KripkeStructure::new(m.vocabulary().clone());
    flipped.add_state(sid("s1"), Interpretation::default()).unwrap();
    assert_eq!(
        kappa_union(&m, &flipped),
        Err(TransformError::IncompatibleState(sid("s1")))
    );
}

#[test]
fn annotated_union_with_all_agents_aware_is_kappa() {
    let m = coin();
    let mut names = NameGen::seeded_from(&m);
    let (copy, map) = replica(&m, &mut names);
    let aware: BTreeSet<_> = ["a", "b", "c"].into_iter().map(aid).collect();
    let annotated = annotated_union(&m, &copy, &aware, &map.invert()).unwrap();
    assert_eq!(annotated, kappa_union(&m, &copy).unwrap());
}

#[test]
fn annotated_union_lifts_arcs_for_oblivious_agents() {
    // A single isolated extra state u with λ(u) = s1 and nobody aware:
    // every agent gains exactly s1's out-arcs, now starting at u.
    let m = coin();
    let mut extra = KripkeStructure::new(m.vocabulary().clone());
    extra
        .add_state(sid("u"), Interpretation::from_true_atoms([FluentAtom::prop("tail")]))
        .unwrap();
    let lambda = RenamingMap::from_pairs([(sid("u"), sid("s1"))]).unwrap();
    let out = annotated_union(&m, &extra, &BTreeSet::new(), &lambda).unwrap();
    for agent in ["a", "b", "c"] {
        let pairs = out.relation_pairs(&aid(agent));
        assert!(pairs.contains(&(sid("u"), sid("s1"))));
        assert!(pairs.contains(&(sid("u"), sid("s2"))));
        assert_eq!(pairs.len(), 6);
    }
}

#[test]
fn annotated_union_rejects_overlap_and_bad_maps() {
    let m = coin();
    let aware = BTreeSet::new();
    let ident = RenamingMap::identity_on(m.state_ids());
    assert_eq!(
        annotated_union(&m, &m, &aware, &ident),
        Err(TransformError::OverlappingStates(sid("s1")))
    );
    let mut extra = KripkeStructure::new(m.vocabulary().clone());
    extra.add_state(sid("u"), Interpretation::default()).unwrap();
    extra.add_state(sid("w"), Interpretation::default()).unwrap();
    // Not total.
    let partial = RenamingMap::from_pairs([(sid("u"), sid("s1"))]).unwrap();
    assert_eq!(
        annotated_union(&m, &extra, &aware, &partial),
        Err(TransformError::BadRenaming)
    );
    // Not injective.
    let squash =
        RenamingMap(vec![(sid("u"), sid("s1")), (sid("w"), sid("s1"))].into_iter().collect());
    assert_eq!(
        annotated_union(&m, &extra, &aware, &squash),
        Err(TransformError::BadRenaming)
    );
}

#[test]
fn restrict_empties_only_listed_agents() {
    let p = coin_two_states();
    let out = restrict(&p, &[aid("a")].into_iter().collect());
    assert!(out.structure().relation_pairs(&aid("a")).is_empty());
    assert_eq!(out.structure().relation_pairs(&aid("b")).len(), 4);
    assert_eq!(out.structure().relation_pairs(&aid("c")).len(), 4);
    assert_eq!(out.real(), &sid("s1"));
}

#[test]
fn find_renaming_matches_up_to_names() {
    let m = coin();
    let mut renamed = KripkeStructure::new(m.vocabulary().clone());
    renamed
        .add_state(sid("t1"), m.interpretation(&sid("s1")).unwrap().clone())
        .unwrap();
    renamed
        .add_state(sid("t2"), m.interpretation(&sid("s2")).unwrap().clone())
        .unwrap();
    for agent in ["a", "b", "c"] {
        for u in ["t1", "t2"] {
            for v in ["t1", "t2"] {
                renamed.add_arc(&sid(u), &aid(agent), &sid(v)).unwrap();
            }
        }
    }
    let map = find_renaming(&m, &renamed, Some((&sid("s1"), &sid("t1")))).unwrap();
    assert!(c_equivalent(&m, &renamed, &map));
    assert_eq!(map.get(&sid("s1")), Some(&sid("t1")));
    assert!(find_renaming(&m, &renamed, Some((&sid("s1"), &sid("t2")))).is_none());
}

proptest! {
    #[test]
    fn state_remove_preserves_equivalence_relations(m in arb_structure(), keep in proptest::collection::vec(proptest::bool::ANY, 6)) {
        let closed = crate::model::frame_closure(&m, FrameClass::Rst);
        let remove: BTreeSet<StateId> = closed
            .state_ids()
            .enumerate()
            .filter(|(k, _)| !keep[*k])
            .map(|(_, s)| s.clone())
            .collect();
        let out = state_remove(&closed, &remove).unwrap();
        prop_assert!(frame_check(&out, FrameClass::Rst).passed());
    }

    #[test]
    fn replica_rounds_produce_disjoint_names(m in arb_structure()) {
        let mut names = NameGen::seeded_from(&m);
        let (c1, map1) = replica(&m, &mut names);
        let (c2, map2) = replica(&m, &mut names);
        assert_disjoint(&m, &c1);
        assert_disjoint(&m, &c2);
        assert_disjoint(&c1, &c2);
        prop_assert!(c_equivalent(&m, &c1, &map1));
        prop_assert!(c_equivalent(&m, &c2, &map2));
    }

    #[test]
    fn annotated_union_out_arcs_law(m in arb_structure()) {
        // For every oblivious agent and copy state u, the out-arcs of u
        // are exactly the copy's own arcs plus the λ-lifted base arcs.
        let mut names = NameGen::seeded_from(&m);
        let (copy, map) = replica(&m, &mut names);
        let aware: BTreeSet<AgentId> = [aid("a")].into_iter().collect();
        let lambda = map.invert();
        let out = annotated_union(&m, &copy, &aware, &lambda).unwrap();
        for agent in [aid("a"), aid("b")] {
            for (u, _) in copy.states() {
                let got: BTreeSet<&StateId> = out.successors(&agent, u).collect();
                let mut expected: BTreeSet<&StateId> = copy.successors(&agent, u).collect();
                if !aware.contains(&agent) {
                    expected.extend(m.successors(&agent, lambda.get(u).unwrap()));
                }
                prop_assert_eq!(got, expected);
            }
        }
    }
}

#[test]
fn arc_remove_result_is_subset() {
    let m = coin();
    let removal: BTreeSet<_> = [(sid("s1"), aid("b"), sid("s1"))].into_iter().collect();
    let out = arc_remove(&m, &removal);
    for (from, agent, to) in out.arcs() {
        assert!(m.has_arc(from, agent, to));
    }
    assert_eq!(out.arc_count(), m.arc_count() - 1);
}

#[test]
fn vocabulary_must_match_for_unions() {
    let m = coin();
    let other_voc = Arc::new(
        Vocabulary::new([aid("a"), aid("b"), aid("c")], [FluentAtom::prop("head")]).unwrap(),
    );
    let other = KripkeStructure::new(other_voc);
    assert_eq!(kappa_union(&m, &other), Err(TransformError::VocabularyMismatch));
    assert_eq!(
        annotated_union(&m, &other, &BTreeSet::new(), &RenamingMap::default()),
        Err(TransformError::VocabularyMismatch)
    );
    let _ = Formula::True;
}
