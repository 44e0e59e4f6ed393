//! The small algebra of Kripke-structure transformations the update
//! constructions are composed from: state and arc removal, replicas with
//! fresh names, compatibility and equivalence checks, plain and
//! annotated unions, and restriction.
//!
//! Every operation is pure: inputs are borrowed, outputs are new values.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{AgentId, KripkeStructure, PointedStructure, StateId};

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum TransformError {
    #[error("state `{0}` is not in the structure")]
    MissingState(StateId),
    #[error("structures disagree on the interpretation of shared state `{0}`")]
    IncompatibleState(StateId),
    #[error("structures are not over the same vocabulary")]
    VocabularyMismatch,
    #[error("state sets are not disjoint: both contain `{0}`")]
    OverlappingStates(StateId),
    #[error("renaming is not a total injective map into the base structure")]
    BadRenaming,
}

/// A finite injective renaming of states, stored source → target.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RenamingMap(BTreeMap<StateId, StateId>);

impl RenamingMap {
    /// Builds a map from pairs, rejecting duplicate sources and targets.
    pub fn from_pairs(
        pairs: impl IntoIterator<Item = (StateId, StateId)>,
    ) -> Result<Self, TransformError> {
        let mut forward = BTreeMap::new();
        let mut targets = BTreeSet::new();
        for (src, dst) in pairs {
            if !targets.insert(dst.clone()) || forward.insert(src, dst).is_some() {
                return Err(TransformError::BadRenaming);
            }
        }
        Ok(RenamingMap(forward))
    }

    pub fn identity_on<'a>(states: impl IntoIterator<Item = &'a StateId>) -> Self {
        RenamingMap(states.into_iter().map(|s| (s.clone(), s.clone())).collect())
    }

    pub fn get(&self, s: &StateId) -> Option<&StateId> {
        self.0.get(s)
    }

    pub fn invert(&self) -> Self {
        RenamingMap(self.0.iter().map(|(k, v)| (v.clone(), k.clone())).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&StateId, &StateId)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Removes the states in `remove` and every arc touching them.
pub fn state_remove(
    m: &KripkeStructure,
    remove: &BTreeSet<StateId>,
) -> Result<KripkeStructure, TransformError> {
    if let Some(missing) = remove.iter().find(|s| !m.has_state(s)) {
        return Err(TransformError::MissingState(missing.clone()));
    }
    let mut out = KripkeStructure::new(m.vocabulary().clone());
    for (id, interp) in m.states() {
        if !remove.contains(id) {
            out.add_state(id.clone(), interp.clone()).expect("copying distinct states");
        }
    }
    for (from, agent, to) in m.arcs() {
        if !remove.contains(from) && !remove.contains(to) {
            out.add_arc(from, agent, to).expect("endpoints survive removal");
        }
    }
    Ok(out)
}

/// Removes the given arcs; arcs not present in `m` are ignored.
pub fn arc_remove(
    m: &KripkeStructure,
    arcs: &BTreeSet<(StateId, AgentId, StateId)>,
) -> KripkeStructure {
    let mut out = KripkeStructure::new(m.vocabulary().clone());
    for (id, interp) in m.states() {
        out.add_state(id.clone(), interp.clone()).expect("copying distinct states");
    }
    for (from, agent, to) in m.arcs() {
        if !arcs.contains(&(from.clone(), agent.clone(), to.clone())) {
            out.add_arc(from, agent, to).expect("endpoints copied");
        }
    }
    out
}

/// Deterministic source of fresh state names.  Each replica round
/// renames every state `s` to `s#k` for one monotone generation counter
/// `k`, so repeated rounds never collide.
#[derive(Clone, Debug)]
pub struct NameGen {
    next: u64,
}

impl NameGen {
    /// Seeds the counter past every `#k` suffix already present in `m`,
    /// making the next generation collision-free.
    pub fn seeded_from(m: &KripkeStructure) -> Self {
        let max = m
            .state_ids()
            .filter_map(|s| s.as_str().rsplit_once('#'))
            .filter_map(|(_, k)| k.parse::<u64>().ok())
            .max()
            .unwrap_or(0);
        NameGen { next: max + 1 }
    }

    pub fn next_generation(&mut self) -> u64 {
        let g = self.next;
        self.next += 1;
        g
    }
}

/// Fresh disjoint copy of `m`.  Returns the copy and the renaming
/// original → copy.
pub fn replica(m: &KripkeStructure, names: &mut NameGen) -> (KripkeStructure, RenamingMap) {
    let generation = names.next_generation();
    let map = RenamingMap(
        m.state_ids()
            .map(|s| (s.clone(), StateId::new(format!("{s}#{generation}"))))
            .collect(),
    );
    let mut out = KripkeStructure::new(m.vocabulary().clone());
    for (id, interp) in m.states() {
        out.add_state(map.get(id).unwrap().clone(), interp.clone()).expect("renamed states distinct");
    }
    for (from, agent, to) in m.arcs() {
        out.add_arc(map.get(from).unwrap(), agent, map.get(to).unwrap())
            .expect("renamed endpoints exist");
    }
    (out, map)
}

/// True when `c` is a bijection from `m1`'s states onto `m2`'s states
/// that preserves interpretations and arcs in both directions.
pub fn c_equivalent(m1: &KripkeStructure, m2: &KripkeStructure, c: &RenamingMap) -> bool {
    if *m1.vocabulary().as_ref() != *m2.vocabulary().as_ref() {
        return false;
    }
    if c.len() != m1.state_count() || m1.state_count() != m2.state_count() {
        return false;
    }
    let mut image = BTreeSet::new();
    for (id, interp) in m1.states() {
        let Some(target) = c.get(id) else { return false };
        if m2.interpretation(target) != Some(interp) || !image.insert(target) {
            return false;
        }
    }
    for agent in m1.vocabulary().clone().agents() {
        let p1 = m1.relation_pairs(agent);
        let p2 = m2.relation_pairs(agent);
        if p1.len() != p2.len() {
            return false;
        }
        for (u, v) in &p1 {
            let pair = (c.get(u).unwrap().clone(), c.get(v).unwrap().clone());
            if !p2.contains(&pair) {
                return false;
            }
        }
    }
    true
}

/// True when every state name shared by the two structures carries the
/// same interpretation in both.
pub fn compatible(m1: &KripkeStructure, m2: &KripkeStructure) -> bool {
    m1.states().all(|(id, interp)| match m2.interpretation(id) {
        None => true,
        Some(other) => other == interp,
    })
}

/// Union of states and relations.  Requires compatibility; on shared
/// states the first structure's interpretation is kept.
pub fn kappa_union(
    m1: &KripkeStructure,
    m2: &KripkeStructure,
) -> Result<KripkeStructure, TransformError> {
    if *m1.vocabulary().as_ref() != *m2.vocabulary().as_ref() {
        return Err(TransformError::VocabularyMismatch);
    }
    if let Some((id, _)) =
        m1.states().find(|(id, interp)| m2.interpretation(id).is_some_and(|o| o != *interp))
    {
        return Err(TransformError::IncompatibleState(id.clone()));
    }
    let mut out = KripkeStructure::new(m1.vocabulary().clone());
    for (id, interp) in m1.states() {
        out.add_state(id.clone(), interp.clone()).expect("m1 states distinct");
    }
    for (id, interp) in m2.states() {
        if !out.has_state(id) {
            out.add_state(id.clone(), interp.clone()).expect("new state");
        }
    }
    for m in [m1, m2] {
        for (from, agent, to) in m.arcs() {
            out.add_arc(from, agent, to).expect("union contains endpoints");
        }
    }
    Ok(out)
}

/// Union of two disjoint structures in which only the agents in `aware`
/// keep the second structure's perspective separate: every other agent
/// `i` additionally gains the arcs `{(u,v) | u ∈ M2, v ∈ M1, (λ(u),v) ∈
/// M1[i]}`, deferring to what `λ(u)` looked like in the base structure.
pub fn annotated_union(
    m1: &KripkeStructure,
    m2: &KripkeStructure,
    aware: &BTreeSet<AgentId>,
    lambda: &RenamingMap,
) -> Result<KripkeStructure, TransformError> {
    if *m1.vocabulary().as_ref() != *m2.vocabulary().as_ref() {
        return Err(TransformError::VocabularyMismatch);
    }
    if let Some((id, _)) = m2.states().find(|(id, _)| m1.has_state(id)) {
        return Err(TransformError::OverlappingStates(id.clone()));
    }
    // λ must be injective, defined on every M2 state, and land in M1.
    let mut targets = BTreeSet::new();
    for (id, _) in m2.states() {
        let Some(t) = lambda.get(id) else { return Err(TransformError::BadRenaming) };
        if !m1.has_state(t) || !targets.insert(t.clone()) {
            return Err(TransformError::BadRenaming);
        }
    }
    let mut out = kappa_union(m1, m2).expect("disjoint structures are compatible");
    for agent in m1.vocabulary().clone().agents() {
        if aware.contains(agent) {
            continue;
        }
        for (u, _) in m2.states() {
            let base = lambda.get(u).unwrap();
            for v in m1.successors(agent, base) {
                out.add_arc(u, agent, v).expect("endpoints in union");
            }
        }
    }
    Ok(out)
}

/// Empties the relations of the agents in `muted`; states and the real
/// state are untouched.
pub fn restrict(p: &PointedStructure, muted: &BTreeSet<AgentId>) -> PointedStructure {
    let m = clear_agent_arcs(p.structure(), muted);
    PointedStructure::new(m, p.real().clone()).expect("states unchanged")
}

pub(crate) fn clear_agent_arcs(
    m: &KripkeStructure,
    muted: &BTreeSet<AgentId>,
) -> KripkeStructure {
    let mut out = KripkeStructure::new(m.vocabulary().clone());
    for (id, interp) in m.states() {
        out.add_state(id.clone(), interp.clone()).expect("copying distinct states");
    }
    for (from, agent, to) in m.arcs() {
        if !muted.contains(agent) {
            out.add_arc(from, agent, to).expect("endpoints copied");
        }
    }
    out
}

/// Searches for a renaming witnessing `c_equivalent(m1, m2, ·)` that
/// additionally maps `real1` to `real2` when both are given.  Intended
/// for tests and the generator's examples; exhaustive over state
/// pairings, so only suitable for small structures.
pub fn find_renaming(
    m1: &KripkeStructure,
    m2: &KripkeStructure,
    fix: Option<(&StateId, &StateId)>,
) -> Option<RenamingMap> {
    if m1.state_count() != m2.state_count() {
        return None;
    }
    let sources: Vec<StateId> = m1.state_ids().cloned().collect();
    let targets: Vec<StateId> = m2.state_ids().cloned().collect();
    let mut assignment: BTreeMap<StateId, StateId> = BTreeMap::new();
    let mut used: BTreeSet<StateId> = BTreeSet::new();
    if let Some((r1, r2)) = fix {
        assignment.insert(r1.clone(), r2.clone());
        used.insert(r2.clone());
    }
    fn search(
        k: usize,
        sources: &[StateId],
        targets: &[StateId],
        m1: &KripkeStructure,
        m2: &KripkeStructure,
        assignment: &mut BTreeMap<StateId, StateId>,
        used: &mut BTreeSet<StateId>,
    ) -> bool {
        if k == sources.len() {
            let map = RenamingMap(assignment.clone());
            return c_equivalent(m1, m2, &map);
        }
        let src = &sources[k];
        if assignment.contains_key(src) {
            return search(k + 1, sources, targets, m1, m2, assignment, used);
        }
        for dst in targets {
            if used.contains(dst) || m1.interpretation(src) != m2.interpretation(dst) {
                continue;
            }
            assignment.insert(src.clone(), dst.clone());
            used.insert(dst.clone());
            if search(k + 1, sources, targets, m1, m2, assignment, used) {
                return true;
            }
            assignment.remove(src);
            used.remove(dst);
        }
        false
    }
    if search(0, &sources, &targets, m1, m2, &mut assignment, &mut used) {
        Some(RenamingMap(assignment))
    } else {
        None
    }
}

#[cfg(test)]
mod tests;
