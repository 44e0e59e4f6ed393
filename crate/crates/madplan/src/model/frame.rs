use std::collections::BTreeSet;
use std::fmt;

use super::{AgentId, KripkeStructure, StateId};

/// Constraints imposed on every agent's accessibility relation.
///
/// `R` requires reflexivity, `Rt` adds transitivity, `Rst` adds symmetry
/// (equivalence relations), and `Elt` requires transitive, Euclidean, and
/// serial relations.  `Free` imposes nothing.  The modal systems T, S4,
/// S5, and KD45 map to `R`, `Rt`, `Rst`, and `Elt` respectively.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum FrameClass {
    R,
    Rt,
    Rst,
    Elt,
    Free,
}

impl FrameClass {
    /// Properties the class requires, in the order `frame_check` tests
    /// them.
    pub fn properties(self) -> &'static [FrameProperty] {
        use FrameProperty::*;
        match self {
            FrameClass::R => &[Reflexive],
            FrameClass::Rt => &[Reflexive, Transitive],
            FrameClass::Rst => &[Reflexive, Symmetric, Transitive],
            FrameClass::Elt => &[Transitive, Euclidean, Serial],
            FrameClass::Free => &[],
        }
    }

    /// The subset of required properties expressible as a closure
    /// (everything except seriality, which adding arcs cannot repair
    /// meaningfully and is instead checked).
    pub(crate) fn closure_properties(self) -> &'static [FrameProperty] {
        use FrameProperty::*;
        match self {
            FrameClass::R => &[Reflexive],
            FrameClass::Rt => &[Reflexive, Transitive],
            FrameClass::Rst => &[Reflexive, Symmetric, Transitive],
            FrameClass::Elt => &[Transitive, Euclidean],
            FrameClass::Free => &[],
        }
    }
}

impl fmt::Display for FrameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameClass::R => "r",
            FrameClass::Rt => "rt",
            FrameClass::Rst => "rst",
            FrameClass::Elt => "elt",
            FrameClass::Free => "none",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum FrameProperty {
    Reflexive,
    Symmetric,
    Transitive,
    Euclidean,
    Serial,
}

impl fmt::Display for FrameProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameProperty::Reflexive => "reflexive",
            FrameProperty::Symmetric => "symmetric",
            FrameProperty::Transitive => "transitive",
            FrameProperty::Euclidean => "euclidean",
            FrameProperty::Serial => "serial",
        })
    }
}

/// Outcome of a frame check: either every required property holds, or
/// the first violation found (properties in class order, agents and
/// states in name order).
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FrameReport {
    Pass,
    Fail { property: FrameProperty, agent: AgentId, witness: Vec<StateId> },
}

impl FrameReport {
    pub fn passed(&self) -> bool {
        matches!(self, FrameReport::Pass)
    }
}

/// Checks every agent's relation against the class's properties and
/// reports the first violation.
pub fn frame_check(m: &KripkeStructure, class: FrameClass) -> FrameReport {
    for &property in class.properties() {
        for agent in m.vocabulary().clone().agents() {
            if let Some(witness) = violation(m, agent, property) {
                return FrameReport::Fail { property, agent: agent.clone(), witness };
            }
        }
    }
    FrameReport::Pass
}

fn violation(m: &KripkeStructure, agent: &AgentId, property: FrameProperty) -> Option<Vec<StateId>> {
    let states: Vec<&StateId> = m.state_ids().collect();
    match property {
        FrameProperty::Reflexive => states
            .iter()
            .find(|s| !m.has_arc(s, agent, s))
            .map(|s| vec![(*s).clone()]),
        FrameProperty::Serial => states
            .iter()
            .find(|s| m.successors(agent, s).next().is_none())
            .map(|s| vec![(*s).clone()]),
        FrameProperty::Symmetric => {
            let pairs = m.relation_pairs(agent);
            pairs
                .iter()
                .find(|(u, v)| !pairs.contains(&(v.clone(), u.clone())))
                .map(|(u, v)| vec![u.clone(), v.clone()])
        }
        FrameProperty::Transitive => {
            let pairs = m.relation_pairs(agent);
            for (u, v) in &pairs {
                for w in m.successors(agent, v) {
                    if !pairs.contains(&(u.clone(), w.clone())) {
                        return Some(vec![u.clone(), v.clone(), w.clone()]);
                    }
                }
            }
            None
        }
        FrameProperty::Euclidean => {
            let pairs = m.relation_pairs(agent);
            for (u, v) in &pairs {
                for w in m.successors(agent, u) {
                    if !pairs.contains(&(v.clone(), w.clone())) {
                        return Some(vec![u.clone(), v.clone(), w.clone()]);
                    }
                }
            }
            None
        }
    }
}

/// Least extension of every agent's relation satisfying the class's
/// closure-expressible properties.  Seriality is never repaired; for
/// `Elt` it must be checked separately with [`frame_check`].
pub fn frame_closure(m: &KripkeStructure, class: FrameClass) -> KripkeStructure {
    let props = class.closure_properties();
    if props.is_empty() {
        return m.clone();
    }
    let mut out = m.clone();
    let agents: Vec<AgentId> = m.vocabulary().agents().cloned().collect();
    let states: Vec<StateId> = m.state_ids().cloned().collect();
    for agent in &agents {
        let pairs = close_relation_pairs(m.relation_pairs(agent), &states, props);
        out.set_relation(agent, pairs).expect("closure endpoints exist");
    }
    out
}

/// Least extension of one relation (given as pairs over `states`)
/// satisfying the closure-expressible `props`.
pub(crate) fn close_relation_pairs(
    mut pairs: BTreeSet<(StateId, StateId)>,
    states: &[StateId],
    props: &[FrameProperty],
) -> BTreeSet<(StateId, StateId)> {
    if props.contains(&FrameProperty::Reflexive) {
        for s in states {
            pairs.insert((s.clone(), s.clone()));
        }
    }
    loop {
        let mut fresh: BTreeSet<(StateId, StateId)> = BTreeSet::new();
        for (u, v) in &pairs {
            if props.contains(&FrameProperty::Symmetric)
                && !pairs.contains(&(v.clone(), u.clone()))
            {
                fresh.insert((v.clone(), u.clone()));
            }
            for (x, y) in &pairs {
                if props.contains(&FrameProperty::Transitive)
                    && x == v
                    && !pairs.contains(&(u.clone(), y.clone()))
                {
                    fresh.insert((u.clone(), y.clone()));
                }
                if props.contains(&FrameProperty::Euclidean)
                    && x == u
                    && !pairs.contains(&(v.clone(), y.clone()))
                {
                    fresh.insert((v.clone(), y.clone()));
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        pairs.extend(fresh);
    }
    pairs
}
