//! The successor function: how a pointed structure changes when a
//! ground action is executed.
//!
//! Public announcements shrink the structure in place.  Private
//! announcements, sensing, and world-altering actions build a fresh
//! layer for the agents involved and keep the old layer intact so that
//! oblivious agents still reason over it; the constructions are
//! composed from the [`crate::transform`] operators and are fully
//! deterministic, including generated state names.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::lang::{ActionInstance, ActionKind, CausesCase};
use crate::model::{
    AgentId, DeclarationError, FluentAtom, Formula, Interpretation, KripkeStructure, Literal,
    PointedStructure, StateId,
};
use crate::transform::{
    annotated_union, arc_remove, clear_agent_arcs, replica, state_remove, NameGen, RenamingMap,
};

/// Why an action application is undefined (as opposed to erroneous).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum UndefinedReason {
    /// The executability condition fails at the real state.
    PreconditionFailed,
    /// Announced content is false at the real state.
    UntruthfulAnnouncement,
    /// Reserved: a sensing variant that forces a literal which is false
    /// at the real state.  The sensing construction implemented here
    /// never forces literals, so this reason is never produced.
    FalsifiedSenseFreeLiteral,
    /// Two `causes` laws of one action apply at the same state.
    ConflictingCausesLaws,
}

impl std::fmt::Display for UndefinedReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            UndefinedReason::PreconditionFailed => "precondition-failed",
            UndefinedReason::UntruthfulAnnouncement => "untruthful-announcement",
            UndefinedReason::FalsifiedSenseFreeLiteral => "falsified-sense-free-literal",
            UndefinedReason::ConflictingCausesLaws => "conflicting-causes-laws",
        })
    }
}

/// Outcome of applying an action: a new pointed structure, or a
/// distinguished undefined result.
#[derive(Clone, PartialEq, Debug)]
pub enum SuccessorResult {
    Defined(PointedStructure),
    Undefined(UndefinedReason),
}

impl SuccessorResult {
    pub fn defined(self) -> Option<PointedStructure> {
        match self {
            SuccessorResult::Defined(p) => Some(p),
            SuccessorResult::Undefined(_) => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, SuccessorResult::Defined(_))
    }
}

/// Argument and vocabulary errors; distinct from semantic undefinedness.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum TransitionError {
    #[error(transparent)]
    Declaration(#[from] DeclarationError),
    #[error("effect forces `{0}` to both values")]
    InconsistentEffect(FluentAtom),
    #[error("`{0}` cannot be announced publicly: not a fluent formula, `k(i, f)`, or `~(k(i, f) | k(i, ~f))`")]
    UnsupportedAnnouncementShape(String),
    #[error("`{0}` is not a world-altering action")]
    NotOntic(String),
}

/// True when the action's executability condition holds at the real
/// state.  Actions without `executable if` laws default to `true`.
pub fn executable(p: &PointedStructure, a: &ActionInstance) -> Result<bool, TransitionError> {
    Ok(p.entails(a.pre())?)
}

/// Forces the literals of `effect` in `interp` and leaves every other
/// fluent unchanged.
pub fn apply_literals(
    interp: &Interpretation,
    effect: &[Literal],
) -> Result<Interpretation, TransitionError> {
    for (k, lit) in effect.iter().enumerate() {
        if effect[..k].iter().any(|o| o.atom == lit.atom && o.positive != lit.positive) {
            return Err(TransitionError::InconsistentEffect(lit.atom.clone()));
        }
    }
    let mut out = interp.clone();
    for lit in effect {
        out.set(lit.atom.clone(), lit.positive);
    }
    Ok(out)
}

/// The three content shapes a public announcement may take.
enum PublicShape<'a> {
    Fluent,
    Knows(&'a AgentId, &'a Formula),
    Whether(&'a AgentId, &'a Formula),
}

fn public_shape(content: &Formula) -> Option<PublicShape<'_>> {
    if content.is_fluent() {
        return Some(PublicShape::Fluent);
    }
    if let Formula::Knows(i, body) = content {
        return Some(PublicShape::Knows(i, body.as_ref()));
    }
    if let Formula::Not(inner) = content {
        if let Formula::Or(l, r) = inner.as_ref() {
            if let (Formula::Knows(i, p), Formula::Knows(j, q)) = (l.as_ref(), r.as_ref()) {
                if i == j {
                    if **q == Formula::not((**p).clone()) {
                        return Some(PublicShape::Whether(i, p.as_ref()));
                    }
                    if **p == Formula::not((**q).clone()) {
                        return Some(PublicShape::Whether(i, q.as_ref()));
                    }
                }
            }
        }
    }
    None
}

/// Truthful public announcement of `content` to every agent.
pub fn succ_public(
    p: &PointedStructure,
    content: &Formula,
) -> Result<SuccessorResult, TransitionError> {
    let Some(shape) = public_shape(content) else {
        return Err(TransitionError::UnsupportedAnnouncementShape(content.to_string()));
    };
    if !p.entails(content)? {
        return Ok(SuccessorResult::Undefined(UndefinedReason::UntruthfulAnnouncement));
    }
    let m = p.structure();
    let updated = match shape {
        // States that contradict the announced fact disappear.
        PublicShape::Fluent => {
            let remove: BTreeSet<StateId> =
                m.state_ids().filter(|u| !m.eval(u, content)).cloned().collect();
            state_remove(m, &remove).expect("removal set drawn from the structure")
        }
        // Announcing that `i` knows `body` prunes the arcs by which `i`
        // would consider a counter-world possible.
        PublicShape::Knows(i, body) => {
            let cut: BTreeSet<(StateId, AgentId, StateId)> = m
                .relation_pairs(i)
                .into_iter()
                .filter(|(_, v)| !m.eval(v, body))
                .map(|(u, v)| (u, i.clone(), v))
                .collect();
            arc_remove(m, &cut)
        }
        // Announcing that `i` does not know whether `body` removes the
        // states at which `i` would.
        PublicShape::Whether(i, body) => {
            let knows_whether = Formula::or(
                Formula::knows(i.clone(), body.clone()),
                Formula::knows(i.clone(), body.clone().not()),
            );
            let remove: BTreeSet<StateId> =
                m.state_ids().filter(|u| m.eval(u, &knows_whether)).cloned().collect();
            state_remove(m, &remove).expect("removal set drawn from the structure")
        }
    };
    let real = p.real().clone();
    Ok(SuccessorResult::Defined(
        PointedStructure::new(updated, real).expect("the real state satisfies the content"),
    ))
}

fn check_agents<'a>(
    m: &KripkeStructure,
    agents: impl IntoIterator<Item = &'a AgentId>,
) -> Result<(), TransitionError> {
    for a in agents {
        if !m.vocabulary().has_agent(a) {
            return Err(DeclarationError::UndeclaredAgent(a.clone()).into());
        }
    }
    Ok(())
}

/// Shared tail of the private-announcement and sensing constructions:
/// replicate, keep only the arcs of `aware` agents in the replica, cut
/// the replica arcs of `learners` that connect states disagreeing on
/// `fluent`, and hang the replica above the old layer.
fn layered_update(
    p: &PointedStructure,
    fluent: &FluentAtom,
    learners: &BTreeSet<AgentId>,
    aware: &BTreeSet<AgentId>,
) -> PointedStructure {
    let m = p.structure();
    let mut names = NameGen::seeded_from(m);
    let (copy, rename) = replica(m, &mut names);
    let muted: BTreeSet<AgentId> =
        m.vocabulary().agents().filter(|a| !aware.contains(a)).cloned().collect();
    let copy = clear_agent_arcs(&copy, &muted);
    let discriminating: BTreeSet<(StateId, AgentId, StateId)> = copy
        .arcs()
        .filter(|(u, agent, v)| {
            learners.contains(agent)
                && copy.interpretation(u).unwrap().truth(fluent)
                    != copy.interpretation(v).unwrap().truth(fluent)
        })
        .map(|(u, agent, v)| (u.clone(), agent.clone(), v.clone()))
        .collect();
    let copy = arc_remove(&copy, &discriminating);
    let union = annotated_union(m, &copy, aware, &rename.invert())
        .expect("replica states are fresh and the renaming is total");
    let real = rename.get(p.real()).expect("every state was renamed").clone();
    PointedStructure::new(union, real).expect("the renamed real state is in the union")
}

/// Truthful announcement of the fluent literal `content` to
/// `performers` and `observers`; all other agents are unaware it
/// happened.
pub fn succ_private(
    p: &PointedStructure,
    content: &Literal,
    performers: &BTreeSet<AgentId>,
    observers: &BTreeSet<AgentId>,
) -> Result<SuccessorResult, TransitionError> {
    check_agents(p.structure(), performers.iter().chain(observers))?;
    if !p.entails(&content.to_formula())? {
        return Ok(SuccessorResult::Undefined(UndefinedReason::UntruthfulAnnouncement));
    }
    let aware: BTreeSet<AgentId> = performers.union(observers).cloned().collect();
    Ok(SuccessorResult::Defined(layered_update(p, &content.atom, &aware, &aware)))
}

/// `performers` sense the value of `fluent`; `observers` learn that the
/// sensing happened without learning the value; everyone else is
/// unaware.  Unlike announcements there is no content to be truthful
/// about: whichever value `fluent` has becomes known.
pub fn succ_sense(
    p: &PointedStructure,
    fluent: &FluentAtom,
    performers: &BTreeSet<AgentId>,
    observers: &BTreeSet<AgentId>,
) -> Result<SuccessorResult, TransitionError> {
    check_agents(p.structure(), performers.iter().chain(observers))?;
    if !p.structure().vocabulary().has_fluent(fluent) {
        return Err(DeclarationError::UndeclaredFluent(fluent.clone()).into());
    }
    let aware: BTreeSet<AgentId> = performers.union(observers).cloned().collect();
    Ok(SuccessorResult::Defined(layered_update(p, fluent, performers, &aware)))
}

/// World-altering action: fresh copies of the states satisfying the
/// executability condition, with effects applied per the unique
/// applicable `causes` case, visible only to the performers.
pub fn succ_ontic(
    p: &PointedStructure,
    a: &ActionInstance,
) -> Result<SuccessorResult, TransitionError> {
    let ActionKind::Ontic { cases, performers } = a.kind() else {
        return Err(TransitionError::NotOntic(a.to_string()));
    };
    check_agents(p.structure(), performers)?;
    for lit in cases.iter().flat_map(|c| c.effect.iter().chain(&c.condition)) {
        if !p.structure().vocabulary().has_fluent(&lit.atom) {
            return Err(DeclarationError::UndeclaredFluent(lit.atom.clone()).into());
        }
    }
    if !p.entails(a.pre())? {
        return Ok(SuccessorResult::Undefined(UndefinedReason::PreconditionFailed));
    }
    let m = p.structure();
    let mut names = NameGen::seeded_from(m);
    let generation = names.next_generation();
    let surviving: Vec<&StateId> =
        m.state_ids().filter(|u| m.eval(u, a.pre())).collect();
    let rename = RenamingMap::from_pairs(
        surviving
            .iter()
            .map(|u| ((*u).clone(), StateId::new(format!("{u}#{generation}")))),
    )
    .expect("suffixing a fresh generation keeps names distinct");
    let mut fresh = KripkeStructure::new(m.vocabulary().clone());
    for u in &surviving {
        let interp = m.interpretation(u).expect("state from the structure");
        let applicable: Vec<&CausesCase> = cases
            .iter()
            .filter(|c| c.condition.iter().all(|lit| interp.truth(&lit.atom) == lit.positive))
            .collect();
        let updated = match applicable.as_slice() {
            [] => interp.clone(),
            [case] => apply_literals(interp, &case.effect)?,
            _ => {
                return Ok(SuccessorResult::Undefined(UndefinedReason::ConflictingCausesLaws))
            }
        };
        fresh
            .add_state(rename.get(u).expect("renamed").clone(), updated)
            .expect("fresh names are distinct");
    }
    for agent in performers {
        for (u, v) in m.relation_pairs(agent) {
            if let (Some(cu), Some(cv)) = (rename.get(&u), rename.get(&v)) {
                fresh.add_arc(cu, agent, cv).expect("copied endpoints exist");
            }
        }
    }
    let union = annotated_union(m, &fresh, performers, &rename.invert())
        .expect("fresh states are disjoint and the renaming is injective");
    let real = rename.get(p.real()).expect("the real state satisfies the condition").clone();
    Ok(SuccessorResult::Defined(
        PointedStructure::new(union, real).expect("renamed real state is present"),
    ))
}

/// Applies one resolved action: checks executability, then dispatches
/// on the action's effect form.
pub fn succ(p: &PointedStructure, a: &ActionInstance) -> Result<SuccessorResult, TransitionError> {
    if !executable(p, a)? {
        return Ok(SuccessorResult::Undefined(UndefinedReason::PreconditionFailed));
    }
    match a.kind() {
        ActionKind::PublicAnnounce(content) => succ_public(p, content),
        ActionKind::PrivateAnnounce { content, performers, observers } => {
            succ_private(p, content, performers, observers)
        }
        ActionKind::Sense { fluent, performers, observers } => {
            succ_sense(p, fluent, performers, observers)
        }
        ActionKind::Ontic { .. } => succ_ontic(p, a),
    }
}

/// Applies a sequence left to right, short-circuiting on the first
/// undefined step.  The empty sequence returns the input unchanged.
pub fn succ_seq(
    p: &PointedStructure,
    actions: &[ActionInstance],
) -> Result<SuccessorResult, TransitionError> {
    let mut current = p.clone();
    for a in actions {
        match succ(&current, a)? {
            SuccessorResult::Defined(next) => current = next,
            undefined => return Ok(undefined),
        }
    }
    Ok(SuccessorResult::Defined(current))
}
