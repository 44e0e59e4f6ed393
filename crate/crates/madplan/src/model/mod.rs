//! Pointed Kripke structures over a finite vocabulary of agents and
//! ground fluent atoms, together with formula evaluation and frame
//! (accessibility-relation) properties.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

mod formula;
mod frame;

pub use formula::{Formula, Literal};
pub use frame::{frame_check, frame_closure, FrameClass, FrameProperty, FrameReport};
pub(crate) use frame::close_relation_pairs;

/// Name of an agent.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AgentId(String);

impl AgentId {
    pub fn new(name: impl Into<String>) -> Self {
        AgentId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AgentId {
    fn from(s: &str) -> Self {
        AgentId::new(s)
    }
}

/// Name of a state.  Generated names use the scheme `base#k` with a
/// monotone counter `k`; see [`crate::transform::NameGen`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StateId(String);

impl StateId {
    pub fn new(name: impl Into<String>) -> Self {
        StateId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for StateId {
    fn from(s: &str) -> Self {
        StateId::new(s)
    }
}

/// Argument of a fluent atom or action: an integer, a constant symbol,
/// or (only before grounding) a schema variable ranging over agents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    Int(i64),
    Sym(String),
    Var(String),
}

impl Term {
    pub fn sym(s: impl Into<String>) -> Self {
        Term::Sym(s.into())
    }

    pub fn var(s: impl Into<String>) -> Self {
        Term::Var(s.into())
    }

    pub fn is_ground(&self) -> bool {
        !matches!(self, Term::Var(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(n) => write!(f, "{n}"),
            Term::Sym(s) | Term::Var(s) => f.write_str(s),
        }
    }
}

/// A fluent atom: a functor applied to zero or more arguments, e.g.
/// `tail`, `has_key(a)`, `x(4)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FluentAtom {
    functor: String,
    args: Vec<Term>,
}

impl FluentAtom {
    /// Zero-ary atom.
    pub fn prop(functor: impl Into<String>) -> Self {
        FluentAtom { functor: functor.into(), args: Vec::new() }
    }

    pub fn new(functor: impl Into<String>, args: impl IntoIterator<Item = Term>) -> Self {
        FluentAtom { functor: functor.into(), args: args.into_iter().collect() }
    }

    pub fn functor(&self) -> &str {
        &self.functor
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }
}

impl fmt::Display for FluentAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.functor)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (k, a) in self.args.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Errors raised when symbols are used outside the declared vocabulary
/// or a structure is assembled inconsistently.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum DeclarationError {
    #[error("agent `{0}` is not declared")]
    UndeclaredAgent(AgentId),
    #[error("fluent `{0}` is not declared")]
    UndeclaredFluent(FluentAtom),
    #[error("`{0}` is not a declared fluent family")]
    UnknownFamily(String),
    #[error("fluent atom `{0}` is not ground")]
    NonGroundAtom(FluentAtom),
    #[error("agent set of `{0}` is empty")]
    EmptyAgentSet(&'static str),
    #[error("no agents declared")]
    NoAgents,
    #[error("state `{0}` is already present")]
    DuplicateState(StateId),
    #[error("state `{0}` is not in the structure")]
    MissingState(StateId),
}

/// The finite signature a structure is built over: its agents and the
/// set of ground fluent atoms interpretations assign values to.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Vocabulary {
    agents: BTreeSet<AgentId>,
    fluents: BTreeSet<FluentAtom>,
}

impl Vocabulary {
    pub fn new(
        agents: impl IntoIterator<Item = AgentId>,
        fluents: impl IntoIterator<Item = FluentAtom>,
    ) -> Result<Self, DeclarationError> {
        let agents: BTreeSet<_> = agents.into_iter().collect();
        if agents.is_empty() {
            return Err(DeclarationError::NoAgents);
        }
        let fluents: BTreeSet<_> = fluents.into_iter().collect();
        if let Some(a) = fluents.iter().find(|a| !a.is_ground()) {
            return Err(DeclarationError::NonGroundAtom(a.clone()));
        }
        Ok(Vocabulary { agents, fluents })
    }

    pub fn agents(&self) -> impl Iterator<Item = &AgentId> {
        self.agents.iter()
    }

    pub fn agent_set(&self) -> &BTreeSet<AgentId> {
        &self.agents
    }

    pub fn fluents(&self) -> impl Iterator<Item = &FluentAtom> {
        self.fluents.iter()
    }

    pub fn has_agent(&self, a: &AgentId) -> bool {
        self.agents.contains(a)
    }

    pub fn has_fluent(&self, a: &FluentAtom) -> bool {
        self.fluents.contains(a)
    }

    /// Instances of the parametrized family `functor` (atoms with at
    /// least one argument).
    pub fn family_instances<'a>(&'a self, functor: &'a str) -> impl Iterator<Item = &'a FluentAtom> {
        self.fluents.iter().filter(move |a| a.functor() == functor && !a.args().is_empty())
    }

    pub fn has_family(&self, functor: &str) -> bool {
        self.family_instances(functor).next().is_some()
    }
}

/// Total truth assignment over the vocabulary's fluents, stored as the
/// set of true atoms; everything absent is false.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Interpretation(BTreeSet<FluentAtom>);

impl Interpretation {
    pub fn from_true_atoms(atoms: impl IntoIterator<Item = FluentAtom>) -> Self {
        Interpretation(atoms.into_iter().collect())
    }

    pub fn truth(&self, atom: &FluentAtom) -> bool {
        self.0.contains(atom)
    }

    pub fn true_atoms(&self) -> impl Iterator<Item = &FluentAtom> {
        self.0.iter()
    }

    pub fn set(&mut self, atom: FluentAtom, value: bool) {
        if value {
            self.0.insert(atom);
        } else {
            self.0.remove(&atom);
        }
    }

    /// True instances of the family `functor` in this interpretation.
    pub fn true_family_instances<'a>(
        &'a self,
        functor: &'a str,
    ) -> impl Iterator<Item = &'a FluentAtom> {
        self.0.iter().filter(move |a| a.functor() == functor && !a.args().is_empty())
    }
}

/// A finite Kripke structure: named states with total interpretations
/// and one accessibility relation per declared agent.
///
/// Values are immutable once assembled; every operation in
/// [`crate::transform`] and [`crate::transition`] returns a new
/// structure.  Equality is name-sensitive: structures that differ only
/// by a renaming of states are *not* equal (see
/// [`crate::transform::c_equivalent`]).
#[derive(Clone, Debug)]
pub struct KripkeStructure {
    voc: Arc<Vocabulary>,
    states: BTreeMap<StateId, Interpretation>,
    // Adjacency per agent; inner maps never hold empty successor sets,
    // so derived equality remains structural.
    rels: BTreeMap<AgentId, BTreeMap<StateId, BTreeSet<StateId>>>,
}

impl PartialEq for KripkeStructure {
    fn eq(&self, other: &Self) -> bool {
        *self.voc == *other.voc && self.states == other.states && self.rels == other.rels
    }
}

impl Eq for KripkeStructure {}

impl KripkeStructure {
    pub fn new(voc: Arc<Vocabulary>) -> Self {
        let rels = voc.agents().map(|a| (a.clone(), BTreeMap::new())).collect();
        KripkeStructure { voc, states: BTreeMap::new(), rels }
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.voc
    }

    pub fn add_state(
        &mut self,
        id: StateId,
        interp: Interpretation,
    ) -> Result<(), DeclarationError> {
        if self.states.contains_key(&id) {
            return Err(DeclarationError::DuplicateState(id));
        }
        if let Some(atom) = interp.true_atoms().find(|a| !self.voc.has_fluent(a)) {
            return Err(DeclarationError::UndeclaredFluent(atom.clone()));
        }
        self.states.insert(id, interp);
        Ok(())
    }

    pub fn add_arc(
        &mut self,
        from: &StateId,
        agent: &AgentId,
        to: &StateId,
    ) -> Result<(), DeclarationError> {
        if !self.states.contains_key(from) {
            return Err(DeclarationError::MissingState(from.clone()));
        }
        if !self.states.contains_key(to) {
            return Err(DeclarationError::MissingState(to.clone()));
        }
        let rel = self
            .rels
            .get_mut(agent)
            .ok_or_else(|| DeclarationError::UndeclaredAgent(agent.clone()))?;
        rel.entry(from.clone()).or_default().insert(to.clone());
        Ok(())
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_ids(&self) -> impl Iterator<Item = &StateId> {
        self.states.keys()
    }

    pub fn states(&self) -> impl Iterator<Item = (&StateId, &Interpretation)> {
        self.states.iter()
    }

    pub fn has_state(&self, id: &StateId) -> bool {
        self.states.contains_key(id)
    }

    pub fn interpretation(&self, id: &StateId) -> Option<&Interpretation> {
        self.states.get(id)
    }

    pub fn successors<'a>(
        &'a self,
        agent: &AgentId,
        from: &StateId,
    ) -> impl Iterator<Item = &'a StateId> {
        self.rels
            .get(agent)
            .and_then(|rel| rel.get(from))
            .into_iter()
            .flat_map(|set| set.iter())
    }

    pub fn has_arc(&self, from: &StateId, agent: &AgentId, to: &StateId) -> bool {
        self.rels
            .get(agent)
            .and_then(|rel| rel.get(from))
            .is_some_and(|set| set.contains(to))
    }

    /// All arcs of one agent as ordered pairs.
    pub fn relation_pairs(&self, agent: &AgentId) -> BTreeSet<(StateId, StateId)> {
        let mut out = BTreeSet::new();
        if let Some(rel) = self.rels.get(agent) {
            for (from, tos) in rel {
                for to in tos {
                    out.insert((from.clone(), to.clone()));
                }
            }
        }
        out
    }

    /// All arcs as `(from, agent, to)`, sorted by agent then endpoints.
    pub fn arcs(&self) -> impl Iterator<Item = (&StateId, &AgentId, &StateId)> {
        self.rels.iter().flat_map(|(agent, rel)| {
            rel.iter().flat_map(move |(from, tos)| tos.iter().map(move |to| (from, agent, to)))
        })
    }

    pub fn arc_count(&self) -> usize {
        self.rels.values().map(|rel| rel.values().map(BTreeSet::len).sum::<usize>()).sum()
    }

    /// Replaces one agent's relation wholesale.  Endpoints must exist.
    pub(crate) fn set_relation(
        &mut self,
        agent: &AgentId,
        pairs: BTreeSet<(StateId, StateId)>,
    ) -> Result<(), DeclarationError> {
        if !self.rels.contains_key(agent) {
            return Err(DeclarationError::UndeclaredAgent(agent.clone()));
        }
        let mut rel: BTreeMap<StateId, BTreeSet<StateId>> = BTreeMap::new();
        for (from, to) in pairs {
            if !self.states.contains_key(&from) {
                return Err(DeclarationError::MissingState(from));
            }
            if !self.states.contains_key(&to) {
                return Err(DeclarationError::MissingState(to));
            }
            rel.entry(from).or_default().insert(to);
        }
        self.rels.insert(agent.clone(), rel);
        Ok(())
    }

    /// Evaluates a formula at a state.  The formula must already be
    /// validated against this structure's vocabulary and the state must
    /// exist; use [`KripkeStructure::entails`] for the checked entry
    /// point.
    pub fn eval(&self, state: &StateId, f: &Formula) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => self.states[state].truth(a),
            Formula::Not(g) => !self.eval(state, g),
            Formula::And(g, h) => self.eval(state, g) && self.eval(state, h),
            Formula::Or(g, h) => self.eval(state, g) || self.eval(state, h),
            Formula::Implies(g, h) => !self.eval(state, g) || self.eval(state, h),
            Formula::Knows(i, g) => self.successors(i, state).all(|v| self.eval(v, g)),
            Formula::Everyone(group, g) => group
                .iter()
                .all(|i| self.successors(i, state).all(|v| self.eval(v, g))),
            Formula::Common(group, g) => {
                // Reachability along nonempty paths labelled by `group`.
                let mut seen: BTreeSet<&StateId> = BTreeSet::new();
                let mut queue: VecDeque<&StateId> = VecDeque::new();
                for i in group {
                    for v in self.successors(i, state) {
                        if seen.insert(v) {
                            queue.push_back(v);
                        }
                    }
                }
                while let Some(u) = queue.pop_front() {
                    if !self.eval(u, g) {
                        return false;
                    }
                    for i in group {
                        for v in self.successors(i, u) {
                            if seen.insert(v) {
                                queue.push_back(v);
                            }
                        }
                    }
                }
                true
            }
            Formula::KnowsValue(i, fam) => {
                let mut succ = self.successors(i, state);
                let Some(first) = succ.next() else {
                    // No accessible world: any declared instance is
                    // vacuously known.
                    return self.voc.has_family(fam);
                };
                let mut candidates: BTreeSet<&FluentAtom> =
                    self.states[first].true_family_instances(fam).collect();
                for v in succ {
                    if candidates.is_empty() {
                        break;
                    }
                    let interp = &self.states[v];
                    candidates.retain(|a| interp.truth(a));
                }
                !candidates.is_empty()
            }
        }
    }

    /// Checked evaluation: validates `f` against the vocabulary and the
    /// state name before evaluating.
    pub fn entails(&self, state: &StateId, f: &Formula) -> Result<bool, DeclarationError> {
        if !self.states.contains_key(state) {
            return Err(DeclarationError::MissingState(state.clone()));
        }
        f.validate(&self.voc)?;
        Ok(self.eval(state, f))
    }
}

/// A Kripke structure with a designated real state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointedStructure {
    structure: KripkeStructure,
    real: StateId,
}

impl PointedStructure {
    pub fn new(structure: KripkeStructure, real: StateId) -> Result<Self, DeclarationError> {
        if !structure.has_state(&real) {
            return Err(DeclarationError::MissingState(real));
        }
        Ok(PointedStructure { structure, real })
    }

    pub fn structure(&self) -> &KripkeStructure {
        &self.structure
    }

    pub fn real(&self) -> &StateId {
        &self.real
    }

    pub fn into_parts(self) -> (KripkeStructure, StateId) {
        (self.structure, self.real)
    }

    /// Satisfaction at the real state.
    pub fn entails(&self, f: &Formula) -> Result<bool, DeclarationError> {
        self.structure.entails(&self.real, f)
    }
}

#[cfg(test)]
pub(crate) mod tests;
