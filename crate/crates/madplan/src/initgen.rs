//! Computing initial pointed structures.
//!
//! Three generators cover the practical range:
//!
//! * [`generate_explicit`] enumerates every structure with at most a
//!   given number of states whose relations fit the requested frame
//!   class and whose initial conditions all hold at the real state.
//!   The stream is lazy and deterministic; structures that only differ
//!   by a renaming of the non-real states are emitted once.
//! * [`generate_partition`] builds one large structure from an
//!   arithmetic universe block, where two states are connected for an
//!   agent exactly when the agent's observation expressions agree.
//!   Equality of observations is an equivalence, so the result is
//!   always an S5 structure without ever materializing candidate
//!   relations.
//! * [`filter_states`] and [`announcement_chain`] shrink a structure to
//!   the states satisfying a formula, the standard move of knowledge
//!   puzzles ("nobody knows yet", "now I know").

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use itertools::Itertools;
use thiserror::Error;

use crate::lang::{Domain, LangError, UniverseSpec};
use crate::model::{
    close_relation_pairs, AgentId, DeclarationError, FluentAtom, Formula, FrameClass,
    FrameProperty, Interpretation, KripkeStructure, PointedStructure, StateId, Term, Vocabulary,
};
use crate::transform::state_remove;

/// Explicit search never enumerates more than `2^16` interpretations
/// per state or relation subsets per agent.
const MAX_GEN_FLUENTS: usize = 16;
const MAX_GEN_STATES: usize = 4;

/// Bounds and frame class for [`generate_explicit`].
#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Largest number of states to try; counts ascend from one.
    pub max_states: usize,
    /// Frame class the candidate relations are drawn from.
    pub frame: FrameClass,
    /// Stop after this many structures (`None` for all of them).
    pub limit: Option<usize>,
}

impl GenConfig {
    /// Unlimited search up to `max_states` states in the frame class the
    /// domain declares.
    pub fn for_domain(d: &Domain, max_states: usize) -> Self {
        GenConfig { max_states, frame: d.frame(), limit: None }
    }
}

#[derive(Clone, PartialEq, Debug, Error)]
pub enum GenError {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Declaration(#[from] DeclarationError),
    #[error("max_states must be at least 1")]
    ZeroStates,
    #[error("domain must be grounded before generation")]
    NotGround,
    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),
    #[error("universe has no satisfying assignments")]
    EmptyUniverse,
}

/// Enumerates, lazily and in a fixed order, every pointed structure
/// with `1..=cfg.max_states` states over the domain's vocabulary such
/// that all relations belong to `cfg.frame` and every `init` formula
/// holds at the real state `s1`.
///
/// The order is: state count ascending, then the real state's
/// interpretation, the remaining interpretations, and the relations,
/// each in their natural order.  The real state's interpretation is
/// pre-filtered by the purely fluent init formulas; modal init formulas
/// are checked on each fully assembled candidate.  An unsatisfiable
/// description yields an empty stream, not an error.
pub fn generate_explicit(
    d: &Domain,
    cfg: &GenConfig,
) -> Result<impl Iterator<Item = PointedStructure>, GenError> {
    if cfg.max_states == 0 {
        return Err(GenError::ZeroStates);
    }
    if !d.is_ground() {
        return Err(GenError::NotGround);
    }
    let voc = d.vocabulary()?;
    let fluent_count = voc.fluents().count();
    if fluent_count > MAX_GEN_FLUENTS {
        return Err(GenError::SearchSpaceTooLarge(format!(
            "{fluent_count} fluents (limit {MAX_GEN_FLUENTS})"
        )));
    }
    if cfg.max_states > MAX_GEN_STATES {
        return Err(GenError::SearchSpaceTooLarge(format!(
            "{} states (limit {MAX_GEN_STATES})",
            cfg.max_states
        )));
    }
    let gen = ExplicitGen {
        voc,
        inits: d.inits().to_vec(),
        frame: cfg.frame,
        max_states: cfg.max_states,
        m: 0,
        states: Vec::new(),
        interps: Vec::new(),
        real_candidates: Vec::new(),
        rel_candidates: Vec::new(),
        agents: Vec::new(),
        counters: Vec::new(),
        exhausted: false,
        seen: BTreeSet::new(),
    };
    let limit = cfg.limit.unwrap_or(usize::MAX);
    Ok(gen.take(limit))
}

/// Odometer-style enumerator behind [`generate_explicit`].  For the
/// current state count `m` the counters index, in order: the real
/// state's interpretation, the `m - 1` remaining interpretations, and
/// one relation candidate per agent.
struct ExplicitGen {
    voc: Arc<Vocabulary>,
    inits: Vec<Formula>,
    frame: FrameClass,
    max_states: usize,
    m: usize,
    states: Vec<StateId>,
    interps: Vec<Interpretation>,
    real_candidates: Vec<Interpretation>,
    rel_candidates: Vec<BTreeSet<(StateId, StateId)>>,
    agents: Vec<AgentId>,
    counters: Vec<usize>,
    exhausted: bool,
    seen: BTreeSet<String>,
}

impl ExplicitGen {
    fn counter_limits(&self) -> Vec<usize> {
        let mut limits = vec![self.real_candidates.len()];
        limits.extend(std::iter::repeat_n(self.interps.len(), self.m - 1));
        limits.extend(std::iter::repeat_n(self.rel_candidates.len(), self.agents.len()));
        limits
    }

    /// Moves to the next state count; false once past the bound.
    fn enter_next_m(&mut self) -> bool {
        loop {
            if self.m >= self.max_states {
                return false;
            }
            self.m += 1;
            self.states = (1..=self.m).map(|k| StateId::new(format!("s{k}"))).collect();
            if self.interps.is_empty() {
                self.interps = all_interpretations(&self.voc);
                self.real_candidates = self
                    .interps
                    .iter()
                    .filter(|i| {
                        self.inits
                            .iter()
                            .filter(|f| f.is_fluent())
                            .all(|f| fluent_truth(i, f))
                    })
                    .cloned()
                    .collect();
                self.agents = self.voc.agents().cloned().collect();
            }
            self.rel_candidates = relation_candidates(&self.states, self.frame);
            self.counters = vec![0; self.counter_limits().len()];
            if self.counter_limits().iter().all(|&n| n > 0) {
                return true;
            }
        }
    }

    /// Advances the odometer; false when the current `m` is exhausted.
    fn bump(&mut self) -> bool {
        let limits = self.counter_limits();
        for k in (0..self.counters.len()).rev() {
            self.counters[k] += 1;
            if self.counters[k] < limits[k] {
                return true;
            }
            self.counters[k] = 0;
        }
        false
    }

    fn assemble(&self) -> PointedStructure {
        let mut m = KripkeStructure::new(self.voc.clone());
        m.add_state(self.states[0].clone(), self.real_candidates[self.counters[0]].clone())
            .expect("fresh state names");
        for k in 1..self.m {
            m.add_state(self.states[k].clone(), self.interps[self.counters[k]].clone())
                .expect("fresh state names");
        }
        for (j, agent) in self.agents.iter().enumerate() {
            let pairs = self.rel_candidates[self.counters[self.m + j]].clone();
            m.set_relation(agent, pairs).expect("candidate endpoints exist");
        }
        PointedStructure::new(m, self.states[0].clone()).expect("real state added first")
    }
}

impl Iterator for ExplicitGen {
    type Item = PointedStructure;

    fn next(&mut self) -> Option<PointedStructure> {
        loop {
            if self.m == 0 || self.exhausted {
                if !self.enter_next_m() {
                    return None;
                }
                self.exhausted = false;
            }
            let candidate = self.assemble();
            if !self.bump() {
                self.exhausted = true;
            }
            let real = candidate.real().clone();
            if self.inits.iter().all(|f| candidate.structure().eval(&real, f))
                && self.seen.insert(canonical_key(&candidate))
            {
                return Some(candidate);
            }
        }
    }
}

/// All interpretations over the vocabulary's fluents, sorted.
fn all_interpretations(voc: &Vocabulary) -> Vec<Interpretation> {
    let fluents: Vec<FluentAtom> = voc.fluents().cloned().collect();
    let mut out: Vec<Interpretation> = (0u32..(1 << fluents.len()))
        .map(|mask| {
            Interpretation::from_true_atoms(
                fluents
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, a)| a.clone()),
            )
        })
        .collect();
    out.sort();
    out
}

/// Truth of a fluent formula under one interpretation.
fn fluent_truth(interp: &Interpretation, f: &Formula) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a) => interp.truth(a),
        Formula::Not(g) => !fluent_truth(interp, g),
        Formula::And(l, r) => fluent_truth(interp, l) && fluent_truth(interp, r),
        Formula::Or(l, r) => fluent_truth(interp, l) || fluent_truth(interp, r),
        Formula::Implies(l, r) => !fluent_truth(interp, l) || fluent_truth(interp, r),
        _ => unreachable!("callers filter on Formula::is_fluent"),
    }
}

/// Every relation of the frame class over `states`, obtained as the
/// deduplicated closures of all pair subsets (with non-serial
/// candidates dropped for `Elt`).  A relation is valid for the class
/// exactly when it is its own closure, so this enumeration is complete.
fn relation_candidates(states: &[StateId], frame: FrameClass) -> Vec<BTreeSet<(StateId, StateId)>> {
    let pairs: Vec<(StateId, StateId)> = states
        .iter()
        .flat_map(|u| states.iter().map(move |v| (u.clone(), v.clone())))
        .collect();
    let props = frame.closure_properties();
    let needs_serial = frame.properties().contains(&FrameProperty::Serial);
    let mut set: BTreeSet<BTreeSet<(StateId, StateId)>> = BTreeSet::new();
    for mask in 0u32..(1 << pairs.len()) {
        let chosen: BTreeSet<(StateId, StateId)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, p)| p.clone())
            .collect();
        let closed = close_relation_pairs(chosen, states, props);
        if needs_serial && states.iter().any(|s| !closed.iter().any(|(u, _)| u == s)) {
            continue;
        }
        set.insert(closed);
    }
    set.into_iter().collect()
}

/// Smallest serialization of the structure over all renamings of the
/// non-real states; two structures get the same key exactly when one is
/// a real-preserving renaming of the other.
fn canonical_key(p: &PointedStructure) -> String {
    let m = p.structure();
    let rest: Vec<&StateId> = m.state_ids().filter(|s| *s != p.real()).collect();
    let agents: Vec<&AgentId> = m.vocabulary().agents().collect();
    let mut best: Option<String> = None;
    let k = rest.len();
    for perm in rest.iter().copied().permutations(k) {
        let mut pos: BTreeMap<StateId, usize> = BTreeMap::new();
        pos.insert(p.real().clone(), 0);
        for (i, s) in perm.iter().enumerate() {
            pos.insert((*s).clone(), i + 1);
        }
        let order = std::iter::once(p.real()).chain(perm);
        let mut text = String::new();
        for s in order {
            let atoms: Vec<String> =
                m.interpretation(s).expect("state listed").true_atoms().map(|a| a.to_string()).collect();
            text.push_str(&format!("[{}]", atoms.join(",")));
        }
        for agent in &agents {
            let mut indices: Vec<(usize, usize)> =
                m.relation_pairs(agent).into_iter().map(|(u, v)| (pos[&u], pos[&v])).collect();
            indices.sort_unstable();
            text.push_str(&format!("{agent}:{indices:?};"));
        }
        match &best {
            Some(b) if text >= *b => {}
            _ => best = Some(text),
        }
    }
    best.unwrap_or_default()
}

/// Builds the structure of an arithmetic universe: one state per
/// assignment satisfying every constraint, with the assignment's values
/// as the only true fluents, and an arc `(u, v)` for an agent exactly
/// when all of the agent's observation expressions evaluate equally at
/// `u` and `v`.
///
/// State `x = 4, y = 13` is named `s4_13` (values joined by `_` in
/// declaration order).  The vocabulary contains one fluent family per
/// universe variable, restricted to the values that actually occur.
pub fn generate_partition(u: &UniverseSpec) -> Result<KripkeStructure, GenError> {
    if u.vars.is_empty() {
        return Err(GenError::EmptyUniverse);
    }
    let assignments: Vec<BTreeMap<String, i64>> = u
        .vars
        .iter()
        .map(|(_, lo, hi)| *lo..=*hi)
        .multi_cartesian_product()
        .map(|values| {
            u.vars.iter().zip(values).map(|((name, _, _), v)| (name.clone(), v)).collect()
        })
        .filter(|env| u.constraints.iter().all(|c| c.eval_bool(env)))
        .collect();
    if assignments.is_empty() {
        return Err(GenError::EmptyUniverse);
    }

    let agents: BTreeSet<AgentId> = u.observations.iter().map(|(a, _)| a.clone()).collect();
    let fluents: BTreeSet<FluentAtom> = assignments
        .iter()
        .flat_map(|env| env.iter().map(|(name, v)| FluentAtom::new(name.clone(), [Term::Int(*v)])))
        .collect();
    let voc = Arc::new(Vocabulary::new(agents, fluents)?);

    let mut m = KripkeStructure::new(voc);
    let mut ids: Vec<StateId> = Vec::with_capacity(assignments.len());
    for env in &assignments {
        let name =
            format!("s{}", u.vars.iter().map(|(v, _, _)| env[v].to_string()).join("_"));
        let interp = Interpretation::from_true_atoms(
            u.vars.iter().map(|(v, _, _)| FluentAtom::new(v.clone(), [Term::Int(env[v])])),
        );
        let id = StateId::new(name);
        m.add_state(id.clone(), interp).expect("distinct assignments get distinct names");
        ids.push(id);
    }

    let mut per_agent: BTreeMap<&AgentId, Vec<&crate::lang::UExpr>> = BTreeMap::new();
    for (agent, expr) in &u.observations {
        per_agent.entry(agent).or_default().push(expr);
    }
    for (agent, exprs) in per_agent {
        let mut cells: BTreeMap<Vec<i64>, Vec<&StateId>> = BTreeMap::new();
        for (id, env) in ids.iter().zip(&assignments) {
            let key: Vec<i64> = exprs.iter().map(|e| e.eval_int(env)).collect();
            cells.entry(key).or_default().push(id);
        }
        for cell in cells.values() {
            for s in cell {
                for t in cell {
                    m.add_arc(s, agent, t).expect("cell members are states");
                }
            }
        }
    }
    Ok(m)
}

/// Keeps exactly the states satisfying `goal`, evaluated in the
/// original structure for every state, and drops all incident arcs.
pub fn filter_states(m: &KripkeStructure, goal: &Formula) -> KripkeStructure {
    let remove: BTreeSet<StateId> =
        m.state_ids().filter(|u| !m.eval(u, goal)).cloned().collect();
    state_remove(m, &remove).expect("removal set drawn from the structure")
}

/// Applies [`filter_states`] once per formula, left to right; each
/// formula is evaluated in the structure surviving the previous ones.
pub fn announcement_chain<'a>(
    m: &KripkeStructure,
    formulas: impl IntoIterator<Item = &'a Formula>,
) -> KripkeStructure {
    formulas.into_iter().fold(m.clone(), |acc, f| filter_states(&acc, f))
}
