//! Front end for the action-description DSL: domain files declaring
//! agents, fluents, a frame system, initial conditions, and action
//! laws; universe blocks for implicitly specified structures; and query
//! strings of the form `φ after [a1; ...; an]`.
//!
//! Statements are terminated by `.`, comments start with `%`.  Schema
//! variables (uppercase identifiers) in action laws range over the
//! declared agents and are expanded by [`Domain::ground`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use thiserror::Error;

use crate::model::{
    AgentId, DeclarationError, FluentAtom, Formula, FrameClass, Literal, Term, Vocabulary,
};

mod lexer;
mod parser;

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum LangError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: u32, col: u32, message: String },
    #[error("agent `{0}` is not declared")]
    UndeclaredAgent(String),
    #[error("fluent `{0}` is not declared")]
    UndeclaredFluent(String),
    #[error("`{0}` is not a declared fluent family")]
    UnknownFamily(String),
    #[error("more than one system declaration")]
    DuplicateSystem,
    #[error("unknown system `{0}` (expected t, s4, s5, kd45, or none)")]
    UnknownSystem(String),
    #[error("initial-condition formulas must be variable-free: `{0}`")]
    NonGroundInit(String),
    #[error("announcement content of `{action}` has an unsupported shape: `{content}`")]
    MalformedAnnouncement { action: String, content: String },
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("action `{0}` mixes causes, announces, and determines laws")]
    MixedLawKinds(String),
    #[error("action `{0}` has more than one announces/determines law")]
    DuplicateEffectLaw(String),
    #[error("action `{0}` has no effect law")]
    NoEffectLaw(String),
    #[error("causes laws of `{0}` disagree on the performer set")]
    PerformerMismatch(String),
    #[error("action `{0}` still contains schema variables; ground the domain first")]
    UngroundedAction(String),
    #[error("query actions must be ground: `{0}`")]
    NonGroundAction(String),
    #[error("universe variable `{0}` is declared twice")]
    DuplicateUniverseVar(String),
    #[error("universe variable `{0}` is not declared")]
    UndeclaredUniverseVar(String),
    #[error("expected a comparison or conjunction: `{0}`")]
    BooleanExpected(String),
    #[error("expected an arithmetic expression: `{0}`")]
    IntegerExpected(String),
    #[error(transparent)]
    Declaration(#[from] DeclarationError),
}

/// Ground or schematic action name with arguments, e.g. `peek(X,Y)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct ActionHead {
    pub name: String,
    pub args: Vec<Term>,
}

impl ActionHead {
    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }
}

impl fmt::Display for ActionHead {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
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

/// One statement of an action description.
#[derive(Clone, PartialEq, Debug)]
pub struct ActionLaw {
    pub head: ActionHead,
    pub body: LawBody,
}

/// The four law forms.  `performers`/`observers` hold agent names or
/// schema variables; conditions equal to `true` are empty conjunctions.
#[derive(Clone, PartialEq, Debug)]
pub enum LawBody {
    Executable(Formula),
    Causes { effect: Vec<Literal>, condition: Vec<Literal>, performers: Vec<Term> },
    Announces { content: Formula, performers: Vec<Term>, observers: Vec<Term> },
    Determines { fluent: FluentAtom, performers: Vec<Term>, observers: Vec<Term> },
}

/// Comparison operators usable in universe constraints.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        })
    }
}

/// Integer expression over universe variables: literals, variables,
/// `+`, `*`, comparisons, and conjunction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum UExpr {
    Int(i64),
    Var(String),
    Add(Box<UExpr>, Box<UExpr>),
    Mul(Box<UExpr>, Box<UExpr>),
    Cmp(CmpOp, Box<UExpr>, Box<UExpr>),
    And(Box<UExpr>, Box<UExpr>),
}

impl UExpr {
    /// True for expressions that evaluate to a truth value.
    pub fn is_boolean(&self) -> bool {
        matches!(self, UExpr::Cmp(..) | UExpr::And(..))
    }

    fn vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            UExpr::Int(_) => {}
            UExpr::Var(v) => {
                out.insert(v.clone());
            }
            UExpr::Add(a, b) | UExpr::Mul(a, b) | UExpr::Cmp(_, a, b) | UExpr::And(a, b) => {
                a.vars_into(out);
                b.vars_into(out);
            }
        }
    }

    /// Variables mentioned in the expression.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.vars_into(&mut out);
        out
    }

    /// Checks that arithmetic and boolean positions are not mixed.
    fn well_typed(&self) -> Result<(), LangError> {
        match self {
            UExpr::Int(_) | UExpr::Var(_) => Ok(()),
            UExpr::Add(a, b) | UExpr::Mul(a, b) => {
                for side in [a, b] {
                    if side.is_boolean() {
                        return Err(LangError::IntegerExpected(side.to_string()));
                    }
                    side.well_typed()?;
                }
                Ok(())
            }
            UExpr::Cmp(_, a, b) => {
                for side in [a, b] {
                    if side.is_boolean() {
                        return Err(LangError::IntegerExpected(side.to_string()));
                    }
                    side.well_typed()?;
                }
                Ok(())
            }
            UExpr::And(a, b) => {
                for side in [a, b] {
                    if !side.is_boolean() {
                        return Err(LangError::BooleanExpected(side.to_string()));
                    }
                    side.well_typed()?;
                }
                Ok(())
            }
        }
    }

    /// Evaluates an arithmetic expression; the expression must be
    /// well-typed and non-boolean.
    pub fn eval_int(&self, env: &BTreeMap<String, i64>) -> i64 {
        match self {
            UExpr::Int(n) => *n,
            UExpr::Var(v) => env[v.as_str()],
            UExpr::Add(a, b) => a.eval_int(env) + b.eval_int(env),
            UExpr::Mul(a, b) => a.eval_int(env) * b.eval_int(env),
            UExpr::Cmp(..) | UExpr::And(..) => {
                unreachable!("boolean expression in arithmetic position")
            }
        }
    }

    /// Evaluates a boolean expression; the expression must be
    /// well-typed and boolean.
    pub fn eval_bool(&self, env: &BTreeMap<String, i64>) -> bool {
        match self {
            UExpr::And(a, b) => a.eval_bool(env) && b.eval_bool(env),
            UExpr::Cmp(op, a, b) => {
                let (x, y) = (a.eval_int(env), b.eval_int(env));
                match op {
                    CmpOp::Lt => x < y,
                    CmpOp::Le => x <= y,
                    CmpOp::Gt => x > y,
                    CmpOp::Ge => x >= y,
                    CmpOp::Eq => x == y,
                    CmpOp::Ne => x != y,
                }
            }
            _ => unreachable!("arithmetic expression in boolean position"),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = match self {
            UExpr::And(..) => 1,
            UExpr::Cmp(..) => 2,
            UExpr::Add(..) => 3,
            UExpr::Mul(..) => 4,
            UExpr::Int(_) | UExpr::Var(_) => 5,
        };
        let paren = prec < min;
        if paren {
            write!(f, "(")?;
        }
        match self {
            UExpr::Int(n) => write!(f, "{n}")?,
            UExpr::Var(v) => f.write_str(v)?,
            UExpr::Add(a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 4)?;
            }
            UExpr::Mul(a, b) => {
                a.fmt_prec(f, 4)?;
                write!(f, " * ")?;
                b.fmt_prec(f, 5)?;
            }
            UExpr::Cmp(op, a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, " {op} ")?;
                b.fmt_prec(f, 3)?;
            }
            UExpr::And(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 2)?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for UExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// An implicitly specified family of states: integer variables with
/// finite ranges, constraints selecting the valid assignments, and one
/// observation expression per agent (two assignments are
/// indistinguishable to an agent iff its observation agrees on them).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct UniverseSpec {
    pub vars: Vec<(String, i64, i64)>,
    pub constraints: Vec<UExpr>,
    pub observations: Vec<(AgentId, UExpr)>,
}

/// A parsed action description: declarations, at most one frame-system
/// statement, initial conditions, action laws, and an optional
/// universe block.
#[derive(Clone, PartialEq, Debug)]
pub struct Domain {
    agents: Vec<AgentId>,
    fluent_decls: Vec<FluentAtom>,
    system: Option<FrameClass>,
    inits: Vec<Formula>,
    laws: Vec<ActionLaw>,
    universe: Option<UniverseSpec>,
}

/// A fully resolved ground action: its name, executability condition,
/// and the one effect form its laws define.
#[derive(Clone, PartialEq, Debug)]
pub struct ActionInstance {
    head: ActionHead,
    pre: Formula,
    kind: ActionKind,
}

/// The effect form of a resolved action.
#[derive(Clone, PartialEq, Debug)]
pub enum ActionKind {
    /// Truthful announcement to everyone.
    PublicAnnounce(Formula),
    /// Truthful announcement of a fluent literal to the performers and
    /// the listed observers; everyone else is oblivious.
    PrivateAnnounce {
        content: Literal,
        performers: BTreeSet<AgentId>,
        observers: BTreeSet<AgentId>,
    },
    /// Sensing of a fluent's value by the performers; observers learn
    /// only that the sensing happened.
    Sense { fluent: FluentAtom, performers: BTreeSet<AgentId>, observers: BTreeSet<AgentId> },
    /// World-altering action with conditional effects, visible to the
    /// performers only.
    Ontic { cases: Vec<CausesCase>, performers: BTreeSet<AgentId> },
}

/// One `causes` law of an ontic action: the literals it forces and the
/// literal-conjunction guard (empty = always applicable).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CausesCase {
    pub effect: Vec<Literal>,
    pub condition: Vec<Literal>,
}

impl ActionInstance {
    pub fn name(&self) -> &str {
        &self.head.name
    }

    pub fn args(&self) -> &[Term] {
        &self.head.args
    }

    pub fn head(&self) -> &ActionHead {
        &self.head
    }

    /// The executability condition (conjunction of all `executable if`
    /// laws; `true` when there are none).
    pub fn pre(&self) -> &Formula {
        &self.pre
    }

    pub fn kind(&self) -> &ActionKind {
        &self.kind
    }
}

impl fmt::Display for ActionInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)
    }
}

/// A goal formula together with the ground action sequence after which
/// it is to be evaluated.
#[derive(Clone, PartialEq, Debug)]
pub struct Query {
    pub goal: Formula,
    pub actions: Vec<ActionInstance>,
}

fn is_var_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase() || c == '_')
}

/// Parses and semantically checks a domain file.
pub fn parse_domain(text: &str) -> Result<Domain, LangError> {
    let raw = parser::Parser::new(text)?.parse_domain()?;
    let system = match raw.systems.len() {
        0 => None,
        1 => Some(parse_system(&raw.systems[0])?),
        _ => return Err(LangError::DuplicateSystem),
    };
    let agents: Vec<AgentId> = raw.agents.clone();
    let agent_set: BTreeSet<AgentId> = agents.iter().cloned().collect();
    let fluents = expand_fluent_decls(&raw.fluent_decls, &agent_set);
    let universe = build_universe(&raw, &agent_set)?;
    let table = SymbolTable::new(&agent_set, &fluents, universe.as_ref());
    for f in &raw.inits {
        table.check_formula(f, false).map_err(|e| match e {
            LangError::NonGroundInit(_) => LangError::NonGroundInit(f.to_string()),
            other => other,
        })?;
    }
    let mut laws = Vec::new();
    for law in raw.laws {
        check_law(&law, &table)?;
        if matches!(&law.body, LawBody::Executable(Formula::True)) {
            // `executable if true` states the default; normalize it away.
            continue;
        }
        laws.push(law);
    }
    Ok(Domain { agents, fluent_decls: raw.fluent_decls, system, inits: raw.inits, laws, universe })
}

/// Parses a query string and resolves its actions against `d`.
pub fn parse_query(text: &str, d: &Domain) -> Result<Query, LangError> {
    let raw = parser::Parser::new(text)?.parse_query()?;
    let mut actions = Vec::new();
    for (name, args) in raw.actions {
        let head = ActionHead { name, args };
        if !head.is_ground() {
            return Err(LangError::NonGroundAction(head.to_string()));
        }
        actions.push(d.instance(&head.name, &head.args)?);
    }
    Ok(Query { goal: raw.goal, actions })
}

fn parse_system(name: &str) -> Result<FrameClass, LangError> {
    match name.to_ascii_lowercase().as_str() {
        "t" => Ok(FrameClass::R),
        "s4" => Ok(FrameClass::Rt),
        "s5" => Ok(FrameClass::Rst),
        "kd45" => Ok(FrameClass::Elt),
        "none" => Ok(FrameClass::Free),
        _ => Err(LangError::UnknownSystem(name.to_string())),
    }
}

fn system_name(class: FrameClass) -> &'static str {
    match class {
        FrameClass::R => "t",
        FrameClass::Rt => "s4",
        FrameClass::Rst => "s5",
        FrameClass::Elt => "kd45",
        FrameClass::Free => "none",
    }
}

/// Expands fluent declaration patterns: schema variables in argument
/// positions range over the declared agents.
fn expand_fluent_decls(
    decls: &[FluentAtom],
    agents: &BTreeSet<AgentId>,
) -> BTreeSet<FluentAtom> {
    let mut out = BTreeSet::new();
    for decl in decls {
        let vars: BTreeSet<&str> = decl
            .args()
            .iter()
            .filter_map(|t| match t {
                Term::Var(v) => Some(v.as_str()),
                _ => None,
            })
            .collect();
        if vars.is_empty() {
            out.insert(decl.clone());
            continue;
        }
        let vars: Vec<&str> = vars.into_iter().collect();
        for combo in vars.iter().map(|_| agents.iter()).multi_cartesian_product() {
            let env: BTreeMap<&str, &AgentId> = vars.iter().copied().zip(combo).collect();
            let args = decl.args().iter().map(|t| match t {
                Term::Var(v) => Term::sym(env[v.as_str()].as_str()),
                other => other.clone(),
            });
            out.insert(FluentAtom::new(decl.functor(), args));
        }
    }
    out
}

fn build_universe(
    raw: &parser::RawDomain,
    agents: &BTreeSet<AgentId>,
) -> Result<Option<UniverseSpec>, LangError> {
    if raw.universe_vars.is_empty() && raw.constraints.is_empty() && raw.observations.is_empty()
    {
        return Ok(None);
    }
    let mut seen = BTreeSet::new();
    for (name, _, _) in &raw.universe_vars {
        if !seen.insert(name.clone()) {
            return Err(LangError::DuplicateUniverseVar(name.clone()));
        }
    }
    let check_vars = |e: &UExpr| -> Result<(), LangError> {
        e.well_typed()?;
        for v in e.vars() {
            if !seen.contains(&v) {
                return Err(LangError::UndeclaredUniverseVar(v));
            }
        }
        Ok(())
    };
    for c in &raw.constraints {
        check_vars(c)?;
        if !c.is_boolean() {
            return Err(LangError::BooleanExpected(c.to_string()));
        }
    }
    for (agent, e) in &raw.observations {
        if !agents.contains(agent) {
            return Err(LangError::UndeclaredAgent(agent.to_string()));
        }
        check_vars(e)?;
        if e.is_boolean() {
            return Err(LangError::IntegerExpected(e.to_string()));
        }
    }
    Ok(Some(UniverseSpec {
        vars: raw.universe_vars.clone(),
        constraints: raw.constraints.clone(),
        observations: raw.observations.clone(),
    }))
}

/// Scoped symbol lookup used by the semantic checks.
struct SymbolTable<'a> {
    agents: &'a BTreeSet<AgentId>,
    fluents: &'a BTreeSet<FluentAtom>,
    families: BTreeSet<String>,
}

impl<'a> SymbolTable<'a> {
    fn new(
        agents: &'a BTreeSet<AgentId>,
        fluents: &'a BTreeSet<FluentAtom>,
        universe: Option<&UniverseSpec>,
    ) -> Self {
        let mut families: BTreeSet<String> = fluents
            .iter()
            .filter(|a| !a.args().is_empty())
            .map(|a| a.functor().to_string())
            .collect();
        if let Some(u) = universe {
            families.extend(u.vars.iter().map(|(name, _, _)| name.clone()));
        }
        SymbolTable { agents, fluents, families }
    }

    fn check_agent(&self, agent: &AgentId, allow_vars: bool) -> Result<(), LangError> {
        if is_var_name(agent.as_str()) {
            if allow_vars {
                return Ok(());
            }
            return Err(LangError::NonGroundInit(agent.to_string()));
        }
        if self.agents.contains(agent) {
            Ok(())
        } else {
            Err(LangError::UndeclaredAgent(agent.to_string()))
        }
    }

    fn check_atom(&self, atom: &FluentAtom, allow_vars: bool) -> Result<(), LangError> {
        if atom.is_ground() {
            if self.fluents.contains(atom) {
                Ok(())
            } else {
                Err(LangError::UndeclaredFluent(atom.to_string()))
            }
        } else if !allow_vars {
            Err(LangError::NonGroundInit(atom.to_string()))
        } else {
            // A schematic atom is fine if some declared instance has
            // the same functor and arity.
            let arity = atom.args().len();
            if self
                .fluents
                .iter()
                .any(|f| f.functor() == atom.functor() && f.args().len() == arity)
            {
                Ok(())
            } else {
                Err(LangError::UndeclaredFluent(atom.to_string()))
            }
        }
    }

    fn check_formula(&self, f: &Formula, allow_vars: bool) -> Result<(), LangError> {
        match f {
            Formula::True | Formula::False => Ok(()),
            Formula::Atom(a) => self.check_atom(a, allow_vars),
            Formula::Not(g) => self.check_formula(g, allow_vars),
            Formula::And(g, h) | Formula::Or(g, h) | Formula::Implies(g, h) => {
                self.check_formula(g, allow_vars)?;
                self.check_formula(h, allow_vars)
            }
            Formula::Knows(i, g) => {
                self.check_agent(i, allow_vars)?;
                self.check_formula(g, allow_vars)
            }
            Formula::Everyone(group, g) | Formula::Common(group, g) => {
                for i in group {
                    self.check_agent(i, allow_vars)?;
                }
                self.check_formula(g, allow_vars)
            }
            Formula::KnowsValue(i, family) => {
                self.check_agent(i, allow_vars)?;
                if self.families.contains(family) {
                    Ok(())
                } else {
                    Err(LangError::UnknownFamily(family.clone()))
                }
            }
        }
    }

    fn check_agent_spec(&self, spec: &[Term], allow_vars: bool) -> Result<(), LangError> {
        for t in spec {
            match t {
                Term::Sym(s) => self.check_agent(&AgentId::new(s.as_str()), false)?,
                Term::Var(v) => {
                    if !allow_vars {
                        return Err(LangError::NonGroundInit(v.clone()));
                    }
                }
                Term::Int(n) => return Err(LangError::UndeclaredAgent(n.to_string())),
            }
        }
        Ok(())
    }
}

fn check_law(law: &ActionLaw, table: &SymbolTable) -> Result<(), LangError> {
    match &law.body {
        LawBody::Executable(f) => table.check_formula(f, true),
        LawBody::Causes { effect, condition, performers } => {
            for lit in effect.iter().chain(condition) {
                table.check_atom(&lit.atom, true)?;
            }
            table.check_agent_spec(performers, true)
        }
        LawBody::Announces { content, performers, observers } => {
            table.check_formula(content, true)?;
            table.check_agent_spec(performers, true)?;
            table.check_agent_spec(observers, true)?;
            // Shape checks need the ground performer set; run them now
            // only when nothing is schematic.
            let schematic = !law.head.is_ground()
                || performers.iter().chain(observers).any(|t| !t.is_ground())
                || !formula_is_ground(content);
            if !schematic {
                let performers = term_agent_set(performers);
                let observers = term_agent_set(observers);
                classify_announcement(
                    &law.head,
                    content,
                    &performers,
                    &observers,
                    table.agents,
                )?;
            }
            Ok(())
        }
        LawBody::Determines { fluent, performers, observers } => {
            table.check_atom(fluent, true)?;
            table.check_agent_spec(performers, true)?;
            table.check_agent_spec(observers, true)
        }
    }
}

fn term_agent_set(spec: &[Term]) -> BTreeSet<AgentId> {
    spec.iter()
        .filter_map(|t| match t {
            Term::Sym(s) | Term::Var(s) => Some(AgentId::new(s.as_str())),
            Term::Int(_) => None,
        })
        .collect()
}

fn formula_is_ground(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::False => true,
        Formula::Atom(a) => a.is_ground(),
        Formula::Not(g) => formula_is_ground(g),
        Formula::And(g, h) | Formula::Or(g, h) | Formula::Implies(g, h) => {
            formula_is_ground(g) && formula_is_ground(h)
        }
        Formula::Knows(i, g) => !is_var_name(i.as_str()) && formula_is_ground(g),
        Formula::Everyone(group, g) | Formula::Common(group, g) => {
            group.iter().all(|i| !is_var_name(i.as_str())) && formula_is_ground(g)
        }
        Formula::KnowsValue(i, _) => !is_var_name(i.as_str()),
    }
}

/// How a resolved announcement updates the structure.
enum AnnouncementClass {
    Public(Formula),
    Private(Literal),
}

/// Public announcements require one of the three supported content
/// shapes (a fluent formula, `k(i,ψ)`, or `~(k(i,ψ) | k(i,~ψ))`);
/// private announcements require a fluent literal.
fn classify_announcement(
    head: &ActionHead,
    content: &Formula,
    performers: &BTreeSet<AgentId>,
    observers: &BTreeSet<AgentId>,
    all_agents: &BTreeSet<AgentId>,
) -> Result<AnnouncementClass, LangError> {
    let extra_observers: BTreeSet<_> = observers.difference(performers).collect();
    let is_public = performers == all_agents && extra_observers.is_empty();
    let malformed = || LangError::MalformedAnnouncement {
        action: head.to_string(),
        content: content.to_string(),
    };
    if is_public {
        if content.is_fluent() || matches!(content, Formula::Knows(..)) {
            return Ok(AnnouncementClass::Public(content.clone()));
        }
        if let Formula::Not(inner) = content {
            if let Formula::Or(l, r) = inner.as_ref() {
                if let (Formula::Knows(i, p), Formula::Knows(j, q)) = (l.as_ref(), r.as_ref()) {
                    let complementary = **q == Formula::not((**p).clone())
                        || **p == Formula::not((**q).clone());
                    if i == j && complementary {
                        return Ok(AnnouncementClass::Public(content.clone()));
                    }
                }
            }
        }
        return Err(malformed());
    }
    match content {
        Formula::Atom(a) => Ok(AnnouncementClass::Private(Literal::pos(a.clone()))),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Atom(a) => Ok(AnnouncementClass::Private(Literal::neg(a.clone()))),
            _ => Err(malformed()),
        },
        _ => Err(malformed()),
    }
}

impl Domain {
    pub fn agents(&self) -> impl Iterator<Item = &AgentId> {
        self.agents.iter()
    }

    pub fn agent_set(&self) -> BTreeSet<AgentId> {
        self.agents.iter().cloned().collect()
    }

    /// The ground fluent set: declarations with schema variables are
    /// expanded over the agents.
    pub fn ground_fluents(&self) -> BTreeSet<FluentAtom> {
        expand_fluent_decls(&self.fluent_decls, &self.agent_set())
    }

    /// Builds the vocabulary structures over this domain use.
    pub fn vocabulary(&self) -> Result<Arc<Vocabulary>, LangError> {
        Ok(Arc::new(Vocabulary::new(self.agent_set(), self.ground_fluents())?))
    }

    /// The declared frame class; `Free` when no system statement is
    /// present.
    pub fn frame(&self) -> FrameClass {
        self.system.unwrap_or(FrameClass::Free)
    }

    pub fn system(&self) -> Option<FrameClass> {
        self.system
    }

    pub fn inits(&self) -> &[Formula] {
        &self.inits
    }

    /// All initial conditions as one conjunction.
    pub fn init_conjunction(&self) -> Formula {
        Formula::and_all(self.inits.iter().cloned())
    }

    pub fn laws(&self) -> &[ActionLaw] {
        &self.laws
    }

    pub fn universe(&self) -> Option<&UniverseSpec> {
        self.universe.as_ref()
    }

    pub fn is_ground(&self) -> bool {
        self.laws.iter().all(law_is_ground)
    }

    /// Expands every law schema over the declared agents.  Each schema
    /// variable ranges over all agents independently; instances whose
    /// substitution produces undeclared ground atoms are dropped.
    pub fn ground(&self) -> Domain {
        let agents: Vec<AgentId> = self.agent_set().into_iter().collect();
        let fluents = self.ground_fluents();
        let agent_set = self.agent_set();
        let table = SymbolTable::new(&agent_set, &fluents, self.universe.as_ref());
        let mut laws = Vec::new();
        for law in &self.laws {
            let vars: Vec<String> = law_vars(law).into_iter().collect();
            if vars.is_empty() {
                laws.push(law.clone());
                continue;
            }
            for combo in vars.iter().map(|_| agents.iter()).multi_cartesian_product() {
                let env: BTreeMap<&str, &AgentId> =
                    vars.iter().map(String::as_str).zip(combo).collect();
                let instance = subst_law(law, &env);
                if check_law(&instance, &table).is_ok() {
                    laws.push(instance);
                }
            }
        }
        Domain { laws, ..self.clone() }
    }

    /// Resolves one ground action against the domain's laws.
    pub fn instance(&self, name: &str, args: &[Term]) -> Result<ActionInstance, LangError> {
        let head = ActionHead { name: name.to_string(), args: args.to_vec() };
        let matching: Vec<&ActionLaw> =
            self.laws.iter().filter(|l| l.head == head).collect();
        if matching.is_empty() {
            return Err(LangError::UnknownAction(head.to_string()));
        }
        let mut pres = Vec::new();
        let mut causes: Vec<(Vec<Literal>, Vec<Literal>, BTreeSet<AgentId>)> = Vec::new();
        let mut announces = Vec::new();
        let mut determines = Vec::new();
        for law in &matching {
            if !law_is_ground(law) {
                return Err(LangError::UngroundedAction(head.to_string()));
            }
            match &law.body {
                LawBody::Executable(f) => pres.push(f.clone()),
                LawBody::Causes { effect, condition, performers } => causes.push((
                    effect.clone(),
                    condition.clone(),
                    term_agent_set(performers),
                )),
                LawBody::Announces { content, performers, observers } => announces.push((
                    content.clone(),
                    term_agent_set(performers),
                    term_agent_set(observers),
                )),
                LawBody::Determines { fluent, performers, observers } => determines.push((
                    fluent.clone(),
                    term_agent_set(performers),
                    term_agent_set(observers),
                )),
            }
        }
        let pre = Formula::and_all(pres);
        let variants_used = [!causes.is_empty(), !announces.is_empty(), !determines.is_empty()]
            .iter()
            .filter(|b| **b)
            .count();
        match variants_used {
            0 => return Err(LangError::NoEffectLaw(head.to_string())),
            1 => {}
            _ => return Err(LangError::MixedLawKinds(head.to_string())),
        }
        let all_agents = self.agent_set();
        let kind = if !causes.is_empty() {
            let performers = causes[0].2.clone();
            if causes.iter().any(|(_, _, p)| *p != performers) {
                return Err(LangError::PerformerMismatch(head.to_string()));
            }
            let cases = causes
                .into_iter()
                .map(|(effect, condition, _)| CausesCase { effect, condition })
                .collect();
            ActionKind::Ontic { cases, performers }
        } else if !announces.is_empty() {
            if announces.len() > 1 {
                return Err(LangError::DuplicateEffectLaw(head.to_string()));
            }
            let (content, performers, observers) = announces.pop().expect("nonempty");
            let observers: BTreeSet<AgentId> =
                observers.difference(&performers).cloned().collect();
            match classify_announcement(&head, &content, &performers, &observers, &all_agents)?
            {
                AnnouncementClass::Public(f) => ActionKind::PublicAnnounce(f),
                AnnouncementClass::Private(lit) => {
                    ActionKind::PrivateAnnounce { content: lit, performers, observers }
                }
            }
        } else {
            if determines.len() > 1 {
                return Err(LangError::DuplicateEffectLaw(head.to_string()));
            }
            let (fluent, performers, observers) = determines.pop().expect("nonempty");
            let observers: BTreeSet<AgentId> =
                observers.difference(&performers).cloned().collect();
            ActionKind::Sense { fluent, performers, observers }
        };
        Ok(ActionInstance { head, pre, kind })
    }

    /// All resolvable ground actions, sorted by name then arguments,
    /// the planners' branching order.
    pub fn instances(&self) -> Result<Vec<ActionInstance>, LangError> {
        let mut heads = BTreeSet::new();
        for law in &self.laws {
            if !law_is_ground(law) {
                return Err(LangError::UngroundedAction(law.head.to_string()));
            }
            heads.insert(law.head.clone());
        }
        heads.into_iter().map(|h| self.instance(&h.name, &h.args)).collect()
    }
}

fn law_is_ground(law: &ActionLaw) -> bool {
    law_vars(law).is_empty()
}

fn law_vars(law: &ActionLaw) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let add_terms = |terms: &[Term], out: &mut BTreeSet<String>| {
        for t in terms {
            if let Term::Var(v) = t {
                out.insert(v.clone());
            }
        }
    };
    add_terms(&law.head.args, &mut out);
    match &law.body {
        LawBody::Executable(f) => formula_vars(f, &mut out),
        LawBody::Causes { effect, condition, performers } => {
            for lit in effect.iter().chain(condition) {
                add_terms(lit.atom.args(), &mut out);
            }
            add_terms(performers, &mut out);
        }
        LawBody::Announces { content, performers, observers } => {
            formula_vars(content, &mut out);
            add_terms(performers, &mut out);
            add_terms(observers, &mut out);
        }
        LawBody::Determines { fluent, performers, observers } => {
            add_terms(fluent.args(), &mut out);
            add_terms(performers, &mut out);
            add_terms(observers, &mut out);
        }
    }
    out
}

fn formula_vars(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Atom(a) => {
            for t in a.args() {
                if let Term::Var(v) = t {
                    out.insert(v.clone());
                }
            }
        }
        Formula::Not(g) => formula_vars(g, out),
        Formula::And(g, h) | Formula::Or(g, h) | Formula::Implies(g, h) => {
            formula_vars(g, out);
            formula_vars(h, out);
        }
        Formula::Knows(i, g) => {
            if is_var_name(i.as_str()) {
                out.insert(i.as_str().to_string());
            }
            formula_vars(g, out);
        }
        Formula::Everyone(group, g) | Formula::Common(group, g) => {
            for i in group {
                if is_var_name(i.as_str()) {
                    out.insert(i.as_str().to_string());
                }
            }
            formula_vars(g, out);
        }
        Formula::KnowsValue(i, _) => {
            if is_var_name(i.as_str()) {
                out.insert(i.as_str().to_string());
            }
        }
    }
}

fn subst_term(t: &Term, env: &BTreeMap<&str, &AgentId>) -> Term {
    match t {
        Term::Var(v) => match env.get(v.as_str()) {
            Some(agent) => Term::sym(agent.as_str()),
            None => t.clone(),
        },
        other => other.clone(),
    }
}

fn subst_atom(a: &FluentAtom, env: &BTreeMap<&str, &AgentId>) -> FluentAtom {
    FluentAtom::new(a.functor(), a.args().iter().map(|t| subst_term(t, env)))
}

fn subst_agent(i: &AgentId, env: &BTreeMap<&str, &AgentId>) -> AgentId {
    match env.get(i.as_str()) {
        Some(agent) if is_var_name(i.as_str()) => (*agent).clone(),
        _ => i.clone(),
    }
}

fn subst_formula(f: &Formula, env: &BTreeMap<&str, &AgentId>) -> Formula {
    match f {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Atom(a) => Formula::Atom(subst_atom(a, env)),
        Formula::Not(g) => Formula::not(subst_formula(g, env)),
        Formula::And(g, h) => Formula::and(subst_formula(g, env), subst_formula(h, env)),
        Formula::Or(g, h) => Formula::or(subst_formula(g, env), subst_formula(h, env)),
        Formula::Implies(g, h) => {
            Formula::implies(subst_formula(g, env), subst_formula(h, env))
        }
        Formula::Knows(i, g) => Formula::knows(subst_agent(i, env), subst_formula(g, env)),
        Formula::Everyone(group, g) => Formula::everyone(
            group.iter().map(|i| subst_agent(i, env)),
            subst_formula(g, env),
        ),
        Formula::Common(group, g) => Formula::common(
            group.iter().map(|i| subst_agent(i, env)),
            subst_formula(g, env),
        ),
        Formula::KnowsValue(i, family) => {
            Formula::KnowsValue(subst_agent(i, env), family.clone())
        }
    }
}

fn subst_literal(lit: &Literal, env: &BTreeMap<&str, &AgentId>) -> Literal {
    Literal { atom: subst_atom(&lit.atom, env), positive: lit.positive }
}

fn subst_law(law: &ActionLaw, env: &BTreeMap<&str, &AgentId>) -> ActionLaw {
    let head = ActionHead {
        name: law.head.name.clone(),
        args: law.head.args.iter().map(|t| subst_term(t, env)).collect(),
    };
    let body = match &law.body {
        LawBody::Executable(f) => LawBody::Executable(subst_formula(f, env)),
        LawBody::Causes { effect, condition, performers } => LawBody::Causes {
            effect: effect.iter().map(|l| subst_literal(l, env)).collect(),
            condition: condition.iter().map(|l| subst_literal(l, env)).collect(),
            performers: performers.iter().map(|t| subst_term(t, env)).collect(),
        },
        LawBody::Announces { content, performers, observers } => LawBody::Announces {
            content: subst_formula(content, env),
            performers: performers.iter().map(|t| subst_term(t, env)).collect(),
            observers: observers.iter().map(|t| subst_term(t, env)).collect(),
        },
        LawBody::Determines { fluent, performers, observers } => LawBody::Determines {
            fluent: subst_atom(fluent, env),
            performers: performers.iter().map(|t| subst_term(t, env)).collect(),
            observers: observers.iter().map(|t| subst_term(t, env)).collect(),
        },
    };
    ActionLaw { head, body }
}

// ---------------------------------------------------------------------
// Pretty-printing.  `Domain`'s rendering parses back to an equal value,
// and printing is idempotent across a parse round trip.

fn fmt_literals(f: &mut fmt::Formatter<'_>, lits: &[Literal]) -> fmt::Result {
    if lits.is_empty() {
        return f.write_str("true");
    }
    for (k, lit) in lits.iter().enumerate() {
        if k > 0 {
            f.write_str(" & ")?;
        }
        write!(f, "{lit}")?;
    }
    Ok(())
}

fn fmt_agent_spec(f: &mut fmt::Formatter<'_>, spec: &[Term]) -> fmt::Result {
    if spec.len() == 1 {
        return write!(f, "{}", spec[0]);
    }
    f.write_str("[")?;
    for (k, t) in spec.iter().enumerate() {
        if k > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{t}")?;
    }
    f.write_str("]")
}

impl fmt::Display for ActionLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.head)?;
        match &self.body {
            LawBody::Executable(cond) => write!(f, "executable if {cond}"),
            LawBody::Causes { effect, condition, performers } => {
                f.write_str("causes ")?;
                fmt_literals(f, effect)?;
                if !condition.is_empty() {
                    f.write_str(" if ")?;
                    fmt_literals(f, condition)?;
                }
                f.write_str(" performed_by ")?;
                fmt_agent_spec(f, performers)
            }
            LawBody::Announces { content, performers, observers } => {
                write!(f, "announces {content} performed_by ")?;
                fmt_agent_spec(f, performers)?;
                if !observers.is_empty() {
                    f.write_str(" observed_by ")?;
                    fmt_agent_spec(f, observers)?;
                }
                Ok(())
            }
            LawBody::Determines { fluent, performers, observers } => {
                write!(f, "determines {fluent} performed_by ")?;
                fmt_agent_spec(f, performers)?;
                if !observers.is_empty() {
                    f.write_str(" observed_by ")?;
                    fmt_agent_spec(f, observers)?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.agents {
            writeln!(f, "agent({a}).")?;
        }
        for decl in &self.fluent_decls {
            writeln!(f, "fluent({decl}).")?;
        }
        if let Some(system) = self.system {
            writeln!(f, "system({}).", system_name(system))?;
        }
        for init in &self.inits {
            writeln!(f, "init({init}).")?;
        }
        for law in &self.laws {
            writeln!(f, "{law}.")?;
        }
        if let Some(u) = &self.universe {
            for (name, lo, hi) in &u.vars {
                writeln!(f, "universe({name}, {lo}..{hi}).")?;
            }
            for c in &u.constraints {
                writeln!(f, "constraint({c}).")?;
            }
            for (agent, e) in &u.observations {
                writeln!(f, "observes({agent}, {e}).")?;
            }
        }
        Ok(())
    }
}
