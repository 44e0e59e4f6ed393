use std::collections::BTreeSet;
use std::fmt;

use super::{AgentId, DeclarationError, FluentAtom, Vocabulary};

/// A knowledge formula over fluent atoms.
///
/// `Knows(i, p)` holds when `p` holds in every world agent `i` considers
/// possible.  `Everyone(g, p)` abbreviates the conjunction of `Knows(i, p)`
/// for all `i` in `g`, and `Common(g, p)` requires `p` along every nonempty
/// path of arcs labelled by agents from `g`.  `KnowsValue(i, fam)` holds
/// when some declared instance `fam(c)` satisfies `Knows(i, fam(c))`; it is
/// the finite stand-in for "agent `i` can name the value of `fam`".
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    True,
    False,
    Atom(FluentAtom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Knows(AgentId, Box<Formula>),
    Everyone(BTreeSet<AgentId>, Box<Formula>),
    Common(BTreeSet<AgentId>, Box<Formula>),
    KnowsValue(AgentId, String),
}

impl Formula {
    pub fn atom(a: FluentAtom) -> Self {
        Formula::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Self {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn knows(agent: AgentId, body: Formula) -> Self {
        Formula::Knows(agent, Box::new(body))
    }

    pub fn everyone(group: impl IntoIterator<Item = AgentId>, body: Formula) -> Self {
        Formula::Everyone(group.into_iter().collect(), Box::new(body))
    }

    pub fn common(group: impl IntoIterator<Item = AgentId>, body: Formula) -> Self {
        Formula::Common(group.into_iter().collect(), Box::new(body))
    }

    /// Right-folded conjunction; `True` when empty.
    pub fn and_all(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut parts: Vec<_> = parts.into_iter().collect();
        match parts.pop() {
            None => Formula::True,
            Some(last) => parts.into_iter().rev().fold(last, |acc, f| f.and(acc)),
        }
    }

    /// Right-folded disjunction; `False` when empty.
    pub fn or_all(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut parts: Vec<_> = parts.into_iter().collect();
        match parts.pop() {
            None => Formula::False,
            Some(last) => parts.into_iter().rev().fold(last, |acc, f| f.or(acc)),
        }
    }

    /// True when the formula mentions no knowledge operator.
    pub fn is_fluent(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_fluent(),
            Formula::And(f, g) | Formula::Or(f, g) | Formula::Implies(f, g) => {
                f.is_fluent() && g.is_fluent()
            }
            Formula::Knows(..)
            | Formula::Everyone(..)
            | Formula::Common(..)
            | Formula::KnowsValue(..) => false,
        }
    }

    /// Checks that all atoms, agents, and families are declared in `voc`
    /// and that group operators carry nonempty agent sets.
    pub fn validate(&self, voc: &Vocabulary) -> Result<(), DeclarationError> {
        match self {
            Formula::True | Formula::False => Ok(()),
            Formula::Atom(a) => {
                if !a.is_ground() {
                    Err(DeclarationError::NonGroundAtom(a.clone()))
                } else if !voc.has_fluent(a) {
                    Err(DeclarationError::UndeclaredFluent(a.clone()))
                } else {
                    Ok(())
                }
            }
            Formula::Not(f) => f.validate(voc),
            Formula::And(f, g) | Formula::Or(f, g) | Formula::Implies(f, g) => {
                f.validate(voc)?;
                g.validate(voc)
            }
            Formula::Knows(i, f) => {
                if !voc.has_agent(i) {
                    return Err(DeclarationError::UndeclaredAgent(i.clone()));
                }
                f.validate(voc)
            }
            Formula::Everyone(g, f) | Formula::Common(g, f) => {
                let op = if matches!(self, Formula::Everyone(..)) { "e" } else { "c" };
                if g.is_empty() {
                    return Err(DeclarationError::EmptyAgentSet(op));
                }
                for i in g {
                    if !voc.has_agent(i) {
                        return Err(DeclarationError::UndeclaredAgent(i.clone()));
                    }
                }
                f.validate(voc)
            }
            Formula::KnowsValue(i, fam) => {
                if !voc.has_agent(i) {
                    return Err(DeclarationError::UndeclaredAgent(i.clone()));
                }
                if !voc.has_family(fam) {
                    return Err(DeclarationError::UnknownFamily(fam.clone()));
                }
                Ok(())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < min;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Formula::True => write!(f, "true")?,
            Formula::False => write!(f, "false")?,
            Formula::Atom(a) => write!(f, "{a}")?,
            Formula::Not(g) => {
                write!(f, "~")?;
                g.fmt_prec(f, 4)?;
            }
            // Binary operators associate to the right, so the right child
            // may print at the operator's own level.
            Formula::And(g, h) => {
                g.fmt_prec(f, 4)?;
                write!(f, " & ")?;
                h.fmt_prec(f, 3)?;
            }
            Formula::Or(g, h) => {
                g.fmt_prec(f, 3)?;
                write!(f, " | ")?;
                h.fmt_prec(f, 2)?;
            }
            Formula::Implies(g, h) => {
                g.fmt_prec(f, 2)?;
                write!(f, " -> ")?;
                h.fmt_prec(f, 1)?;
            }
            Formula::Knows(i, g) => write!(f, "k({i}, {g})")?,
            Formula::Everyone(g, body) => {
                write!(f, "e([{}], {body})", group(g))?;
            }
            Formula::Common(g, body) => {
                write!(f, "c([{}], {body})", group(g))?;
            }
            Formula::KnowsValue(i, fam) => write!(f, "kv({i}, {fam})")?,
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

fn group(agents: &BTreeSet<AgentId>) -> String {
    agents.iter().map(AgentId::as_str).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// A fluent atom or its negation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Literal {
    pub atom: FluentAtom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: FluentAtom) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: FluentAtom) -> Self {
        Literal { atom, positive: false }
    }

    pub fn to_formula(&self) -> Formula {
        let f = Formula::Atom(self.atom.clone());
        if self.positive {
            f
        } else {
            f.not()
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            write!(f, "~")?;
        }
        write!(f, "{}", self.atom)
    }
}
