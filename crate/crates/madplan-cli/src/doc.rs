//! The `.mks` structure-document format.
//!
//! A document is UTF-8 text made of period-terminated records; `%`
//! starts a comment that runs to the end of the line. Five record forms
//! exist:
//!
//! ```text
//! agent(a).
//! fluent(has_key(a)).
//! state(s1, [has_key(a), tail]).
//! arc(s1, a, s2).
//! real(s1).
//! ```
//!
//! `agent` and `fluent` records declare the vocabulary, `state` records
//! list each state's true fluents, `arc` records give one labeled arc
//! each, and the optional `real` record marks the designated state.
//! State names may contain `#`, so structures produced by updates
//! serialize without escaping. Printing sorts every section; parsing a
//! printed document restores an identical value, and re-printing it is
//! byte-identical.

use std::fmt::Write as _;

use madplan::model::{
    AgentId, DeclarationError, FluentAtom, Interpretation, KripkeStructure, PointedStructure,
    StateId, Term, Vocabulary,
};
use std::sync::Arc;
use thiserror::Error;

/// A parsed `.mks` file: a structure plus the optional real-state marker.
#[derive(Clone, PartialEq, Debug)]
pub struct StructureDocument {
    pub structure: KripkeStructure,
    pub real: Option<StateId>,
}

impl StructureDocument {
    /// Converts to a pointed structure; the document must carry a `real`
    /// record.
    pub fn into_pointed(self) -> Result<PointedStructure, DocError> {
        let real = self.real.ok_or(DocError::NoRealState)?;
        Ok(PointedStructure::new(self.structure, real)?)
    }
}

#[derive(Clone, PartialEq, Debug, Error)]
pub enum DocError {
    #[error("line {line}: expected {expected}")]
    Syntax { line: usize, expected: String },
    #[error("line {line}: unknown record `{name}`")]
    UnknownRecord { line: usize, name: String },
    #[error("the document marks more than one real state")]
    MultipleRealStates,
    #[error("the document marks no real state")]
    NoRealState,
    #[error(transparent)]
    Declaration(#[from] DeclarationError),
}

/// Renders a document in canonical sorted order.
pub fn print_document(doc: &StructureDocument) -> String {
    let m = &doc.structure;
    let mut out = String::new();
    for a in m.vocabulary().agents() {
        let _ = writeln!(out, "agent({a}).");
    }
    for f in m.vocabulary().fluents() {
        let _ = writeln!(out, "fluent({f}).");
    }
    for (id, interp) in m.states() {
        let atoms: Vec<String> = interp.true_atoms().map(|a| a.to_string()).collect();
        let _ = writeln!(out, "state({id}, [{}]).", atoms.join(", "));
    }
    for (from, agent, to) in m.arcs() {
        let _ = writeln!(out, "arc({from}, {agent}, {to}).");
    }
    if let Some(real) = &doc.real {
        let _ = writeln!(out, "real({real}).");
    }
    out
}

/// Renders a pointed structure as a document.
pub fn print_structure(p: &PointedStructure) -> String {
    print_document(&StructureDocument {
        structure: p.structure().clone(),
        real: Some(p.real().clone()),
    })
}

/// Parses a document, checking every record against the declared
/// vocabulary.
pub fn parse_document(text: &str) -> Result<StructureDocument, DocError> {
    let mut p = Scanner::new(text);
    let mut agents = Vec::new();
    let mut fluents = Vec::new();
    let mut states: Vec<(StateId, Vec<FluentAtom>)> = Vec::new();
    let mut arcs: Vec<(StateId, AgentId, StateId)> = Vec::new();
    let mut real: Option<StateId> = None;

    while !p.at_end() {
        let name = p.ident("a record name")?;
        p.token('(')?;
        match name.as_str() {
            "agent" => {
                agents.push(AgentId::new(p.ident("an agent name")?));
            }
            "fluent" => {
                fluents.push(p.atom()?);
            }
            "state" => {
                let id = StateId::new(p.ident("a state name")?);
                p.token(',')?;
                p.token('[')?;
                let mut atoms = Vec::new();
                if !p.try_token(']') {
                    loop {
                        atoms.push(p.atom()?);
                        if !p.try_token(',') {
                            break;
                        }
                    }
                    p.token(']')?;
                }
                states.push((id, atoms));
            }
            "arc" => {
                let from = StateId::new(p.ident("a state name")?);
                p.token(',')?;
                let agent = AgentId::new(p.ident("an agent name")?);
                p.token(',')?;
                let to = StateId::new(p.ident("a state name")?);
                arcs.push((from, agent, to));
            }
            "real" => {
                let id = StateId::new(p.ident("a state name")?);
                if real.replace(id).is_some() {
                    return Err(DocError::MultipleRealStates);
                }
            }
            other => {
                return Err(DocError::UnknownRecord { line: p.line(), name: other.to_string() })
            }
        }
        p.token(')')?;
        p.token('.')?;
    }

    let voc = Arc::new(Vocabulary::new(agents, fluents)?);
    let mut m = KripkeStructure::new(voc);
    for (id, atoms) in states {
        m.add_state(id, Interpretation::from_true_atoms(atoms))?;
    }
    for (from, agent, to) in arcs {
        m.add_arc(&from, &agent, &to)?;
    }
    if let Some(id) = &real {
        if !m.has_state(id) {
            return Err(DocError::Declaration(DeclarationError::MissingState(id.clone())));
        }
    }
    Ok(StructureDocument { structure: m, real })
}

/// Parses a document that must name a real state.
pub fn parse_structure(text: &str) -> Result<PointedStructure, DocError> {
    parse_document(text)?.into_pointed()
}

/// Cursor over the raw text; skips whitespace and `%` comments between
/// tokens and tracks the current line for diagnostics.
struct Scanner<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Scanner { src: text.as_bytes(), pos: 0 }
    }

    fn skip_trivia(&mut self) {
        loop {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos] == b'%' {
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                return;
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_trivia();
        self.pos >= self.src.len()
    }

    fn line(&self) -> usize {
        1 + self.src[..self.pos].iter().filter(|b| **b == b'\n').count()
    }

    fn syntax(&self, expected: impl Into<String>) -> DocError {
        DocError::Syntax { line: self.line(), expected: expected.into() }
    }

    fn token(&mut self, want: char) -> Result<(), DocError> {
        if self.try_token(want) {
            Ok(())
        } else {
            Err(self.syntax(format!("`{want}`")))
        }
    }

    fn try_token(&mut self, want: char) -> bool {
        self.skip_trivia();
        if self.pos < self.src.len() && self.src[self.pos] == want as u8 {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// An identifier: a letter or underscore, then letters, digits,
    /// underscores, or `#`.
    fn ident(&mut self, expected: &str) -> Result<String, DocError> {
        self.skip_trivia();
        let start = self.pos;
        if self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphabetic() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric()
                    || self.src[self.pos] == b'_'
                    || self.src[self.pos] == b'#')
            {
                self.pos += 1;
            }
            return Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned());
        }
        Err(self.syntax(expected.to_string()))
    }

    fn int(&mut self) -> Result<i64, DocError> {
        self.skip_trivia();
        let start = self.pos;
        if self.pos < self.src.len() && self.src[self.pos] == b'-' {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse().map_err(|_| self.syntax("an integer".to_string()))
    }

    /// A fluent atom: `name` or `name(term, ...)` with symbol or integer
    /// terms.
    fn atom(&mut self) -> Result<FluentAtom, DocError> {
        let functor = self.ident("a fluent name")?;
        if !self.try_token('(') {
            return Ok(FluentAtom::prop(functor));
        }
        let mut args = Vec::new();
        loop {
            self.skip_trivia();
            if self.pos < self.src.len()
                && (self.src[self.pos] == b'-' || self.src[self.pos].is_ascii_digit())
            {
                args.push(Term::Int(self.int()?));
            } else {
                args.push(Term::sym(self.ident("a term")?));
            }
            if !self.try_token(',') {
                break;
            }
        }
        self.token(')')?;
        Ok(FluentAtom::new(functor, args))
    }
}
