//! Recursive-descent parser for domain files and query strings.

use std::collections::BTreeSet;

use super::lexer::{lex, Spanned, Tok};
use super::{ActionHead, ActionLaw, CmpOp, LangError, LawBody, UExpr};
use crate::model::{AgentId, FluentAtom, Formula, Literal, Term};

/// Statement-level surface forms reserved for declarations.
const BUILTINS: [&str; 7] =
    ["agent", "fluent", "system", "init", "universe", "constraint", "observes"];

#[derive(Default, Debug)]
pub(crate) struct RawDomain {
    pub agents: Vec<AgentId>,
    pub fluent_decls: Vec<FluentAtom>,
    pub systems: Vec<String>,
    pub inits: Vec<Formula>,
    pub laws: Vec<ActionLaw>,
    pub universe_vars: Vec<(String, i64, i64)>,
    pub constraints: Vec<UExpr>,
    pub observations: Vec<(AgentId, UExpr)>,
}

pub(crate) struct RawQuery {
    pub goal: Formula,
    pub actions: Vec<(String, Vec<Term>)>,
}

pub(crate) struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (u32, u32),
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Self, LangError> {
        let toks = lex(text)?;
        let end = toks
            .last()
            .map(|t| (t.line, t.col + 1))
            .unwrap_or((1, 1));
        Ok(Parser { toks, pos: 0, end })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|t| &t.tok)
    }

    fn advance(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (u32, u32) {
        self.toks.get(self.pos).map(|t| (t.line, t.col)).unwrap_or(self.end)
    }

    fn fail<T>(&self, expected: &str) -> Result<T, LangError> {
        let (line, col) = self.here();
        let found = match self.peek() {
            Some(t) => format!("found {}", t.describe()),
            None => "found end of input".to_string(),
        };
        Err(LangError::Syntax { line, col, message: format!("expected {expected}, {found}") })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), LangError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.fail(&tok.describe())
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, LangError> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let Some(Tok::Ident(s)) = self.advance() else { unreachable!() };
                Ok(s)
            }
            _ => self.fail(what),
        }
    }

    fn eat_keyword(&mut self, word: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_int(&mut self) -> Result<i64, LangError> {
        match self.peek() {
            Some(Tok::Int(_)) => {
                let Some(Tok::Int(n)) = self.advance() else { unreachable!() };
                Ok(n)
            }
            _ => self.fail("an integer"),
        }
    }

    // ----- domain files ------------------------------------------------

    pub(crate) fn parse_domain(&mut self) -> Result<RawDomain, LangError> {
        let mut raw = RawDomain::default();
        while self.peek().is_some() {
            self.parse_statement(&mut raw)?;
        }
        Ok(raw)
    }

    fn parse_statement(&mut self, raw: &mut RawDomain) -> Result<(), LangError> {
        let head = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            _ => return self.fail("a statement"),
        };
        if BUILTINS.contains(&head.as_str()) && self.peek2() == Some(&Tok::LParen) {
            self.pos += 2;
            match head.as_str() {
                "agent" => {
                    let name = self.expect_ident("an agent name")?;
                    raw.agents.push(AgentId::new(name));
                }
                "fluent" => {
                    let atom = self.parse_atom()?;
                    raw.fluent_decls.push(atom);
                }
                "system" => {
                    let name = self.expect_ident("a system name")?;
                    raw.systems.push(name);
                }
                "init" => {
                    let f = self.parse_formula()?;
                    raw.inits.push(f);
                }
                "universe" => {
                    let var = self.expect_ident("a universe variable")?;
                    self.expect(Tok::Comma)?;
                    let lo = self.expect_int()?;
                    self.expect(Tok::DotDot)?;
                    let hi = self.expect_int()?;
                    raw.universe_vars.push((var, lo, hi));
                }
                "constraint" => {
                    let e = self.parse_uexpr()?;
                    raw.constraints.push(e);
                }
                "observes" => {
                    let agent = self.expect_ident("an agent name")?;
                    self.expect(Tok::Comma)?;
                    let e = self.parse_uexpr()?;
                    raw.observations.push((AgentId::new(agent), e));
                }
                _ => unreachable!(),
            }
            self.expect(Tok::RParen)?;
            self.expect(Tok::Dot)?;
            return Ok(());
        }
        let law = self.parse_law()?;
        self.expect(Tok::Dot)?;
        raw.laws.push(law);
        Ok(())
    }

    fn parse_law(&mut self) -> Result<ActionLaw, LangError> {
        let name = self.expect_ident("an action name")?;
        let args = if self.eat(&Tok::LParen) {
            let args = self.parse_term_list()?;
            self.expect(Tok::RParen)?;
            args
        } else {
            Vec::new()
        };
        let head = ActionHead { name, args };
        let body = if self.eat_keyword("executable") || self.eat_keyword("executable_if") {
            // The two-word form carries an `if`.
            let _ = self.eat_keyword("if");
            LawBody::Executable(self.parse_formula()?)
        } else if self.eat_keyword("causes") {
            let effect = self.parse_literal_conjunction()?;
            let condition = if self.eat_keyword("if") {
                self.parse_literal_conjunction()?
            } else {
                Vec::new()
            };
            let performers = self.parse_performed_by()?;
            LawBody::Causes { effect, condition, performers }
        } else if self.eat_keyword("announces") {
            let content = self.parse_formula()?;
            let performers = self.parse_performed_by()?;
            let observers = self.parse_observed_by()?;
            LawBody::Announces { content, performers, observers }
        } else if self.eat_keyword("determines") {
            let fluent = self.parse_atom()?;
            let performers = self.parse_performed_by()?;
            let observers = self.parse_observed_by()?;
            LawBody::Determines { fluent, performers, observers }
        } else {
            return self.fail("`executable`, `causes`, `announces`, or `determines`");
        };
        Ok(ActionLaw { head, body })
    }

    fn parse_performed_by(&mut self) -> Result<Vec<Term>, LangError> {
        if self.eat_keyword("performed_by") {
            return self.parse_agent_spec();
        }
        if self.eat_keyword("performed") {
            if !self.eat_keyword("by") {
                return self.fail("`by`");
            }
            return self.parse_agent_spec();
        }
        self.fail("`performed_by`")
    }

    fn parse_observed_by(&mut self) -> Result<Vec<Term>, LangError> {
        if self.eat_keyword("observed_by") {
            return self.parse_agent_spec();
        }
        if self.eat_keyword("observed") {
            if !self.eat_keyword("by") {
                return self.fail("`by`");
            }
            return self.parse_agent_spec();
        }
        Ok(Vec::new())
    }

    fn parse_agent_spec(&mut self) -> Result<Vec<Term>, LangError> {
        if self.eat(&Tok::LBracket) {
            let mut out = Vec::new();
            if !self.eat(&Tok::RBracket) {
                loop {
                    out.push(self.parse_agent_term()?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RBracket)?;
            }
            Ok(out)
        } else {
            Ok(vec![self.parse_agent_term()?])
        }
    }

    fn parse_agent_term(&mut self) -> Result<Term, LangError> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let Some(Tok::Ident(s)) = self.advance() else { unreachable!() };
                Ok(Term::sym(s))
            }
            Some(Tok::Var(_)) => {
                let Some(Tok::Var(s)) = self.advance() else { unreachable!() };
                Ok(Term::var(s))
            }
            _ => self.fail("an agent name or schema variable"),
        }
    }

    fn parse_literal_conjunction(&mut self) -> Result<Vec<Literal>, LangError> {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == "true") {
            self.pos += 1;
            return Ok(Vec::new());
        }
        let mut out = vec![self.parse_literal()?];
        while self.eat(&Tok::Comma) || self.eat(&Tok::Amp) {
            out.push(self.parse_literal()?);
        }
        Ok(out)
    }

    fn parse_literal(&mut self) -> Result<Literal, LangError> {
        if self.eat(&Tok::Tilde) {
            Ok(Literal::neg(self.parse_atom()?))
        } else {
            Ok(Literal::pos(self.parse_atom()?))
        }
    }

    fn parse_atom(&mut self) -> Result<FluentAtom, LangError> {
        let name = self.expect_ident("a fluent atom")?;
        let args = if self.eat(&Tok::LParen) {
            let args = self.parse_term_list()?;
            self.expect(Tok::RParen)?;
            args
        } else {
            Vec::new()
        };
        Ok(FluentAtom::new(name, args))
    }

    fn parse_term_list(&mut self) -> Result<Vec<Term>, LangError> {
        let mut out = vec![self.parse_term()?];
        while self.eat(&Tok::Comma) {
            out.push(self.parse_term()?);
        }
        Ok(out)
    }

    fn parse_term(&mut self) -> Result<Term, LangError> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let Some(Tok::Ident(s)) = self.advance() else { unreachable!() };
                Ok(Term::sym(s))
            }
            Some(Tok::Var(_)) => {
                let Some(Tok::Var(s)) = self.advance() else { unreachable!() };
                Ok(Term::var(s))
            }
            Some(Tok::Int(_)) => {
                let Some(Tok::Int(n)) = self.advance() else { unreachable!() };
                Ok(Term::Int(n))
            }
            _ => self.fail("a term"),
        }
    }

    // ----- formulas ----------------------------------------------------

    pub(crate) fn parse_formula(&mut self) -> Result<Formula, LangError> {
        let lhs = self.parse_or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.parse_formula()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_or(&mut self) -> Result<Formula, LangError> {
        let mut parts = vec![self.parse_and()?];
        while self.eat(&Tok::Pipe) {
            parts.push(self.parse_and()?);
        }
        let last = parts.pop().expect("nonempty");
        Ok(parts.into_iter().rev().fold(last, |acc, f| f.or(acc)))
    }

    fn parse_and(&mut self) -> Result<Formula, LangError> {
        let mut parts = vec![self.parse_unary()?];
        while self.eat(&Tok::Amp) || self.eat(&Tok::Comma) {
            parts.push(self.parse_unary()?);
        }
        let last = parts.pop().expect("nonempty");
        Ok(parts.into_iter().rev().fold(last, |acc, f| f.and(acc)))
    }

    fn parse_unary(&mut self) -> Result<Formula, LangError> {
        if self.eat(&Tok::Tilde) {
            return Ok(Formula::not(self.parse_unary()?));
        }
        if self.eat(&Tok::LParen) {
            let f = self.parse_formula()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        match self.peek() {
            Some(Tok::Ident(s)) => match s.as_str() {
                "true" => {
                    self.pos += 1;
                    Ok(Formula::True)
                }
                "false" => {
                    self.pos += 1;
                    Ok(Formula::False)
                }
                "k" if self.peek2() == Some(&Tok::LParen) => {
                    self.pos += 2;
                    let agent = self.parse_agent_name()?;
                    self.expect(Tok::Comma)?;
                    let f = self.parse_formula()?;
                    self.expect(Tok::RParen)?;
                    Ok(Formula::knows(agent, f))
                }
                "e" if self.peek2() == Some(&Tok::LParen) => {
                    self.pos += 2;
                    let group = self.parse_agent_group()?;
                    self.expect(Tok::Comma)?;
                    let f = self.parse_formula()?;
                    self.expect(Tok::RParen)?;
                    Ok(Formula::everyone(group, f))
                }
                "c" if self.peek2() == Some(&Tok::LParen) => {
                    self.pos += 2;
                    let group = self.parse_agent_group()?;
                    self.expect(Tok::Comma)?;
                    let f = self.parse_formula()?;
                    self.expect(Tok::RParen)?;
                    Ok(Formula::common(group, f))
                }
                "kv" if self.peek2() == Some(&Tok::LParen) => {
                    self.pos += 2;
                    let agent = self.parse_agent_name()?;
                    self.expect(Tok::Comma)?;
                    let family = self.expect_ident("a fluent family name")?;
                    self.expect(Tok::RParen)?;
                    Ok(Formula::KnowsValue(agent, family))
                }
                _ => Ok(Formula::Atom(self.parse_atom()?)),
            },
            _ => self.fail("a formula"),
        }
    }

    fn parse_agent_name(&mut self) -> Result<AgentId, LangError> {
        match self.parse_agent_term()? {
            Term::Sym(s) | Term::Var(s) => Ok(AgentId::new(s)),
            Term::Int(_) => unreachable!("agent terms are names"),
        }
    }

    fn parse_agent_group(&mut self) -> Result<BTreeSet<AgentId>, LangError> {
        self.expect(Tok::LBracket)?;
        let mut out = BTreeSet::new();
        loop {
            out.insert(self.parse_agent_name()?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(out)
    }

    // ----- universe expressions ----------------------------------------

    fn parse_uexpr(&mut self) -> Result<UExpr, LangError> {
        let mut e = self.parse_ucmp()?;
        while self.eat(&Tok::Amp) || self.eat(&Tok::Comma) {
            e = UExpr::And(Box::new(e), Box::new(self.parse_ucmp()?));
        }
        Ok(e)
    }

    fn parse_ucmp(&mut self) -> Result<UExpr, LangError> {
        let lhs = self.parse_usum()?;
        let op = match self.peek() {
            Some(Tok::Lt) => CmpOp::Lt,
            Some(Tok::Le) => CmpOp::Le,
            Some(Tok::Gt) => CmpOp::Gt,
            Some(Tok::Ge) => CmpOp::Ge,
            Some(Tok::Eq) => CmpOp::Eq,
            Some(Tok::Ne) => CmpOp::Ne,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.parse_usum()?;
        Ok(UExpr::Cmp(op, Box::new(lhs), Box::new(rhs)))
    }

    fn parse_usum(&mut self) -> Result<UExpr, LangError> {
        let mut e = self.parse_uprod()?;
        while self.eat(&Tok::Plus) {
            e = UExpr::Add(Box::new(e), Box::new(self.parse_uprod()?));
        }
        Ok(e)
    }

    fn parse_uprod(&mut self) -> Result<UExpr, LangError> {
        let mut e = self.parse_uatom()?;
        while self.eat(&Tok::Star) {
            e = UExpr::Mul(Box::new(e), Box::new(self.parse_uatom()?));
        }
        Ok(e)
    }

    fn parse_uatom(&mut self) -> Result<UExpr, LangError> {
        match self.peek() {
            Some(Tok::Int(_)) => {
                let Some(Tok::Int(n)) = self.advance() else { unreachable!() };
                Ok(UExpr::Int(n))
            }
            Some(Tok::Ident(_)) => {
                let Some(Tok::Ident(s)) = self.advance() else { unreachable!() };
                Ok(UExpr::Var(s))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.parse_uexpr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => self.fail("an arithmetic expression"),
        }
    }

    // ----- queries ------------------------------------------------------

    pub(crate) fn parse_query(&mut self) -> Result<RawQuery, LangError> {
        let goal = self.parse_formula()?;
        if !self.eat_keyword("after") {
            return self.fail("`after`");
        }
        self.expect(Tok::LBracket)?;
        let mut actions = Vec::new();
        if !self.eat(&Tok::RBracket) {
            loop {
                let name = self.expect_ident("an action name")?;
                let args = if self.eat(&Tok::LParen) {
                    let args = self.parse_term_list()?;
                    self.expect(Tok::RParen)?;
                    args
                } else {
                    Vec::new()
                };
                actions.push((name, args));
                if !self.eat(&Tok::Semi) && !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RBracket)?;
        }
        self.expect_end()?;
        Ok(RawQuery { goal, actions })
    }

    pub(crate) fn expect_end(&mut self) -> Result<(), LangError> {
        if self.peek().is_some() {
            self.fail("end of input")
        } else {
            Ok(())
        }
    }
}
