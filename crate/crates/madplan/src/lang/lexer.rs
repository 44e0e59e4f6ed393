//! Tokenizer for the domain DSL and query strings.
//!
//! `%` starts a line comment.  Identifiers beginning with a lowercase
//! letter are constants/keywords; identifiers beginning with an
//! uppercase letter or `_` are schema variables.

use super::LangError;

#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) enum Tok {
    Ident(String),
    Var(String),
    Int(i64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    DotDot,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    Semi,
    Plus,
    Star,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Var(s) => format!("variable `{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::DotDot => "`..`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Star => "`*`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Ne => "`!=`".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

pub(crate) fn lex(text: &str) -> Result<Vec<Spanned>, LangError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    while let Some(&ch) = chars.peek() {
        let (tline, tcol) = (line, col);
        let bump = |c: char, line: &mut u32, col: &mut u32| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        match ch {
            c if c.is_whitespace() => {
                chars.next();
                bump(c, &mut line, &mut col);
            }
            '%' => {
                for c in chars.by_ref() {
                    bump(c, &mut line, &mut col);
                    if c == '\n' {
                        break;
                    }
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        chars.next();
                        bump(c, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                let tok = if ch.is_ascii_uppercase() || ch == '_' {
                    Tok::Var(word)
                } else {
                    Tok::Ident(word)
                };
                out.push(Spanned { tok, line: tline, col: tcol });
            }
            c if c.is_ascii_digit() => {
                let mut num = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        num.push(c);
                        chars.next();
                        bump(c, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                let value = num.parse::<i64>().map_err(|_| LangError::Syntax {
                    line: tline,
                    col: tcol,
                    message: format!("integer literal `{num}` is out of range"),
                })?;
                out.push(Spanned { tok: Tok::Int(value), line: tline, col: tcol });
            }
            _ => {
                chars.next();
                bump(ch, &mut line, &mut col);
                let two = |chars: &mut std::iter::Peekable<std::str::Chars>,
                           want: char,
                           line: &mut u32,
                           col: &mut u32| {
                    if chars.peek() == Some(&want) {
                        chars.next();
                        *col += 1;
                        let _ = line;
                        true
                    } else {
                        false
                    }
                };
                let tok = match ch {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    '~' => Tok::Tilde,
                    '&' => Tok::Amp,
                    '|' => Tok::Pipe,
                    ';' => Tok::Semi,
                    '+' => Tok::Plus,
                    '*' => Tok::Star,
                    '.' => {
                        if two(&mut chars, '.', &mut line, &mut col) {
                            Tok::DotDot
                        } else {
                            Tok::Dot
                        }
                    }
                    '-' => {
                        if two(&mut chars, '>', &mut line, &mut col) {
                            Tok::Arrow
                        } else {
                            return Err(LangError::Syntax {
                                line: tline,
                                col: tcol,
                                message: "stray `-` (expected `->`)".into(),
                            });
                        }
                    }
                    '<' => {
                        if two(&mut chars, '=', &mut line, &mut col) {
                            Tok::Le
                        } else {
                            Tok::Lt
                        }
                    }
                    '>' => {
                        if two(&mut chars, '=', &mut line, &mut col) {
                            Tok::Ge
                        } else {
                            Tok::Gt
                        }
                    }
                    '=' => {
                        if two(&mut chars, '<', &mut line, &mut col) {
                            Tok::Le
                        } else {
                            Tok::Eq
                        }
                    }
                    '!' => {
                        if two(&mut chars, '=', &mut line, &mut col) {
                            Tok::Ne
                        } else {
                            return Err(LangError::Syntax {
                                line: tline,
                                col: tcol,
                                message: "stray `!` (expected `!=`)".into(),
                            });
                        }
                    }
                    other => {
                        return Err(LangError::Syntax {
                            line: tline,
                            col: tcol,
                            message: format!("unexpected character `{other}`"),
                        })
                    }
                };
                out.push(Spanned { tok, line: tline, col: tcol });
            }
        }
    }
    Ok(out)
}
