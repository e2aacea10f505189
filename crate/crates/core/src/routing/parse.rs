//! `.infra` descriptions.
//!
//! ```text
//! file    := item*
//! item    := "basic" NAME "left" chans "right" chans "{" links? "}"
//!          | "compose" NAME "=" NAME "*" NAME "over" chans
//! chans   := "(" (IDENT ("," IDENT)*)? ")"
//! links   := IDENT "->" IDENT ("," IDENT "->" IDENT)*
//! ```
//!
//! `//` starts a comment. Components must be declared before they are
//! composed; the last item is the root.

use std::collections::BTreeMap;

use super::{Infra, RoutingError};
use crate::name::Chan;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InfraFile {
    pub items: BTreeMap<String, Infra>,
    pub order: Vec<String>,
}

impl InfraFile {
    pub fn root(&self) -> Option<&Infra> {
        self.order.last().and_then(|n| self.items.get(n))
    }

    pub fn get(&self, name: &str) -> Option<&Infra> {
        self.items.get(name)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Word(String),
    Sym(&'static str),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, RoutingError> {
    let mut out = Vec::new();
    for (n, raw) in src.lines().enumerate() {
        let line = n + 1;
        let text = raw.split("//").next().unwrap_or("");
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphanumeric() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Word(chars[start..i].iter().collect()), line));
            } else if c == '-' && chars.get(i + 1) == Some(&'>') {
                out.push((Tok::Sym("->"), line));
                i += 2;
            } else {
                let sym = match c {
                    '(' => "(",
                    ')' => ")",
                    '{' => "{",
                    '}' => "}",
                    ',' => ",",
                    '=' => "=",
                    '*' => "*",
                    other => {
                        return Err(RoutingError::Syntax { line, message: format!("unexpected character {other:?}") })
                    }
                };
                out.push((Tok::Sym(sym), line));
                i += 1;
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn line(&self) -> usize {
        self.toks.get(self.at).or(self.toks.last()).map_or(1, |t| t.1)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, RoutingError> {
        Err(RoutingError::Syntax { line: self.line(), message: message.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn word(&mut self, what: &str) -> Result<String, RoutingError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.at += 1;
                Ok(w)
            }
            _ => self.fail(format!("expected {what}")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), RoutingError> {
        match self.peek() {
            Some(Tok::Word(w)) if w == kw => {
                self.at += 1;
                Ok(())
            }
            _ => self.fail(format!("expected `{kw}`")),
        }
    }

    fn sym(&mut self, s: &'static str) -> Result<(), RoutingError> {
        if self.peek() == Some(&Tok::Sym(s)) {
            self.at += 1;
            Ok(())
        } else {
            self.fail(format!("expected `{s}`"))
        }
    }

    fn eat(&mut self, s: &'static str) -> bool {
        let hit = self.peek() == Some(&Tok::Sym(s));
        if hit {
            self.at += 1;
        }
        hit
    }

    fn channel(&mut self) -> Result<Chan, RoutingError> {
        let w = self.word("a channel")?;
        match Chan::new(&w) {
            Some(c) => Ok(c),
            None => self.fail(format!("`{w}` cannot name a channel")),
        }
    }

    fn chans(&mut self) -> Result<Vec<Chan>, RoutingError> {
        self.sym("(")?;
        let mut out = Vec::new();
        if self.eat(")") {
            return Ok(out);
        }
        loop {
            out.push(self.channel()?);
            if self.eat(")") {
                return Ok(out);
            }
            self.sym(",")?;
        }
    }
}

pub fn parse_infra(src: &str) -> Result<InfraFile, RoutingError> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let mut file = InfraFile { items: BTreeMap::new(), order: Vec::new() };
    while p.peek().is_some() {
        let line = p.line();
        let kind = p.word("`basic` or `compose`")?;
        let name = p.word("a name")?;
        if file.items.contains_key(&name) {
            return Err(RoutingError::Syntax { line, message: format!("`{name}` declared twice") });
        }
        let infra = match kind.as_str() {
            "basic" => {
                p.keyword("left")?;
                let left = p.chans()?;
                p.keyword("right")?;
                let right = p.chans()?;
                p.sym("{")?;
                let mut links = Vec::new();
                if !p.eat("}") {
                    loop {
                        let from = p.channel()?;
                        p.sym("->")?;
                        let to = p.channel()?;
                        let (Some(i), Some(j)) =
                            (left.iter().position(|c| *c == from), right.iter().position(|c| *c == to))
                        else {
                            return p.fail(format!("link {from}->{to} must go from a left to a right channel"));
                        };
                        links.push((i, j));
                        if p.eat("}") {
                            break;
                        }
                        p.sym(",")?;
                    }
                }
                Infra::basic(&name, left, right, links)
            }
            "compose" => {
                p.sym("=")?;
                let a = p.word("a component")?;
                p.sym("*")?;
                let b = p.word("a component")?;
                p.keyword("over")?;
                let shared = p.chans()?;
                let lookup = |n: &str| {
                    file.items.get(n).cloned().ok_or_else(|| RoutingError::Syntax {
                        line,
                        message: format!("`{n}` is not declared before use"),
                    })
                };
                Infra::compose(&name, lookup(&a)?, lookup(&b)?, shared)
            }
            other => return Err(RoutingError::Syntax { line, message: format!("unknown item `{other}`") }),
        };
        infra.validate()?;
        file.order.push(name.clone());
        file.items.insert(name, infra);
    }
    Ok(file)
}
