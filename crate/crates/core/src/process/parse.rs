//! Lexer and recursive-descent parser for `.cna` sources.
//!
//! A definition written without a parameter list takes the sorted free
//! names of its body as implicit parameters, computed as a fixpoint over
//! all such definitions; zero-argument calls to it are expanded to pass
//! those names. Explicit parameter lists are checked strictly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::{Definition, Definitions, Process, Program};
use crate::chain::{ChainError, EssentialLabel, Link, LinkChain, Renaming, Site};
use crate::name::{is_identifier, Chan};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ParseErrorKind {
    Syntax,
    Arity,
    UndefinedConstant,
    NonEssentialPrefix,
    InvalidRenaming,
    InvalidChain,
    FreeNameNotParameter,
    DuplicateDefinition,
}

impl ParseErrorKind {
    /// Stable machine-readable code.
    pub fn code(self) -> &'static str {
        match self {
            ParseErrorKind::Syntax => "SyntaxError",
            ParseErrorKind::Arity => "ArityError",
            ParseErrorKind::UndefinedConstant => "UndefinedConstant",
            ParseErrorKind::NonEssentialPrefix => "NonEssentialPrefix",
            ParseErrorKind::InvalidRenaming => "InvalidRenaming",
            ParseErrorKind::InvalidChain => "InvalidChain",
            ParseErrorKind::FreeNameNotParameter => "FreeNameNotParameter",
            ParseErrorKind::DuplicateDefinition => "DuplicateDefinition",
        }
    }
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
#[error("{kind} at {line}:{col}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Ident(String),
    Zero,
    Backslash,
    Semi,
    Dot,
    Plus,
    Bar,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Assign,
    Arrow,
    Swap,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Zero => "`0`",
            Tok::Backslash => "`\\`",
            Tok::Semi => "`;`",
            Tok::Dot => "`.`",
            Tok::Plus => "`+`",
            Tok::Bar => "`|`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Comma => "`,`",
            Tok::Assign => "`:=`",
            Tok::Arrow => "`->`",
            Tok::Swap => "`<->`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

fn err(kind: ParseErrorKind, pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError { kind, line: pos.line, col: pos.col, message: message.into() }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let rest = |k: usize| chars.get(i + k).copied();
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && rest(1) == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (tok, width) = match c {
            '\\' => (Tok::Backslash, 1),
            ';' => (Tok::Semi, 1),
            '.' => (Tok::Dot, 1),
            '+' => (Tok::Plus, 1),
            '|' => (Tok::Bar, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            ',' => (Tok::Comma, 1),
            ':' if rest(1) == Some('=') => (Tok::Assign, 2),
            '-' if rest(1) == Some('>') => (Tok::Arrow, 2),
            '<' if rest(1) == Some('-') && rest(2) == Some('>') => (Tok::Swap, 3),
            '0' if !rest(1).is_some_and(|n| n.is_ascii_alphanumeric() || n == '_') => (Tok::Zero, 1),
            '_' if !rest(1).is_some_and(|n| n.is_ascii_alphanumeric() || n == '_') => {
                (Tok::Ident("_".into()), 1)
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                (Tok::Ident(word), j - start)
            }
            other => {
                return Err(err(ParseErrorKind::Syntax, pos, format!("unexpected character {other:?}")));
            }
        };
        toks.push((tok, pos));
        i += width;
        col += width;
    }
    toks.push((Tok::Eof, Pos { line, col }));
    Ok(toks)
}

const KEYWORDS: &[&str] = &["new", "in", "main"];

struct CallSite {
    name: String,
    arity: usize,
    pos: Pos,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    calls: Vec<CallSite>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.at + k).min(self.toks.len() - 1);
        &self.toks[idx].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected {want}")))
        }
    }

    fn unexpected(&self, context: &str) -> ParseError {
        err(ParseErrorKind::Syntax, self.pos(), format!("{context}, found {}", self.peek()))
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s != "_" => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(&format!("expected {what}"))),
        }
    }

    fn channel(&mut self) -> Result<Chan, ParseError> {
        let pos = self.pos();
        let name = self.ident("a channel name")?;
        if KEYWORDS.contains(&name.as_str()) {
            return Err(err(ParseErrorKind::Syntax, pos, format!("keyword `{name}` cannot name a channel")));
        }
        Chan::new(&name)
            .ok_or_else(|| err(ParseErrorKind::Syntax, pos, format!("`{name}` cannot name a channel")))
    }

    fn channel_list(&mut self) -> Result<Vec<Chan>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut out = vec![self.channel()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.channel()?);
        }
        self.expect(Tok::RParen)?;
        Ok(out)
    }

    fn program(&mut self) -> Result<RawProgram, ParseError> {
        let mut defs = Vec::new();
        let mut main = None;
        while *self.peek() != Tok::Eof {
            let pos = self.pos();
            let name = self.ident("a definition")?;
            if name == "main" {
                self.expect(Tok::Assign)?;
                if main.is_some() {
                    return Err(err(ParseErrorKind::DuplicateDefinition, pos, "`main` defined twice"));
                }
                main = Some((self.proc()?, pos));
                continue;
            }
            if KEYWORDS.contains(&name.as_str()) || name == "tau" {
                return Err(err(ParseErrorKind::Syntax, pos, format!("keyword `{name}` cannot name a definition")));
            }
            let params = if *self.peek() == Tok::LParen {
                let params = self.channel_list()?;
                let distinct: BTreeSet<&Chan> = params.iter().collect();
                if distinct.len() != params.len() {
                    return Err(err(ParseErrorKind::Syntax, pos, format!("repeated parameter in `{name}`")));
                }
                Some(params)
            } else {
                None
            };
            self.expect(Tok::Assign)?;
            let body = self.proc()?;
            defs.push(RawDef { name, params, body, pos });
        }
        Ok((defs, main))
    }

    fn proc(&mut self) -> Result<Process, ParseError> {
        let mut left = self.par()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            left = Process::sum(left, self.par()?);
        }
        Ok(left)
    }

    fn par(&mut self) -> Result<Process, ParseError> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            left = Process::par(left, self.unary()?);
        }
        Ok(left)
    }

    fn starts_chain(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::Backslash
    }

    fn unary(&mut self) -> Result<Process, ParseError> {
        if self.starts_chain() {
            let label = self.chainlit()?;
            // A bare label abbreviates `label . 0`.
            if *self.peek() != Tok::Dot {
                return Ok(Process::prefix(label, Process::Nil));
            }
            self.bump();
            return Ok(Process::prefix(label, self.unary()?));
        }
        if *self.peek() == Tok::Ident("new".into()) {
            self.bump();
            let mut names = vec![self.channel()?];
            while *self.peek() == Tok::Comma {
                self.bump();
                names.push(self.channel()?);
            }
            self.expect(Tok::Ident("in".into()))?;
            let body = self.unary()?;
            return Ok(names.into_iter().rev().fold(body, |acc, a| Process::restrict(a, acc)));
        }
        let mut atom = self.atom()?;
        while *self.peek() == Tok::LBracket {
            atom = Process::rename(atom, self.renaming()?);
        }
        Ok(atom)
    }

    fn site(&mut self) -> Result<Site, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(s) if s == "_" => Ok(Site::Virtual),
            Tok::Ident(s) if s == "tau" => Ok(Site::Tau),
            Tok::Ident(s) if is_identifier(&s) && !KEYWORDS.contains(&s.as_str()) => Ok(Site::chan(&s)),
            t => Err(err(ParseErrorKind::Syntax, pos, format!("expected a site, found {t}"))),
        }
    }

    fn chainlit(&mut self) -> Result<EssentialLabel, ParseError> {
        let pos = self.pos();
        let mut links = Vec::new();
        loop {
            let lpos = self.pos();
            let source = self.site()?;
            self.expect(Tok::Backslash)?;
            let target = self.site()?;
            let link = Link::new(source, target).map_err(|e| chain_err(e, lpos))?;
            links.push(link);
            if *self.peek() == Tok::Semi {
                self.bump();
            } else {
                break;
            }
        }
        let chain = LinkChain::new(links).map_err(|e| match e {
            ChainError::AllVirtual => err(ParseErrorKind::NonEssentialPrefix, pos, "prefix has no solid link"),
            other => chain_err(other, pos),
        })?;
        EssentialLabel::from_chain(&chain).ok_or_else(|| {
            err(
                ParseErrorKind::NonEssentialPrefix,
                pos,
                format!("prefix `{chain}` is not essential: solid links must be separated by single virtual links"),
            )
        })
    }

    fn atom(&mut self) -> Result<Process, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Zero => {
                self.bump();
                Ok(Process::Nil)
            }
            Tok::LParen => {
                self.bump();
                let p = self.proc()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Tok::Ident(name) if name != "_" && !KEYWORDS.contains(&name.as_str()) && name != "tau" => {
                self.bump();
                let args = if *self.peek() == Tok::LParen {
                    self.channel_list()?
                } else {
                    Vec::new()
                };
                self.calls.push(CallSite { name: name.clone(), arity: args.len(), pos });
                Ok(Process::Call(name, args))
            }
            _ => Err(self.unexpected("expected a process")),
        }
    }

    fn renaming(&mut self) -> Result<Renaming, ParseError> {
        let pos = self.pos();
        self.expect(Tok::LBracket)?;
        let mut pairs = Vec::new();
        loop {
            let from = self.channel()?;
            match self.bump() {
                Tok::Swap => {
                    let to = self.channel()?;
                    pairs.push((from.clone(), to.clone()));
                    pairs.push((to, from));
                }
                Tok::Arrow => pairs.push((from, self.channel()?)),
                t => {
                    return Err(err(ParseErrorKind::Syntax, self.pos(), format!("expected `<->` or `->`, found {t}")));
                }
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::RBracket)?;
        Renaming::new(pairs).map_err(|e| err(ParseErrorKind::InvalidRenaming, pos, e.to_string()))
    }
}

fn chain_err(e: ChainError, pos: Pos) -> ParseError {
    err(ParseErrorKind::InvalidChain, pos, e.to_string())
}

type RawProgram = (Vec<RawDef>, Option<(Process, Pos)>);

struct RawDef {
    name: String,
    params: Option<Vec<Chan>>,
    body: Process,
    pos: Pos,
}

/// Free names of `body` where zero-argument calls to implicit definitions
/// contribute the current estimate of their parameters.
fn free_with_implicit(body: &Process, implicit: &BTreeMap<String, BTreeSet<Chan>>) -> BTreeSet<Chan> {
    expand_implicit(body, &implicit_as_params(implicit)).free_names()
}

fn implicit_as_params(implicit: &BTreeMap<String, BTreeSet<Chan>>) -> BTreeMap<String, Vec<Chan>> {
    implicit.iter().map(|(k, v)| (k.clone(), v.iter().cloned().collect())).collect()
}

fn expand_implicit(p: &Process, implicit: &BTreeMap<String, Vec<Chan>>) -> Process {
    match p {
        Process::Nil => Process::Nil,
        Process::Prefix(l, c) => Process::prefix(l.clone(), expand_implicit(c, implicit)),
        Process::Sum(l, r) => Process::sum(expand_implicit(l, implicit), expand_implicit(r, implicit)),
        Process::Par(l, r) => Process::par(expand_implicit(l, implicit), expand_implicit(r, implicit)),
        Process::Restrict(a, b) => Process::restrict(a.clone(), expand_implicit(b, implicit)),
        Process::Rename(b, phi) => Process::rename(expand_implicit(b, implicit), phi.clone()),
        Process::Call(name, args) if args.is_empty() => match implicit.get(name) {
            Some(params) => Process::Call(name.clone(), params.clone()),
            None => p.clone(),
        },
        Process::Call(..) => p.clone(),
    }
}

fn check_calls(calls: &[CallSite], defs: &Definitions) -> Result<(), ParseError> {
    for call in calls {
        let Some(def) = defs.get(&call.name) else {
            return Err(err(
                ParseErrorKind::UndefinedConstant,
                call.pos,
                format!("`{}` is not defined", call.name),
            ));
        };
        let ok = call.arity == def.params.len() || (call.arity == 0 && def.implicit);
        if !ok {
            return Err(err(
                ParseErrorKind::Arity,
                call.pos,
                format!("`{}` expects {} argument(s), got {}", call.name, def.params.len(), call.arity),
            ));
        }
    }
    Ok(())
}

pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut parser = Parser { toks: lex(src)?, at: 0, calls: Vec::new() };
    let (raw, main) = parser.program()?;

    let mut seen = BTreeSet::new();
    for d in &raw {
        if !seen.insert(d.name.clone()) {
            return Err(err(ParseErrorKind::DuplicateDefinition, d.pos, format!("`{}` defined twice", d.name)));
        }
    }

    let mut implicit: BTreeMap<String, BTreeSet<Chan>> =
        raw.iter().filter(|d| d.params.is_none()).map(|d| (d.name.clone(), BTreeSet::new())).collect();
    loop {
        let mut changed = false;
        for d in raw.iter().filter(|d| d.params.is_none()) {
            let free = free_with_implicit(&d.body, &implicit);
            let slot = implicit.get_mut(&d.name).expect("seeded");
            if *slot != free {
                *slot = free;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let implicit_params = implicit_as_params(&implicit);

    let mut defs = Definitions::new();
    for d in &raw {
        let (params, is_implicit) = match &d.params {
            Some(p) => (p.clone(), false),
            None => (implicit_params[&d.name].clone(), true),
        };
        defs.insert(d.name.clone(), Definition { params, body: Process::Nil, implicit: is_implicit });
    }
    check_calls(&parser.calls, &defs)?;

    for d in &raw {
        let body = expand_implicit(&d.body, &implicit_params);
        if let Some(params) = &d.params {
            if let Some(stray) = body.free_names().into_iter().find(|c| !params.contains(c)) {
                return Err(err(
                    ParseErrorKind::FreeNameNotParameter,
                    d.pos,
                    format!("`{stray}` is free in the body of `{}` but is not a parameter", d.name),
                ));
            }
        }
        let slot = defs.get(&d.name).expect("inserted").clone();
        defs.insert(d.name.clone(), Definition { body, ..slot });
    }

    let main = main.map(|(p, _)| expand_implicit(&p, &implicit_params));
    Ok(Program { defs, main })
}

/// Parses a single process expression whose calls resolve against `defs`.
pub fn parse_process(src: &str, defs: &Definitions) -> Result<Process, ParseError> {
    let mut parser = Parser { toks: lex(src)?, at: 0, calls: Vec::new() };
    let p = parser.proc()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.unexpected("expected end of process"));
    }
    check_calls(&parser.calls, defs)?;
    let implicit: BTreeMap<String, Vec<Chan>> =
        defs.iter().filter(|(_, d)| d.implicit).map(|(k, d)| (k.clone(), d.params.clone())).collect();
    Ok(expand_implicit(&p, &implicit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::ch;

    fn kind(src: &str) -> ParseErrorKind {
        parse_program(src).unwrap_err().kind
    }

    #[test]
    fn persistent_forwarder() {
        let prog = parse_program("R(a,b) := a\\b . R(a,b)").unwrap();
        let def = prog.defs.get("R").unwrap();
        assert_eq!(def.params, vec![ch("a"), ch("b")]);
        assert_eq!(def.body, Process::prefix("a\\b".parse().unwrap(), Process::call("R", vec![ch("a"), ch("b")])));
    }

    #[test]
    fn main_is_par_of_prefixes() {
        let prog = parse_program("main := tau\\a . 0 | b\\tau . 0").unwrap();
        assert!(matches!(prog.main, Some(Process::Par(..))));
    }

    #[test]
    fn bare_label_and_virtual_prefix() {
        let prog = parse_program("main := a\\b + 0").unwrap();
        assert!(matches!(prog.main, Some(Process::Sum(..))));
        assert_eq!(kind("main := _\\_ . 0"), ParseErrorKind::NonEssentialPrefix);
        assert_eq!(kind("main := a\\b ; b\\c . 0"), ParseErrorKind::NonEssentialPrefix);
        assert_eq!(kind("main := a\\b ; c\\d . 0"), ParseErrorKind::InvalidChain);
    }

    #[test]
    fn error_kinds_and_positions() {
        let e = parse_program("A(a) := a\\b . 0").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::FreeNameNotParameter);
        assert_eq!(kind("A(a) := a\\a . A(a, a)"), ParseErrorKind::Arity);
        assert_eq!(kind("main := B"), ParseErrorKind::UndefinedConstant);
        assert_eq!(kind("main := (0)[a->b]"), ParseErrorKind::InvalidRenaming);
        let e = parse_program("main := a\\b .\n  | 0").unwrap_err();
        assert_eq!((e.kind, e.line, e.col), (ParseErrorKind::Syntax, 2, 3));
        assert_eq!(kind("A := 0\nA := 0"), ParseErrorKind::DuplicateDefinition);
    }

    #[test]
    fn implicit_parameters_are_inferred_to_a_fixpoint() {
        let prog = parse_program("P := a\\b . Q\nQ := b\\c . P\nmain := new a in P").unwrap();
        let p = prog.defs.get("P").unwrap();
        assert!(p.implicit);
        assert_eq!(p.params, vec![ch("a"), ch("b"), ch("c")]);
        assert_eq!(prog.defs.get("Q").unwrap().params, p.params);
        let main = prog.main.unwrap();
        assert_eq!(main.free_names(), [ch("b"), ch("c")].into());
    }

    #[test]
    fn definitions_follow_each_other_without_separators() {
        assert_eq!(kind("A(x) := x\\x . B\nB(y) := 0"), ParseErrorKind::Arity);
        let ok = parse_program("A(x) := x\\x . C\nB(y) := y\\y . 0\nC := 0").unwrap();
        assert_eq!(ok.defs.len(), 3);
    }

    #[test]
    fn comments_and_keywords() {
        let prog = parse_program("// header\nmain := new a, b in a\\b . 0 // trailing\n").unwrap();
        assert!(matches!(prog.main, Some(Process::Restrict(..))));
        assert_eq!(kind("main := new in in 0"), ParseErrorKind::Syntax);
    }

    #[test]
    fn precedence_prefix_binds_tightest() {
        let p = parse_process("a\\b . 0 | c\\d . 0 + 0", &Definitions::new()).unwrap();
        match p {
            Process::Sum(l, _) => assert!(matches!(*l, Process::Par(..))),
            other => panic!("{other:?}"),
        }
        let r = parse_process("a\\b . 0[a<->c]", &Definitions::new()).unwrap();
        assert!(matches!(r, Process::Prefix(..)));
    }
}
