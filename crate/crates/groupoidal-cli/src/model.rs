//! The model format: one declaration per line, e.g.
//!
//! ```text
//! finset S2 = {a, b}
//! map p2 : S2 -> PT { a->*, b->* }
//! groupoid C2 = cech(p2)
//! ```
//!
//! Braced bodies may span lines. `#` starts a comment.

use std::fmt;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Call {
    pub op: String,
    /// Names, with `G.0` and `G.1` for the objects and arrows of `G`.
    pub args: Vec<String>,
}

/// `a.b->c`: an action or multiplication table entry.
pub type Entry = [String; 3];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    FinSet { elements: Vec<String> },
    FinSpace { elements: Vec<String>, opens: Vec<Vec<String>> },
    Map { dom: String, cod: String, pairs: Vec<(String, String)> },
    Groupoid { call: Call, table: Option<Vec<Entry>> },
    Action { call: Call, table: Vec<Entry> },
    Bibundle { call: Call },
    Anafunctor { call: Call },
    Simplex { call: Call },
}

impl Body {
    pub fn keyword(&self) -> &'static str {
        match self {
            Body::FinSet { .. } => "finset",
            Body::FinSpace { .. } => "finspace",
            Body::Map { .. } => "map",
            Body::Groupoid { .. } => "groupoid",
            Body::Action { .. } => "action",
            Body::Bibundle { .. } => "bibundle",
            Body::Anafunctor { .. } => "anafunctor",
            Body::Simplex { .. } => "simplex",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub body: Body,
}

/// Parsed declarations in order, with where each one starts.
#[derive(Debug, Clone, Default)]
pub struct ModelFile {
    pub decls: Vec<Decl>,
    pub positions: Vec<Pos>,
}

impl ModelFile {
    pub fn get(&self, name: &str) -> Option<&Decl> {
        self.decls.iter().find(|d| d.name == name)
    }
}

impl PartialEq for ModelFile {
    fn eq(&self, other: &Self) -> bool {
        self.decls == other.decls
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Punct(&'static str),
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || "_*|'!^~+".contains(c)
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut j = 0;
        while j < chars.len() {
            let pos = Pos { line: i + 1, col: j + 1 };
            let c = chars[j];
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                j += 1;
            } else if is_name_char(c) {
                let start = j;
                while j < chars.len() && is_name_char(chars[j]) {
                    j += 1;
                }
                out.push((Tok::Ident(chars[start..j].iter().collect()), pos));
            } else if c == '-' && chars.get(j + 1) == Some(&'>') {
                out.push((Tok::Punct("->"), pos));
                j += 2;
            } else {
                let p = match c {
                    '{' => "{",
                    '}' => "}",
                    '(' => "(",
                    ')' => ")",
                    ',' => ",",
                    '=' => "=",
                    ':' => ":",
                    '.' => ".",
                    _ => return Err(syntax(pos, format!("unexpected character `{c}`"))),
                };
                out.push((Tok::Punct(p), pos));
                j += 1;
            }
        }
    }
    Ok(out)
}

fn syntax(pos: Pos, msg: String) -> CliError {
    CliError::SyntaxError { line: pos.line, col: pos.col, msg }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn pos(&self) -> Pos {
        self.toks.get(self.at).map(|t| t.1).unwrap_or(self.end)
    }

    fn peek_punct(&self, p: &str) -> bool {
        matches!(self.toks.get(self.at), Some((Tok::Punct(q), _)) if *q == p)
    }

    fn punct(&mut self, p: &str) -> Result<()> {
        if self.peek_punct(p) {
            self.at += 1;
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected `{p}`")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.toks.get(self.at) {
            Some((Tok::Ident(s), _)) => {
                self.at += 1;
                Ok(s.clone())
            }
            _ => Err(syntax(self.pos(), format!("expected {what}"))),
        }
    }

    /// `NAME` or `NAME.0` / `NAME.1`.
    fn reference(&mut self) -> Result<String> {
        let mut name = self.ident("a name")?;
        if self.peek_punct(".") {
            self.at += 1;
            let part = self.ident("`0` or `1`")?;
            name = format!("{name}.{part}");
        }
        Ok(name)
    }

    /// `{ item, item, ... }`, allowing a trailing comma.
    fn braced<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        self.punct("{")?;
        let mut out = Vec::new();
        while !self.peek_punct("}") {
            out.push(item(self)?);
            if !self.peek_punct("}") {
                self.punct(",")?;
            }
        }
        self.punct("}")?;
        Ok(out)
    }

    fn names(&mut self) -> Result<Vec<String>> {
        self.braced(|p| p.ident("an element"))
    }

    fn call(&mut self) -> Result<Call> {
        let op = self.ident("a constructor")?;
        self.punct("(")?;
        let mut args = Vec::new();
        while !self.peek_punct(")") {
            args.push(self.reference()?);
            if !self.peek_punct(")") {
                self.punct(",")?;
            }
        }
        self.punct(")")?;
        Ok(Call { op, args })
    }

    fn table(&mut self) -> Result<Vec<Entry>> {
        self.braced(|p| {
            let a = p.ident("an element")?;
            p.punct(".")?;
            let b = p.ident("an element")?;
            p.punct("->")?;
            let c = p.ident("an element")?;
            Ok([a, b, c])
        })
    }

    fn decl(&mut self) -> Result<Decl> {
        let kw_pos = self.pos();
        let kw = self.ident("a declaration keyword")?;
        let name = self.ident("a name")?;
        let body = match kw.as_str() {
            "finset" => {
                self.punct("=")?;
                Body::FinSet { elements: self.names()? }
            }
            "finspace" => {
                self.punct("=")?;
                let elements = self.names()?;
                let opens_pos = self.pos();
                if self.ident("`opens`")? != "opens" {
                    return Err(syntax(opens_pos, "expected `opens`".into()));
                }
                let opens = self.braced(|p| p.names())?;
                Body::FinSpace { elements, opens }
            }
            "map" => {
                self.punct(":")?;
                let dom = self.reference()?;
                self.punct("->")?;
                let cod = self.reference()?;
                let pairs = self.braced(|p| {
                    let a = p.ident("an element")?;
                    p.punct("->")?;
                    Ok((a, p.ident("an element")?))
                })?;
                Body::Map { dom, cod, pairs }
            }
            "groupoid" => {
                self.punct("=")?;
                let call = self.call()?;
                let table = if self.peek_punct("{") { Some(self.table()?) } else { None };
                Body::Groupoid { call, table }
            }
            "action" => {
                self.punct("=")?;
                let call = self.call()?;
                Body::Action { call, table: self.table()? }
            }
            "bibundle" => {
                self.punct("=")?;
                Body::Bibundle { call: self.call()? }
            }
            "anafunctor" => {
                self.punct("=")?;
                Body::Anafunctor { call: self.call()? }
            }
            "simplex" => {
                self.punct("=")?;
                Body::Simplex { call: self.call()? }
            }
            other => return Err(syntax(kw_pos, format!("unknown declaration `{other}`"))),
        };
        Ok(Decl { name, body })
    }
}

/// Parses the declarations without resolving names.
pub fn parse_syntax(text: &str) -> Result<ModelFile> {
    let toks = lex(text)?;
    let end = Pos { line: text.lines().count().max(1), col: 1 };
    let mut p = Parser { toks, at: 0, end };
    let mut out = ModelFile::default();
    while p.at < p.toks.len() {
        let pos = p.pos();
        out.decls.push(p.decl()?);
        out.positions.push(pos);
    }
    Ok(out)
}

fn join(xs: &[String]) -> String {
    xs.join(", ")
}

fn table_text(t: &[Entry]) -> String {
    let items: Vec<String> = t.iter().map(|[a, b, c]| format!("{a}.{b}->{c}")).collect();
    format!("{{ {} }}", items.join(", "))
}

impl fmt::Display for Call {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.op, join(&self.args))
    }
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kw = self.body.keyword();
        let n = &self.name;
        match &self.body {
            Body::FinSet { elements } => write!(f, "{kw} {n} = {{{}}}", join(elements)),
            Body::FinSpace { elements, opens } => {
                let opens: Vec<String> = opens.iter().map(|o| format!("{{{}}}", join(o))).collect();
                write!(f, "{kw} {n} = {{{}}} opens {{{}}}", join(elements), opens.join(", "))
            }
            Body::Map { dom, cod, pairs } => {
                let pairs: Vec<String> = pairs.iter().map(|(a, b)| format!("{a}->{b}")).collect();
                write!(f, "{kw} {n} : {dom} -> {cod} {{ {} }}", pairs.join(", "))
            }
            Body::Groupoid { call, table: None } => write!(f, "{kw} {n} = {call}"),
            Body::Groupoid { call, table: Some(t) } | Body::Action { call, table: t } => {
                write!(f, "{kw} {n} = {call} {}", table_text(t))
            }
            Body::Bibundle { call } | Body::Anafunctor { call } | Body::Simplex { call } => {
                write!(f, "{kw} {n} = {call}")
            }
        }
    }
}

/// One declaration per line, in order.
pub fn serialize(model: &ModelFile) -> String {
    model.decls.iter().map(|d| format!("{d}\n")).collect()
}
