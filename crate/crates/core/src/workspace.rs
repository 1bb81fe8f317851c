//! Text format for signatures, structures, morphisms, theories, chains and
//! ladders.
//!
//! ```text
//! # a digraph and a rotation of it
//! signature Graph: rel E/2
//! structure C3 : Graph ; size 3 ; E = {(0,1),(1,2),(2,0)}
//! morphism rot : C3 -> C3 ; map [1, 2, 0]
//! theory loopless : Graph ; forall x. E(x,x) -> false
//! chain grow : C3 -rot-> C3
//! ladder L : grow => grow ; components [rot, rot]
//! ```
//!
//! Clauses end at `;` or a newline outside brackets. Clauses following a
//! header (`signature`, `structure`, `morphism`, `theory`, `ladder`) add to
//! that item. `rel`/`fun` clauses outside a signature block declare symbols
//! of the signature `default`, which is also used by `structure X: 3`.

use std::collections::HashSet;
use std::path::Path;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::chain::{ChainDiagram, LadderInstance};
use crate::error::{Error, Result};
use crate::structure::{Morphism, Signature, Structure};
use crate::theory::{parse_sentence_at, Theory};

pub const DEFAULT_SIGNATURE: &str = "default";

/// Everything declared in one workspace file, indexed by name in
/// declaration order.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub signatures: IndexMap<String, Arc<Signature>>,
    pub structures: IndexMap<String, Arc<Structure>>,
    pub morphisms: IndexMap<String, Morphism>,
    pub theories: IndexMap<String, Theory>,
    pub chains: IndexMap<String, ChainDiagram>,
    pub ladders: IndexMap<String, LadderInstance>,
}

impl Workspace {
    pub fn parse(text: &str) -> Result<Workspace> {
        Parser::default().run(text)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Workspace> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Workspace::parse(&text)
    }

    pub fn structure(&self, name: &str) -> Result<&Arc<Structure>> {
        self.structures.get(name).ok_or_else(|| Error::unknown("structure", name))
    }

    pub fn morphism(&self, name: &str) -> Result<&Morphism> {
        self.morphisms.get(name).ok_or_else(|| Error::unknown("morphism", name))
    }

    /// A declared theory, or one of the built-in `groups` and
    /// `abelian-groups`.
    pub fn theory(&self, name: &str) -> Result<Theory> {
        if let Some(t) = self.theories.get(name) {
            return Ok(t.clone());
        }
        match name {
            "groups" => Ok(Theory::groups()),
            "abelian-groups" | "abelian_groups" => Ok(Theory::abelian_groups()),
            _ => Err(Error::unknown("theory", name)),
        }
    }

    pub fn chain(&self, name: &str) -> Result<&ChainDiagram> {
        self.chains.get(name).ok_or_else(|| Error::unknown("chain", name))
    }

    pub fn ladder(&self, name: &str) -> Result<&LadderInstance> {
        self.ladders.get(name).ok_or_else(|| Error::unknown("ladder", name))
    }
}

pub fn parse_workspace(text: &str) -> Result<Workspace> {
    Workspace::parse(text)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(usize),
    Punct(char),
    Arrow,
    DoubleArrow,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

struct Clause {
    text: String,
    line: usize,
    col: usize,
    toks: Vec<Token>,
    end: (usize, usize),
}

/// Split into clauses at `;` and newlines outside brackets, dropping comments.
fn split_clauses(text: &str) -> Result<Vec<Clause>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut chars: Vec<(char, usize, usize)> = Vec::new();
    let mut depth = 0usize;
    let mut comment = false;
    let mut flush = |cur: &mut String, chars: &mut Vec<(char, usize, usize)>, end: (usize, usize)| -> Result<()> {
        if let Some(start) = chars.iter().position(|c| !c.0.is_whitespace()) {
            let (_, line, col) = chars[start];
            let text: String = cur.chars().skip(start).collect();
            let toks = lex(&chars[start..])?;
            out.push(Clause {
                text,
                line,
                col,
                toks,
                end,
            });
        }
        cur.clear();
        chars.clear();
        Ok(())
    };
    let (mut line, mut col) = (1, 1);
    for c in text.chars() {
        if c == '\n' {
            comment = false;
            if depth == 0 {
                flush(&mut cur, &mut chars, (line, col))?;
            } else {
                cur.push(' ');
                chars.push((' ', line, col));
            }
            line += 1;
            col = 1;
            continue;
        }
        if comment || c == '#' {
            comment = true;
            col += 1;
            continue;
        }
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => {
                depth = depth.checked_sub(1).ok_or_else(|| syntax(line, col, format!("unbalanced `{c}`")))?;
            }
            _ => {}
        }
        if c == ';' && depth == 0 {
            flush(&mut cur, &mut chars, (line, col))?;
        } else {
            cur.push(c);
            chars.push((c, line, col));
        }
        col += 1;
    }
    if depth != 0 {
        return Err(syntax(line, col, "unclosed bracket at end of input"));
    }
    flush(&mut cur, &mut chars, (line, col))?;
    Ok(out)
}

fn lex(chars: &[(char, usize, usize)]) -> Result<Vec<Token>> {
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (c, line, col) = chars[i];
        let push = |toks: &mut Vec<Token>, tok| toks.push(Token { tok, line, col });
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let mut n: usize = 0;
            while i < chars.len() && chars[i].0.is_ascii_digit() {
                n = n
                    .checked_mul(10)
                    .and_then(|n| n.checked_add(chars[i].0 as usize - '0' as usize))
                    .ok_or_else(|| syntax(line, col, "number too large"))?;
                i += 1;
            }
            push(&mut toks, Tok::Num(n));
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].0.is_alphanumeric() || chars[i].0 == '_') {
                s.push(chars[i].0);
                i += 1;
            }
            push(&mut toks, Tok::Ident(s));
        } else if c == '-' && chars.get(i + 1).map(|c| c.0) == Some('>') {
            push(&mut toks, Tok::Arrow);
            i += 2;
        } else if c == '=' && chars.get(i + 1).map(|c| c.0) == Some('>') {
            push(&mut toks, Tok::DoubleArrow);
            i += 2;
        } else if "-:,()[]{}=/<>.".contains(c) {
            push(&mut toks, Tok::Punct(c));
            i += 1;
        } else {
            return Err(syntax(line, col, format!("unexpected character `{c}`")));
        }
    }
    Ok(toks)
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn semantic(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Semantic {
        line,
        column,
        message: message.into(),
    }
}

/// Line and column.
type Pos = (usize, usize);

/// Cursor over the tokens of one clause.
struct Cursor<'a> {
    clause: &'a Clause,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(clause: &'a Clause) -> Self {
        Cursor { clause, pos: 0 }
    }

    fn peek(&self) -> Option<&'a Tok> {
        self.clause.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.clause.toks.get(self.pos) {
            Some(t) => (t.line, t.col),
            None => self.clause.end,
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> Error {
        let (l, c) = self.here();
        syntax(l, c, msg)
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s.clone())
            }
            _ => Err(self.syntax(format!("expected {what}"))),
        }
    }

    fn num(&mut self, what: &str) -> Result<usize> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(*n)
            }
            _ => Err(self.syntax(format!("expected {what}"))),
        }
    }

    fn punct(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{c}`")))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn done(&self) -> bool {
        self.pos >= self.clause.toks.len()
    }

    fn finish(&self) -> Result<()> {
        if self.done() {
            Ok(())
        } else {
            Err(self.syntax("unexpected trailing input"))
        }
    }

    /// A `[...]` list of numbers, nested lists flattened.
    fn flat_list(&mut self) -> Result<Vec<usize>> {
        self.punct('[')?;
        let mut out = Vec::new();
        if self.eat(']') {
            return Ok(out);
        }
        loop {
            if self.peek() == Some(&Tok::Punct('[')) {
                out.extend(self.flat_list()?);
            } else {
                out.push(self.num("a number")?);
            }
            if self.eat(']') {
                return Ok(out);
            }
            self.punct(',')?;
        }
    }

    /// A `[a, b, ...]` list of names.
    fn name_list(&mut self) -> Result<Vec<String>> {
        let bracketed = self.eat('[');
        let mut out = Vec::new();
        if bracketed && self.eat(']') {
            return Ok(out);
        }
        loop {
            out.push(self.ident("a name")?);
            if bracketed && self.eat(']') {
                return Ok(out);
            }
            if !bracketed && self.done() {
                return Ok(out);
            }
            self.punct(',')?;
        }
    }

    /// A `{(a,b), ...}` set of tuples; bare numbers are 1-tuples. Returns
    /// each tuple with its position.
    /// Tuples with the position of each.
    fn tuple_set(&mut self) -> Result<Vec<(Vec<usize>, Pos)>> {
        self.punct('{')?;
        let mut out = Vec::new();
        if self.eat('}') {
            return Ok(out);
        }
        loop {
            let at = self.here();
            if self.eat('(') {
                let mut t = Vec::new();
                if !self.eat(')') {
                    loop {
                        t.push(self.num("a tuple element")?);
                        if self.eat(')') {
                            break;
                        }
                        self.punct(',')?;
                    }
                }
                out.push((t, at));
            } else {
                out.push((vec![self.num("a tuple or element")?], at));
            }
            if self.eat('}') {
                return Ok(out);
            }
            self.punct(',')?;
        }
    }
}

enum Value {
    Tuples(Vec<(Vec<usize>, (usize, usize))>),
    Table(Vec<usize>),
}

struct PendingStructure {
    name: String,
    at: (usize, usize),
    signature: Arc<Signature>,
    size: Option<usize>,
    values: Vec<(String, Value, (usize, usize))>,
}

struct PendingMorphism {
    name: String,
    at: (usize, usize),
    source: String,
    target: String,
    map: Option<Vec<usize>>,
}

struct PendingLadder {
    name: String,
    at: (usize, usize),
    lower: String,
    upper: String,
    components: Option<Vec<String>>,
}

enum Open {
    Signature(String),
    Structure(PendingStructure),
    Morphism(PendingMorphism),
    Theory(String),
    Ladder(PendingLadder),
}

#[derive(Default)]
struct Parser {
    ws: Workspace,
    draft: IndexMap<String, Signature>,
    used: HashSet<String>,
    open: Option<Open>,
}

impl Parser {
    fn run(mut self, text: &str) -> Result<Workspace> {
        for clause in split_clauses(text)? {
            self.clause(&clause)?;
        }
        self.close()?;
        Ok(self.ws)
    }

    fn clause(&mut self, clause: &Clause) -> Result<()> {
        let mut cur = Cursor::new(clause);
        let head = match cur.peek() {
            Some(Tok::Ident(s)) => s.as_str(),
            _ => return Err(cur.syntax("expected a declaration keyword or symbol name")),
        };
        match head {
            "signature" => {
                self.close()?;
                cur.next();
                let name = cur.ident("a signature name")?;
                if self.draft.contains_key(&name) {
                    return Err(semantic(clause.line, clause.col, format!("signature `{name}` declared twice")));
                }
                self.draft.insert(name.clone(), Signature::new());
                if cur.eat(':') && !cur.done() {
                    self.symbols(&name, &mut cur)?;
                }
                cur.finish()?;
                self.open = Some(Open::Signature(name));
            }
            "rel" | "fun" => {
                let sig = match &self.open {
                    Some(Open::Signature(s)) => s.clone(),
                    _ => {
                        self.close()?;
                        self.draft.entry(DEFAULT_SIGNATURE.to_string()).or_default();
                        self.open = Some(Open::Signature(DEFAULT_SIGNATURE.to_string()));
                        DEFAULT_SIGNATURE.to_string()
                    }
                };
                self.symbols(&sig, &mut cur)?;
                cur.finish()?;
            }
            "structure" => {
                self.close()?;
                cur.next();
                let name = cur.ident("a structure name")?;
                cur.punct(':')?;
                let (sig_name, size) = match cur.next() {
                    Some(Tok::Num(n)) => (DEFAULT_SIGNATURE.to_string(), Some(*n)),
                    Some(Tok::Ident(s)) => {
                        let size = if cur.eat(',') { Some(cur.num("a size")?) } else { None };
                        (s.clone(), size)
                    }
                    _ => return Err(cur.syntax("expected a signature name or a size")),
                };
                cur.finish()?;
                let signature = self.use_signature(&sig_name, clause)?;
                self.open = Some(Open::Structure(PendingStructure {
                    name,
                    at: (clause.line, clause.col),
                    signature,
                    size,
                    values: Vec::new(),
                }));
            }
            "morphism" => {
                self.close()?;
                cur.next();
                let name = cur.ident("a morphism name")?;
                cur.punct(':')?;
                let source = cur.ident("a source structure")?;
                if cur.next() != Some(&Tok::Arrow) {
                    cur.pos -= 1;
                    return Err(cur.syntax("expected `->`"));
                }
                let target = cur.ident("a target structure")?;
                let map = if cur.peek() == Some(&Tok::Ident("map".into())) {
                    cur.next();
                    cur.eat('=');
                    Some(cur.flat_list()?)
                } else {
                    None
                };
                cur.finish()?;
                self.open = Some(Open::Morphism(PendingMorphism {
                    name,
                    at: (clause.line, clause.col),
                    source,
                    target,
                    map,
                }));
            }
            "theory" => {
                self.close()?;
                cur.next();
                let name = cur.ident("a theory name")?;
                cur.punct(':')?;
                let sig_name = cur.ident("a signature name")?;
                cur.finish()?;
                let signature = self.use_signature(&sig_name, clause)?;
                self.ws.theories.insert(
                    name.clone(),
                    Theory {
                        name: name.clone(),
                        signature,
                        sentences: Vec::new(),
                    },
                );
                self.open = Some(Open::Theory(name));
            }
            "forall" => {
                let Some(Open::Theory(name)) = &self.open else {
                    return Err(semantic(clause.line, clause.col, "sentence outside a theory block"));
                };
                let theory = self.ws.theories.get_mut(name).expect("open theory exists");
                let sentence = parse_sentence_at(&theory.signature, &clause.text, clause.line, clause.col)?;
                theory.sentences.push(sentence);
            }
            "chain" => {
                self.close()?;
                cur.next();
                let name = cur.ident("a chain name")?;
                cur.punct(':')?;
                let first = cur.ident("a structure name")?;
                let mut objects = vec![self.structure_at(&first, clause)?];
                let mut maps = Vec::new();
                while !cur.done() {
                    cur.punct('-')?;
                    let m = cur.ident("a morphism name")?;
                    if cur.next() != Some(&Tok::Arrow) {
                        cur.pos -= 1;
                        return Err(cur.syntax("expected `->`"));
                    }
                    let next = cur.ident("a structure name")?;
                    let map = self
                        .ws
                        .morphisms
                        .get(&m)
                        .ok_or_else(|| semantic(clause.line, clause.col, format!("undeclared morphism `{m}`")))?;
                    maps.push(map.clone());
                    objects.push(self.structure_at(&next, clause)?);
                }
                let chain = ChainDiagram::new(objects, maps).map_err(|e| wrap(e, clause.line, clause.col))?;
                self.insert_unique("chain", name, clause, |ws| &mut ws.chains, chain)?;
            }
            "ladder" => {
                self.close()?;
                cur.next();
                let name = cur.ident("a ladder name")?;
                cur.punct(':')?;
                let lower = cur.ident("a chain name")?;
                if cur.next() != Some(&Tok::DoubleArrow) {
                    cur.pos -= 1;
                    return Err(cur.syntax("expected `=>`"));
                }
                let upper = cur.ident("a chain name")?;
                cur.finish()?;
                self.open = Some(Open::Ladder(PendingLadder {
                    name,
                    at: (clause.line, clause.col),
                    lower,
                    upper,
                    components: None,
                }));
            }
            _ => self.continuation(clause, &mut cur)?,
        }
        Ok(())
    }

    /// Clauses that add to the open item.
    fn continuation(&mut self, clause: &Clause, cur: &mut Cursor) -> Result<()> {
        let head = cur.ident("a keyword")?;
        match (&mut self.open, head.as_str()) {
            (Some(Open::Structure(s)), "size") => {
                cur.eat('=');
                s.size = Some(cur.num("a size")?);
            }
            (Some(Open::Structure(s)), _) => {
                cur.punct('=')?;
                let value = match cur.peek() {
                    Some(Tok::Punct('{')) => Value::Tuples(cur.tuple_set()?),
                    Some(Tok::Punct('[')) => Value::Table(cur.flat_list()?),
                    _ => return Err(cur.syntax("expected `{` or `[`")),
                };
                s.values.push((head, value, (clause.line, clause.col)));
            }
            (Some(Open::Morphism(m)), "map") => {
                cur.eat('=');
                m.map = Some(cur.flat_list()?);
            }
            (Some(Open::Ladder(l)), "components") => {
                cur.eat('=');
                l.components = Some(cur.name_list()?);
            }
            _ => {
                return Err(syntax(clause.line, clause.col, format!("unexpected `{head}` here")));
            }
        }
        cur.finish()
    }

    /// `rel R/2, S/1` or `fun f/2, e/0`, possibly mixed: `rel R/2 fun f/1`.
    fn symbols(&mut self, sig_name: &str, cur: &mut Cursor) -> Result<()> {
        if self.used.contains(sig_name) {
            let (l, c) = cur.here();
            return Err(semantic(l, c, format!("signature `{sig_name}` extended after use")));
        }
        let mut kind = cur.ident("`rel` or `fun`")?;
        loop {
            if kind != "rel" && kind != "fun" {
                return Err(cur.syntax("expected `rel` or `fun`"));
            }
            let (l, c) = cur.here();
            let name = cur.ident("a symbol name")?;
            cur.punct('/')?;
            let arity = cur.num("an arity")?;
            let sig = self.draft.get_mut(sig_name).expect("signature exists");
            let added = if kind == "rel" {
                sig.add_relation(&name, arity)
            } else {
                sig.add_function(&name, arity)
            };
            added.map_err(|e| wrap(e, l, c))?;
            cur.eat(',');
            match cur.peek() {
                None => return Ok(()),
                Some(Tok::Ident(s)) if s == "rel" || s == "fun" => kind = cur.ident("")?,
                Some(_) => {}
            }
        }
    }

    fn use_signature(&mut self, name: &str, clause: &Clause) -> Result<Arc<Signature>> {
        if let Some(sig) = self.ws.signatures.get(name) {
            return Ok(sig.clone());
        }
        let sig = match self.draft.get(name) {
            Some(s) => s.clone(),
            None if name == DEFAULT_SIGNATURE => Signature::new(),
            None => return Err(semantic(clause.line, clause.col, format!("undeclared signature `{name}`"))),
        };
        let sig = Arc::new(sig);
        self.used.insert(name.to_string());
        self.ws.signatures.insert(name.to_string(), sig.clone());
        Ok(sig)
    }

    fn structure_at(&self, name: &str, clause: &Clause) -> Result<Arc<Structure>> {
        self.ws
            .structures
            .get(name)
            .cloned()
            .ok_or_else(|| semantic(clause.line, clause.col, format!("undeclared structure `{name}`")))
    }

    fn insert_unique<T>(
        &mut self,
        kind: &str,
        name: String,
        clause: &Clause,
        table: impl FnOnce(&mut Workspace) -> &mut IndexMap<String, T>,
        value: T,
    ) -> Result<()> {
        let table = table(&mut self.ws);
        if table.contains_key(&name) {
            return Err(semantic(clause.line, clause.col, format!("{kind} `{name}` declared twice")));
        }
        table.insert(name, value);
        Ok(())
    }

    /// Validate and store the open item.
    fn close(&mut self) -> Result<()> {
        match self.open.take() {
            None | Some(Open::Signature(_)) | Some(Open::Theory(_)) => Ok(()),
            Some(Open::Structure(s)) => {
                let (line, col) = s.at;
                let size = s
                    .size
                    .ok_or_else(|| semantic(line, col, format!("structure `{}` has no size", s.name)))?;
                let mut b = Structure::builder(s.signature.clone(), size);
                for (sym, value, (l, c)) in s.values {
                    b = match value {
                        Value::Tuples(tuples) => {
                            for (t, (tl, tc)) in &tuples {
                                if let Some(bad) = t.iter().find(|&&e| e >= size) {
                                    return Err(semantic(*tl, *tc, format!("tuple element {bad} outside carrier 0..{size}")));
                                }
                            }
                            if s.signature.relation_index(&sym).is_none() {
                                return Err(semantic(l, c, format!("undeclared relation symbol `{sym}`")));
                            }
                            b.relation(&sym, tuples.into_iter().map(|(t, _)| t))
                        }
                        Value::Table(table) => {
                            if s.signature.function_index(&sym).is_none() {
                                return Err(semantic(l, c, format!("undeclared function symbol `{sym}`")));
                            }
                            b.function(&sym, table)
                        }
                    }
                    .map_err(|e| wrap(e, l, c))?;
                }
                let st = b.build().map_err(|e| wrap(e, line, col))?;
                if self.ws.structures.contains_key(&s.name) {
                    return Err(semantic(line, col, format!("structure `{}` declared twice", s.name)));
                }
                self.ws.structures.insert(s.name, Arc::new(st));
                Ok(())
            }
            Some(Open::Morphism(m)) => {
                let (line, col) = m.at;
                let find = |n: &str| {
                    self.ws
                        .structures
                        .get(n)
                        .cloned()
                        .ok_or_else(|| semantic(line, col, format!("undeclared structure `{n}`")))
                };
                let (src, dst) = (find(&m.source)?, find(&m.target)?);
                let map = m
                    .map
                    .ok_or_else(|| semantic(line, col, format!("morphism `{}` has no map", m.name)))?;
                let f = Morphism::new(src, dst, map).map_err(|e| wrap(e, line, col))?;
                if self.ws.morphisms.contains_key(&m.name) {
                    return Err(semantic(line, col, format!("morphism `{}` declared twice", m.name)));
                }
                self.ws.morphisms.insert(m.name, f);
                Ok(())
            }
            Some(Open::Ladder(l)) => {
                let (line, col) = l.at;
                let chain = |n: &str| {
                    self.ws
                        .chains
                        .get(n)
                        .cloned()
                        .ok_or_else(|| semantic(line, col, format!("undeclared chain `{n}`")))
                };
                let (lower, upper) = (chain(&l.lower)?, chain(&l.upper)?);
                let names = l
                    .components
                    .ok_or_else(|| semantic(line, col, format!("ladder `{}` has no components", l.name)))?;
                let components = names
                    .iter()
                    .map(|n| {
                        self.ws
                            .morphisms
                            .get(n)
                            .cloned()
                            .ok_or_else(|| semantic(line, col, format!("undeclared morphism `{n}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let ladder = LadderInstance::new(lower, upper, components).map_err(|e| wrap(e, line, col))?;
                if self.ws.ladders.contains_key(&l.name) {
                    return Err(semantic(line, col, format!("ladder `{}` declared twice", l.name)));
                }
                self.ws.ladders.insert(l.name, ladder);
                Ok(())
            }
        }
    }
}

/// Attach a position to validation errors from the builders.
fn wrap(e: Error, line: usize, column: usize) -> Error {
    match e {
        Error::Syntax { .. } | Error::Semantic { .. } => e,
        Error::Invalid(message) | Error::Precondition(message) | Error::SignatureMismatch(message) => {
            semantic(line, column, message)
        }
        other => semantic(line, column, other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::MorphismClass;

    #[test]
    fn digraph_one_liner() {
        let ws = Workspace::parse("rel E/2; structure X: 2; E={(0,1)}").unwrap();
        let x = ws.structure("X").unwrap();
        assert_eq!(**x, Structure::digraph(2, &[(0, 1)]).unwrap());
    }

    #[test]
    fn group_table() {
        let ws = Workspace::parse("fun m/2; structure G: 2; m=[[0,1],[1,0]]").unwrap();
        let g = ws.structure("G").unwrap();
        assert_eq!(g.apply(0, &[1, 1]), 0);
        assert_eq!(g.apply(0, &[0, 1]), 1);
    }

    #[test]
    fn out_of_bounds_tuple() {
        let err = Workspace::parse("structure X: 2; E={(0,2)}").unwrap_err();
        assert!(err.to_string().contains("tuple element 2 outside carrier"), "{err}");
        assert!(matches!(err, Error::Semantic { line: 1, column: 20, .. }), "{err:?}");
    }

    #[test]
    fn full_example() {
        let text = "\
# a digraph and a rotation of it
signature Graph: rel E/2
structure C3 : Graph ; size 3
  E = {(0,1),(1,2),
       (2,0)}
morphism rot : C3 -> C3 ; map [1, 2, 0]
theory loopless : Graph
  forall x. E(x,x) -> false
chain grow : C3 -rot-> C3
ladder L : grow => grow ; components [rot, rot]
";
        let ws = Workspace::parse(text).unwrap();
        assert_eq!(ws.structure("C3").unwrap().relation(0).len(), 3);
        assert_eq!(ws.morphism("rot").unwrap().classify(), MorphismClass::Iso);
        assert!(ws.theory("loopless").unwrap().is_model(ws.structure("C3").unwrap()).unwrap());
        assert_eq!(ws.chain("grow").unwrap().len(), 2);
        assert!(ws.ladder("L").is_ok());
        assert!(ws.theory("groups").is_ok());
    }

    #[test]
    fn constants_and_errors_carry_positions() {
        let ws = Workspace::parse("signature P: fun c/0, s/1\nstructure A : P ; size 2 ; c = [1] ; s = [1, 0]").unwrap();
        assert_eq!(ws.structure("A").unwrap().apply(0, &[]), 1);

        let err = Workspace::parse("fun s/1\nstructure A: 2\n  s = [0]").unwrap_err();
        assert!(matches!(err, Error::Semantic { line: 3, .. }), "{err:?}");
        let err = Workspace::parse("rel E/2\nstructure A: 2\n  E = {(0 1)}").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, column: 11, .. }), "{err:?}");
        let err = Workspace::parse("structure A: 2\nmorphism f : A -> B ; map [0,1]").unwrap_err();
        assert!(err.to_string().contains("undeclared structure `B`"), "{err}");
        let err = Workspace::parse("rel E/2\nstructure A: 1\nrel F/1").unwrap_err();
        assert!(err.to_string().contains("extended after use"), "{err}");
        let err = Workspace::parse("theory T : default\nforall x. R(x) -> true").unwrap_err();
        assert!(matches!(err, Error::Syntax { .. } | Error::Semantic { .. }), "{err:?}");
    }
}
