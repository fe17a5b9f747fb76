//! Text format for diagrams.
//!
//! ```text
//! diagram rgb {
//!   inputs a;
//!   outputs b;
//!   node n0: red 1;
//!   wire a -> n0;
//!   wire n0 -> b [dualY];
//! }
//! ```
//!
//! Node arity is implied by the wires. Names of the form `n<k>` keep the id
//! `k`; other node names get fresh ids in declaration order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::diagram::{
    canonical_relabel, Color, Decoration, Diagram, Edge, Endpoint, Flavour, NodeId, Phase,
    Violation,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("validation error: {0}")]
    Invalid(#[from] Violation),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Punct(&'static str),
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    col: usize,
}

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.char_indices().peekable(),
            src,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<(usize, char)> {
        let c = self.chars.next()?;
        if c.1 == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        while let Some(&(start, ch)) = self.chars.peek() {
            let (line, col) = (self.line, self.col);
            if ch.is_whitespace() {
                self.bump();
                continue;
            }
            if ch == '#' {
                while let Some(&(_, c)) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
                continue;
            }
            let tok = if ch.is_ascii_alphabetic() || ch == '_' {
                let mut end = start;
                while let Some(&(i, c)) = self.chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' || c == '+' && &self.src[start..i] == "rg" {
                        end = i + c.len_utf8();
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Ident(self.src[start..end].to_string())
            } else if ch == '-' && self.src[start..].starts_with("->") {
                self.bump();
                self.bump();
                Tok::Punct("->")
            } else if ch.is_ascii_digit() || ch == '-' || ch == '+' || ch == '.' {
                let mut end = start;
                let mut prev = ' ';
                while let Some(&(i, c)) = self.chars.peek() {
                    let sign_ok = (c == '-' || c == '+') && (i == start || prev == 'e' || prev == 'E');
                    if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || sign_ok {
                        end = i + 1;
                        prev = c;
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Num(self.src[start..end].to_string())
            } else {
                let p = match ch {
                    '{' => "{",
                    '}' => "}",
                    ';' => ";",
                    ':' => ":",
                    '[' => "[",
                    ']' => "]",
                    ',' => ",",
                    _ => {
                        return Err(ParseError::Syntax {
                            line,
                            col,
                            msg: format!("unexpected character {ch:?}"),
                        })
                    }
                };
                self.bump();
                Tok::Punct(p)
            };
            out.push(Spanned { tok, line, col });
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self
            .toks
            .get(self.pos)
            .map_or(self.end, |t| (t.line, t.col));
        Err(ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn punct(&mut self, p: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Punct(q)) if *q == p => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected '{p}'")),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }
}

enum Decl {
    Node(String, Color, Phase, (usize, usize)),
    Wire(String, String, Decoration, (usize, usize)),
}

/// Parses and validates a diagram.
pub fn parse(text: &str) -> Result<Diagram, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let end = toks.last().map_or((1, 1), |t| (t.line, t.col + 1));
    let mut p = Parser { toks, pos: 0, end };

    match p.ident("'diagram'")?.as_str() {
        "diagram" => {}
        _ => {
            p.pos -= 1;
            return p.err("expected 'diagram'");
        }
    }
    let fl = p.ident("flavour")?;
    let Some(flavour) = Flavour::from_keyword(&fl) else {
        p.pos -= 1;
        return p.err(format!("unknown flavour '{fl}'"));
    };
    p.punct("{")?;

    let mut inputs: Vec<String> = Vec::new();
    let mut outputs: Vec<String> = Vec::new();
    let mut decls = Vec::new();
    while !p.is_punct("}") {
        let here = p.toks.get(p.pos).map_or(p.end, |t| (t.line, t.col));
        let kw = p.ident("declaration")?;
        match kw.as_str() {
            "inputs" | "outputs" => {
                let mut names = Vec::new();
                while !p.is_punct(";") {
                    if p.is_punct(",") {
                        p.pos += 1;
                        continue;
                    }
                    names.push(p.ident("port name")?);
                }
                p.punct(";")?;
                if kw == "inputs" {
                    inputs.extend(names);
                } else {
                    outputs.extend(names);
                }
            }
            "node" => {
                let name = p.ident("node name")?;
                p.punct(":")?;
                let col = p.ident("colour")?;
                let Some(color) = Color::from_keyword(&col) else {
                    p.pos -= 1;
                    return p.err(format!("unknown colour '{col}'"));
                };
                let phase = match p.next() {
                    Some(Tok::Num(n)) => match n.parse::<i64>() {
                        Ok(k) => Phase::c4(k),
                        Err(_) => {
                            p.pos -= 1;
                            return p.err("expected integer phase");
                        }
                    },
                    Some(Tok::Ident(r)) if r == "rad" => match p.next() {
                        Some(Tok::Num(n)) => match n.parse::<f64>() {
                            Ok(a) if a.is_finite() => Phase::u1(a),
                            _ => {
                                p.pos -= 1;
                                return p.err("expected angle");
                            }
                        },
                        _ => {
                            p.pos -= 1;
                            return p.err("expected angle after 'rad'");
                        }
                    },
                    _ => {
                        p.pos -= 1;
                        return p.err("expected phase");
                    }
                };
                p.punct(";")?;
                decls.push(Decl::Node(name, color, phase, here));
            }
            "wire" => {
                let a = p.ident("endpoint")?;
                p.punct("->")?;
                let b = p.ident("endpoint")?;
                let mut deco = Decoration::Plain;
                if p.is_punct("[") {
                    p.pos += 1;
                    let d = p.ident("decoration")?;
                    deco = match Decoration::from_keyword(&d) {
                        Some(x) => x,
                        None => {
                            p.pos -= 1;
                            return p.err(format!("unknown decoration '{d}'"));
                        }
                    };
                    p.punct("]")?;
                }
                p.punct(";")?;
                decls.push(Decl::Wire(a, b, deco, here));
            }
            other => {
                p.pos -= 1;
                return p.err(format!("unknown declaration '{other}'"));
            }
        }
    }
    p.punct("}")?;
    if p.pos < p.toks.len() {
        return p.err("trailing input after diagram");
    }

    let syntax = |(line, col): (usize, usize), msg: String| ParseError::Syntax { line, col, msg };

    let mut names: BTreeMap<String, Endpoint> = BTreeMap::new();
    for (i, n) in inputs.iter().enumerate() {
        if names.insert(n.clone(), Endpoint::Input(i)).is_some() {
            return Err(syntax(p.end, format!("duplicate name '{n}'")));
        }
    }
    for (i, n) in outputs.iter().enumerate() {
        if names.insert(n.clone(), Endpoint::Output(i)).is_some() {
            return Err(syntax(p.end, format!("duplicate name '{n}'")));
        }
    }
    // Explicit ids first, then fresh ids for other names.
    let explicit = |name: &str| -> Option<u32> {
        let digits = name.strip_prefix('n')?;
        if digits.is_empty() || (digits.len() > 1 && digits.starts_with('0')) {
            return None;
        }
        digits.parse().ok()
    };
    let mut d = Diagram::new(flavour, inputs.len(), outputs.len());
    let mut pending = Vec::new();
    for decl in &decls {
        if let Decl::Node(name, color, phase, at) = decl {
            if names.contains_key(name) {
                return Err(syntax(*at, format!("duplicate name '{name}'")));
            }
            match explicit(name) {
                Some(k) if d.node(NodeId(k)).is_none() => {
                    d.add_node_with_id(NodeId(k), *color, *phase);
                    names.insert(name.clone(), Endpoint::Node(NodeId(k)));
                }
                _ => {
                    names.insert(name.clone(), Endpoint::Input(usize::MAX));
                    pending.push((name.clone(), *color, *phase));
                }
            }
        }
    }
    for (name, color, phase) in pending {
        let id = d.add_node(color, phase);
        names.insert(name, Endpoint::Node(id));
    }
    for decl in &decls {
        if let Decl::Wire(a, b, deco, at) = decl {
            let look = |n: &String| {
                names
                    .get(n)
                    .copied()
                    .ok_or_else(|| syntax(*at, format!("unknown endpoint '{n}'")))
            };
            d.add_edge(Edge::new(look(a)?, look(b)?, *deco));
        }
    }
    d.validate()?;
    Ok(d)
}

/// Deterministic text: nodes by id, edges sorted, ports named `i<k>`/`o<k>`.
pub fn print(d: &Diagram) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "diagram {} {{", d.flavour());
    if d.n_inputs() > 0 {
        let names: Vec<String> = (0..d.n_inputs()).map(|i| format!("i{i}")).collect();
        let _ = writeln!(s, "  inputs {};", names.join(" "));
    }
    if d.n_outputs() > 0 {
        let names: Vec<String> = (0..d.n_outputs()).map(|i| format!("o{i}")).collect();
        let _ = writeln!(s, "  outputs {};", names.join(" "));
    }
    for n in d.nodes() {
        let _ = writeln!(s, "  node {}: {} {};", n.id, n.color, n.phase);
    }
    let mut edges: Vec<&Edge> = d.edges().iter().collect();
    edges.sort_by_key(|e| (e.source, e.target, e.decoration));
    for e in edges {
        let _ = write!(s, "  wire {} -> {}", e.source, e.target);
        if let Some(k) = e.decoration.keyword() {
            let _ = write!(s, " [{k}]");
        }
        s.push_str(";\n");
    }
    s.push_str("}\n");
    s
}

/// Text of the canonical relabelling; iso-equal diagrams print identically.
pub fn print_canonical(d: &Diagram) -> String {
    print(&canonical_relabel(d))
}
