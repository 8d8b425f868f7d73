//! Text formats: `.gc` circuits and `.asn` assignments.
//!
//! ```text
//! # comments run to end of line
//! input a;
//! z = const(0.3);
//! b = cmp(z, a);        # high when z exceeds a
//! c = scale(1/2, b);
//! ```
//!
//! Names used on a right-hand side without a definition become free nodes.
//! Numbers are decimals or fractions `p/q` and must lie in `[0, 1]`.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind, GateType, NodeId};
use crate::concepts::Assignment;
use crate::scalar::{format_number, Scalar};

/// 1-based position of a token in the source.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {message}{}", expected_suffix(.expected))]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", expected.join(" or "))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    LParen,
    RParen,
    Comma,
    Semi,
    Eq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Num(s) => format!("number `{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let start_col = col;
        let span = |len: usize| SourceSpan { line, column: start_col, length: len.max(1) };
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
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(tok) = single {
            tokens.push(Token { tok, span: span(1) });
            i += 1;
            col += 1;
            continue;
        }
        let mut j = i;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '$') {
                j += 1;
            }
            Tok::Ident(chars[i..j].iter().collect())
        } else if c.is_ascii_digit() || c == '.' || c == '-' || c == '+' {
            // Signs are lexed so that negative numbers get a range error rather than a syntax error.
            if c == '-' || c == '+' {
                j += 1;
            }
            while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.' || chars[j] == '/') {
                j += 1;
            }
            Tok::Num(chars[i..j].iter().collect())
        } else {
            return Err(ParseError { span: span(1), message: format!("unexpected character `{c}`"), expected: vec![] });
        };
        let len = j - i;
        tokens.push(Token { tok, span: span(len) });
        col += len;
        i = j;
    }
    tokens.push(Token { tok: Tok::Eof, span: SourceSpan { line, column: col, length: 1 } });
    Ok(tokens)
}

/// Value of a decimal or `p/q` literal in `[0, 1]`, or a message naming what is wrong.
pub fn parse_number<S: Scalar>(text: &str) -> Result<S, String> {
    let value = match text.split_once('/') {
        Some((p, q)) => {
            let is_int = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
            if !is_int(p) || !is_int(q) {
                return Err(format!("malformed fraction `{text}`"));
            }
            let p: u64 = p.parse().map_err(|_| format!("numerator of `{text}` too large"))?;
            let q: u64 = q.parse().map_err(|_| format!("denominator of `{text}` too large"))?;
            if q == 0 {
                return Err(format!("zero denominator in `{text}`"));
            }
            S::from_u64(p).ok_or("numerator too large")? / S::from_u64(q).ok_or("denominator too large")?
        }
        None => {
            let body = text.trim_start_matches(['+', '-']);
            let well_formed =
                body.bytes().any(|b| b.is_ascii_digit()) && body.bytes().filter(|&b| b == b'.').count() <= 1;
            if !well_formed {
                return Err(format!("malformed number `{text}`"));
            }
            text.parse::<S>().map_err(|_| format!("malformed number `{text}`"))?
        }
    };
    if !(value >= S::zero() && value <= S::one()) {
        return Err(format!("NUM out of [0,1]: `{text}`"));
    }
    Ok(value)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, production: &str, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError {
            span: t.span,
            message: format!("in {production}: unexpected {}", t.tok.describe()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok, production: &str) -> Result<Token, ParseError> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(self.error(production, &[&tok.describe()]))
        }
    }

    fn ident(&mut self, production: &str) -> Result<(String, SourceSpan), ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => Err(self.error(production, &["identifier"])),
        }
    }

    fn num<S: Scalar>(&mut self, production: &str) -> Result<S, ParseError> {
        match &self.peek().tok {
            Tok::Num(s) => {
                let s = s.clone();
                let span = self.peek().span;
                let v = parse_number(&s).map_err(|message| ParseError { span, message, expected: vec![] })?;
                self.bump();
                Ok(v)
            }
            _ => Err(self.error(production, &["number"])),
        }
    }

    fn gate<S: Scalar>(&mut self) -> Result<(GateType<S>, Vec<NodeId>), ParseError> {
        let keywords: Vec<&str> = GateKind::ALL.iter().map(|k| k.keyword()).collect();
        let kind = match &self.peek().tok {
            Tok::Ident(s) => GateKind::from_keyword(s),
            _ => None,
        }
        .ok_or_else(|| self.error("gate", &keywords))?;
        self.bump();
        self.expect(Tok::LParen, "gate arguments")?;
        let mut zeta = None;
        if kind.has_parameter() {
            zeta = Some(self.num::<S>("gate parameter")?);
            if kind.arity() > 0 {
                self.expect(Tok::Comma, "gate arguments")?;
            }
        }
        let mut inputs = Vec::with_capacity(kind.arity());
        for i in 0..kind.arity() {
            if i > 0 {
                self.expect(Tok::Comma, "gate arguments")?;
            }
            inputs.push(NodeId::new(self.ident("gate arguments")?.0));
        }
        self.expect(Tok::RParen, "gate arguments")?;
        let gate_type = match zeta {
            Some(z) => GateType::with_zeta(kind, z),
            None => GateType::plain(kind).expect("parameterless kind"),
        };
        Ok((gate_type, inputs))
    }
}

/// Parses a `.gc` circuit.
pub fn parse_circuit<S: Scalar>(text: &str) -> Result<Circuit<S>, ParseError> {
    let mut p = Parser { tokens: lex(text)?, pos: 0 };
    let mut circuit = Circuit::new();
    let mut defined: HashSet<String> = HashSet::new();
    loop {
        if p.peek().tok == Tok::Eof {
            return Ok(circuit);
        }
        let (name, span) = p.ident("statement")?;
        let declaration = name == "input" && matches!(p.peek().tok, Tok::Ident(_));
        let (name, span) = if declaration { p.ident("input declaration")? } else { (name, span) };
        if !defined.insert(name.clone()) {
            return Err(ParseError { span, message: format!("duplicate definition of `{name}`"), expected: vec![] });
        }
        if declaration {
            circuit.add_node(NodeId::new(name));
        } else {
            p.expect(Tok::Eq, "statement")?;
            let (gate_type, inputs) = p.gate::<S>()?;
            circuit.add_gate(Gate::new(gate_type, inputs, NodeId::new(name)));
        }
        p.expect(Tok::Semi, "statement")?;
    }
}

/// Canonical text: `input` lines for free nodes, then one gate per line in
/// dependency order (insertion order if the circuit is cyclic).
pub fn serialize_circuit<S: Scalar>(circuit: &Circuit<S>) -> String {
    let mut out = String::new();
    for n in circuit.free_nodes() {
        out.push_str(&format!("input {n};\n"));
    }
    let order = circuit.topological_order().unwrap_or_else(|| circuit.gate_ids().collect());
    for id in order {
        out.push_str(&format!("{};\n", circuit.gates()[id.0]));
    }
    out
}

/// Parses `.asn` lines `name = value`; a trailing `;` is allowed.
pub fn parse_assignment<S: Scalar>(text: &str) -> Result<Assignment<S>, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut x = Assignment::new();
    while p.peek().tok != Tok::Eof {
        let (name, span) = p.ident("assignment line")?;
        p.expect(Tok::Eq, "assignment line")?;
        let v = p.num::<S>("assignment value")?;
        if p.peek().tok == Tok::Semi {
            p.bump();
        }
        if x.set(NodeId::new(name.clone()), v).is_some() {
            return Err(ParseError { span, message: format!("duplicate value for `{name}`"), expected: vec![] });
        }
    }
    Ok(x)
}

pub fn serialize_assignment<S: Scalar>(x: &Assignment<S>) -> String {
    x.iter().map(|(n, v)| format!("{n} = {}\n", format_number(v))).collect()
}
