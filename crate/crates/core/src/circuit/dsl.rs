//! Line-oriented circuit text format (`.circ`):
//!
//! ```text
//! circuit n=2 q=2
//! gate 3 AND 1 2
//! gate 4 OR 3 3
//! ```
//!
//! Gates are listed in ascending wire order. `NOT` takes a single input.
//! Blank lines and lines starting with `#` are ignored on input and never
//! produced on output.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Circuit, ExtGate, ExtendedCircuit, Gate, GateKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedCircuit {
    Monotone(Circuit),
    Extended(ExtendedCircuit),
}

impl ParsedCircuit {
    pub fn into_extended(self) -> ExtendedCircuit {
        match self {
            ParsedCircuit::Monotone(c) => ExtendedCircuit::from(&c),
            ParsedCircuit::Extended(c) => c,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ParsedCircuit::Monotone(c) => c.n(),
            ParsedCircuit::Extended(c) => c.n(),
        }
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..i],
                    column: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: s + 1,
        });
    }
    out
}

struct Cursor<'a> {
    line_no: usize,
    line_len: usize,
    toks: std::vec::IntoIter<Token<'a>>,
}

impl<'a> Cursor<'a> {
    fn err(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line_no,
            column,
            message: message.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<Token<'a>, ParseError> {
        self.toks
            .next()
            .ok_or_else(|| self.err(self.line_len + 1, format!("expected {what}")))
    }

    fn number(&mut self, what: &str) -> Result<(usize, usize), ParseError> {
        let t = self.next(what)?;
        let v =
            parse_usize(t.text).ok_or_else(|| self.err(t.column, format!("expected {what}, found `{}`", t.text)))?;
        Ok((v, t.column))
    }

    fn keyed(&mut self, key: &str) -> Result<usize, ParseError> {
        let t = self.next(&format!("`{key}=<int>`"))?;
        t.text
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .and_then(parse_usize)
            .ok_or_else(|| self.err(t.column, format!("expected `{key}=<int>`, found `{}`", t.text)))
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match self.toks.next() {
            Some(t) => Err(self.err(t.column, format!("unexpected `{}`", t.text))),
            None => Ok(()),
        }
    }
}

fn parse_usize(s: &str) -> Option<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
        return None;
    }
    s.parse().ok()
}

/// Parses circuit text. Only syntax and wire numbering are checked here;
/// structural rules are left to `validate`.
pub fn parse(text: &str) -> Result<ParsedCircuit, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| {
        let t = l.trim_start();
        !t.is_empty() && !t.starts_with('#')
    });

    let (line_no, header) = lines.next().ok_or(ParseError {
        line: 1,
        column: 1,
        message: "expected `circuit n=<int> q=<int>` header".into(),
    })?;
    let mut cur = Cursor {
        line_no,
        line_len: header.len(),
        toks: tokens(header).into_iter(),
    };
    let kw = cur.next("`circuit`")?;
    if kw.text != "circuit" {
        return Err(cur.err(kw.column, format!("expected `circuit`, found `{}`", kw.text)));
    }
    let n = cur.keyed("n")?;
    let q = cur.keyed("q")?;
    cur.finish()?;

    let mut gates = Vec::with_capacity(q);
    let mut negated = false;
    let mut last_line = line_no;
    for (line_no, line) in lines {
        last_line = line_no;
        let mut cur = Cursor {
            line_no,
            line_len: line.len(),
            toks: tokens(line).into_iter(),
        };
        let kw = cur.next("`gate`")?;
        if kw.text != "gate" {
            return Err(cur.err(kw.column, format!("expected `gate`, found `{}`", kw.text)));
        }
        let expected = n + gates.len() + 1;
        let (w, col) = cur.number("wire number")?;
        if gates.len() == q {
            return Err(cur.err(kw.column, format!("more than q={q} gates")));
        }
        if w != expected {
            return Err(cur.err(col, format!("expected gate wire {expected}, found {w}")));
        }
        let op = cur.next("gate type")?;
        let gate = match op.text {
            "AND" | "OR" => {
                let (a, _) = cur.number("input wire")?;
                let (b, _) = cur.number("input wire")?;
                if op.text == "AND" {
                    ExtGate::And(a, b)
                } else {
                    ExtGate::Or(a, b)
                }
            }
            "NOT" => {
                negated = true;
                ExtGate::Not(cur.number("input wire")?.0)
            }
            other => {
                return Err(cur.err(
                    op.column,
                    format!("unknown gate type `{other}` (expected AND, OR or NOT)"),
                ));
            }
        };
        cur.finish()?;
        gates.push(gate);
    }
    if gates.len() != q {
        return Err(ParseError {
            line: last_line,
            column: 1,
            message: format!("expected {q} gates, found {}", gates.len()),
        });
    }

    if negated {
        return Ok(ParsedCircuit::Extended(ExtendedCircuit::new(n, gates)));
    }
    let gates = gates
        .into_iter()
        .map(|g| match g {
            ExtGate::And(a, b) => Gate::and(a, b),
            ExtGate::Or(a, b) => Gate::or(a, b),
            ExtGate::Not(_) => unreachable!("no NOT gates in a monotone parse"),
        })
        .collect();
    Ok(ParsedCircuit::Monotone(Circuit::new(n, gates)))
}

/// Canonical text of a monotone circuit.
pub fn render(c: &Circuit) -> String {
    let mut out = format!("circuit n={} q={}\n", c.n(), c.q());
    for (i, g) in c.gates().iter().enumerate() {
        let kind = match g.kind {
            GateKind::And => "AND",
            GateKind::Or => "OR",
        };
        let _ = writeln!(out, "gate {} {} {} {}", c.n() + 1 + i, kind, g.a, g.b);
    }
    out
}

/// Canonical text of an extended circuit.
pub fn render_extended(c: &ExtendedCircuit) -> String {
    let mut out = format!("circuit n={} q={}\n", c.n(), c.q());
    for (i, g) in c.gates().iter().enumerate() {
        let w = c.n() + 1 + i;
        let _ = match *g {
            ExtGate::And(a, b) => writeln!(out, "gate {w} AND {a} {b}"),
            ExtGate::Or(a, b) => writeln!(out, "gate {w} OR {a} {b}"),
            ExtGate::Not(a) => writeln!(out, "gate {w} NOT {a}"),
        };
    }
    out
}
