//! Text documents for parameters, keys and ciphertexts.
//!
//! Every document is a type line (`PP v1`, `MSK v1`, `SK v1`, `CT v1`), the
//! backend header lines (`GROUP ...`, optionally `BOUNDS ...`), then one
//! `name=value` entry per line in a fixed order. A secret key carries its
//! circuit in a fenced block:
//!
//! ````text
//! SK v1
//! GROUP p=101 k=3
//! ```circuit
//! circuit n=2 q=2
//! gate 3 AND 1 2
//! gate 4 OR 3 3
//! ```
//! KH=L2:17
//! w1.K1=L1:5
//! ...
//! ````
//!
//! Parsing is strict: only canonical text is accepted, so `render(parse(t))`
//! reproduces `t` byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::circuit::{self, Circuit, GateKind, ParsedCircuit};
use crate::kpabe::{Ciphertext, MasterSecret, PublicParams, SecretKey, WireKey};
use crate::mlmap::{ElementCodec, GroupDescriptor};
use crate::sizebound::{parse_bounds_line, GrowthProfile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocKind {
    PublicParams,
    MasterSecret,
    SecretKey,
    Ciphertext,
}

impl DocKind {
    fn tag(self) -> &'static str {
        match self {
            DocKind::PublicParams => "PP v1",
            DocKind::MasterSecret => "MSK v1",
            DocKind::SecretKey => "SK v1",
            DocKind::Ciphertext => "CT v1",
        }
    }

    fn from_tag(s: &str) -> Option<Self> {
        [
            DocKind::PublicParams,
            DocKind::MasterSecret,
            DocKind::SecretKey,
            DocKind::Ciphertext,
        ]
        .into_iter()
        .find(|k| k.tag() == s)
    }
}

/// The backend description at the top of a document, readable before a map
/// has been constructed.
#[derive(Debug, Clone)]
pub struct DocHeader {
    pub kind: DocKind,
    pub group: GroupDescriptor,
    pub bounds: Option<GrowthProfile>,
}

pub fn read_header(text: &str) -> Result<DocHeader, FormatError> {
    let mut lines = Lines::new(text)?;
    let (n, tag) = lines.next("document type")?;
    let kind = DocKind::from_tag(tag).ok_or_else(|| err(n, format!("unknown document type `{tag}`")))?;
    let (n, group) = lines.next("GROUP line")?;
    let group = GroupDescriptor::parse(group).map_err(|e| err(n, e.to_string()))?;
    let bounds = match lines.peek() {
        Some((n, l)) if l.starts_with("BOUNDS") => Some(parse_bounds_line(l).map_err(|e| err(n, e.to_string()))?),
        _ => None,
    };
    Ok(DocHeader { kind, group, bounds })
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError {
        line,
        message: message.into(),
    }
}

struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Result<Self, FormatError> {
        let body = text
            .strip_suffix('\n')
            .ok_or_else(|| err(text.lines().count().max(1), "document must end with a newline"))?;
        if body.contains('\r') {
            return Err(err(1, "carriage returns are not allowed"));
        }
        Ok(Lines {
            lines: body.split('\n').collect(),
            pos: 0,
        })
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).map(|l| (self.pos + 1, *l))
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str), FormatError> {
        let line = self
            .peek()
            .ok_or_else(|| err(self.lines.len() + 1, format!("expected {what}")))?;
        self.pos += 1;
        Ok(line)
    }

    fn exact(&mut self, expected: &str) -> Result<(), FormatError> {
        let (n, l) = self.next(&format!("`{expected}`"))?;
        if l == expected {
            Ok(())
        } else {
            Err(err(n, format!("expected `{expected}`, found `{l}`")))
        }
    }

    fn value(&mut self, key: &str) -> Result<(usize, &'a str), FormatError> {
        let (n, l) = self.next(&format!("`{key}=`"))?;
        l.strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .map(|v| (n, v))
            .ok_or_else(|| err(n, format!("expected `{key}=...`, found `{l}`")))
    }

    fn element<M: ElementCodec>(&mut self, map: &M, key: &str) -> Result<M::Element, FormatError> {
        let (n, v) = self.value(key)?;
        map.parse_element(v).map_err(|e| err(n, e.to_string()))
    }

    fn finish(&self) -> Result<(), FormatError> {
        match self.peek() {
            Some((n, l)) => Err(err(n, format!("unexpected `{l}`"))),
            None => Ok(()),
        }
    }
}

fn header<M: ElementCodec>(map: &M, kind: DocKind) -> String {
    let mut out = String::new();
    out.push_str(kind.tag());
    out.push('\n');
    for l in map.header_lines() {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

fn open<'a, M: ElementCodec>(map: &M, kind: DocKind, text: &'a str) -> Result<Lines<'a>, FormatError> {
    let mut lines = Lines::new(text)?;
    lines.exact(kind.tag())?;
    for l in map.header_lines() {
        lines.exact(&l)?;
    }
    Ok(lines)
}

fn entry<M: ElementCodec>(out: &mut String, map: &M, key: &str, x: &M::Element) {
    let _ = writeln!(out, "{key}={}", map.render_element(x));
}

fn count(n: usize, v: &str, what: &str) -> Result<usize, FormatError> {
    let ok = !v.is_empty() && v.bytes().all(|b| b.is_ascii_digit()) && (v == "0" || !v.starts_with('0'));
    ok.then(|| v.parse().ok())
        .flatten()
        .ok_or_else(|| err(n, format!("invalid {what} `{v}`")))
}

pub fn render_public_params<M: ElementCodec>(map: &M, pp: &PublicParams<M::Element>) -> String {
    let mut out = header(map, DocKind::PublicParams);
    let _ = writeln!(out, "n={}", pp.n);
    entry(&mut out, map, "H", &pp.big_h);
    for (i, h) in pp.h.iter().enumerate() {
        entry(&mut out, map, &format!("h{}", i + 1), h);
    }
    out
}

pub fn parse_public_params<M: ElementCodec>(map: &M, text: &str) -> Result<PublicParams<M::Element>, FormatError> {
    let mut lines = open(map, DocKind::PublicParams, text)?;
    let (ln, v) = lines.value("n")?;
    let n = count(ln, v, "input length")?;
    if n == 0 {
        return Err(err(ln, "input length must be at least 1"));
    }
    let big_h = lines.element(map, "H")?;
    let h = (1..=n)
        .map(|i| lines.element(map, &format!("h{i}")))
        .collect::<Result<Vec<_>, _>>()?;
    lines.finish()?;
    Ok(PublicParams { n, big_h, h })
}

pub fn render_master_secret<M: ElementCodec>(map: &M, msk: &MasterSecret<M::Element>) -> String {
    let mut out = header(map, DocKind::MasterSecret);
    entry(&mut out, map, "K", &msk.key);
    out
}

pub fn parse_master_secret<M: ElementCodec>(map: &M, text: &str) -> Result<MasterSecret<M::Element>, FormatError> {
    let mut lines = open(map, DocKind::MasterSecret, text)?;
    let key = lines.element(map, "K")?;
    lines.finish()?;
    Ok(MasterSecret { key })
}

pub fn render_ciphertext<M: ElementCodec>(map: &M, ct: &Ciphertext<M::Element>) -> String {
    let mut out = header(map, DocKind::Ciphertext);
    let _ = writeln!(out, "x={}", circuit::render_bits(&ct.x));
    entry(&mut out, map, "CM", &ct.c_m);
    entry(&mut out, map, "Cs", &ct.c_s);
    for (i, c) in &ct.c {
        entry(&mut out, map, &format!("C{i}"), c);
    }
    out
}

pub fn parse_ciphertext<M: ElementCodec>(map: &M, text: &str) -> Result<Ciphertext<M::Element>, FormatError> {
    let mut lines = open(map, DocKind::Ciphertext, text)?;
    let (ln, v) = lines.value("x")?;
    let x = circuit::parse_bits(v).ok_or_else(|| err(ln, format!("invalid bit string `{v}`")))?;
    let c_m = lines.element(map, "CM")?;
    let c_s = lines.element(map, "Cs")?;
    let mut c = BTreeMap::new();
    for i in (1..=x.len()).filter(|&i| x[i - 1]) {
        c.insert(i, lines.element(map, &format!("C{i}"))?);
    }
    lines.finish()?;
    Ok(Ciphertext { x, c_m, c_s, c })
}

const FENCE_OPEN: &str = "```circuit";
const FENCE_CLOSE: &str = "```";

pub fn render_secret_key<M: ElementCodec>(map: &M, sk: &SecretKey<M::Element>) -> String {
    let mut out = header(map, DocKind::SecretKey);
    out.push_str(FENCE_OPEN);
    out.push('\n');
    out.push_str(&circuit::render(&sk.circuit));
    out.push_str(FENCE_CLOSE);
    out.push('\n');
    entry(&mut out, map, "KH", &sk.header);
    for (idx, key) in sk.wires.iter().enumerate() {
        for (i, c) in key.components().into_iter().enumerate() {
            entry(&mut out, map, &format!("w{}.K{}", idx + 1, i + 1), c);
        }
    }
    out
}

pub fn parse_secret_key<M: ElementCodec>(map: &M, text: &str) -> Result<SecretKey<M::Element>, FormatError> {
    let mut lines = open(map, DocKind::SecretKey, text)?;
    lines.exact(FENCE_OPEN)?;
    let start = lines.pos + 1;
    let mut body = String::new();
    loop {
        let (_, l) = lines.next("closing fence")?;
        if l == FENCE_CLOSE {
            break;
        }
        body.push_str(l);
        body.push('\n');
    }
    let circuit: Circuit = match circuit::parse(&body) {
        Ok(ParsedCircuit::Monotone(c)) => c,
        Ok(ParsedCircuit::Extended(_)) => return Err(err(start, "key circuits must be monotone")),
        Err(e) => return Err(err(start + e.line - 1, format!("circuit: {e}"))),
    };
    if circuit::render(&circuit) != body {
        return Err(err(start, "circuit block is not in canonical form"));
    }

    let header = lines.element(map, "KH")?;
    let mut wires = Vec::with_capacity(circuit.wire_count());
    for w in 1..=circuit.wire_count() {
        let mut k = |i: usize| lines.element(map, &format!("w{w}.K{i}"));
        let key = match circuit.gate(w).map(|g| g.kind) {
            None => WireKey::Input { k1: k(1)?, k2: k(2)? },
            Some(GateKind::Or) => WireKey::Or {
                k1: k(1)?,
                k2: k(2)?,
                k3: k(3)?,
                k4: k(4)?,
            },
            Some(GateKind::And) => WireKey::And {
                k1: k(1)?,
                k2: k(2)?,
                k3: k(3)?,
            },
        };
        wires.push(key);
    }
    lines.finish()?;
    Ok(SecretKey { circuit, header, wires })
}
