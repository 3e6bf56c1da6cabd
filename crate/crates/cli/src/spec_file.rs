//! The quiver specification file: one `key = value` entry per line.
//!
//! ```text
//! # AIII n=1
//! vertices = 1 2
//! tau      = 1:2
//! edges    = 1>2
//! dims_v   = 1 1
//! dims_w   = 1 1
//! ```
//!
//! Values are lists separated by whitespace or commas. `dims_v` and `dims_w`
//! are positional, aligned with `vertices`. `edges` may be omitted or empty;
//! every other key is required and may appear only once.

use std::fmt;

use gklo_core::quiver::{DimensionData, QuiverWithInvolution, VertexId, Violation};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("parse error at {0}")]
    Parse(ParseError),
    #[error("validation failed: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

/// Parsed, not yet validated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverSpec {
    pub quiver: QuiverWithInvolution,
    pub dims: DimensionData,
}

const KEYS: [&str; 5] = ["vertices", "tau", "edges", "dims_v", "dims_w"];

struct Token<'a> {
    text: &'a str,
    col: usize,
}

fn err(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, col, message: message.into() }
}

/// Splits on whitespace and commas; `col` is 1-based in characters.
fn tokens(value: &str, offset: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (ci, (bi, ch)) in value.char_indices().enumerate() {
        let sep = ch.is_whitespace() || ch == ',';
        match (sep, start) {
            (false, None) => start = Some((bi, ci)),
            (true, Some((b0, c0))) => {
                out.push(Token { text: &value[b0..bi], col: offset + c0 + 1 });
                start = None;
            }
            _ => {}
        }
    }
    if let Some((b0, c0)) = start {
        out.push(Token { text: &value[b0..], col: offset + c0 + 1 });
    }
    out
}

fn number(tok: &str, line: usize, col: usize) -> Result<u32, ParseError> {
    tok.parse::<u32>().map_err(|_| err(line, col, format!("expected a nonnegative integer, found '{tok}'")))
}

fn pair(tok: &Token<'_>, sep: char, line: usize) -> Result<(VertexId, VertexId), ParseError> {
    let (a, b) = tok
        .text
        .split_once(sep)
        .ok_or_else(|| err(line, tok.col, format!("expected a pair 'a{sep}b', found '{}'", tok.text)))?;
    let a_n = number(a, line, tok.col)?;
    let b_n = number(b, line, tok.col + a.chars().count() + 1)?;
    Ok((a_n, b_n))
}

struct Entry<'a> {
    line: usize,
    key_col: usize,
    toks: Vec<Token<'a>>,
}

/// Parses the grammar only; axioms are checked by [`parse_spec`].
pub fn parse_unvalidated(text: &str) -> Result<QuiverSpec, ParseError> {
    let mut entries: [Option<Entry<'_>>; 5] = Default::default();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split_once('#').map_or(raw, |(a, _)| a);
        if content.trim().is_empty() {
            continue;
        }
        let key_col = content.chars().take_while(|c| c.is_whitespace()).count() + 1;
        let (key, value) =
            content.split_once('=').ok_or_else(|| err(line, key_col, "expected 'key = value'"))?;
        let key = key.trim();
        let slot = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| err(line, key_col, format!("unknown key '{key}' (expected one of {})", KEYS.join(", "))))?;
        if let Some(prev) = &entries[slot] {
            return Err(err(line, key_col, format!("duplicate key '{key}' (first given on line {})", prev.line)));
        }
        let offset = content[..content.len() - value.len()].chars().count();
        let toks = tokens(value, offset);
        // token syntax is checked per line so errors surface in file order
        for t in &toks {
            match slot {
                1 => pair(t, ':', line).map(drop)?,
                2 => pair(t, '>', line).map(drop)?,
                _ => number(t.text, line, t.col).map(drop)?,
            }
        }
        entries[slot] = Some(Entry { line, key_col, toks });
    }
    let missing = |k: usize| err(last_line + 1, 1, format!("missing required key '{}'", KEYS[k]));
    let [vertices, tau, edges, dims_v, dims_w] = entries;
    let vertices = vertices.ok_or_else(|| missing(0))?;
    let tau = tau.ok_or_else(|| missing(1))?;
    let dims_v = dims_v.ok_or_else(|| missing(3))?;
    let dims_w = dims_w.ok_or_else(|| missing(4))?;

    let vs: Vec<VertexId> =
        vertices.toks.iter().map(|t| number(t.text, vertices.line, t.col)).collect::<Result<_, _>>()?;
    if vs.is_empty() {
        return Err(err(vertices.line, vertices.key_col, "no vertices given"));
    }
    let pairs: Vec<(VertexId, VertexId)> =
        tau.toks.iter().map(|t| pair(t, ':', tau.line)).collect::<Result<_, _>>()?;
    let edge_list: Vec<(VertexId, VertexId)> = match &edges {
        Some(e) => e.toks.iter().map(|t| pair(t, '>', e.line)).collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    let dims = |e: &Entry<'_>, key: &str| -> Result<Vec<u32>, ParseError> {
        let d: Vec<u32> = e.toks.iter().map(|t| number(t.text, e.line, t.col)).collect::<Result<_, _>>()?;
        if d.len() != vs.len() {
            return Err(err(e.line, e.key_col, format!("{key} has {} entries for {} vertices", d.len(), vs.len())));
        }
        Ok(d)
    };
    let v = dims(&dims_v, "dims_v")?;
    let w = dims(&dims_w, "dims_w")?;
    let mut seen = std::collections::BTreeSet::new();
    for (t, &(a, b)) in tau.toks.iter().zip(&pairs) {
        // pairs must be disjoint; the validator only sees the resulting map
        for x in [a, b] {
            if a != b && !seen.insert(x) {
                return Err(err(tau.line, t.col, format!("vertex {x} appears in two tau pairs")));
            }
        }
    }
    Ok(QuiverSpec {
        quiver: QuiverWithInvolution::new(vs.clone(), edge_list, &pairs),
        dims: DimensionData::from_lists(&vs, &v, &w),
    })
}

/// Parses and validates.
pub fn parse_spec(text: &str) -> Result<QuiverSpec, SpecError> {
    let spec = parse_unvalidated(text).map_err(SpecError::Parse)?;
    let violations = spec.quiver.validate(&spec.dims);
    if !violations.is_empty() {
        return Err(SpecError::Invalid(violations));
    }
    Ok(spec)
}

/// Canonical text for a spec; `parse_unvalidated(render(s)) == s`.
pub fn render(spec: &QuiverSpec) -> String {
    let join = |xs: Vec<String>| xs.join(" ");
    let q = &spec.quiver;
    let mut pairs: Vec<(VertexId, VertexId)> = q.tau.iter().filter(|(a, b)| a <= b).map(|(a, b)| (*a, *b)).collect();
    pairs.sort();
    let dim = |m: &std::collections::BTreeMap<VertexId, u32>| join(q.vertices.iter().map(|i| m.get(i).copied().unwrap_or(0).to_string()).collect());
    format!(
        "vertices = {}\ntau = {}\nedges = {}\ndims_v = {}\ndims_w = {}\n",
        join(q.vertices.iter().map(|i| i.to_string()).collect()),
        join(pairs.iter().map(|(a, b)| format!("{a}:{b}")).collect()),
        join(q.edges.iter().map(|(a, b)| format!("{a}>{b}")).collect()),
        dim(&spec.dims.v),
        dim(&spec.dims.w),
    )
}
