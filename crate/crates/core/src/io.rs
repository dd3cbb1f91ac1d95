//! Text, JSON and DOT formats.
//!
//! The grape text format is line based. A token starting with `#` begins a
//! comment that runs to the end of the line. Directives:
//!
//! ```text
//! format 1          optional; must come first when present
//! meta <text>       free text, kept verbatim
//! stem <id> <id>    one stem edge
//! loops <id> <n>    grape count at a vertex (default 0)
//! ```
//!
//! Tree files use the same grammar with `loops` forbidden and allow
//! `vertex <id>` for a one-vertex tree. Graph files use `edge <id> <id>` and
//! `vertex <id>`.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cube::{config_label, CubeComplex, SimpleGraph};
use crate::error::Error;
use crate::grape::{GrapeBunch, Stem};
use crate::intersection::ReducedIntersectionComplex;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line and column, when the problem has a location.
    pub position: Option<(usize, usize)>,
    pub code: &'static str,
    pub message: String,
}

impl ParseError {
    fn at(line: usize, column: usize, code: &'static str, message: impl Into<String>) -> Self {
        ParseError { position: Some((line, column)), code, message: message.into() }
    }

    fn model(e: Error, position: Option<(usize, usize)>) -> Self {
        ParseError { position, code: e.code(), message: e.to_string() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.position {
            Some((l, c)) => write!(f, "line {l}, column {c}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ParseError {}

/// A parsed grape file: the bunch plus its metadata lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrapeDocument {
    pub version: u32,
    pub bunch: GrapeBunch,
    pub meta: Vec<String>,
}

struct Line<'a> {
    number: usize,
    raw: &'a str,
    tokens: Vec<(usize, &'a str)>,
}

fn lines(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in raw.char_indices().chain(std::iter::once((raw.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    tokens.push((s, &raw[s..pos]));
                    start = None;
                }
                _ => {}
            }
        }
        let cut = tokens.iter().position(|(_, t)| t.starts_with('#')).unwrap_or(tokens.len());
        tokens.truncate(cut);
        if !tokens.is_empty() {
            let tokens = tokens.into_iter().map(|(s, t)| (raw[..s].chars().count() + 1, t)).collect();
            out.push(Line { number: i + 1, raw, tokens });
        }
    }
    out
}

fn arity(line: &Line<'_>, n: usize) -> Result<(), ParseError> {
    if line.tokens.len() != n + 1 {
        let (col, word) = line.tokens[0];
        return Err(ParseError::at(line.number, col, "arity", format!("`{word}` takes {n} argument(s)")));
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dialect {
    Grape,
    Tree,
    Graph,
}

#[derive(Default)]
struct Raw {
    version: u32,
    meta: Vec<String>,
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
    edge_pos: Vec<(usize, usize)>,
    loops: BTreeMap<String, u32>,
}

fn read(text: &str, dialect: Dialect) -> Result<Raw, ParseError> {
    let mut raw = Raw { version: FORMAT_VERSION, ..Raw::default() };
    let mut loops_pos: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for (k, line) in lines(text).into_iter().enumerate() {
        let (col, word) = line.tokens[0];
        let edge_word = if dialect == Dialect::Graph { "edge" } else { "stem" };
        match word {
            "format" => {
                arity(&line, 1)?;
                if k != 0 {
                    return Err(ParseError::at(line.number, col, "misplaced-format", "`format` must be the first directive"));
                }
                let (vc, v) = line.tokens[1];
                raw.version = v
                    .parse()
                    .map_err(|_| ParseError::at(line.number, vc, "bad-number", format!("`{v}` is not a version number")))?;
                if raw.version != FORMAT_VERSION {
                    return Err(ParseError::at(line.number, vc, "unsupported-version", format!("format {v} is not supported")));
                }
            }
            "meta" => {
                let rest = line.raw[line.raw.find("meta").unwrap() + 4..].trim_start();
                raw.meta.push(rest.to_string());
            }
            w if w == edge_word => {
                arity(&line, 2)?;
                raw.edges.push((line.tokens[1].1.to_string(), line.tokens[2].1.to_string()));
                raw.edge_pos.push((line.number, col));
            }
            "vertex" if dialect != Dialect::Grape => {
                arity(&line, 1)?;
                raw.vertices.push(line.tokens[1].1.to_string());
            }
            "loops" if dialect == Dialect::Grape => {
                arity(&line, 2)?;
                let name = line.tokens[1].1.to_string();
                let (nc, n) = line.tokens[2];
                let count: u32 =
                    n.parse().map_err(|_| ParseError::at(line.number, nc, "bad-number", format!("`{n}` is not a grape count")))?;
                if raw.loops.insert(name.clone(), count).is_some() {
                    return Err(ParseError::at(line.number, col, "duplicate-loops", format!("loops for `{name}` given twice")));
                }
                loops_pos.insert(name, (line.number, col));
            }
            "loops" if dialect == Dialect::Tree => {
                return Err(ParseError::at(line.number, col, "loops-forbidden", "tree files cannot carry loops"));
            }
            other => {
                return Err(ParseError::at(line.number, col, "unknown-directive", format!("unknown directive `{other}`")));
            }
        }
    }
    Ok(raw)
}

/// Position of the edge named by a model error, if it is one of ours.
fn edge_position(raw: &Raw, e: &Error) -> Option<(usize, usize)> {
    let (a, b) = match e {
        Error::DuplicateEdge(a, b) | Error::Cycle(a, b) => (a.as_str(), b.as_str()),
        Error::SelfLoop(a) => (a.as_str(), a.as_str()),
        _ => return None,
    };
    let hits: Vec<usize> = raw.edges.iter().enumerate().filter(|(_, (x, y))| x == a && y == b).map(|(i, _)| i).collect();
    hits.last().map(|&i| raw.edge_pos[i])
}

fn stem_of(raw: &Raw) -> Result<Stem, ParseError> {
    let vertices = raw.vertices.iter().chain(raw.loops.keys()).cloned();
    Stem::new(vertices, raw.edges.iter().cloned()).map_err(|e| {
        let pos = edge_position(raw, &e);
        ParseError::model(e, pos)
    })
}

pub fn parse_grape_document(text: &str) -> Result<GrapeDocument, ParseError> {
    let raw = read(text, Dialect::Grape)?;
    let stem = stem_of(&raw)?;
    let bunch = GrapeBunch::new(stem, &raw.loops).map_err(|e| ParseError::model(e, None))?;
    Ok(GrapeDocument { version: raw.version, bunch, meta: raw.meta })
}

pub fn parse_grape(text: &str) -> Result<GrapeBunch, ParseError> {
    parse_grape_document(text).map(|d| d.bunch)
}

pub fn parse_tree(text: &str) -> Result<Stem, ParseError> {
    stem_of(&read(text, Dialect::Tree)?)
}

pub fn parse_graph(text: &str) -> Result<SimpleGraph, ParseError> {
    let raw = read(text, Dialect::Graph)?;
    SimpleGraph::new(raw.vertices.iter().cloned(), raw.edges.iter().cloned()).map_err(|e| {
        let pos = edge_position(&raw, &e);
        ParseError::model(e, pos)
    })
}

/// A file holding either a bunch or a plain graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyInput {
    Grape(GrapeBunch),
    Graph(SimpleGraph),
}

/// Graph files are recognized by an `edge` or `vertex` directive.
pub fn parse_any(text: &str) -> Result<AnyInput, ParseError> {
    let graphish = lines(text).iter().any(|l| matches!(l.tokens[0].1, "edge" | "vertex"));
    if graphish {
        parse_graph(text).map(AnyInput::Graph)
    } else {
        parse_grape(text).map(AnyInput::Grape)
    }
}

pub fn serialize_grape(g: &GrapeBunch) -> String {
    serialize_document(&GrapeDocument { version: FORMAT_VERSION, bunch: g.clone(), meta: Vec::new() })
}

/// Sorted and canonical: edges by endpoint ids, then nonzero loops by id. A
/// grapeless single vertex cannot occur, so every vertex is mentioned.
pub fn serialize_document(doc: &GrapeDocument) -> String {
    let g = &doc.bunch;
    let stem = g.stem();
    let mut out = format!("format {}\n", doc.version);
    for m in &doc.meta {
        let _ = writeln!(out, "meta {m}");
    }
    for (a, b) in stem.edges() {
        let _ = writeln!(out, "stem {} {}", stem.name(a), stem.name(b));
    }
    for v in 0..stem.len() {
        let l = g.loops_at(v);
        if l > 0 || stem.len() == 1 {
            let _ = writeln!(out, "loops {} {l}", stem.name(v));
        }
    }
    out
}

pub fn serialize_tree(t: &Stem) -> String {
    let mut out = format!("format {FORMAT_VERSION}\n");
    if t.len() == 1 {
        let _ = writeln!(out, "vertex {}", t.name(0));
    }
    for (a, b) in t.edges() {
        let _ = writeln!(out, "stem {} {}", t.name(a), t.name(b));
    }
    out
}

pub fn serialize_graph(gr: &SimpleGraph) -> String {
    let mut out = format!("format {FORMAT_VERSION}\n");
    for v in 0..gr.vertex_count() {
        if gr.degree(v) == 0 {
            let _ = writeln!(out, "vertex {}", gr.name(v));
        }
    }
    for &(a, b) in gr.edges() {
        let _ = writeln!(out, "edge {} {}", gr.name(a), gr.name(b));
    }
    out
}

/// JSON form of a grape file; same content as the text form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrapeJson {
    pub format: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub meta: Vec<String>,
    pub stem: Vec<(String, String)>,
    #[serde(default)]
    pub loops: BTreeMap<String, u32>,
}

pub fn grape_to_json(doc: &GrapeDocument) -> GrapeJson {
    let g = &doc.bunch;
    let stem = g.stem();
    let loops = (0..stem.len())
        .filter(|&v| g.loops_at(v) > 0 || stem.len() == 1)
        .map(|v| (stem.name(v).to_string(), g.loops_at(v)))
        .collect();
    let edges = stem.edges().into_iter().map(|(a, b)| (stem.name(a).to_string(), stem.name(b).to_string())).collect();
    GrapeJson { format: doc.version, meta: doc.meta.clone(), stem: edges, loops }
}

pub fn grape_from_json(j: &GrapeJson) -> Result<GrapeDocument, ParseError> {
    if j.format != FORMAT_VERSION {
        return Err(ParseError { position: None, code: "unsupported-version", message: format!("format {} is not supported", j.format) });
    }
    let stem = Stem::new(j.loops.keys().cloned(), j.stem.iter().cloned()).map_err(|e| ParseError::model(e, None))?;
    let bunch = GrapeBunch::new(stem, &j.loops).map_err(|e| ParseError::model(e, None))?;
    Ok(GrapeDocument { version: j.format, bunch, meta: j.meta.clone() })
}

pub fn parse_grape_json(text: &str) -> Result<GrapeDocument, ParseError> {
    let j: GrapeJson = serde_json::from_str(text).map_err(|e| ParseError {
        position: Some((e.line(), e.column())),
        code: "json",
        message: e.to_string(),
    })?;
    grape_from_json(&j)
}

/// Cell lists of a complex, with configuration labels when present.
pub fn complex_json(cc: &CubeComplex, base: Option<&SimpleGraph>) -> serde_json::Value {
    let mut dims = Vec::new();
    for d in 0..=cc.dimension() {
        let cells: Vec<serde_json::Value> = cc
            .cells(d)
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let mut obj = serde_json::json!({ "vertices": c.vertices, "edges": c.edges });
                if let (Some(base), Some(m)) = (base, cc.members(d, k)) {
                    obj["label"] = serde_json::Value::String(config_label(base, m));
                }
                obj
            })
            .collect();
        dims.push(serde_json::Value::Array(cells));
    }
    serde_json::json!({ "format": FORMAT_VERSION, "labels": cc.labels(), "f_vector": cc.f_vector(), "cells": dims })
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn graph_dot(gr: &SimpleGraph) -> String {
    let mut out = String::from("graph G {\n");
    for v in gr.names() {
        let _ = writeln!(out, "  {};", quote(v));
    }
    for &(a, b) in gr.edges() {
        let _ = writeln!(out, "  {} -- {};", quote(gr.name(a)), quote(gr.name(b)));
    }
    out.push_str("}\n");
    out
}

/// The 1-skeleton of a cube complex.
pub fn complex_dot(cc: &CubeComplex) -> String {
    let mut out = String::from("graph G {\n");
    for (v, l) in cc.labels().iter().enumerate() {
        let _ = writeln!(out, "  v{v} [label={}];", quote(l));
    }
    for e in 0..cc.edge_count() {
        let (a, b) = cc.edge_ends(e);
        let _ = writeln!(out, "  v{a} -- v{b};");
    }
    out.push_str("}\n");
    out
}

fn rank_label(r: (u64, u64)) -> String {
    format!("{}×{}", r.0, r.1)
}

/// Vertices are twigs, edges the 1-simplices; each higher simplex is drawn as
/// a clique whose edges share a `group` attribute.
pub fn ri_dot(ri: &ReducedIntersectionComplex) -> String {
    let mut out = String::from("graph RI {\n");
    for s in &ri.simplices {
        let id = |t: usize| format!("t{t}");
        match s.vertices.as_slice() {
            [t] => {
                let _ = writeln!(out, "  {} [twig={}, label={}];", id(*t), quote(&ri.twigs[*t].to_string()), quote(&rank_label(s.ranks)));
            }
            [a, b] => {
                let _ = writeln!(out, "  {} -- {} [label={}];", id(*a), id(*b), quote(&rank_label(s.ranks)));
            }
            vs => {
                let group = vs.iter().map(|t| id(*t)).collect::<Vec<_>>().join("_");
                for (i, &a) in vs.iter().enumerate() {
                    for &b in &vs[i + 1..] {
                        let _ = writeln!(
                            out,
                            "  {} -- {} [group={}, label={}, style=dashed];",
                            id(a),
                            id(b),
                            quote(&group),
                            quote(&rank_label(s.ranks))
                        );
                    }
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let g = parse_grape("stem a b\nloops a 1\nloops b 1").unwrap();
        assert_eq!(g.loops_vec(), &[1, 1]);
        let e = parse_grape("stem a b\nstem b c\nstem c a").unwrap_err();
        assert_eq!(e.code, "cycle");
        assert_eq!(e.position, Some((3, 1)));
        assert_eq!(parse_grape("stem a b").unwrap_err().code, "path-graph");
    }

    #[test]
    fn syntax_errors() {
        let e = parse_grape("stem a b\nloop a 1").unwrap_err();
        assert_eq!((e.code, e.position), ("unknown-directive", Some((2, 1))));
        let e = parse_grape("stem a b\nloops a x").unwrap_err();
        assert_eq!((e.code, e.position), ("bad-number", Some((2, 9))));
        let e = parse_grape("  stem a").unwrap_err();
        assert_eq!((e.code, e.position), ("arity", Some((1, 3))));
        assert_eq!(parse_grape("stem a b\nformat 1").unwrap_err().code, "misplaced-format");
        assert_eq!(parse_tree("stem a b\nloops a 1").unwrap_err().code, "loops-forbidden");
        assert_eq!(parse_grape("stem a b\nstem b a\nloops a 1").unwrap_err().code, "duplicate-edge");
    }

    #[test]
    fn comments_and_ids() {
        let g = parse_grape("# header\nstem a#1 b # trailing\nloops a#1 1 #x\nloops b 1\n").unwrap();
        assert_eq!(g.loops("a#1").unwrap(), 1);
    }

    #[test]
    fn serialization() {
        let text = "format 1\nmeta  source: hand made\nstem a b\nloops a 1\nloops b 0\nloops b2 0\nstem b b2\n";
        let doc = parse_grape_document(text).unwrap();
        assert_eq!(doc.meta, vec!["source: hand made".to_string()]);
        let out = serialize_document(&doc);
        assert_eq!(out, "format 1\nmeta source: hand made\nstem a b\nstem b b2\nloops a 1\n");
        assert_eq!(parse_grape_document(&out).unwrap(), doc);
        let single = parse_grape("loops o 2").unwrap();
        assert_eq!(parse_grape(&serialize_grape(&single)).unwrap(), single);
    }

    #[test]
    fn json_mirror() {
        let doc = parse_grape_document("meta m\nstem a b\nloops a 1\nloops b 1").unwrap();
        let j = serde_json::to_string(&grape_to_json(&doc)).unwrap();
        assert_eq!(parse_grape_json(&j).unwrap(), doc);
    }

    #[test]
    fn graphs_and_any() {
        let gr = parse_graph("edge a b\nedge b c\nedge a c\nvertex z").unwrap();
        assert_eq!((gr.vertex_count(), gr.edge_count()), (4, 3));
        assert_eq!(parse_graph(&serialize_graph(&gr)).unwrap(), gr);
        assert!(matches!(parse_any("edge a b").unwrap(), AnyInput::Graph(_)));
        assert!(matches!(parse_any("stem c x\nstem c y\nstem c z").unwrap(), AnyInput::Grape(_)));
        let t = parse_tree("vertex a").unwrap();
        assert_eq!(parse_tree(&serialize_tree(&t)).unwrap(), t);
    }

    #[test]
    fn dot_outputs() {
        let star = SimpleGraph::from_edges([("c", "x"), ("c", "y"), ("c", "z")]).unwrap();
        let ud = crate::cube::build_udn(&star, 2).unwrap();
        let dot = complex_dot(&ud);
        assert_eq!(dot.matches(" -- ").count(), 6);
        assert_eq!(complex_dot(&CubeComplex::empty()), "graph G {\n}\n");
        let g = parse_grape("stem c x\nstem c y\nstem c z\nloops c 1\nloops x 1\nloops y 1\nloops z 1").unwrap();
        let ri = crate::intersection::build_ri(&g).unwrap();
        let dot = ri_dot(&ri);
        assert_eq!(dot.matches("label=\"1×3\"").count(), 3);
        assert_eq!(dot.matches(" -- ").count(), 3);
    }
}
