//! Plain-text edge lists.
//!
//! ```text
//! # comment
//! n 4 [directed]
//! 1 2
//! 2 3 5/2
//! 3 4 0.75
//! ```
//!
//! The header must come first. Missing weights default to 1. Rational
//! weights are written back as `p/q`, floats with a decimal point, so a
//! write/parse cycle reproduces the graph exactly.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, GraphError, Weight};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error("missing header line `n <count> [directed]`")]
    MissingHeader,
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

/// Parses an edge list. `force_directed` overrides an undirected header.
pub fn parse(text: &str, force_directed: bool) -> Result<Graph, ParseError> {
    let mut header: Option<(usize, bool)> = None;
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let Some((n, directed)) = header else {
            if fields[0] != "n" {
                return Err(syntax(line, "expected header `n <count> [directed]`"));
            }
            let n: usize = fields
                .get(1)
                .ok_or_else(|| syntax(line, "header is missing the node count"))?
                .parse()
                .map_err(|_| syntax(line, "node count is not a nonnegative integer"))?;
            let directed = match fields.get(2..) {
                Some([]) | None => false,
                Some(["directed"]) => true,
                Some(["undirected"]) => false,
                Some(_) => return Err(syntax(line, "unexpected tokens after node count")),
            };
            if n == 0 {
                return Err(ParseError::Graph {
                    line,
                    source: GraphError::Empty,
                });
            }
            header = Some((n, directed || force_directed));
            continue;
        };
        if !(2..=3).contains(&fields.len()) {
            return Err(syntax(line, "expected `u v [w]`"));
        }
        let id = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| syntax(line, format!("invalid node id {s:?}")))
        };
        let (u, v) = (id(fields[0])?, id(fields[1])?);
        let w = match fields.get(2) {
            Some(s) => s.parse::<Weight>().map_err(|e| syntax(line, e.to_string()))?,
            None => Weight::one(),
        };
        let graph_err = |source| ParseError::Graph { line, source };
        if u == 0 || v == 0 || u > n || v > n {
            return Err(graph_err(GraphError::NodeOutOfRange { u, v, n }));
        }
        if u == v {
            return Err(graph_err(GraphError::SelfLoop(u)));
        }
        if !w.is_positive() {
            return Err(graph_err(GraphError::NonpositiveWeight {
                u,
                v,
                w: w.to_string(),
            }));
        }
        let key = if directed { (u, v) } else { (u.min(v), u.max(v)) };
        if !seen.insert(key) {
            return Err(graph_err(GraphError::DuplicateEdge { u, v }));
        }
        edges.push((u, v, w));
    }
    let (n, directed) = header.ok_or(ParseError::MissingHeader)?;
    Graph::build(n, edges, directed).map_err(|source| ParseError::Graph { line: 0, source })
}

/// Serializes a graph; every edge carries an explicit weight.
pub fn write(g: &Graph) -> String {
    let mut out = String::new();
    if g.is_directed() {
        writeln!(out, "n {} directed", g.n()).unwrap();
    } else {
        writeln!(out, "n {}", g.n()).unwrap();
    }
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.u + 1, e.v + 1, e.w).unwrap();
    }
    out
}
