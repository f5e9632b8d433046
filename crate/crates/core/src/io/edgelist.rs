//! Single-graph text format:
//!
//! ```text
//! n m
//! u v        (m lines, 0-based)
//! labels l0 l1 ... l(n-1)   (optional)
//! ```

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::graph::{build_graph, Graph, GraphError};

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: malformed edge: {reason}")]
    MalformedEdge { line: usize, reason: String },
    #[error("labels line has {got} entries for {expected} nodes")]
    LabelCountMismatch { expected: usize, got: usize },
}

pub fn parse_edgelist(path: impl AsRef<Path>) -> Result<Graph, EdgeListError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| EdgeListError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_edgelist_str(&text, &id)
}

pub fn parse_edgelist_str(text: &str, id: &str) -> Result<Graph, EdgeListError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(EdgeListError::MalformedHeader {
        line: 1,
        reason: "empty input".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let bad_header = |reason: String| EdgeListError::MalformedHeader {
        line: hline,
        reason,
    };
    let (n, m) = match fields.as_slice() {
        [n, m] => (
            n.parse::<usize>()
                .map_err(|_| bad_header(format!("node count {n:?}")))?,
            m.parse::<usize>()
                .map_err(|_| bad_header(format!("edge count {m:?}")))?,
        ),
        _ => return Err(bad_header(format!("expected `n m`, got {header:?}"))),
    };

    let mut edges = Vec::with_capacity(m);
    let mut labels = Vec::new();
    let mut last_line = hline;
    for (line, text) in lines {
        last_line = line;
        if let Some(rest) = text.strip_prefix("labels") {
            let parsed: Result<Vec<u32>, _> = rest.split_whitespace().map(str::parse).collect();
            labels = parsed.map_err(|_| EdgeListError::MalformedEdge {
                line,
                reason: format!("bad label in {text:?}"),
            })?;
            if labels.len() != n {
                return Err(EdgeListError::LabelCountMismatch {
                    expected: n,
                    got: labels.len(),
                });
            }
            continue;
        }
        let bad = |reason: String| EdgeListError::MalformedEdge { line, reason };
        if !labels.is_empty() {
            return Err(bad("edge after the labels line".into()));
        }
        let parts: Vec<&str> = text.split_whitespace().collect();
        let (u, v) = match parts.as_slice() {
            [u, v] => (
                u.parse::<usize>()
                    .map_err(|_| bad(format!("bad endpoint {u:?}")))?,
                v.parse::<usize>()
                    .map_err(|_| bad(format!("bad endpoint {v:?}")))?,
            ),
            _ => return Err(bad(format!("expected `u v`, got {text:?}"))),
        };
        if u >= n || v >= n {
            return Err(bad(format!("endpoint outside [0, {n})")));
        }
        if u == v {
            return Err(bad(format!("self-loop on node {u}")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(EdgeListError::MalformedEdge {
            line: last_line,
            reason: format!("header announces {m} edges, found {}", edges.len()),
        });
    }

    let g = build_graph(n, &edges, &labels, None).map_err(|e| match e {
        GraphError::LabelLengthMismatch { expected, got } => {
            EdgeListError::LabelCountMismatch { expected, got }
        }
        other => EdgeListError::MalformedEdge {
            line: last_line,
            reason: other.to_string(),
        },
    })?;
    Ok(g.with_id(id))
}

/// Writes `g` in the edge-list format; the labels line is always present.
pub fn write_edgelist(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out.push_str("labels");
    for l in g.node_labels() {
        let _ = write!(out, " {l}");
    }
    out.push('\n');
    out
}
