//! Reader for the TU benchmark layout.
//!
//! A dataset `DS` lives in one directory as comma/line separated text files
//! with 1-based ids:
//!
//! - `DS_A.txt`: one `row, col` edge per line over global node ids
//! - `DS_graph_indicator.txt`: graph id of node `i` on line `i`
//! - `DS_graph_labels.txt`: class of graph `i` on line `i`
//! - `DS_node_labels.txt` (optional): label of node `i` on line `i`

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::graph::{build_graph, Corpus, GraphError};

#[derive(Debug, Error)]
pub enum TuError {
    #[error("missing file {0}")]
    MissingFile(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{file}:{line}: {reason}")]
    MalformedLine {
        file: String,
        line: usize,
        reason: String,
    },
    #[error("{file}:{line}: edge joins nodes of graphs {a} and {b}")]
    CrossGraphEdge {
        file: String,
        line: usize,
        a: usize,
        b: usize,
    },
    #[error("non-contiguous ids: {0}")]
    NonContiguousIds(String),
    #[error("graph {graph}: {source}")]
    InvalidGraph { graph: usize, source: GraphError },
}

/// A parsed dataset. Labels are densified; the original values are kept,
/// indexed by dense id.
#[derive(Debug, Clone)]
pub struct TuDataset {
    pub corpus: Corpus,
    pub node_label_values: Vec<i64>,
    pub graph_label_values: Vec<i64>,
}

struct LineFile {
    name: String,
    lines: Vec<String>,
}

impl LineFile {
    fn read(path: &Path) -> Result<Self, TuError> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(TuError::MissingFile(path.to_path_buf()))
            }
            Err(source) => {
                return Err(TuError::Io {
                    path: path.to_path_buf(),
                    source,
                })
            }
        };
        let mut lines: Vec<String> = text.lines().map(|l| l.trim().to_string()).collect();
        while lines.last().is_some_and(String::is_empty) {
            lines.pop();
        }
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(LineFile { name, lines })
    }

    fn malformed(&self, line: usize, reason: impl Into<String>) -> TuError {
        TuError::MalformedLine {
            file: self.name.clone(),
            line: line + 1,
            reason: reason.into(),
        }
    }

    fn integers(&self) -> Result<Vec<i64>, TuError> {
        self.lines
            .iter()
            .enumerate()
            .map(|(i, l)| {
                l.parse::<i64>()
                    .map_err(|_| self.malformed(i, format!("expected an integer, got {l:?}")))
            })
            .collect()
    }
}

fn densify(values: &[i64]) -> (Vec<u32>, Vec<i64>) {
    let mut distinct = values.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let ids = values
        .iter()
        .map(|v| distinct.binary_search(v).unwrap() as u32)
        .collect();
    (ids, distinct)
}

pub fn parse_tu_dataset(dir: impl AsRef<Path>, name: &str) -> Result<TuDataset, TuError> {
    let dir = dir.as_ref();
    let file = |suffix: &str| dir.join(format!("{name}_{suffix}.txt"));

    let indicator_file = LineFile::read(&file("graph_indicator"))?;
    let indicator = indicator_file.integers()?;
    let graph_labels_raw = LineFile::read(&file("graph_labels"))?.integers()?;
    let edge_file = LineFile::read(&file("A"))?;
    let node_label_path = file("node_labels");
    let node_labels_raw = if node_label_path.exists() {
        let f = LineFile::read(&node_label_path)?;
        let v = f.integers()?;
        if v.len() != indicator.len() {
            return Err(TuError::NonContiguousIds(format!(
                "{} node labels for {} nodes",
                v.len(),
                indicator.len()
            )));
        }
        v
    } else {
        vec![0; indicator.len()]
    };

    let graph_count = graph_labels_raw.len();
    let mut sizes = vec![0usize; graph_count];
    let mut local = Vec::with_capacity(indicator.len());
    for (i, &gid) in indicator.iter().enumerate() {
        if gid < 1 || gid as usize > graph_count {
            return Err(TuError::NonContiguousIds(format!(
                "node {} belongs to graph {gid}, expected 1..={graph_count}",
                i + 1
            )));
        }
        let g = gid as usize - 1;
        local.push(sizes[g]);
        sizes[g] += 1;
    }
    if let Some(g) = sizes.iter().position(|&s| s == 0) {
        return Err(TuError::NonContiguousIds(format!(
            "graph {} has no nodes",
            g + 1
        )));
    }

    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); graph_count];
    for (i, line) in edge_file.lines.iter().enumerate() {
        let mut parts = line.split(',').map(str::trim);
        let (a, b) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(edge_file.malformed(i, format!("expected `u, v`, got {line:?}"))),
        };
        let parse = |s: &str| -> Result<usize, TuError> {
            let v: usize = s
                .parse()
                .map_err(|_| edge_file.malformed(i, format!("bad node id {s:?}")))?;
            if v == 0 || v > indicator.len() {
                return Err(TuError::NonContiguousIds(format!(
                    "{}:{}: node id {v} outside 1..={}",
                    edge_file.name,
                    i + 1,
                    indicator.len()
                )));
            }
            Ok(v - 1)
        };
        let (u, v) = (parse(a)?, parse(b)?);
        let (gu, gv) = (indicator[u] as usize, indicator[v] as usize);
        if gu != gv {
            return Err(TuError::CrossGraphEdge {
                file: edge_file.name.clone(),
                line: i + 1,
                a: gu,
                b: gv,
            });
        }
        edges[gu - 1].push((local[u], local[v]));
    }

    let (node_labels, node_label_values) = densify(&node_labels_raw);
    let (graph_labels, graph_label_values) = densify(&graph_labels_raw);

    let mut per_graph_labels: Vec<Vec<u32>> =
        sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    for (i, &gid) in indicator.iter().enumerate() {
        per_graph_labels[gid as usize - 1].push(node_labels[i]);
    }

    let graphs = (0..graph_count)
        .map(|g| {
            build_graph(
                sizes[g],
                &edges[g],
                &per_graph_labels[g],
                Some(graph_labels[g]),
            )
            .map(|gr| gr.with_id(format!("{name}_{}", g + 1)))
            .map_err(|source| TuError::InvalidGraph {
                graph: g + 1,
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let corpus =
        Corpus::new(graphs).map_err(|source| TuError::InvalidGraph { graph: 0, source })?;
    Ok(TuDataset {
        corpus,
        node_label_values,
        graph_label_values,
    })
}
