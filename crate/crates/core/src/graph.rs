//! Undirected, node-labelled graphs and corpora of them.
//!
//! A [`Graph`] is immutable after construction. Node identities are the local
//! indices `0..n`; they are never compared across graphs.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge ({u}, {v}) has an endpoint outside [0, {n})")]
    IndexOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop on node {node}")]
    SelfLoop { node: usize },
    #[error("expected {expected} node labels, got {got}")]
    LabelLengthMismatch { expected: usize, got: usize },
    #[error("mapping is not a permutation of 0..{n}")]
    NotAPermutation { n: usize },
    #[error("duplicate graph id {0:?} in corpus")]
    DuplicateId(String),
}

/// Simple undirected graph with discrete node labels and an optional class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    id: String,
    adjacency: Vec<Vec<usize>>,
    node_labels: Vec<u32>,
    graph_label: Option<u32>,
}

/// Builds a validated graph from an edge list.
///
/// Parallel edges collapse to one. An empty `labels` slice means every node
/// gets label 0.
pub fn build_graph(
    n: usize,
    edges: &[(usize, usize)],
    labels: &[u32],
    graph_label: Option<u32>,
) -> Result<Graph, GraphError> {
    let node_labels = if labels.is_empty() {
        vec![0; n]
    } else if labels.len() != n {
        return Err(GraphError::LabelLengthMismatch {
            expected: n,
            got: labels.len(),
        });
    } else {
        labels.to_vec()
    };

    let mut adjacency = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u >= n || v >= n {
            return Err(GraphError::IndexOutOfRange { u, v, n });
        }
        if u == v {
            return Err(GraphError::SelfLoop { node: u });
        }
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }

    Ok(Graph {
        id: String::new(),
        adjacency,
        node_labels,
        graph_label,
    })
}

impl Graph {
    /// Assembles a graph without any checking. Use [`validate`] on the result
    /// when the parts come from an untrusted source.
    pub fn from_raw_parts(
        id: impl Into<String>,
        adjacency: Vec<Vec<usize>>,
        node_labels: Vec<u32>,
        graph_label: Option<u32>,
    ) -> Self {
        Graph {
            id: id.into(),
            adjacency,
            node_labels,
            graph_label,
        }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn with_graph_label(mut self, label: Option<u32>) -> Self {
        self.graph_label = label;
        self
    }

    /// Replaces the node labels; the length must match the node count.
    pub fn with_node_labels(mut self, labels: Vec<u32>) -> Result<Self, GraphError> {
        if labels.len() != self.n() {
            return Err(GraphError::LabelLengthMismatch {
                expected: self.n(),
                got: labels.len(),
            });
        }
        self.node_labels = labels;
        Ok(self)
    }

    /// Relabels every node by its degree.
    pub fn with_degree_labels(mut self) -> Self {
        self.node_labels = self.adjacency.iter().map(|a| a.len() as u32).collect();
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn node_labels(&self) -> &[u32] {
        &self.node_labels
    }

    pub fn graph_label(&self) -> Option<u32> {
        self.graph_label
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` pairs with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut degrees: Vec<usize> = self.adjacency.iter().map(Vec::len).collect();
        degrees.sort_unstable();
        degrees
    }
}

/// Relabels `g` so that node `v` becomes `pi[v]`.
pub fn permute_graph(g: &Graph, pi: &[usize]) -> Result<Graph, GraphError> {
    let n = g.n();
    if pi.len() != n {
        return Err(GraphError::NotAPermutation { n });
    }
    let mut seen = vec![false; n];
    for &p in pi {
        if p >= n || seen[p] {
            return Err(GraphError::NotAPermutation { n });
        }
        seen[p] = true;
    }

    let mut adjacency = vec![Vec::new(); n];
    let mut node_labels = vec![0; n];
    for v in 0..n {
        node_labels[pi[v]] = g.node_labels[v];
        adjacency[pi[v]] = g.adjacency[v].iter().map(|&u| pi[u]).collect();
        adjacency[pi[v]].sort_unstable();
    }
    Ok(Graph {
        id: g.id.clone(),
        adjacency,
        node_labels,
        graph_label: g.graph_label,
    })
}

/// The inverse of a permutation given as an image table.
pub fn invert_permutation(pi: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; pi.len()];
    for (v, &p) in pi.iter().enumerate() {
        inv[p] = v;
    }
    inv
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    OutOfRange { node: usize, neighbor: usize },
    SelfLoop { node: usize },
    Duplicate { node: usize, neighbor: usize },
    Unsorted { node: usize },
    Symmetry { node: usize, neighbor: usize },
    LabelLength { expected: usize, got: usize },
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::OutOfRange { .. } => "range",
            Violation::SelfLoop { .. } => "self-loop",
            Violation::Duplicate { .. } => "duplicate",
            Violation::Unsorted { .. } => "unsorted",
            Violation::Symmetry { .. } => "symmetry",
            Violation::LabelLength { .. } => "labels",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfRange { node, neighbor } => {
                write!(
                    f,
                    "range: node {node} lists out-of-range neighbor {neighbor}"
                )
            }
            Violation::SelfLoop { node } => write!(f, "self-loop: node {node}"),
            Violation::Duplicate { node, neighbor } => {
                write!(f, "duplicate: node {node} lists neighbor {neighbor} twice")
            }
            Violation::Unsorted { node } => write!(f, "unsorted: neighbors of node {node}"),
            Violation::Symmetry { node, neighbor } => {
                write!(f, "symmetry: edge {node}->{neighbor} has no reverse")
            }
            Violation::LabelLength { expected, got } => {
                write!(f, "labels: expected {expected}, got {got}")
            }
        }
    }
}

/// Lists every broken invariant of `g`; empty means the graph is well formed.
pub fn validate(g: &Graph) -> Vec<Violation> {
    let n = g.n();
    let mut out = Vec::new();
    if g.node_labels.len() != n {
        out.push(Violation::LabelLength {
            expected: n,
            got: g.node_labels.len(),
        });
    }
    for (v, list) in g.adjacency.iter().enumerate() {
        if list.windows(2).any(|w| w[0] > w[1]) {
            out.push(Violation::Unsorted { node: v });
        }
        let mut seen = HashSet::with_capacity(list.len());
        for &u in list {
            if u >= n {
                out.push(Violation::OutOfRange {
                    node: v,
                    neighbor: u,
                });
                continue;
            }
            if u == v {
                out.push(Violation::SelfLoop { node: v });
            }
            if !seen.insert(u) {
                out.push(Violation::Duplicate {
                    node: v,
                    neighbor: u,
                });
                continue;
            }
            if u != v && !g.adjacency[u].contains(&v) {
                out.push(Violation::Symmetry {
                    node: v,
                    neighbor: u,
                });
            }
        }
    }
    out
}

/// An ordered collection of graphs sharing one label space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    graphs: Vec<Graph>,
    label_alphabet_size: usize,
    class_count: usize,
}

impl Corpus {
    /// Graph ids must be unique. Unnamed graphs are given their position as id.
    pub fn new(graphs: Vec<Graph>) -> Result<Self, GraphError> {
        let mut graphs = graphs;
        let mut ids = HashSet::with_capacity(graphs.len());
        for (i, g) in graphs.iter_mut().enumerate() {
            if g.id.is_empty() {
                g.id = i.to_string();
            }
            if !ids.insert(g.id.clone()) {
                return Err(GraphError::DuplicateId(g.id.clone()));
            }
        }
        let label_alphabet_size = graphs
            .iter()
            .flat_map(|g| g.node_labels.iter())
            .map(|&l| l as usize + 1)
            .max()
            .unwrap_or(0);
        let class_count = graphs
            .iter()
            .filter_map(|g| g.graph_label)
            .map(|c| c as usize + 1)
            .max()
            .unwrap_or(0);
        Ok(Corpus {
            graphs,
            label_alphabet_size,
            class_count,
        })
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn label_alphabet_size(&self) -> usize {
        self.label_alphabet_size
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn into_graphs(self) -> Vec<Graph> {
        self.graphs
    }
}
