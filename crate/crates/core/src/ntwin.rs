//! Forward pass of the neural twin encoder.
//!
//! Layer `k` concatenates, for every node, a one-hot of its refined label at
//! iteration `k` with a sum-pooled GIN encoding of its `k`-hop rooted
//! subgraph. Node vectors are sum-pooled per layer and the layers are
//! concatenated.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::Graph;
use crate::mlp::DenseMatrix;
use crate::wl::{LabelDictionary, UNSEEN};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NtwinError {
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("shape mismatch: expected width {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("dictionary refined to depth {available}, {needed} required")]
    DepthMismatch { needed: usize, available: usize },
    #[error("label {label} is not in the layer-{layer} alphabet of size {size}")]
    AlphabetMismatch {
        layer: usize,
        label: u32,
        size: usize,
    },
    #[error("empty subgraph")]
    EmptySubgraph,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Subgraph induced on the closed `k`-ball around `center`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedSubgraph {
    pub center: usize,
    /// Parent indices, ascending; position is the local index.
    pub nodes: Vec<usize>,
    /// Induced adjacency over local indices.
    pub adjacency: Vec<Vec<usize>>,
}

impl RootedSubgraph {
    pub fn local_of(&self, parent: usize) -> Option<usize> {
        self.nodes.binary_search(&parent).ok()
    }

    pub fn parent_of(&self, local: usize) -> usize {
        self.nodes[local]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }
}

pub fn extract_rooted_subgraph(
    g: &Graph,
    center: usize,
    hops: usize,
) -> Result<RootedSubgraph, NtwinError> {
    if center >= g.n() {
        return Err(NtwinError::NodeOutOfRange {
            node: center,
            n: g.n(),
        });
    }
    let mut dist = vec![usize::MAX; g.n()];
    dist[center] = 0;
    let mut queue = VecDeque::from([center]);
    let mut nodes = vec![center];
    while let Some(v) = queue.pop_front() {
        if dist[v] == hops {
            continue;
        }
        for &u in g.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                nodes.push(u);
                queue.push_back(u);
            }
        }
    }
    nodes.sort_unstable();
    let adjacency = nodes
        .iter()
        .map(|&p| {
            g.neighbors(p)
                .iter()
                .filter_map(|&q| nodes.binary_search(&q).ok())
                .collect()
        })
        .collect();
    Ok(RootedSubgraph {
        center,
        nodes,
        adjacency,
    })
}

/// One-hot label codes for a layer. The last coordinate is reserved for
/// labels the dictionary has not seen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtreeEncoding {
    pub width: usize,
    pub hot: Vec<usize>,
}

impl SubtreeEncoding {
    pub fn vector(&self, v: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.width];
        out[self.hot[v]] = 1.0;
        out
    }
}

/// Width of the one-hot code at `layer`: dictionary size plus the unseen slot.
pub fn onehot_width(dict: &LabelDictionary, layer: usize) -> usize {
    dict.size(layer) + 1
}

pub fn subtree_encode(
    labels: &[u32],
    layer: usize,
    dict: &LabelDictionary,
) -> Result<SubtreeEncoding, NtwinError> {
    if layer > dict.depth() {
        return Err(NtwinError::DepthMismatch {
            needed: layer,
            available: dict.depth(),
        });
    }
    let size = dict.size(layer);
    let hot = labels
        .iter()
        .map(|&l| match l {
            UNSEEN => Ok(size),
            l if (l as usize) < size => Ok(l as usize),
            l => Err(NtwinError::AlphabetMismatch {
                layer,
                label: l,
                size,
            }),
        })
        .collect::<Result<_, _>>()?;
    Ok(SubtreeEncoding {
        width: size + 1,
        hot,
    })
}

/// `Linear → ReLU → Linear`.
#[derive(Debug, Clone, PartialEq)]
pub struct GinMlp {
    pub w1: DenseMatrix,
    pub b1: Vec<f64>,
    pub w2: DenseMatrix,
    pub b2: Vec<f64>,
}

impl GinMlp {
    pub fn random(input: usize, hidden: usize, rng: &mut ChaCha8Rng) -> Self {
        use rand::Rng;
        let w1 = DenseMatrix::random_uniform(hidden, input, rng);
        let bound = 1.0 / (input.max(1) as f64).sqrt();
        let b1 = (0..hidden).map(|_| rng.gen_range(-bound..bound)).collect();
        let w2 = DenseMatrix::random_uniform(hidden, hidden, rng);
        let bound = 1.0 / (hidden as f64).sqrt();
        let b2 = (0..hidden).map(|_| rng.gen_range(-bound..bound)).collect();
        GinMlp { w1, b1, w2, b2 }
    }

    /// Identity on non-negative inputs.
    pub fn identity(width: usize) -> Self {
        GinMlp {
            w1: DenseMatrix::identity(width),
            b1: vec![0.0; width],
            w2: DenseMatrix::identity(width),
            b2: vec![0.0; width],
        }
    }

    pub fn input_width(&self) -> usize {
        self.w1.cols()
    }

    pub fn output_width(&self) -> usize {
        self.w2.rows()
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut h = self.w1.matvec(x);
        for (z, b) in h.iter_mut().zip(&self.b1) {
            *z = (*z + b).max(0.0);
        }
        let mut out = self.w2.matvec(&h);
        for (z, b) in out.iter_mut().zip(&self.b2) {
            *z += b;
        }
        out
    }
}

/// GIN rounds with ε = 0: `x_p ← MLP(x_p + Σ_{q ∈ N(p)} x_q)`.
pub fn gin_forward(
    sub: &RootedSubgraph,
    features: &[Vec<f64>],
    rounds: &[GinMlp],
) -> Result<Vec<Vec<f64>>, NtwinError> {
    if features.len() != sub.nodes.len() {
        return Err(NtwinError::ShapeMismatch {
            expected: sub.nodes.len(),
            got: features.len(),
        });
    }
    let mut x = features.to_vec();
    for mlp in rounds {
        let width = mlp.input_width();
        if let Some(bad) = x.iter().find(|f| f.len() != width) {
            return Err(NtwinError::ShapeMismatch {
                expected: width,
                got: bad.len(),
            });
        }
        x = (0..x.len())
            .map(|p| {
                let mut agg = x[p].clone();
                for &q in &sub.adjacency[p] {
                    for (a, b) in agg.iter_mut().zip(&x[q]) {
                        *a += b;
                    }
                }
                mlp.forward(&agg)
            })
            .collect();
    }
    Ok(x)
}

/// Coordinate-wise sum over the subgraph nodes.
pub fn subgraph_readout(node_features: &[Vec<f64>]) -> Result<Vec<f64>, NtwinError> {
    let first = node_features.first().ok_or(NtwinError::EmptySubgraph)?;
    let mut out = first.clone();
    for f in &node_features[1..] {
        if f.len() != out.len() {
            return Err(NtwinError::ShapeMismatch {
                expected: out.len(),
                got: f.len(),
            });
        }
        for (a, b) in out.iter_mut().zip(f) {
            *a += b;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NtwinConfig {
    pub layers: usize,
    pub hidden: usize,
    /// GIN rounds inside each `k`-hop subgraph; `None` runs `k` rounds.
    pub rounds_per_layer: Option<usize>,
    pub seed: u64,
}

impl NtwinConfig {
    /// GIN self weight; fixed.
    pub const EPSILON: f64 = 0.0;

    pub fn rounds(&self, layer: usize) -> usize {
        self.rounds_per_layer.unwrap_or(layer)
    }

    pub fn check(&self) -> Result<(), NtwinError> {
        if self.layers == 0 || self.hidden == 0 || self.rounds_per_layer == Some(0) {
            return Err(NtwinError::InvalidConfig(
                "layers, hidden width and rounds per layer must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

impl Default for NtwinConfig {
    fn default() -> Self {
        NtwinConfig {
            layers: 2,
            hidden: 16,
            rounds_per_layer: None,
            seed: 0,
        }
    }
}

/// GIN parameters: `layers[k - 1]` holds the rounds of layer `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct NtwinParams {
    pub layers: Vec<Vec<GinMlp>>,
}

impl NtwinParams {
    /// Seeded initialization; the first round of every layer reads the
    /// layer-0 one-hot of width `input_width`.
    pub fn init(cfg: &NtwinConfig, input_width: usize) -> Result<Self, NtwinError> {
        cfg.check()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let layers = (1..=cfg.layers)
            .map(|k| {
                (0..cfg.rounds(k))
                    .map(|r| {
                        let input = if r == 0 { input_width } else { cfg.hidden };
                        GinMlp::random(input, cfg.hidden, &mut rng)
                    })
                    .collect()
            })
            .collect();
        Ok(NtwinParams { layers })
    }

    pub fn for_dictionary(cfg: &NtwinConfig, dict: &LabelDictionary) -> Result<Self, NtwinError> {
        Self::init(cfg, onehot_width(dict, 0))
    }
}

/// Per-layer pooled vectors; [`GraphRepresentation::vector`] concatenates them.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphRepresentation {
    pub layers: Vec<Vec<f64>>,
    /// `(D1, D2)` of every layer.
    pub widths: Vec<(usize, usize)>,
}

impl GraphRepresentation {
    pub fn vector(&self) -> Vec<f64> {
        self.layers.concat()
    }
}

/// `[one-hot(l_k(v)), Σ_{p ∈ ball_k(v)} GIN(p)]` for one node.
pub fn node_representation(
    g: &Graph,
    v: usize,
    layer: usize,
    subtree: &SubtreeEncoding,
    initial: &[Vec<f64>],
    rounds: &[GinMlp],
) -> Result<Vec<f64>, NtwinError> {
    let sub = extract_rooted_subgraph(g, v, layer)?;
    let features: Vec<Vec<f64>> = sub.nodes.iter().map(|&p| initial[p].clone()).collect();
    let encoded = gin_forward(&sub, &features, rounds)?;
    let mut out = subtree.vector(v);
    out.extend(subgraph_readout(&encoded)?);
    Ok(out)
}

pub fn ntwin_embed(
    g: &Graph,
    dict: &LabelDictionary,
    cfg: &NtwinConfig,
    params: &NtwinParams,
) -> Result<GraphRepresentation, NtwinError> {
    cfg.check()?;
    if dict.depth() < cfg.layers {
        return Err(NtwinError::DepthMismatch {
            needed: cfg.layers,
            available: dict.depth(),
        });
    }
    if params.layers.len() != cfg.layers {
        return Err(NtwinError::ShapeMismatch {
            expected: cfg.layers,
            got: params.layers.len(),
        });
    }
    let colors = dict.color_frozen(g, cfg.layers);
    let initial_code = subtree_encode(&colors[0], 0, dict)?;
    let initial: Vec<Vec<f64>> = (0..g.n()).map(|v| initial_code.vector(v)).collect();

    let mut layers = Vec::with_capacity(cfg.layers);
    let mut widths = Vec::with_capacity(cfg.layers);
    for k in 1..=cfg.layers {
        let rounds = &params.layers[k - 1];
        let d2 = rounds.last().map_or(0, GinMlp::output_width);
        if let Some(first) = rounds.first() {
            if first.input_width() != initial_code.width {
                return Err(NtwinError::ShapeMismatch {
                    expected: initial_code.width,
                    got: first.input_width(),
                });
            }
        }
        let subtree = subtree_encode(&colors[k], k, dict)?;
        let per_node: Vec<Vec<f64>> = (0..g.n())
            .into_par_iter()
            .map(|v| node_representation(g, v, k, &subtree, &initial, rounds))
            .collect::<Result<_, _>>()?;
        let mut pooled = vec![0.0; subtree.width + d2];
        for row in &per_node {
            for (a, b) in pooled.iter_mut().zip(row) {
                *a += b;
            }
        }
        widths.push((subtree.width, d2));
        layers.push(pooled);
    }
    Ok(GraphRepresentation { layers, widths })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, Corpus};
    use crate::wl::wl_refine;

    fn g(n: usize, edges: &[(usize, usize)]) -> Graph {
        build_graph(n, edges, &[], None).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        g(n, &e)
    }

    fn ones(n: usize) -> Vec<Vec<f64>> {
        vec![vec![1.0]; n]
    }

    #[test]
    fn rooted_subgraphs() {
        let c6 = cycle(6);
        let s0 = extract_rooted_subgraph(&c6, 3, 0).unwrap();
        assert_eq!(s0.nodes, vec![3]);
        assert_eq!(s0.edge_count(), 0);

        let s2 = extract_rooted_subgraph(&c6, 0, 2).unwrap();
        assert_eq!(s2.nodes, vec![0, 1, 2, 4, 5]);
        assert_eq!(s2.edge_count(), 4);
        let degrees: Vec<usize> = s2.adjacency.iter().map(Vec::len).collect();
        assert_eq!(degrees.iter().filter(|&&d| d == 1).count(), 2);

        let k3 = g(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(extract_rooted_subgraph(&k3, 1, 1).unwrap().edge_count(), 3);
        assert_eq!(
            extract_rooted_subgraph(&k3, 3, 1),
            Err(NtwinError::NodeOutOfRange { node: 3, n: 3 })
        );
    }

    #[test]
    fn identity_gin_rounds() {
        let k3 = g(3, &[(0, 1), (1, 2), (0, 2)]);
        let sub = extract_rooted_subgraph(&k3, 0, 1).unwrap();
        let out = gin_forward(&sub, &ones(3), &[GinMlp::identity(1)]).unwrap();
        assert_eq!(out, vec![vec![3.0]; 3]);
        assert_eq!(subgraph_readout(&out).unwrap(), vec![9.0]);

        let zero = gin_forward(&sub, &vec![vec![0.0]; 3], &[GinMlp::identity(1)]).unwrap();
        assert_eq!(zero, vec![vec![0.0]; 3]);

        let p3 = g(3, &[(0, 1), (1, 2)]);
        let sub = extract_rooted_subgraph(&p3, 1, 1).unwrap();
        let out = gin_forward(&sub, &ones(3), &[GinMlp::identity(1)]).unwrap();
        assert_eq!(out, vec![vec![2.0], vec![3.0], vec![2.0]]);
        assert_eq!(subgraph_readout(&out).unwrap(), vec![7.0]);
        assert_eq!(subgraph_readout(&[vec![4.0, 2.0]]).unwrap(), vec![4.0, 2.0]);
        assert_eq!(subgraph_readout(&[]), Err(NtwinError::EmptySubgraph));
    }

    #[test]
    fn gin_shape_checks() {
        let p3 = g(3, &[(0, 1), (1, 2)]);
        let sub = extract_rooted_subgraph(&p3, 1, 1).unwrap();
        assert!(matches!(
            gin_forward(&sub, &ones(3), &[GinMlp::identity(2)]),
            Err(NtwinError::ShapeMismatch { .. })
        ));
        assert!(matches!(
            gin_forward(&sub, &ones(2), &[GinMlp::identity(1)]),
            Err(NtwinError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn subtree_codes() {
        let p3 = g(3, &[(0, 1), (1, 2)]);
        let corpus = Corpus::new(vec![p3, cycle(6)]).unwrap();
        let r = wl_refine(&corpus, 1);
        let enc = subtree_encode(r.labels(0, 1), 1, r.dictionary()).unwrap();
        assert_eq!(enc.hot[0], enc.hot[2]);
        assert_ne!(enc.hot[0], enc.hot[1]);
        assert_eq!(enc.vector(1).iter().sum::<f64>(), 1.0);
        let cyc = subtree_encode(r.labels(1, 1), 1, r.dictionary()).unwrap();
        assert!(cyc.hot.iter().all(|&h| h == cyc.hot[0]));
        assert!(matches!(
            subtree_encode(&[99], 1, r.dictionary()),
            Err(NtwinError::AlphabetMismatch { .. })
        ));
        assert!(matches!(
            subtree_encode(&[0], 2, r.dictionary()),
            Err(NtwinError::DepthMismatch { .. })
        ));
        assert_eq!(
            subtree_encode(&[UNSEEN], 1, r.dictionary()).unwrap().hot,
            vec![enc.width - 1]
        );
    }

    #[test]
    fn isolated_nodes_reduce_to_per_node_mlp() {
        let empty = g(4, &[]);
        let corpus = Corpus::new(vec![empty.clone()]).unwrap();
        let r = wl_refine(&corpus, 1);
        let cfg = NtwinConfig {
            layers: 1,
            hidden: 3,
            rounds_per_layer: None,
            seed: 5,
        };
        let params = NtwinParams::for_dictionary(&cfg, r.dictionary()).unwrap();
        let rep = ntwin_embed(&empty, r.dictionary(), &cfg, &params).unwrap();
        let x = vec![1.0, 0.0];
        let mlp_out = params.layers[0][0].forward(&x);
        let onehot = subtree_encode(r.labels(0, 1), 1, r.dictionary())
            .unwrap()
            .vector(0);
        let expected: Vec<f64> = onehot.iter().chain(&mlp_out).map(|v| 4.0 * v).collect();
        for (a, b) in rep.vector().iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn depth_is_checked() {
        let c = cycle(4);
        let corpus = Corpus::new(vec![c.clone()]).unwrap();
        let r = wl_refine(&corpus, 1);
        let cfg = NtwinConfig::default();
        let params = NtwinParams::for_dictionary(&cfg, r.dictionary()).unwrap();
        assert_eq!(
            ntwin_embed(&c, r.dictionary(), &cfg, &params),
            Err(NtwinError::DepthMismatch {
                needed: 2,
                available: 1
            })
        );
    }
}
