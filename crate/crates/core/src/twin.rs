//! Identity propagation alongside label refinement.
//!
//! Each node carries the set of node identities reachable within `h` hops
//! (its closed `h`-ball), stored as a fixed-width bit block. The size of that
//! set is the readout that makes identities comparable across graphs: the
//! isomorphism test compares multisets of `(label, ball size)` tuples and the
//! embeddings sum or bucket ball sizes per label.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Corpus, Graph};
use crate::wl::{pair_corpus, wl_refine, WlRefinement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TwinError {
    #[error("identity balls cover {balls} nodes but the graph has {graph}")]
    GraphMismatch { balls: usize, graph: usize },
}

/// Outcome of a (Twin-)WL isomorphism test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoDecision {
    NonIsomorphic { iteration: usize, witness: String },
    PossiblyIsomorphic { iterations_run: usize },
}

impl IsoDecision {
    pub fn is_non_isomorphic(&self) -> bool {
        matches!(self, IsoDecision::NonIsomorphic { .. })
    }

    /// Iteration at which the graphs were told apart.
    pub fn witness_iteration(&self) -> Option<usize> {
        match self {
            IsoDecision::NonIsomorphic { iteration, .. } => Some(*iteration),
            IsoDecision::PossiblyIsomorphic { .. } => None,
        }
    }
}

impl fmt::Display for IsoDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoDecision::NonIsomorphic { iteration, witness } => {
                write!(f, "non-isomorphic at iteration {iteration} ({witness})")
            }
            IsoDecision::PossiblyIsomorphic { iterations_run } => {
                write!(f, "possibly isomorphic after {iterations_run} iterations")
            }
        }
    }
}

/// Per-node identity sets `t_h(v)` as bit blocks over local node ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityBalls {
    iteration: usize,
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl IdentityBalls {
    /// `t_0(v) = {v}`.
    pub fn initial(g: &Graph) -> Self {
        let n = g.n();
        let words = n.div_ceil(64);
        let mut bits = vec![0u64; n * words];
        for v in 0..n {
            bits[v * words + v / 64] |= 1 << (v % 64);
        }
        IdentityBalls {
            iteration: 0,
            n,
            words,
            bits,
        }
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    fn block(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    pub fn contains(&self, v: usize, u: usize) -> bool {
        self.block(v)[u / 64] >> (u % 64) & 1 == 1
    }

    /// Members of `t_h(v)` in ascending order.
    pub fn members(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| self.contains(v, u)).collect()
    }

    pub fn size(&self, v: usize) -> u32 {
        self.block(v).iter().map(|w| w.count_ones()).sum()
    }
}

/// `t_h(v) = {v} ∪ ⋃_{u ∈ N(v)} t_{h-1}(u)`, one word-wise union per edge.
pub fn identity_step(prev: &IdentityBalls, g: &Graph) -> Result<IdentityBalls, TwinError> {
    if prev.n != g.n() {
        return Err(TwinError::GraphMismatch {
            balls: prev.n,
            graph: g.n(),
        });
    }
    let words = prev.words;
    let mut bits = prev.bits.clone();
    for v in 0..g.n() {
        let (lo, hi) = (v * words, (v + 1) * words);
        for &u in g.neighbors(v) {
            let src = &prev.bits[u * words..(u + 1) * words];
            for (dst, s) in bits[lo..hi].iter_mut().zip(src) {
                *dst |= s;
            }
        }
    }
    Ok(IdentityBalls {
        iteration: prev.iteration + 1,
        n: prev.n,
        words,
        bits,
    })
}

/// Popcount of every node's identity set.
pub fn ball_sizes(balls: &IdentityBalls) -> Vec<u32> {
    (0..balls.n).map(|v| balls.size(v)).collect()
}

/// Ball sizes for iterations `0..=iterations`. Propagation stops once every
/// ball is saturated and later rows repeat the last one.
pub fn ball_size_profile(g: &Graph, iterations: usize) -> Vec<Vec<u32>> {
    let mut balls = IdentityBalls::initial(g);
    let mut rows = vec![ball_sizes(&balls)];
    while rows.len() <= iterations {
        let next = identity_step(&balls, g).expect("same graph");
        let sizes = ball_sizes(&next);
        let saturated = &sizes == rows.last().unwrap();
        rows.push(sizes);
        if saturated {
            break;
        }
        balls = next;
    }
    while rows.len() <= iterations {
        rows.push(rows.last().unwrap().clone());
    }
    rows
}

/// Labels and ball sizes for every graph of a corpus, in lockstep.
#[derive(Debug, Clone)]
pub struct TwinRefinement {
    pub refinement: WlRefinement,
    /// `sizes[graph][h][v] = |t_h(v)|`.
    pub sizes: Vec<Vec<Vec<u32>>>,
}

impl TwinRefinement {
    pub fn run(corpus: &Corpus, iterations: usize) -> Self {
        let refinement = wl_refine(corpus, iterations);
        let sizes = corpus
            .graphs()
            .par_iter()
            .map(|g| ball_size_profile(g, iterations))
            .collect();
        TwinRefinement { refinement, sizes }
    }

    pub fn iterations(&self) -> usize {
        self.refinement.iterations()
    }

    /// Sorted `(label, ball size)` tuples of one graph at iteration `h`.
    pub fn tuples(&self, graph: usize, h: usize) -> Vec<(u32, u32)> {
        let labels = self.refinement.labels(graph, h);
        let mut t: Vec<(u32, u32)> = labels
            .iter()
            .zip(&self.sizes[graph][h])
            .map(|(&l, &s)| (l, s))
            .collect();
        t.sort_unstable();
        t
    }
}

/// Collapsed embedding: per iteration, label id to the summed ball sizes of
/// the nodes carrying that label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StwinEmbedding {
    pub graph_id: String,
    pub blocks: Vec<BTreeMap<u32, u64>>,
    /// Dictionary size per iteration; fixes the dense layout.
    pub widths: Vec<usize>,
}

impl StwinEmbedding {
    /// Blocks concatenated in (iteration, label id) order.
    pub fn dense(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.widths.iter().sum());
        for (block, &width) in self.blocks.iter().zip(&self.widths) {
            let start = out.len();
            out.resize(start + width, 0);
            for (&label, &value) in block {
                out[start + label as usize] = value;
            }
        }
        out
    }
}

pub fn stwin_embed(corpus: &Corpus, iterations: usize) -> Vec<StwinEmbedding> {
    stwin_from_run(corpus, &TwinRefinement::run(corpus, iterations))
}

pub fn stwin_from_run(corpus: &Corpus, run: &TwinRefinement) -> Vec<StwinEmbedding> {
    let iterations = run.iterations();
    let dict = run.refinement.dictionary();
    let widths: Vec<usize> = (0..=iterations).map(|h| dict.size(h)).collect();
    corpus
        .graphs()
        .iter()
        .enumerate()
        .map(|(gi, g)| {
            if g.n() == 0 {
                return StwinEmbedding {
                    graph_id: g.id().to_string(),
                    blocks: Vec::new(),
                    widths: Vec::new(),
                };
            }
            let blocks = (0..=iterations)
                .map(|h| {
                    let mut block = BTreeMap::new();
                    for (&l, &s) in run.refinement.labels(gi, h).iter().zip(&run.sizes[gi][h]) {
                        *block.entry(l).or_insert(0) += s as u64;
                    }
                    block
                })
                .collect();
            StwinEmbedding {
                graph_id: g.id().to_string(),
                blocks,
                widths: widths.clone(),
            }
        })
        .collect()
}

/// Matrix embedding: per iteration, `(label id, readout bucket)` to node
/// count. Buckets are shared by the corpus and ordered by readout value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixEmbedding {
    pub graph_id: String,
    pub cells: Vec<BTreeMap<(u32, u32), u64>>,
    pub label_widths: Vec<usize>,
    /// Readout value of each bucket id.
    pub buckets: Vec<u32>,
}

impl MatrixEmbedding {
    /// Row-major `label × bucket` block per iteration, concatenated.
    pub fn dense(&self) -> Vec<u64> {
        let nb = self.buckets.len();
        let mut out = Vec::new();
        for (cells, &width) in self.cells.iter().zip(&self.label_widths) {
            let start = out.len();
            out.resize(start + width * nb, 0);
            for (&(i, j), &c) in cells {
                out[start + i as usize * nb + j as usize] = c;
            }
        }
        out
    }

    /// Sums `count · readout` per label, which is the collapsed embedding.
    pub fn collapse(&self) -> Vec<BTreeMap<u32, u64>> {
        self.cells
            .iter()
            .map(|cells| {
                let mut block = BTreeMap::new();
                for (&(i, j), &c) in cells {
                    *block.entry(i).or_insert(0) += c * self.buckets[j as usize] as u64;
                }
                block
            })
            .collect()
    }
}

pub fn twin_matrix_embed(corpus: &Corpus, iterations: usize) -> Vec<MatrixEmbedding> {
    matrix_from_run(corpus, &TwinRefinement::run(corpus, iterations))
}

pub fn matrix_from_run(corpus: &Corpus, run: &TwinRefinement) -> Vec<MatrixEmbedding> {
    let iterations = run.iterations();
    let mut buckets: Vec<u32> = run.sizes.iter().flatten().flatten().copied().collect();
    buckets.sort_unstable();
    buckets.dedup();
    let bucket_of = |s: u32| buckets.binary_search(&s).expect("bucketed") as u32;
    let dict = run.refinement.dictionary();
    let label_widths: Vec<usize> = (0..=iterations).map(|h| dict.size(h)).collect();

    corpus
        .graphs()
        .iter()
        .enumerate()
        .map(|(gi, g)| {
            if g.n() == 0 {
                return MatrixEmbedding {
                    graph_id: g.id().to_string(),
                    cells: Vec::new(),
                    label_widths: Vec::new(),
                    buckets: buckets.clone(),
                };
            }
            let cells = (0..=iterations)
                .map(|h| {
                    let mut cells = BTreeMap::new();
                    for (&l, &s) in run.refinement.labels(gi, h).iter().zip(&run.sizes[gi][h]) {
                        *cells.entry((l, bucket_of(s))).or_insert(0) += 1;
                    }
                    cells
                })
                .collect();
            MatrixEmbedding {
                graph_id: g.id().to_string(),
                cells,
                label_widths: label_widths.clone(),
                buckets: buckets.clone(),
            }
        })
        .collect()
}

fn first_tuple_difference(a: &[(u32, u32)], b: &[(u32, u32)]) -> Option<String> {
    if a == b {
        return None;
    }
    let count = |t: &[(u32, u32)]| {
        let mut m = BTreeMap::new();
        for &x in t {
            *m.entry(x).or_insert(0usize) += 1;
        }
        m
    };
    let (ca, cb) = (count(a), count(b));
    let mut keys: Vec<_> = ca.keys().chain(cb.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    keys.into_iter().find_map(|k| {
        let (x, y) = (
            ca.get(&k).copied().unwrap_or(0),
            cb.get(&k).copied().unwrap_or(0),
        );
        (x != y).then(|| format!("tuple (label {}, size {}): {x} vs {y} nodes", k.0, k.1))
    })
}

/// Twin-WL test with the ball-size readout: non-isomorphic at the first
/// iteration whose `(label, |t_h(v)|)` multisets differ.
pub fn twin_iso_test(a: &Graph, b: &Graph, iterations: usize) -> IsoDecision {
    let corpus = pair_corpus(a, b);
    let run = TwinRefinement::run(&corpus, iterations);
    for h in 0..=iterations {
        if let Some(witness) = first_tuple_difference(&run.tuples(0, h), &run.tuples(1, h)) {
            return IsoDecision::NonIsomorphic {
                iteration: h,
                witness,
            };
        }
    }
    IsoDecision::PossiblyIsomorphic {
        iterations_run: iterations,
    }
}
