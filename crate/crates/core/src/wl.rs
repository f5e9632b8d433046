//! 1-WL color refinement over a corpus with a shared label dictionary.
//!
//! Every iteration builds, for each node, the signature
//! `(previous label, ascending neighbor labels)` and compresses it to a
//! compact id. Ids are handed out in lexicographic order of the distinct
//! signatures present in the corpus, so the output does not depend on the
//! order in which graphs or nodes are visited.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Corpus, Graph};
use crate::twin::IsoDecision;

/// Label id reserved for signatures that a frozen dictionary has never seen.
pub const UNSEEN: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WlError {
    #[error("coloring is at iteration {coloring} but the dictionary covers {dictionary}")]
    IterationMismatch { coloring: usize, dictionary: usize },
    #[error("coloring covers {got} graphs, corpus has {expected}")]
    CorpusMismatch { expected: usize, got: usize },
}

/// Corpus-shared injective map from signatures to compact label ids, one
/// level per iteration.
///
/// `levels[h]` lists the signatures of iteration `h` sorted ascending; the
/// position of a signature is its id. Once the corpus partition is stable the
/// following levels are identical to the last one, so they are not stored and
/// [`LabelDictionary::level`] clamps to the last stored level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelDictionary {
    levels: Vec<Vec<Box<[u32]>>>,
    depth: usize,
}

impl LabelDictionary {
    /// Level 0 is the identity on the initial label alphabet.
    pub fn new(alphabet_size: usize) -> Self {
        let level0 = (0..alphabet_size as u32)
            .map(|l| vec![l].into_boxed_slice())
            .collect();
        LabelDictionary {
            levels: vec![level0],
            depth: 0,
        }
    }

    /// Number of iterations this dictionary covers.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of levels actually stored; smaller than `depth + 1` once the
    /// refinement has stabilized.
    pub fn stored_levels(&self) -> usize {
        self.levels.len()
    }

    fn level_index(&self, h: usize) -> usize {
        h.min(self.levels.len() - 1)
    }

    /// Signatures of iteration `h` in id order.
    pub fn level(&self, h: usize) -> &[Box<[u32]>] {
        &self.levels[self.level_index(h)]
    }

    /// Alphabet size at iteration `h`.
    pub fn size(&self, h: usize) -> usize {
        self.level(h).len()
    }

    /// Looks up the id of `signature` at iteration `h`.
    pub fn lookup(&self, h: usize, signature: &[u32]) -> Option<u32> {
        self.level(h)
            .binary_search_by(|s| s.as_ref().cmp(signature))
            .ok()
            .map(|i| i as u32)
    }

    /// Colors a graph against this frozen dictionary up to iteration `depth`
    /// without extending it. Signatures never seen in the corpus map to
    /// [`UNSEEN`], which then propagates.
    pub fn color_frozen(&self, g: &Graph, depth: usize) -> Vec<Vec<u32>> {
        let level0: Vec<u32> = g
            .node_labels()
            .iter()
            .map(|&l| {
                if (l as usize) < self.size(0) {
                    l
                } else {
                    UNSEEN
                }
            })
            .collect();
        let mut out = vec![level0];
        let mut signature = Vec::new();
        for h in 1..=depth {
            let prev = &out[h - 1];
            let next = (0..g.n())
                .map(|v| {
                    signature.clear();
                    signature.push(prev[v]);
                    let start = signature.len();
                    signature.extend(g.neighbors(v).iter().map(|&u| prev[u]));
                    signature[start..].sort_unstable();
                    if signature.contains(&UNSEEN) {
                        UNSEEN
                    } else {
                        self.lookup(h, &signature).unwrap_or(UNSEEN)
                    }
                })
                .collect();
            out.push(next);
        }
        out
    }
}

/// Labels of every node in every graph at one iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub iteration: usize,
    pub labels: Vec<Vec<u32>>,
}

impl Coloring {
    pub fn initial(corpus: &Corpus) -> Self {
        Coloring {
            iteration: 0,
            labels: corpus
                .graphs()
                .iter()
                .map(|g| g.node_labels().to_vec())
                .collect(),
        }
    }
}

/// Sparse label histogram: label id to node count.
pub type Histogram = BTreeMap<u32, usize>;

pub fn histogram(labels: &[u32]) -> Histogram {
    let mut hist = Histogram::new();
    for &l in labels {
        *hist.entry(l).or_insert(0) += 1;
    }
    hist
}

/// One refinement step: builds level `prev.iteration + 1` of `dict` and
/// returns the matching coloring.
pub fn wl_step(
    corpus: &Corpus,
    prev: &Coloring,
    dict: &mut LabelDictionary,
) -> Result<Coloring, WlError> {
    if prev.labels.len() != corpus.len() {
        return Err(WlError::CorpusMismatch {
            expected: corpus.len(),
            got: prev.labels.len(),
        });
    }
    if dict.depth != prev.iteration || dict.levels.len() != prev.iteration + 1 {
        return Err(WlError::IterationMismatch {
            coloring: prev.iteration,
            dictionary: dict.depth,
        });
    }

    let graphs = corpus.graphs();
    let mut node_offset = Vec::with_capacity(graphs.len() + 1);
    node_offset.push(0usize);
    for g in graphs {
        node_offset.push(node_offset.last().unwrap() + g.n());
    }
    let total = *node_offset.last().unwrap();
    let prev_flat: Vec<u32> = prev.labels.iter().flatten().copied().collect();

    // CSR offsets for each node's neighbor-label run.
    let mut run_offset = Vec::with_capacity(total + 1);
    run_offset.push(0usize);
    for g in graphs {
        for v in 0..g.n() {
            run_offset.push(run_offset.last().unwrap() + g.degree(v));
        }
    }
    let entries = *run_offset.last().unwrap();

    // Counting sort of all (node, neighbor label) pairs by label. Scattering
    // them in label order leaves every node's run sorted ascending.
    let alphabet = prev_flat.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
    let mut bucket_start = vec![0usize; alphabet + 1];
    for (gi, g) in graphs.iter().enumerate() {
        let base = node_offset[gi];
        for v in 0..g.n() {
            for &u in g.neighbors(v) {
                bucket_start[prev_flat[base + u] as usize + 1] += 1;
            }
        }
    }
    for i in 1..bucket_start.len() {
        bucket_start[i] += bucket_start[i - 1];
    }
    let mut by_label = vec![(0u32, 0usize); entries];
    for (gi, g) in graphs.iter().enumerate() {
        let base = node_offset[gi];
        for v in 0..g.n() {
            for &u in g.neighbors(v) {
                let l = prev_flat[base + u];
                let slot = &mut bucket_start[l as usize];
                by_label[*slot] = (l, base + v);
                *slot += 1;
            }
        }
    }
    let mut runs = vec![0u32; entries];
    let mut cursor = run_offset[..total].to_vec();
    for &(l, x) in &by_label {
        runs[cursor[x]] = l;
        cursor[x] += 1;
    }

    let key = |x: usize| (prev_flat[x], &runs[run_offset[x]..run_offset[x + 1]]);
    let mut order: Vec<usize> = (0..total).collect();
    order.par_sort_unstable_by(|&a, &b| key(a).cmp(&key(b)));

    let mut flat_next = vec![0u32; total];
    let mut level: Vec<Box<[u32]>> = Vec::new();
    let mut last: Option<usize> = None;
    for &x in &order {
        if last.is_none_or(|y| key(y) != key(x)) {
            let (head, tail) = key(x);
            let mut sig = Vec::with_capacity(tail.len() + 1);
            sig.push(head);
            sig.extend_from_slice(tail);
            level.push(sig.into_boxed_slice());
            last = Some(x);
        }
        flat_next[x] = (level.len() - 1) as u32;
    }

    dict.levels.push(level);
    dict.depth += 1;

    let labels = node_offset
        .windows(2)
        .map(|w| flat_next[w[0]..w[1]].to_vec())
        .collect();
    Ok(Coloring {
        iteration: prev.iteration + 1,
        labels,
    })
}

/// Result of refining a corpus for `iterations` rounds.
#[derive(Debug, Clone)]
pub struct WlRefinement {
    iterations: usize,
    colorings: Vec<Coloring>,
    dictionary: LabelDictionary,
    histograms: Vec<Vec<Histogram>>,
}

impl WlRefinement {
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn dictionary(&self) -> &LabelDictionary {
        &self.dictionary
    }

    /// Last computed iteration when refinement stopped early; every later
    /// iteration repeats it.
    pub fn stable_from(&self) -> Option<usize> {
        let stored = self.colorings.len() - 1;
        (stored < self.iterations).then_some(stored)
    }

    /// Labels of graph `graph` at iteration `h`.
    pub fn labels(&self, graph: usize, h: usize) -> &[u32] {
        assert!(
            h <= self.iterations,
            "iteration {h} beyond refinement depth"
        );
        &self.colorings[h.min(self.colorings.len() - 1)].labels[graph]
    }

    pub fn coloring(&self, h: usize) -> &Coloring {
        assert!(
            h <= self.iterations,
            "iteration {h} beyond refinement depth"
        );
        &self.colorings[h.min(self.colorings.len() - 1)]
    }

    pub fn histogram(&self, graph: usize, h: usize) -> &Histogram {
        assert!(
            h <= self.iterations,
            "iteration {h} beyond refinement depth"
        );
        &self.histograms[graph][h.min(self.colorings.len() - 1)]
    }

    /// Label histograms concatenated over iterations `0..=H`, each block as
    /// wide as the dictionary level.
    pub fn dense_histogram(&self, graph: usize) -> Vec<u64> {
        let mut out = Vec::new();
        for h in 0..=self.iterations {
            let start = out.len();
            out.resize(start + self.dictionary.size(h), 0);
            for (&l, &c) in self.histogram(graph, h) {
                out[start + l as usize] = c as u64;
            }
        }
        out
    }
}

/// Runs up to `iterations` refinement steps over the corpus. Stops early once
/// a step at `h >= 2` leaves the corpus-wide class count unchanged. Sorted id
/// assignment then makes the labels at `h` equal to those at `h - 1`, so every
/// later step reproduces level `h` and its labels exactly.
pub fn wl_refine(corpus: &Corpus, iterations: usize) -> WlRefinement {
    let mut dictionary = LabelDictionary::new(corpus.label_alphabet_size());
    let mut colorings = vec![Coloring::initial(corpus)];
    for h in 1..=iterations {
        let next = wl_step(corpus, &colorings[h - 1], &mut dictionary)
            .expect("refinement state is internally consistent");
        let stable = h >= 2 && dictionary.levels[h].len() == dictionary.levels[h - 1].len();
        colorings.push(next);
        if stable {
            break;
        }
    }
    dictionary.depth = iterations;

    let histograms = (0..corpus.len())
        .into_par_iter()
        .map(|gi| colorings.iter().map(|c| histogram(&c.labels[gi])).collect())
        .collect();

    WlRefinement {
        iterations,
        colorings,
        dictionary,
        histograms,
    }
}

fn first_difference(a: &Histogram, b: &Histogram) -> Option<(u32, usize, usize)> {
    let mut keys: Vec<u32> = a.keys().chain(b.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    keys.into_iter().find_map(|k| {
        let (ca, cb) = (
            a.get(&k).copied().unwrap_or(0),
            b.get(&k).copied().unwrap_or(0),
        );
        (ca != cb).then_some((k, ca, cb))
    })
}

/// Plain 1-WL test: non-isomorphic at the first iteration whose label
/// histograms differ.
pub fn wl_iso_test(a: &Graph, b: &Graph, iterations: usize) -> IsoDecision {
    let corpus = pair_corpus(a, b);
    let refinement = wl_refine(&corpus, iterations);
    for h in 0..=iterations {
        if let Some((label, ca, cb)) =
            first_difference(refinement.histogram(0, h), refinement.histogram(1, h))
        {
            return IsoDecision::NonIsomorphic {
                iteration: h,
                witness: format!("label {label}: {ca} vs {cb} nodes"),
            };
        }
    }
    IsoDecision::PossiblyIsomorphic {
        iterations_run: iterations,
    }
}

pub(crate) fn pair_corpus(a: &Graph, b: &Graph) -> Corpus {
    Corpus::new(vec![a.clone().with_id("a"), b.clone().with_id("b")]).expect("distinct ids")
}
