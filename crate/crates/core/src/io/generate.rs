//! Deterministic graph families and the suite of 1-WL-hard pairs.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{build_graph, Graph};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("bad parameters: {0}")]
    BadParams(String),
}

fn bad<T>(msg: impl Into<String>) -> Result<T, GenError> {
    Err(GenError::BadParams(msg.into()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Cycle {
        n: usize,
    },
    DisjointCycles {
        lengths: Vec<usize>,
    },
    /// Vertex `i` adjacent to `i ± s (mod n)` for every skip `s`.
    Circulant {
        n: usize,
        skips: Vec<usize>,
    },
    Rook4x4,
    Shrikhande,
    /// Each pair `i < j`, in lexicographic order, is an edge when the next
    /// SplitMix64 uniform drawn from `seed` is below `p`.
    ErRandom {
        n: usize,
        p: f64,
        seed: u64,
    },
    /// `circulant(n, {1, s1})` against `circulant(n, {1, s2})`.
    HardPairCsl {
        n: usize,
        s1: usize,
        s2: usize,
    },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Cycle { .. } => "cycle",
            Family::DisjointCycles { .. } => "disjoint_cycles",
            Family::Circulant { .. } => "circulant",
            Family::Rook4x4 => "rook4x4",
            Family::Shrikhande => "shrikhande",
            Family::ErRandom { .. } => "er_random",
            Family::HardPairCsl { .. } => "hard_pair_csl",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generated {
    Single(Graph),
    Pair(Graph, Graph),
}

impl Generated {
    pub fn graphs(&self) -> Vec<&Graph> {
        match self {
            Generated::Single(g) => vec![g],
            Generated::Pair(a, b) => vec![a, b],
        }
    }
}

pub fn generate(family: &Family) -> Result<Generated, GenError> {
    let single = |g: Result<Graph, GenError>| g.map(Generated::Single);
    match family {
        Family::Cycle { n } => single(cycle(*n)),
        Family::DisjointCycles { lengths } => single(disjoint_cycles(lengths)),
        Family::Circulant { n, skips } => single(circulant(*n, skips)),
        Family::Rook4x4 => Ok(Generated::Single(rook4x4())),
        Family::Shrikhande => Ok(Generated::Single(shrikhande())),
        Family::ErRandom { n, p, seed } => single(er_random(*n, *p, *seed)),
        Family::HardPairCsl { n, s1, s2 } => {
            if s1 == s2 {
                return bad("the two skips must differ");
            }
            Ok(Generated::Pair(
                circulant(*n, &[1, *s1])?.with_id(format!("csl_{n}_{s1}")),
                circulant(*n, &[1, *s2])?.with_id(format!("csl_{n}_{s2}")),
            ))
        }
    }
}

pub fn cycle(n: usize) -> Result<Graph, GenError> {
    disjoint_cycles(&[n]).map(|g| g.with_id(format!("cycle_{n}")))
}

pub fn disjoint_cycles(lengths: &[usize]) -> Result<Graph, GenError> {
    if lengths.is_empty() || lengths.iter().any(|&l| l < 3) {
        return bad("cycle lengths must be at least 3");
    }
    let n = lengths.iter().sum();
    let mut edges = Vec::with_capacity(n);
    let mut base = 0;
    for &len in lengths {
        edges.extend((0..len).map(|i| (base + i, base + (i + 1) % len)));
        base += len;
    }
    let id = lengths
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("+");
    Ok(build_graph(n, &edges, &[], None)
        .expect("valid cycles")
        .with_id(format!("cycles_{id}")))
}

/// Skips must be distinct and satisfy `1 ≤ s < n/2`, so every vertex has
/// degree `2·|skips|`.
pub fn circulant(n: usize, skips: &[usize]) -> Result<Graph, GenError> {
    if n < 3 {
        return bad("circulant needs at least 3 vertices");
    }
    let mut sorted = skips.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != skips.len() || sorted.is_empty() {
        return bad("skips must be distinct and non-empty");
    }
    if let Some(&s) = sorted.iter().find(|&&s| s == 0 || 2 * s >= n) {
        return bad(format!(
            "skip {s} must satisfy 1 <= s < n/2 = {}",
            n as f64 / 2.0
        ));
    }
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| sorted.iter().map(move |&s| (i, (i + s) % n)))
        .collect();
    let id = sorted
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",");
    Ok(build_graph(n, &edges, &[], None)
        .expect("valid circulant")
        .with_id(format!("circulant_{n}_{id}")))
}

/// Line graph of K4,4: cells of a 4×4 board, adjacent in a shared row or
/// column.
pub fn rook4x4() -> Graph {
    let mut edges = Vec::new();
    for a in 0..16 {
        for b in a + 1..16 {
            if a / 4 == b / 4 || a % 4 == b % 4 {
                edges.push((a, b));
            }
        }
    }
    build_graph(16, &edges, &[], None)
        .expect("valid rook graph")
        .with_id("rook4x4")
}

/// Cayley graph of Z4 × Z4 with connection set ±(1,0), ±(0,1), ±(1,1).
pub fn shrikhande() -> Graph {
    let idx = |r: usize, c: usize| (r % 4) * 4 + c % 4;
    let mut edges = Vec::new();
    for r in 0..4 {
        for c in 0..4 {
            for (dr, dc) in [(1, 0), (0, 1), (1, 1)] {
                edges.push((idx(r, c), idx(r + dr, c + dc)));
            }
        }
    }
    build_graph(16, &edges, &[], None)
        .expect("valid Shrikhande graph")
        .with_id("shrikhande")
}

pub fn er_random(n: usize, p: f64, seed: u64) -> Result<Graph, GenError> {
    if !(0.0..=1.0).contains(&p) {
        return bad("edge probability must lie in [0, 1]");
    }
    let mut rng = SplitMix64::new(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.next_f64() < p {
                edges.push((i, j));
            }
        }
    }
    Ok(build_graph(n, &edges, &[], None)
        .expect("valid random graph")
        .with_id(format!("er_{n}_{p}_{seed}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundTruth {
    Isomorphic,
    NonIsomorphic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPair {
    pub a: Graph,
    pub b: Graph,
    pub truth: GroundTruth,
    pub family: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairSuite {
    pub pairs: Vec<LabeledPair>,
}

/// Closed-ball sizes `|B_h(v)|` for `h = 1..=depth`, by breadth-first search.
fn ball_profile(g: &Graph, depth: usize) -> Vec<Vec<usize>> {
    let mut rows = vec![Vec::with_capacity(g.n()); depth];
    for src in 0..g.n() {
        let mut dist = vec![usize::MAX; g.n()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        let mut within = vec![0usize; depth + 1];
        while let Some(v) = queue.pop_front() {
            within[dist[v]] += 1;
            if dist[v] == depth {
                continue;
            }
            for &u in g.neighbors(v) {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        let mut acc = within[0];
        for h in 1..=depth {
            acc += within[h];
            rows[h - 1].push(acc);
        }
    }
    for row in &mut rows {
        row.sort_unstable();
    }
    rows
}

fn is_prime(n: usize) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

/// Canonical form of a skip set of `Z_n` under multiplication by units.
/// For prime `n`, two circulants are isomorphic exactly when their skip sets
/// share this form (Turner's theorem for prime order).
fn multiplier_canonical(n: usize, skips: &[usize]) -> Vec<usize> {
    (1..n)
        .map(|a| {
            let mut t: Vec<usize> = skips
                .iter()
                .map(|&s| {
                    let r = a * s % n;
                    r.min(n - r)
                })
                .collect();
            t.sort_unstable();
            t
        })
        .min()
        .unwrap_or_default()
}

/// 1-WL-indistinguishable, non-isomorphic pairs.
///
/// Contents, in order, until `count` pairs are collected:
/// 1. the rook's graph against the Shrikhande graph (both srg(16,6,2,2));
/// 2. `C_n` against `C_a ⊔ C_(n-a)` for `n = 6..=16`, connected versus
///    disconnected;
/// 3. `circulant(p, {1, s})` against `circulant(p, {1, t})` for primes
///    `p ≥ 11` with multiplier-inequivalent skip sets.
///
/// Families 2 and 3 keep only pairs whose closed-ball size profiles differ
/// within three hops.
pub fn wl_hard_suite(count: usize) -> PairSuite {
    const DEPTH: usize = 3;
    let mut pairs = vec![LabeledPair {
        a: rook4x4(),
        b: shrikhande(),
        truth: GroundTruth::NonIsomorphic,
        family: "srg".into(),
    }];
    let differ = |a: &Graph, b: &Graph| ball_profile(a, DEPTH) != ball_profile(b, DEPTH);

    'cycles: for n in 6..=16 {
        for a in 3..=n / 2 {
            if pairs.len() >= count {
                break 'cycles;
            }
            let whole = cycle(n).expect("n >= 6");
            let split = disjoint_cycles(&[a, n - a]).expect("parts >= 3");
            if differ(&whole, &split) {
                pairs.push(LabeledPair {
                    a: whole,
                    b: split,
                    truth: GroundTruth::NonIsomorphic,
                    family: "cycles".into(),
                });
            }
        }
    }

    let mut p = 11;
    while pairs.len() < count {
        if is_prime(p) {
            let mut reps: Vec<(Vec<usize>, usize)> = Vec::new();
            for s in 2..=(p - 1) / 2 {
                let form = multiplier_canonical(p, &[1, s]);
                if !reps.iter().any(|(f, _)| *f == form) {
                    reps.push((form, s));
                }
            }
            for i in 0..reps.len() {
                for j in i + 1..reps.len() {
                    if pairs.len() >= count {
                        break;
                    }
                    let a = circulant(p, &[1, reps[i].1]).expect("valid skips");
                    let b = circulant(p, &[1, reps[j].1]).expect("valid skips");
                    if differ(&a, &b) {
                        pairs.push(LabeledPair {
                            a,
                            b,
                            truth: GroundTruth::NonIsomorphic,
                            family: "circulant".into(),
                        });
                    }
                }
            }
        }
        p += 1;
    }
    pairs.truncate(count);
    PairSuite { pairs }
}
