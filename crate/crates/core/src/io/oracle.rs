//! Exhaustive isomorphism check for small graphs.

use thiserror::Error;

use crate::graph::Graph;

pub const MAX_ORACLE_NODES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{n} nodes exceed the exhaustive-search limit of {MAX_ORACLE_NODES}")]
    TooLarge { n: usize },
}

/// True iff a bijection preserves node labels and the edge relation.
///
/// Backtracks over candidate images, pruning by label and degree and checking
/// adjacency against every vertex mapped so far.
pub fn brute_force_isomorphic(a: &Graph, b: &Graph) -> Result<bool, OracleError> {
    let n = a.n();
    if n.max(b.n()) > MAX_ORACLE_NODES {
        return Err(OracleError::TooLarge { n: n.max(b.n()) });
    }
    if n != b.n() || a.edge_count() != b.edge_count() {
        return Ok(false);
    }
    let signature = |g: &Graph| {
        let mut s: Vec<(u32, usize)> = (0..g.n())
            .map(|v| (g.node_labels()[v], g.degree(v)))
            .collect();
        s.sort_unstable();
        s
    };
    if signature(a) != signature(b) {
        return Ok(false);
    }

    // Map high-degree vertices first; they constrain the search the most.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(a.degree(v)));
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    Ok(extend(a, b, &order, 0, &mut image, &mut used))
}

fn extend(
    a: &Graph,
    b: &Graph,
    order: &[usize],
    depth: usize,
    image: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&v) = order.get(depth) else {
        return true;
    };
    for w in 0..b.n() {
        if used[w] || a.node_labels()[v] != b.node_labels()[w] || a.degree(v) != b.degree(w) {
            continue;
        }
        let consistent = order[..depth]
            .iter()
            .all(|&u| a.has_edge(u, v) == b.has_edge(image[u], w));
        if !consistent {
            continue;
        }
        image[v] = w;
        used[w] = true;
        if extend(a, b, order, depth + 1, image, used) {
            return true;
        }
        used[w] = false;
        image[v] = usize::MAX;
    }
    false
}
