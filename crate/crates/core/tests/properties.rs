use std::collections::VecDeque;

use proptest::prelude::*;

use twinwl::graph::{build_graph, invert_permutation, permute_graph, validate, Corpus, Graph};
use twinwl::ntwin::{extract_rooted_subgraph, ntwin_embed, NtwinConfig, NtwinParams};
use twinwl::twin::{
    ball_size_profile, identity_step, stwin_embed, twin_iso_test, twin_matrix_embed, IdentityBalls,
};
use twinwl::wl::{wl_iso_test, wl_refine};

/// Random graph with up to `max_n` nodes, edge density drawn per graph and
/// node labels from `0..labels`.
fn graph(max_n: usize, labels: u32) -> impl Strategy<Value = Graph> {
    (1..=max_n, 0.05f64..0.6, any::<u64>()).prop_flat_map(move |(n, p, _)| {
        let pairs = n * (n - 1) / 2;
        (
            Just(n),
            proptest::collection::vec(proptest::bool::weighted(p), pairs),
            proptest::collection::vec(0..labels, n),
        )
            .prop_map(|(n, mask, node_labels)| {
                let mut edges = Vec::new();
                let mut k = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if mask[k] {
                            edges.push((u, v));
                        }
                        k += 1;
                    }
                }
                build_graph(n, &edges, &node_labels, None).unwrap()
            })
    })
}

fn graph_and_perm(max_n: usize, labels: u32) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    graph(max_n, labels).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
    })
}

/// Closed `h`-hop ball around `src`, sorted.
fn bfs_ball(g: &Graph, src: usize, h: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    (0..g.n()).filter(|&v| dist[v] <= h).collect()
}

fn pair(a: &Graph, b: &Graph) -> Corpus {
    Corpus::new(vec![a.clone().with_id("a"), b.clone().with_id("b")]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn identity_balls_match_bfs(g in graph(70, 1), h in 0usize..=4) {
        let mut balls = IdentityBalls::initial(&g);
        for _ in 0..h {
            balls = identity_step(&balls, &g).unwrap();
        }
        for v in 0..g.n() {
            let expected = bfs_ball(&g, v, h);
            prop_assert_eq!(balls.members(v), expected.clone());
            prop_assert_eq!(balls.size(v) as usize, expected.len());
        }
        let profile = ball_size_profile(&g, h);
        for v in 0..g.n() {
            prop_assert_eq!(profile[h][v] as usize, bfs_ball(&g, v, h).len());
        }
    }

    #[test]
    fn ball_sizes_are_monotone(g in graph(30, 1)) {
        let profile = ball_size_profile(&g, 5);
        for h in 1..=5 {
            for v in 0..g.n() {
                prop_assert!(profile[h][v] >= profile[h - 1][v]);
            }
        }
    }

    #[test]
    fn rooted_subgraph_is_the_identity_ball(g in graph(25, 2), k in 0usize..=3) {
        let mut balls = IdentityBalls::initial(&g);
        for _ in 0..k {
            balls = identity_step(&balls, &g).unwrap();
        }
        for v in 0..g.n() {
            let sub = extract_rooted_subgraph(&g, v, k).unwrap();
            prop_assert_eq!(&sub.nodes, &balls.members(v));
            // Induced: every parent edge between members survives.
            let induced = sub.nodes.iter().enumerate().map(|(i, &p)| {
                sub.nodes.iter().filter(|&&q| g.has_edge(p, q)).count() == sub.adjacency[i].len()
            });
            for ok in induced {
                prop_assert!(ok);
            }
        }
    }

    #[test]
    fn refinement_only_splits_classes(g in graph(20, 3)) {
        let corpus = Corpus::new(vec![g.clone()]).unwrap();
        let r = wl_refine(&corpus, 5);
        for h in 1..=5 {
            let (prev, next) = (r.labels(0, h - 1), r.labels(0, h));
            for u in 0..g.n() {
                for v in 0..g.n() {
                    if next[u] == next[v] {
                        prop_assert_eq!(prev[u], prev[v]);
                    }
                }
            }
        }
    }

    #[test]
    fn permuted_copies_are_never_separated((g, pi) in graph_and_perm(14, 2)) {
        let q = permute_graph(&g, &pi).unwrap();
        prop_assert!(!twin_iso_test(&g, &q, 4).is_non_isomorphic());
        prop_assert!(!wl_iso_test(&g, &q, 4).is_non_isomorphic());
    }

    #[test]
    fn twin_separates_whatever_wl_separates(a in graph(10, 2), b in graph(10, 2)) {
        let wl = wl_iso_test(&a, &b, 3);
        let twin = twin_iso_test(&a, &b, 3);
        if let Some(h) = wl.witness_iteration() {
            let t = twin.witness_iteration();
            prop_assert!(t.is_some_and(|t| t <= h), "wl at {h}, twin {t:?}");
        }
    }

    #[test]
    fn matrix_collapses_to_stwin(a in graph(15, 3), b in graph(15, 3), h in 0usize..=3) {
        let corpus = pair(&a, &b);
        let stwin = stwin_embed(&corpus, h);
        let matrix = twin_matrix_embed(&corpus, h);
        for (s, m) in stwin.iter().zip(&matrix) {
            prop_assert_eq!(&m.collapse(), &s.blocks);
        }
    }

    #[test]
    fn stwin_is_permutation_invariant((g, pi) in graph_and_perm(20, 3)) {
        let q = permute_graph(&g, &pi).unwrap();
        let e = stwin_embed(&pair(&g, &q), 3);
        prop_assert_eq!(e[0].dense(), e[1].dense());
        let m = twin_matrix_embed(&pair(&g, &q), 3);
        prop_assert_eq!(m[0].dense(), m[1].dense());
    }

    #[test]
    fn ntwin_is_permutation_invariant((g, pi) in graph_and_perm(12, 3), seed in any::<u64>()) {
        let q = permute_graph(&g, &pi).unwrap();
        let cfg = NtwinConfig { layers: 2, hidden: 8, rounds_per_layer: None, seed };
        let r = wl_refine(&pair(&g, &q), cfg.layers);
        let params = NtwinParams::for_dictionary(&cfg, r.dictionary()).unwrap();
        let eg = ntwin_embed(&g, r.dictionary(), &cfg, &params).unwrap();
        let eq = ntwin_embed(&q, r.dictionary(), &cfg, &params).unwrap();
        prop_assert_eq!(&eg.widths, &eq.widths);
        for (k, &(d1, d2)) in eg.widths.iter().enumerate() {
            prop_assert_eq!(d1, r.dictionary().size(k + 1) + 1);
            prop_assert_eq!(d2, cfg.hidden);
            prop_assert_eq!(eg.layers[k].len(), d1 + d2);
        }
        for (x, y) in eg.vector().iter().zip(eq.vector()) {
            prop_assert!((x - y).abs() <= 1e-6 * x.abs().max(y.abs()).max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn permutation_round_trip((g, pi) in graph_and_perm(30, 4)) {
        let q = permute_graph(&g, &pi).unwrap();
        prop_assert!(validate(&q).is_empty());
        prop_assert_eq!(q.degree_sequence(), g.degree_sequence());
        prop_assert_eq!(q.edge_count(), g.edge_count());
        let back = permute_graph(&q, &invert_permutation(&pi)).unwrap();
        prop_assert_eq!(back, g);
    }
}
