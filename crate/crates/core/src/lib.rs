//! Weisfeiler-Leman refinement and identity-ball ("twin") refinement for
//! graph isomorphism testing and graph embeddings, with a small neural
//! variant and an MLP classifier.

pub mod bench;
pub mod embed;
pub mod graph;
pub mod io;
pub mod mlp;
pub mod ntwin;
pub mod rng;
pub mod twin;
pub mod wl;

pub use embed::{embed_corpus, EmbedError, Method};
pub use graph::{build_graph, permute_graph, validate, Corpus, Graph, GraphError};
pub use twin::{ball_size_profile, stwin_embed, twin_iso_test, twin_matrix_embed, IsoDecision};
pub use wl::{wl_iso_test, wl_refine, LabelDictionary, WlRefinement};
