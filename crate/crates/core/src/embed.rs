//! Corpus-level embedding by method name, producing feature records.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::Corpus;
use crate::io::FeatureRecord;
use crate::ntwin::{ntwin_embed, NtwinConfig, NtwinError, NtwinParams};
use crate::twin::{matrix_from_run, stwin_from_run, TwinRefinement};
use crate::wl::wl_refine;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Wl,
    Stwin,
    StwinMatrix,
    Ntwin,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error("unknown method {0:?} (expected wl, stwin, stwin-matrix or ntwin)")]
    UnknownMethod(String),
    #[error(transparent)]
    Ntwin(#[from] NtwinError),
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Wl => "wl",
            Method::Stwin => "stwin",
            Method::StwinMatrix => "stwin-matrix",
            Method::Ntwin => "ntwin",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = EmbedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "wl" => Ok(Method::Wl),
            "stwin" => Ok(Method::Stwin),
            "stwin-matrix" => Ok(Method::StwinMatrix),
            "ntwin" => Ok(Method::Ntwin),
            other => Err(EmbedError::UnknownMethod(other.to_string())),
        }
    }
}

/// Embeds every graph of the corpus. `iterations` is the refinement depth
/// for the counting methods; NTwin uses `ntwin.layers` instead.
pub fn embed_corpus(
    corpus: &Corpus,
    method: Method,
    iterations: usize,
    ntwin: &NtwinConfig,
) -> Result<Vec<FeatureRecord>, EmbedError> {
    let to_f64 = |v: Vec<u64>| v.into_iter().map(|x| x as f64).collect::<Vec<f64>>();
    let record = |gi: usize, iterations: usize, dense: Vec<f64>| {
        let g = &corpus.graphs()[gi];
        FeatureRecord {
            graph_id: g.id().to_string(),
            method: method.name().to_string(),
            iterations,
            dense,
            label: g.graph_label(),
        }
    };
    let records = match method {
        Method::Wl => {
            let r = wl_refine(corpus, iterations);
            (0..corpus.len())
                .map(|gi| record(gi, iterations, to_f64(r.dense_histogram(gi))))
                .collect()
        }
        Method::Stwin => {
            let run = TwinRefinement::run(corpus, iterations);
            stwin_from_run(corpus, &run)
                .into_iter()
                .enumerate()
                .map(|(gi, e)| record(gi, iterations, to_f64(e.dense())))
                .collect()
        }
        Method::StwinMatrix => {
            let run = TwinRefinement::run(corpus, iterations);
            matrix_from_run(corpus, &run)
                .into_iter()
                .enumerate()
                .map(|(gi, e)| record(gi, iterations, to_f64(e.dense())))
                .collect()
        }
        Method::Ntwin => {
            let r = wl_refine(corpus, ntwin.layers);
            let params = NtwinParams::for_dictionary(ntwin, r.dictionary())?;
            corpus
                .graphs()
                .iter()
                .enumerate()
                .map(|(gi, g)| {
                    let rep = ntwin_embed(g, r.dictionary(), ntwin, &params)?;
                    Ok(record(gi, ntwin.layers, rep.vector()))
                })
                .collect::<Result<_, NtwinError>>()?
        }
    };
    Ok(records)
}
