//! Runtime comparison of embedding methods with a Welch two-sample t-test.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::embed::{embed_corpus, EmbedError, Method};
use crate::graph::Corpus;
use crate::ntwin::NtwinConfig;

/// Lower bound on each sample variance, so identical timings stay finite.
pub const VARIANCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("unknown method {0:?}")]
    UnknownMethod(String),
    #[error("at least 2 repeats are needed, got {0}")]
    TooFewRepeats(usize),
    #[error("no methods requested")]
    NoMethods,
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodTiming {
    pub method: String,
    pub seconds: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation.
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub graphs: usize,
    pub iterations: usize,
    pub repeats: usize,
    pub methods: Vec<MethodTiming>,
    /// Welch p-value between the first two methods.
    pub p_value: Option<f64>,
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = if x.len() > 1 {
        x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// Two-sided Welch (unequal variance) t-test p-value.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> f64 {
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let sa = va.max(VARIANCE_FLOOR) / na;
    let sb = vb.max(VARIANCE_FLOOR) / nb;
    let t = (ma - mb) / (sa + sb).sqrt();
    if t == 0.0 {
        return 1.0;
    }
    let df = (sa + sb).powi(2) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
}

pub fn parse_methods(list: &str) -> Result<Vec<Method>, BenchError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| BenchError::UnknownMethod(s.to_string()))
        })
        .collect()
}

/// Times whole-corpus embedding per method. Repeats interleave the methods
/// so drift affects all of them alike.
pub fn bench_compare(
    corpus: &Corpus,
    methods: &[Method],
    repeats: usize,
    iterations: usize,
    ntwin: &NtwinConfig,
) -> Result<BenchReport, BenchError> {
    if methods.is_empty() {
        return Err(BenchError::NoMethods);
    }
    if repeats < 2 {
        return Err(BenchError::TooFewRepeats(repeats));
    }
    let mut samples = vec![Vec::with_capacity(repeats); methods.len()];
    for _ in 0..repeats {
        for (m, &method) in methods.iter().enumerate() {
            let start = Instant::now();
            let records = embed_corpus(corpus, method, iterations, ntwin)?;
            let elapsed = start.elapsed().as_secs_f64();
            std::hint::black_box(records);
            samples[m].push(elapsed);
        }
    }
    let timings: Vec<MethodTiming> = methods
        .iter()
        .zip(samples)
        .map(|(m, seconds)| {
            let (mean, var) = mean_var(&seconds);
            MethodTiming {
                method: m.name().to_string(),
                mean,
                std: var.sqrt(),
                seconds,
            }
        })
        .collect();
    let p_value =
        (timings.len() >= 2).then(|| welch_t_test(&timings[0].seconds, &timings[1].seconds));
    Ok(BenchReport {
        graphs: corpus.len(),
        iterations,
        repeats,
        methods: timings,
        p_value,
    })
}
