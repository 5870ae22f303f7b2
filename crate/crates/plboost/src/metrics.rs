//! Rank weights, relevance gains, and DCG@K / NDCG@K evaluation.
//!
//! A ranking metric here is a weighted sum over the top `K` displayed
//! positions: position `k` carries weight `1/log2(k+1)` and a document
//! with integer grade `l` contributes a gain of either `2^l - 1`
//! (exponential) or `l` (identity).

use crate::data::Dataset;
use crate::error::{Error, Result};

/// How integer relevance grades map to real-valued gains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainMode {
    /// `2^label - 1`, the standard graded-NDCG mapping.
    Exponential,
    /// `label` as-is.
    Identity,
}

impl GainMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            GainMode::Exponential => "exponential",
            GainMode::Identity => "identity",
        }
    }
}

impl std::str::FromStr for GainMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exponential" => Ok(GainMode::Exponential),
            "identity" => Ok(GainMode::Identity),
            other => Err(Error::Config(format!(
                "unknown gain mode {other:?} (expected \"exponential\" or \"identity\")"
            ))),
        }
    }
}

/// Cutoff and gain mapping for metric evaluation.
#[derive(Debug, Clone, Copy)]
pub struct MetricConfig {
    pub k: usize,
    pub gain_mode: GainMode,
}

impl MetricConfig {
    pub fn new(k: usize, gain_mode: GainMode) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("metric cutoff K must be >= 1".into()));
        }
        Ok(Self { k, gain_mode })
    }
}

/// Per-rank weights up to the cutoff; positions beyond the cutoff weigh 0.
#[derive(Debug, Clone)]
pub struct RankWeights {
    theta: Vec<f64>,
}

impl RankWeights {
    /// DCG weights `1/log2(k+1)` for ranks `1..=k`.
    pub fn dcg(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("rank weight cutoff K must be >= 1".into()));
        }
        let theta = (1..=k).map(|rank| 1.0 / ((rank as f64) + 1.0).log2()).collect();
        Ok(Self { theta })
    }

    pub fn cutoff(&self) -> usize {
        self.theta.len()
    }

    /// Weight of 1-based rank `k`; 0 beyond the cutoff.
    pub fn at(&self, k: usize) -> f64 {
        debug_assert!(k >= 1, "rank indices are 1-based");
        self.theta.get(k - 1).copied().unwrap_or(0.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }
}

/// DCG weight of 1-based rank `k` under cutoff `cutoff`: `1/log2(k+1)` if
/// `k <= cutoff`, else 0.
pub fn rank_weight(k: usize, cutoff: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("rank index must be >= 1".into()));
    }
    if k > cutoff {
        return Ok(0.0);
    }
    Ok(1.0 / ((k as f64) + 1.0).log2())
}

/// Gain of an integer relevance grade.
pub fn gain(label: u32, mode: GainMode) -> f64 {
    match mode {
        GainMode::Exponential => 2f64.powi(label as i32) - 1.0,
        GainMode::Identity => label as f64,
    }
}

/// DCG@K of a list of labels already in displayed order.
pub fn dcg_at_k(ordered_labels: &[u32], config: &MetricConfig) -> f64 {
    let take = config.k.min(ordered_labels.len());
    ordered_labels[..take]
        .iter()
        .enumerate()
        .map(|(i, &label)| gain(label, config.gain_mode) / ((i as f64) + 2.0).log2())
        .sum()
}

/// Descending score order with ties broken by ascending document index.
pub fn sort_by_score_desc(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// NDCG@K of `scores` against `labels`. Returns `None` when every label is
/// zero (the ideal DCG vanishes and the ratio is undefined).
pub fn ndcg_at_k(scores: &[f64], labels: &[u32], config: &MetricConfig) -> Result<Option<f64>> {
    if scores.len() != labels.len() {
        return Err(Error::Contract(format!(
            "scores ({}) and labels ({}) differ in length",
            scores.len(),
            labels.len()
        )));
    }
    if labels.iter().all(|&l| l == 0) {
        return Ok(None);
    }
    let order = sort_by_score_desc(scores);
    let ranked: Vec<u32> = order.iter().map(|&d| labels[d]).collect();

    let mut ideal = labels.to_vec();
    ideal.sort_unstable_by(|a, b| b.cmp(a));

    Ok(Some(dcg_at_k(&ranked, config) / dcg_at_k(&ideal, config)))
}

/// Mean NDCG over a corpus, with all-zero-label queries skipped.
#[derive(Debug, Clone, Copy)]
pub struct NdcgSummary {
    pub mean: f64,
    pub evaluated: usize,
    pub skipped: usize,
}

/// Mean per-query NDCG@K over queries with at least one positive label.
///
/// `scores` must hold one score per document in dataset order.
pub fn mean_ndcg(dataset: &Dataset, scores: &[f64], config: &MetricConfig) -> Result<NdcgSummary> {
    if scores.len() != dataset.n_docs() {
        return Err(Error::Contract(format!(
            "score vector length {} does not match document count {}",
            scores.len(),
            dataset.n_docs()
        )));
    }
    let mut sum = 0.0;
    let mut evaluated = 0;
    let mut skipped = 0;
    let mut offset = 0;
    for group in &dataset.groups {
        let n = group.n_docs();
        let query_scores = &scores[offset..offset + n];
        match ndcg_at_k(query_scores, &group.labels, config)? {
            Some(v) => {
                sum += v;
                evaluated += 1;
            }
            None => skipped += 1,
        }
        offset += n;
    }
    let mean = if evaluated > 0 { sum / evaluated as f64 } else { 0.0 };
    Ok(NdcgSummary { mean, evaluated, skipped })
}
