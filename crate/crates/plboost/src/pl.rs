//! Plackett-Luce distributions over top-K rankings.
//!
//! Scores are log-scores: a document's placement probability at each rank
//! is its exponentiated score over the exponentiated scores of all not yet
//! placed documents. Sampling uses the Gumbel top-K trick: perturb every
//! score with independent Gumbel noise and take the K largest keys.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Uniform draws are clamped to this band before the double-log transform
/// so Gumbel keys stay finite.
const UNIFORM_CLAMP: f64 = 1e-12;

/// One top-K ranking drawn from (or fed to) a PL model.
///
/// `rank_of` holds the 1-based rank for ranked documents and is capped at
/// `k_eff` for the rest, which makes the cumulative-term lookups of the
/// derivative estimators plain array reads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledRanking {
    /// Ranked document indices, best first; length `min(K, n_docs)`.
    pub docs: Vec<usize>,
    /// 1-based rank per document, capped at `k_eff` for unranked documents.
    pub rank_of: Vec<usize>,
    /// Whether each document appears in `docs`.
    pub in_topk: Vec<bool>,
}

impl SampledRanking {
    /// Build from an ordered prefix of distinct document indices.
    pub fn from_docs(docs: Vec<usize>, n_docs: usize) -> Result<Self> {
        let k_eff = docs.len();
        if k_eff == 0 || k_eff > n_docs {
            return Err(Error::Contract(format!(
                "ranking length {k_eff} invalid for {n_docs} documents"
            )));
        }
        let mut rank_of = vec![k_eff; n_docs];
        let mut in_topk = vec![false; n_docs];
        for (pos, &d) in docs.iter().enumerate() {
            if d >= n_docs {
                return Err(Error::Contract(format!("document index {d} out of range")));
            }
            if in_topk[d] {
                return Err(Error::Contract(format!("document {d} appears twice")));
            }
            rank_of[d] = pos + 1;
            in_topk[d] = true;
        }
        Ok(Self { docs, rank_of, in_topk })
    }

    pub fn k_eff(&self) -> usize {
        self.docs.len()
    }

    pub fn n_docs(&self) -> usize {
        self.rank_of.len()
    }
}

fn check_scores(scores: &[f64]) -> Result<()> {
    if scores.is_empty() {
        return Err(Error::Contract("empty score vector".into()));
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::Contract(format!("non-finite score {bad}")));
    }
    Ok(())
}

/// Probability that document `d` is placed next given the already placed
/// `prefix`: `exp(m_d) / sum_{d' not in prefix} exp(m_d')`, 0 if `d` is in
/// the prefix. Computed with a max shift for overflow safety.
pub fn placement_prob(scores: &[f64], prefix: &[usize], d: usize) -> Result<f64> {
    check_scores(scores)?;
    let n = scores.len();
    if d >= n {
        return Err(Error::Contract(format!("document index {d} out of range")));
    }
    let mut placed = vec![false; n];
    for &p in prefix {
        if p >= n {
            return Err(Error::Contract(format!("prefix index {p} out of range")));
        }
        if placed[p] {
            return Err(Error::Contract(format!("document {p} appears twice in prefix")));
        }
        placed[p] = true;
    }
    if prefix.len() >= n {
        return Err(Error::Domain("prefix already covers all documents".into()));
    }
    if placed[d] {
        return Ok(0.0);
    }
    let shift = scores
        .iter()
        .zip(placed.iter())
        .filter(|(_, &taken)| !taken)
        .map(|(&s, _)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    let denom: f64 = scores
        .iter()
        .zip(placed.iter())
        .filter(|(_, &taken)| !taken)
        .map(|(&s, _)| (s - shift).exp())
        .sum();
    Ok((scores[d] - shift).exp() / denom)
}

/// Probability of an ordered top-K prefix under the PL model: the product
/// of its placement probabilities.
pub fn ranking_prob(scores: &[f64], docs: &[usize]) -> Result<f64> {
    check_scores(scores)?;
    let ranking = SampledRanking::from_docs(docs.to_vec(), scores.len())?;
    let mut prob = 1.0;
    for k in 0..ranking.k_eff() {
        prob *= placement_prob(scores, &docs[..k], docs[k])?;
    }
    Ok(prob)
}

/// Standard Gumbel noise from a uniform draw, clamped away from 0 and 1.
pub fn gumbel_from_uniform(u: f64) -> f64 {
    let u = u.clamp(UNIFORM_CLAMP, 1.0 - UNIFORM_CLAMP);
    -(-u.ln()).ln()
}

/// Indices of the `k` largest keys in descending key order, ties broken by
/// ascending index. Full sort for small inputs, partial selection otherwise.
fn topk_indices(keys: &[f64], k: usize) -> Vec<usize> {
    let n = keys.len();
    let k = k.min(n);
    let mut idx: Vec<usize> = (0..n).collect();
    let desc = |&a: &usize, &b: &usize| keys[b].total_cmp(&keys[a]).then(a.cmp(&b));
    if n <= 2 * k {
        idx.sort_unstable_by(desc);
        idx.truncate(k);
    } else {
        idx.select_nth_unstable_by(k - 1, desc);
        idx.truncate(k);
        idx.sort_unstable_by(desc);
    }
    idx
}

/// Draw one top-K ranking by Gumbel perturbation, reusing a key buffer.
fn sample_one<R: Rng>(scores: &[f64], k: usize, rng: &mut R, keys: &mut Vec<f64>) -> SampledRanking {
    let n = scores.len();
    keys.clear();
    keys.extend(scores.iter().map(|&m| m + gumbel_from_uniform(rng.gen::<f64>())));
    let docs = topk_indices(keys, k);
    let k_eff = docs.len();
    let mut rank_of = vec![k_eff; n];
    let mut in_topk = vec![false; n];
    for (pos, &d) in docs.iter().enumerate() {
        rank_of[d] = pos + 1;
        in_topk[d] = true;
    }
    SampledRanking { docs, rank_of, in_topk }
}

/// Draw `n_samples` independent top-K rankings from the PL model.
pub fn sample_rankings<R: Rng>(
    scores: &[f64],
    k: usize,
    n_samples: usize,
    rng: &mut R,
) -> Result<Vec<SampledRanking>> {
    check_scores(scores)?;
    if k == 0 || n_samples == 0 {
        return Err(Error::Domain("K and sample count must be >= 1".into()));
    }
    let mut keys = Vec::with_capacity(scores.len());
    Ok((0..n_samples).map(|_| sample_one(scores, k, rng, &mut keys)).collect())
}

/// Iterator-style sampler that reuses its buffers between draws.
pub struct RankingSampler<'a, R: Rng> {
    scores: &'a [f64],
    k: usize,
    rng: R,
    keys: Vec<f64>,
}

impl<'a, R: Rng> RankingSampler<'a, R> {
    pub fn new(scores: &'a [f64], k: usize, rng: R) -> Result<Self> {
        check_scores(scores)?;
        if k == 0 {
            return Err(Error::Domain("K must be >= 1".into()));
        }
        Ok(Self { scores, k, rng, keys: Vec::with_capacity(scores.len()) })
    }

    pub fn draw(&mut self) -> SampledRanking {
        sample_one(self.scores, self.k, &mut self.rng, &mut self.keys)
    }
}

/// Deterministic per-query RNG stream derived from a master seed, an opaque
/// query key, and a round index. Stable FNV-1a over the inputs plus a
/// splitmix finalizer, so parallel per-query sampling is reproducible
/// regardless of scheduling.
pub fn query_rng(master_seed: u64, qid: &str, round: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master_seed, qid, round))
}

fn derive_seed(master_seed: u64, qid: &str, round: u64) -> u64 {
    const FNV_OFFSET: u64 = 0xcbf29ce484222325;
    const FNV_PRIME: u64 = 0x100000001b3;
    let mut h = FNV_OFFSET;
    for byte in master_seed
        .to_le_bytes()
        .into_iter()
        .chain(qid.bytes())
        .chain([0xff])
        .chain(round.to_le_bytes())
    {
        h ^= byte as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    // splitmix64 finalizer
    h = h.wrapping_add(0x9e3779b97f4a7c15);
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d049bb133111eb);
    h ^ (h >> 31)
}
