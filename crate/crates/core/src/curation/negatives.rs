use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{CandidatePair, CurationError, ProviderError, SimilarityProvider};

/// A report paired with the most similar source of a different pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SilverNegative {
    pub target: String,
    pub frame: String,
    pub report: String,
    pub source: String,
    /// Pair the source was borrowed from.
    pub source_pair: String,
    pub score: f64,
}

/// Picks, for `target`'s report, the source of the most similar other
/// candidate. Annotated pairs, the target itself, and candidates sharing the
/// target's source are excluded; ties go to the smallest pair id.
pub fn mine_silver_negative<P: SimilarityProvider + ?Sized>(
    target: &CandidatePair,
    pool: &[CandidatePair],
    annotated: &HashSet<String>,
    provider: &P,
) -> Result<SilverNegative, CurationError> {
    if annotated.contains(&target.id) {
        return Err(CurationError::TargetAnnotated(target.id.clone()));
    }
    let mut candidates: Vec<&CandidatePair> = pool
        .iter()
        .filter(|c| c.id != target.id && c.source != target.source && !annotated.contains(&c.id))
        .collect();
    candidates.sort_by(|a, b| a.id.cmp(&b.id));
    candidates.dedup_by(|a, b| a.id == b.id);
    if candidates.is_empty() {
        return Err(CurationError::NoCandidates(target.id.clone()));
    }

    let scores: Vec<Result<f64, ProviderError>> = candidates
        .par_iter()
        .map(|c| {
            let s = provider.similarity(&target.report, &c.source)?;
            if s.is_finite() {
                Ok(s)
            } else {
                Err(ProviderError::NonFinite {
                    report: target.report.clone(),
                    source_ref: c.source.clone(),
                })
            }
        })
        .collect();

    let mut best: Option<(f64, &CandidatePair)> = None;
    for (c, s) in candidates.iter().zip(scores) {
        let s = s?;
        // strictly greater keeps the smallest id on ties (ids ascend)
        if best.is_none_or(|(b, _)| s > b) {
            best = Some((s, c));
        }
    }
    let (score, chosen) = best.expect("candidates is non-empty");
    Ok(SilverNegative {
        target: target.id.clone(),
        frame: target.frame.clone(),
        report: target.report.clone(),
        source: chosen.source.clone(),
        source_pair: chosen.id.clone(),
        score,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiningOutcome {
    pub negatives: Vec<SilverNegative>,
    pub warnings: Vec<String>,
}

/// For each frame, draws up to `per_frame` unannotated targets (seeded) and
/// mines one silver negative for each from the same frame's pool.
pub fn mine_negatives<P: SimilarityProvider + ?Sized>(
    pool: &[CandidatePair],
    annotated: &HashSet<String>,
    provider: &P,
    per_frame: usize,
    seed: u64,
) -> Result<MiningOutcome, CurationError> {
    let mut by_frame: BTreeMap<&str, Vec<&CandidatePair>> = BTreeMap::new();
    for pair in pool {
        by_frame.entry(pair.frame.as_str()).or_default().push(pair);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut negatives = Vec::new();
    let mut warnings = Vec::new();

    for (frame, mut pairs) in by_frame {
        pairs.sort_by(|a, b| a.id.cmp(&b.id));
        let frame_pool: Vec<CandidatePair> = pairs.iter().map(|&p| p.clone()).collect();
        let mut targets: Vec<&CandidatePair> = pairs
            .iter()
            .copied()
            .filter(|p| !annotated.contains(&p.id))
            .collect();
        if targets.len() < 2 {
            warnings.push(format!(
                "frame '{frame}': {} unannotated pair(s), need at least 2",
                targets.len()
            ));
            continue;
        }
        targets.shuffle(&mut rng);
        let mut chosen: Vec<&CandidatePair> = targets.into_iter().take(per_frame).collect();
        chosen.sort_by(|a, b| a.id.cmp(&b.id));
        for target in chosen {
            match mine_silver_negative(target, &frame_pool, annotated, provider) {
                Ok(n) => negatives.push(n),
                Err(CurationError::NoCandidates(id)) => {
                    warnings.push(format!("frame '{frame}': no candidate source for '{id}'"))
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(MiningOutcome {
        negatives,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramRow {
    pub lower: f64,
    pub upper: f64,
    pub positive: usize,
    pub negative: usize,
}

/// Side-by-side histogram of two score samples over their joint range.
pub fn similarity_histogram(positive: &[f64], negative: &[f64], bins: usize) -> Vec<HistogramRow> {
    let all = positive.iter().chain(negative).copied().filter(|s| s.is_finite());
    let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
        (lo.min(s), hi.max(s))
    });
    if bins == 0 || lo > hi {
        return Vec::new();
    }
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 / bins as f64 };
    let index = |s: f64| (((s - lo) / width) as usize).min(bins - 1);
    let mut rows: Vec<HistogramRow> = (0..bins)
        .map(|b| HistogramRow {
            lower: lo + b as f64 * width,
            upper: lo + (b + 1) as f64 * width,
            positive: 0,
            negative: 0,
        })
        .collect();
    for &s in positive.iter().filter(|s| s.is_finite()) {
        rows[index(s)].positive += 1;
    }
    for &s in negative.iter().filter(|s| s.is_finite()) {
        rows[index(s)].negative += 1;
    }
    rows
}
