//! Annotation-batch curation: how many pairs to annotate per frame, which
//! pairs to pick, and how to build silver negatives from unannotated ones.

mod kmeans;
mod negatives;
mod plan;
pub mod provider;
mod sample;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use kmeans::{kmeans, KMeans, MAX_ITERATIONS};
pub use negatives::{
    mine_negatives, mine_silver_negative, similarity_histogram, HistogramRow, MiningOutcome,
    SilverNegative,
};
pub use plan::{plan, plan_sample_size, FrameStats, SamplingPlan, MIN_SUPPORT, TARGET_POSITIVES};
pub use provider::{FileProvider, HttpProvider, ProviderError, RetryPolicy, SimilarityProvider};
pub use sample::{attach_embeddings, stratified_sample, Sample, CANDIDATE_CAP};

#[derive(Debug, Error)]
pub enum CurationError {
    #[error("{name} must be in (0, 1], got {value}")]
    InvalidRate { name: &'static str, value: f64 },
    #[error("planned sample size for frame '{0}' does not fit in 32 bits")]
    PlanOverflow(String),
    #[error("cannot form {k} clusters from {n} vectors")]
    InvalidK { k: usize, n: usize },
    #[error("vector {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        index: usize,
    },
    #[error("candidate pool is empty")]
    EmptyPool,
    #[error("candidate '{0}' has no embedding")]
    MissingEmbedding(String),
    #[error("no candidate source left for target '{0}' after exclusions")]
    NoCandidates(String),
    #[error("target '{0}' is an annotated example")]
    TargetAnnotated(String),
    #[error(transparent)]
    Provider(#[from] ProviderError),
}

/// One (report, source) pair from the candidate pool of a frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePair {
    pub id: String,
    pub frame: String,
    /// Reference to the report document.
    pub report: String,
    /// Reference to the source document.
    pub source: String,
    /// Lemma of the report trigger.
    pub lemma: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_text: Option<String>,
}

/// The opening `n` sentences of `text`, where a sentence ends at `.`, `!`
/// or `?` followed by whitespace.
pub fn leading_sentences(text: &str, n: usize) -> &str {
    if n == 0 {
        return "";
    }
    let mut seen = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            if let Some(&(_, next)) = chars.peek() {
                if next.is_whitespace() {
                    seen += 1;
                    if seen == n {
                        return &text[..i + c.len_utf8()];
                    }
                }
            }
        }
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_five_sentences() {
        let text = "One. Two! Three? Four. Five. Six. Seven.";
        assert_eq!(leading_sentences(text, 5), "One. Two! Three? Four. Five.");
        assert_eq!(leading_sentences("No terminator here", 5), "No terminator here");
        assert_eq!(leading_sentences("Dr.Who went. Home.", 1), "Dr.Who went.");
        assert_eq!(leading_sentences("a. b.", 0), "");
    }
}
