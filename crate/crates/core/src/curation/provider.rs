//! Similarity and embedding providers.
//!
//! The retrieval model that scores (report, source) pairs and the encoder
//! that embeds source openings are external systems. Pipelines talk to them
//! through [`SimilarityProvider`]; two implementations ship here, one backed
//! by precomputed files and one speaking JSON over HTTP.
//!
//! HTTP protocol (both `POST`, JSON bodies):
//!
//! - `{base}/similarity` with `{"report": ref, "source": ref}` answers
//!   `{"score": number}`
//! - `{base}/embed` with `{"id": ref, "text": string}` answers
//!   `{"vector": [number, ...]}`

use std::collections::HashMap;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::records::{read_all, RecordError};

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("no similarity score for report '{report}' and source '{source_ref}'")]
    MissingScore { report: String, source_ref: String },
    #[error("no embedding for '{0}'")]
    MissingEmbedding(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("provider returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed provider response: {0}")]
    Decode(String),
    #[error("provider returned a non-finite score for ({report}, {source_ref})")]
    NonFinite { report: String, source_ref: String },
    #[error("giving up after {attempts} attempts: {last}")]
    Exhausted {
        attempts: u32,
        #[source]
        last: Box<ProviderError>,
    },
    #[error(transparent)]
    Records(#[from] RecordError),
}

impl ProviderError {
    /// Transport failures, throttling and server errors are worth retrying.
    pub fn is_retryable(&self) -> bool {
        match self {
            ProviderError::Transport(_) => true,
            ProviderError::Status { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

pub trait SimilarityProvider: Sync {
    /// Similarity of a report (the query) to a source document.
    fn similarity(&self, report_ref: &str, source_ref: &str) -> Result<f64, ProviderError>;

    /// Embedding of `text`; `key` identifies the document it came from.
    fn embed(&self, key: &str, text: &str) -> Result<Vec<f64>, ProviderError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub report: String,
    pub source: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRecord {
    pub id: String,
    pub vector: Vec<f64>,
}

/// Precomputed scores keyed by (report, source) and vectors keyed by
/// document reference.
#[derive(Debug, Clone, Default)]
pub struct FileProvider {
    scores: HashMap<(String, String), f64>,
    embeddings: HashMap<String, Vec<f64>>,
}

impl FileProvider {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_score(&mut self, report: &str, source: &str, score: f64) {
        self.scores.insert((report.to_string(), source.to_string()), score);
    }

    pub fn insert_embedding(&mut self, key: &str, vector: Vec<f64>) {
        self.embeddings.insert(key.to_string(), vector);
    }

    pub fn load(scores: Option<&Path>, embeddings: Option<&Path>) -> Result<Self, ProviderError> {
        let mut p = FileProvider::new();
        if let Some(path) = scores {
            for r in read_all::<ScoreRecord>(path)? {
                p.insert_score(&r.report, &r.source, r.score);
            }
        }
        if let Some(path) = embeddings {
            for r in read_all::<EmbeddingRecord>(path)? {
                p.insert_embedding(&r.id, r.vector);
            }
        }
        Ok(p)
    }
}

impl SimilarityProvider for FileProvider {
    fn similarity(&self, report_ref: &str, source_ref: &str) -> Result<f64, ProviderError> {
        self.scores
            .get(&(report_ref.to_string(), source_ref.to_string()))
            .copied()
            .ok_or_else(|| ProviderError::MissingScore {
                report: report_ref.to_string(),
                source_ref: source_ref.to_string(),
            })
    }

    fn embed(&self, key: &str, _text: &str) -> Result<Vec<f64>, ProviderError> {
        self.embeddings
            .get(key)
            .cloned()
            .ok_or_else(|| ProviderError::MissingEmbedding(key.to_string()))
    }
}

/// Exponential backoff without jitter; delays are reproducible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub initial_backoff: Duration,
    pub max_backoff: Duration,
    pub multiplier: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 4,
            initial_backoff: Duration::from_millis(250),
            max_backoff: Duration::from_secs(8),
            multiplier: 2.0,
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `retry` (1-based).
    pub fn backoff(&self, retry: u32) -> Duration {
        let factor = self.multiplier.powi(retry.saturating_sub(1) as i32);
        self.initial_backoff.mul_f64(factor).min(self.max_backoff)
    }

    pub fn run<T>(&self, mut op: impl FnMut() -> Result<T, ProviderError>) -> Result<T, ProviderError> {
        let attempts = self.max_attempts.max(1);
        let mut attempt = 1;
        loop {
            match op() {
                Ok(v) => return Ok(v),
                Err(e) if !e.is_retryable() => return Err(e),
                Err(e) if attempt >= attempts => {
                    return Err(ProviderError::Exhausted {
                        attempts,
                        last: Box::new(e),
                    })
                }
                Err(e) => {
                    log::warn!("provider attempt {attempt}/{attempts} failed: {e}");
                    std::thread::sleep(self.backoff(attempt));
                    attempt += 1;
                }
            }
        }
    }
}

#[derive(Debug, Serialize)]
struct SimilarityRequest<'a> {
    report: &'a str,
    source: &'a str,
}

#[derive(Debug, Deserialize)]
struct SimilarityResponse {
    score: f64,
}

#[derive(Debug, Serialize)]
struct EmbedRequest<'a> {
    id: &'a str,
    text: &'a str,
}

#[derive(Debug, Deserialize)]
struct EmbedResponse {
    vector: Vec<f64>,
}

pub struct HttpProvider {
    base: String,
    agent: ureq::Agent,
    retry: RetryPolicy,
}

impl HttpProvider {
    pub fn new(base: impl Into<String>, timeout: Duration, retry: RetryPolicy) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        HttpProvider {
            base: base.into().trim_end_matches('/').to_string(),
            agent,
            retry,
        }
    }

    fn post<B: Serialize, R: serde::de::DeserializeOwned>(
        &self,
        path: &str,
        body: &B,
    ) -> Result<R, ProviderError> {
        let url = format!("{}/{path}", self.base);
        self.retry.run(|| {
            let mut resp = self
                .agent
                .post(&url)
                .send_json(body)
                .map_err(|e| ProviderError::Transport(e.to_string()))?;
            let status = resp.status().as_u16();
            if !(200..300).contains(&status) {
                let body = resp.body_mut().read_to_string().unwrap_or_default();
                return Err(ProviderError::Status { status, body });
            }
            resp.body_mut()
                .read_json::<R>()
                .map_err(|e| ProviderError::Decode(e.to_string()))
        })
    }
}

impl SimilarityProvider for HttpProvider {
    fn similarity(&self, report_ref: &str, source_ref: &str) -> Result<f64, ProviderError> {
        let r: SimilarityResponse = self.post(
            "similarity",
            &SimilarityRequest {
                report: report_ref,
                source: source_ref,
            },
        )?;
        Ok(r.score)
    }

    fn embed(&self, key: &str, text: &str) -> Result<Vec<f64>, ProviderError> {
        let r: EmbedResponse = self.post("embed", &EmbedRequest { id: key, text })?;
        Ok(r.vector)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;

    fn fast() -> RetryPolicy {
        RetryPolicy {
            max_attempts: 3,
            initial_backoff: Duration::from_millis(1),
            max_backoff: Duration::from_millis(2),
            multiplier: 2.0,
        }
    }

    #[test]
    fn backoff_grows_and_caps() {
        let p = RetryPolicy::default();
        assert_eq!(p.backoff(1), Duration::from_millis(250));
        assert_eq!(p.backoff(2), Duration::from_millis(500));
        assert_eq!(p.backoff(10), Duration::from_secs(8));
    }

    #[test]
    fn retries_transient_failures() {
        let calls = Cell::new(0);
        let out = fast().run(|| {
            calls.set(calls.get() + 1);
            if calls.get() < 3 {
                Err(ProviderError::Status {
                    status: 503,
                    body: String::new(),
                })
            } else {
                Ok(7)
            }
        });
        assert_eq!(out.unwrap(), 7);
        assert_eq!(calls.get(), 3);
    }

    #[test]
    fn gives_up_and_does_not_retry_client_errors() {
        let calls = Cell::new(0);
        let out: Result<(), _> = fast().run(|| {
            calls.set(calls.get() + 1);
            Err(ProviderError::Transport("refused".into()))
        });
        assert!(matches!(out, Err(ProviderError::Exhausted { attempts: 3, .. })));
        assert_eq!(calls.get(), 3);

        calls.set(0);
        let out: Result<(), _> = fast().run(|| {
            calls.set(calls.get() + 1);
            Err(ProviderError::Status {
                status: 404,
                body: String::new(),
            })
        });
        assert!(matches!(out, Err(ProviderError::Status { status: 404, .. })));
        assert_eq!(calls.get(), 1);
    }

    #[test]
    fn file_provider_lookups() {
        let mut p = FileProvider::new();
        p.insert_score("r1", "s2", 0.4);
        p.insert_embedding("s2", vec![1.0, 2.0]);
        assert_eq!(p.similarity("r1", "s2").unwrap(), 0.4);
        assert!(matches!(
            p.similarity("s2", "r1"),
            Err(ProviderError::MissingScore { .. })
        ));
        assert_eq!(p.embed("s2", "ignored").unwrap(), vec![1.0, 2.0]);
        assert!(p.embed("s9", "").is_err());
    }
}
