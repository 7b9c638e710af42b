use std::collections::BTreeMap;

use serde::Serialize;

use super::{Prf, ScoringError};
use crate::model::SvExample;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SvCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl SvCounts {
    pub fn add(&mut self, gold: bool, predicted: bool) {
        match (gold, predicted) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn merge(&mut self, other: SvCounts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
        self.tn += other.tn;
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => (self.tp + self.tn) as f64 / n as f64,
        }
    }

    /// Positive-class scores; the positive class is "valid source".
    pub fn prf(&self) -> Prf {
        Prf::from_counts(
            self.tp as f64,
            (self.tp + self.fp) as f64,
            self.tp as f64,
            (self.tp + self.fn_) as f64,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SvScores {
    pub n: u64,
    pub accuracy: f64,
    pub counts: SvCounts,
    pub prf: Prf,
}

impl From<SvCounts> for SvScores {
    fn from(counts: SvCounts) -> Self {
        SvScores {
            n: counts.total(),
            accuracy: counts.accuracy(),
            counts,
            prf: counts.prf(),
        }
    }
}

/// Scores binary source-validation decisions (`true` = valid source).
/// Predictions for ids not in `gold` are ignored.
pub fn score_sv(gold: &[SvExample], pred: &BTreeMap<String, bool>) -> Result<SvScores, ScoringError> {
    let mut missing: Vec<String> = gold
        .iter()
        .filter(|g| !pred.contains_key(&g.id))
        .map(|g| g.id.clone())
        .collect();
    if !missing.is_empty() {
        missing.sort();
        missing.dedup();
        return Err(ScoringError::MissingPredictions(missing));
    }
    let mut counts = SvCounts::default();
    for g in gold {
        counts.add(g.label.is_positive(), pred[&g.id]);
    }
    Ok(counts.into())
}
