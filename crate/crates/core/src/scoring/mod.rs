//! Task metrics: source-validation classification scores, CEAF-RME for
//! argument extraction, and the annotation agreement F1.

mod agreement;
mod ceaf;
mod prf;
mod sv;

use thiserror::Error;

use crate::model::Side;
use crate::simtext::SimilarityError;

pub use agreement::{
    bottom_quartile, score_agreement, Agreement, AgreementCounts, PairContribution,
};
pub use ceaf::{
    align_role, score_ceaf_rme, AlignedMention, CeafReport, CeafSettings, ExampleCeaf,
    MatchMode, RefMode, RoleAlignment,
};
pub use prf::{ExactSum, Prf};
pub use sv::{score_sv, SvCounts, SvScores};

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("no prediction for {} example(s): {}", .0.len(), .0.join(", "))]
    MissingPredictions(Vec<String>),
    #[error("prediction for unknown example id '{0}'")]
    UnknownExample(String),
    #[error("more than one {side} prediction set for example '{id}'")]
    DuplicatePrediction { id: String, side: Side },
    #[error("role '{role}' is not in the role set of frame '{frame}'")]
    RoleOutsideFrame { role: String, frame: String },
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
}
