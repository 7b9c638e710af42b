//! Evaluation and dataset-curation toolkit for cross-document event
//! argument extraction and source validation.
//!
//! The crate scores two tasks: source validation (does a source document
//! describe the report's event?) and cross-document argument extraction
//! (find every argument of the event in the report and in the source). It
//! also carries the deterministic baselines, an inter-annotator agreement
//! metric, and the arithmetic used to plan and sample annotation batches.

pub mod analysis;
pub mod assignment;
pub mod baselines;
pub mod cli;
pub mod curation;
pub mod lemma;
pub mod model;
pub mod percentile;
pub mod scoring;
pub mod simtext;
