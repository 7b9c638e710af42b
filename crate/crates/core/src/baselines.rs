//! Deterministic baselines and the report-baseline ensembling rule.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::lemma::{lemmatize, LemmaTable};
use crate::model::{CdaeExample, Label, PredictionSet, Side, SvExample};
use crate::scoring::RefMode;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("majority baseline needs at least one training label")]
    NoTrainingLabels,
    #[error("cannot ensemble predictions for '{model}' ({model_side}) with '{rb}' ({rb_side})")]
    Mismatch {
        model: String,
        model_side: Side,
        rb: String,
        rb_side: Side,
    },
}

/// Predicts the majority training label for every id; ties go to positive.
pub fn majority_baseline(
    train_labels: &[Label],
    eval_ids: &[String],
) -> Result<BTreeMap<String, bool>, BaselineError> {
    if train_labels.is_empty() {
        return Err(BaselineError::NoTrainingLabels);
    }
    let positives = train_labels.iter().filter(|l| l.is_positive()).count();
    let majority = positives * 2 >= train_labels.len();
    Ok(eval_ids.iter().map(|id| (id.clone(), majority)).collect())
}

/// Valid iff the lemma of the trigger's head (last) token occurs among the
/// lemmas of the source tokens.
pub fn lemma_baseline(example: &SvExample, table: Option<&LemmaTable>) -> bool {
    let Some(head) = example.trigger.span.surface.last() else {
        return false;
    };
    let target = lemmatize(head, table);
    example
        .source
        .tokens
        .iter()
        .any(|t| lemmatize(t, table) == target)
}

/// Lemma-baseline decisions for a whole split; the source lemma sets are
/// computed once per example.
pub fn lemma_baseline_all(
    examples: &[SvExample],
    table: Option<&LemmaTable>,
) -> BTreeMap<String, bool> {
    examples
        .iter()
        .map(|ex| {
            let decision = match ex.trigger.span.surface.last() {
                None => false,
                Some(head) => {
                    let lemmas: HashSet<String> =
                        ex.source.tokens.iter().map(|t| lemmatize(t, table)).collect();
                    lemmas.contains(&lemmatize(head, table))
                }
            };
            (ex.id.clone(), decision)
        })
        .collect()
}

/// Proposes the gold report arguments as source predictions. The spans are
/// marked foreign: their offsets index the report, so they only match
/// source references by surface.
pub fn report_baseline(example: &CdaeExample, refs: RefMode) -> PredictionSet {
    let mut out = PredictionSet::new(example.id.clone(), Side::Source);
    for (role, entities) in &example.report_refs {
        let spans: Vec<_> = entities
            .iter()
            .flat_map(|e| refs.view(e).mentions)
            .map(|m| m.into_foreign())
            .collect();
        if !spans.is_empty() {
            out.args.insert(role.clone(), spans);
        }
    }
    out
}

/// Fills every role the model left empty with the report baseline's
/// predictions; roles the model filled pass through untouched.
pub fn ensemble_rb(model: &PredictionSet, rb: &PredictionSet) -> Result<PredictionSet, BaselineError> {
    if model.example_id != rb.example_id || model.side != rb.side {
        return Err(BaselineError::Mismatch {
            model: model.example_id.clone(),
            model_side: model.side,
            rb: rb.example_id.clone(),
            rb_side: rb.side,
        });
    }
    let mut out = model.clone();
    for (role, spans) in &rb.args {
        if !model.fills(role) && !spans.is_empty() {
            out.args.insert(role.clone(), spans.clone());
        }
    }
    Ok(out)
}
