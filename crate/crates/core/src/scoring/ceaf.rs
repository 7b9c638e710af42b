//! CEAF-RME: role-constrained alignment of predicted mentions against
//! reference entities.
//!
//! Each predicted mention is a singleton entity and takes credit from its
//! best same-role reference entity; several predictions may align to one
//! reference. Each reference entity is credited with its best prediction,
//! capped at one. Precision divides the first sum by the number of predicted
//! mentions, recall the second by the number of reference entities, both
//! micro-aggregated over roles and examples.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExactSum, Prf, ScoringError};
use crate::model::{
    ArgumentEntity, CdaeExample, FrameOntology, PredictionSet, RoleEntities, Side, TokenSpan,
};
use crate::simtext::{Matcher, SimilarityError};

/// Exact match (the φ3 variant) or edit-distance soft match (the `a` variant).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    Exact,
    Soft,
}

impl MatchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchMode::Exact => "exact",
            MatchMode::Soft => "soft",
        }
    }
}

/// Score against the annotated mention only, or the whole coreference
/// cluster of each reference entity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RefMode {
    Mention,
    Cluster,
}

impl RefMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RefMode::Mention => "mention",
            RefMode::Cluster => "cluster",
        }
    }

    /// Restricts an entity to what this mode scores against.
    pub fn view(self, entity: &ArgumentEntity) -> ArgumentEntity {
        match self {
            RefMode::Cluster => entity.clone(),
            RefMode::Mention => ArgumentEntity {
                role: entity.role.clone(),
                side: entity.side,
                mentions: entity.mentions.iter().take(1).cloned().collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CeafSettings {
    pub side: Side,
    #[serde(rename = "match")]
    pub mode: MatchMode,
    pub refs: RefMode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignedMention {
    pub start: usize,
    pub end: usize,
    pub tokens: Vec<String>,
    /// Index of the best same-role reference entity; `None` when no entity
    /// gives any credit.
    pub entity: Option<usize>,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoleAlignment {
    pub predicted: usize,
    pub references: usize,
    pub precision_num: f64,
    pub recall_num: f64,
    pub mentions: Vec<AlignedMention>,
}

fn pair_similarity(
    p: &TokenSpan,
    entity: &ArgumentEntity,
    mode: MatchMode,
    matcher: &Matcher,
) -> Result<f64, SimilarityError> {
    match mode {
        MatchMode::Exact => {
            let hit = entity.mentions.iter().any(|m| {
                if p.foreign || m.foreign {
                    matcher.surfaces_equal(&p.surface, &m.surface)
                } else {
                    m.offsets() == p.offsets()
                }
            });
            Ok(if hit { 1.0 } else { 0.0 })
        }
        MatchMode::Soft => Ok(matcher.entity_similarity(&p.surface, entity)?.value()),
    }
}

/// Aligns the predictions and reference entities of a single role.
pub fn align_role(
    preds: &[TokenSpan],
    refs: &[ArgumentEntity],
    mode: MatchMode,
    matcher: &Matcher,
) -> Result<RoleAlignment, SimilarityError> {
    let mut entity_best = vec![0.0f64; refs.len()];
    let mut mentions = Vec::with_capacity(preds.len());
    for p in preds {
        let mut best: (f64, Option<usize>) = (0.0, None);
        for (ci, entity) in refs.iter().enumerate() {
            let s = pair_similarity(p, entity, mode, matcher)?;
            if s > best.0 {
                best = (s, Some(ci));
            }
            if s > entity_best[ci] {
                entity_best[ci] = s;
            }
        }
        mentions.push(AlignedMention {
            start: p.start,
            end: p.end,
            tokens: p.surface.clone(),
            entity: best.1,
            similarity: best.0,
        });
    }
    let precision_num: ExactSum = mentions.iter().map(|m| m.similarity).collect();
    let recall_num: ExactSum = entity_best.into_iter().map(|s| s.min(1.0)).collect();
    Ok(RoleAlignment {
        predicted: preds.len(),
        references: refs.len(),
        precision_num: precision_num.value(),
        recall_num: recall_num.value(),
        mentions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleCeaf {
    pub id: String,
    pub precision_num: f64,
    pub precision_den: f64,
    pub recall_num: f64,
    pub recall_den: f64,
    pub roles: BTreeMap<String, RoleAlignment>,
}

impl ExampleCeaf {
    pub fn prf(&self) -> Prf {
        Prf::from_counts(
            self.precision_num,
            self.precision_den,
            self.recall_num,
            self.recall_den,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CeafReport {
    pub settings: CeafSettings,
    pub prf: Prf,
    pub examples: Vec<ExampleCeaf>,
    pub warnings: Vec<String>,
}

impl CeafReport {
    /// Micro-aggregates a subset of the per-example rows.
    pub fn aggregate<'a>(rows: impl IntoIterator<Item = &'a ExampleCeaf>) -> Prf {
        let [pn, pd, rn, rd] = Self::totals(rows).map(ExactSum::value);
        Prf::from_counts(pn, pd, rn, rd)
    }

    /// Exact precision and recall numerator/denominator totals of `rows`.
    pub fn totals<'a>(rows: impl IntoIterator<Item = &'a ExampleCeaf>) -> [ExactSum; 4] {
        let mut sums = [ExactSum::default(); 4];
        for row in rows {
            sums[0] += ExactSum::of(row.precision_num);
            sums[1] += ExactSum::of(row.precision_den);
            sums[2] += ExactSum::of(row.recall_num);
            sums[3] += ExactSum::of(row.recall_den);
        }
        sums
    }
}

fn score_example(
    example: &CdaeExample,
    prediction: Option<&PredictionSet>,
    settings: CeafSettings,
    matcher: &Matcher,
    ontology: Option<&FrameOntology>,
) -> Result<(ExampleCeaf, Vec<String>), ScoringError> {
    let mut warnings = Vec::new();
    let gold: &RoleEntities = example.refs(settings.side);
    let frame_roles = match ontology {
        Some(o) => match o.roles(example.frame()) {
            Some(roles) => Some(roles),
            None => {
                warnings.push(format!(
                    "example {}: frame '{}' not in ontology; role checks skipped",
                    example.id,
                    example.frame()
                ));
                None
            }
        },
        None => None,
    };

    let empty = BTreeMap::new();
    let predicted = prediction.map_or(&empty, |p| &p.args);
    let roles: BTreeSet<&String> = gold.keys().chain(predicted.keys()).collect();

    let mut row = ExampleCeaf {
        id: example.id.clone(),
        precision_num: 0.0,
        precision_den: 0.0,
        recall_num: 0.0,
        recall_den: 0.0,
        roles: BTreeMap::new(),
    };
    let mut sums = [ExactSum::default(); 4];
    for role in roles {
        let preds = predicted.get(role).map_or(&[][..], Vec::as_slice);
        let refs: Vec<ArgumentEntity> = gold
            .get(role)
            .map(|ents| ents.iter().map(|e| settings.refs.view(e)).collect())
            .unwrap_or_default();
        let allowed = frame_roles.is_none_or(|rs| rs.iter().any(|r| r == role));
        let alignment = if allowed {
            align_role(preds, &refs, settings.mode, matcher)?
        } else {
            if !preds.is_empty() {
                warnings.push(format!(
                    "example {}: predicted role '{role}' is not in frame '{}'; {} mention(s) counted unmatched",
                    example.id,
                    example.frame(),
                    preds.len()
                ));
            }
            let mut a = align_role(preds, &[], settings.mode, matcher)?;
            a.references = refs.len();
            a
        };
        sums[0] += ExactSum::of(alignment.precision_num);
        sums[1] += ExactSum::of(alignment.predicted as f64);
        sums[2] += ExactSum::of(alignment.recall_num);
        sums[3] += ExactSum::of(alignment.references as f64);
        row.roles.insert(role.clone(), alignment);
    }
    [row.precision_num, row.precision_den, row.recall_num, row.recall_den] =
        sums.map(ExactSum::value);
    Ok((row, warnings))
}

/// Scores predictions for one document side against the gold corpus.
///
/// Gold examples without a prediction set score as empty predictions.
/// Prediction sets for the other side are ignored.
pub fn score_ceaf_rme(
    gold: &[CdaeExample],
    preds: &[PredictionSet],
    settings: CeafSettings,
    matcher: &Matcher,
    ontology: Option<&FrameOntology>,
) -> Result<CeafReport, ScoringError> {
    let known: HashMap<&str, &CdaeExample> = gold.iter().map(|g| (g.id.as_str(), g)).collect();
    let mut by_id: HashMap<&str, &PredictionSet> = HashMap::new();
    let mut unknown: Vec<&str> = Vec::new();
    for p in preds.iter().filter(|p| p.side == settings.side) {
        if !known.contains_key(p.example_id.as_str()) {
            unknown.push(&p.example_id);
            continue;
        }
        if by_id.insert(&p.example_id, p).is_some() {
            return Err(ScoringError::DuplicatePrediction {
                id: p.example_id.clone(),
                side: p.side,
            });
        }
    }
    if let Some(id) = unknown.into_iter().min() {
        return Err(ScoringError::UnknownExample(id.to_string()));
    }

    let mut ordered: Vec<&CdaeExample> = gold.iter().collect();
    ordered.sort_by(|a, b| a.id.cmp(&b.id));

    let scored: Vec<(ExampleCeaf, Vec<String>)> = ordered
        .par_iter()
        .map(|ex| {
            score_example(
                ex,
                by_id.get(ex.id.as_str()).copied(),
                settings,
                matcher,
                ontology,
            )
        })
        .collect::<Result<_, _>>()?;

    let mut examples = Vec::with_capacity(scored.len());
    let mut warnings = Vec::new();
    for (row, w) in scored {
        examples.push(row);
        warnings.extend(w);
    }
    let prf = CeafReport::aggregate(&examples);
    Ok(CeafReport {
        settings,
        prf,
        examples,
        warnings,
    })
}
