//! Agreement F1 between two argument annotations of the same document.
//!
//! Within each role, mentions are paired one-to-one to maximize the summed
//! similarity `a`. A pair adds `a` to TP and `(1 - a) / 2` to both FP and
//! FN; a leftover predicted mention adds 1 to FP and a leftover reference
//! mention adds 1 to FN. With at most one mention per role on each side
//! this is exactly the per-role TP/FP/FN sums over filled and null roles.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::Serialize;

use super::{Prf, ScoringError};
use crate::assignment::max_weight_pairing;
use crate::model::ArgumentMention;
use crate::simtext::{Matcher, NormalizedDistance};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct AgreementCounts {
    pub tp: f64,
    pub fp: f64,
    #[serde(rename = "fn")]
    pub fn_: f64,
}

impl AgreementCounts {
    pub fn prf(&self) -> Prf {
        Prf::from_counts(self.tp, self.tp + self.fp, self.tp, self.tp + self.fn_)
    }

    pub fn total(&self) -> f64 {
        self.tp + self.fp + self.fn_
    }
}

/// One paired (predicted, reference) mention and its exact contribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairContribution {
    pub role: String,
    pub predicted: usize,
    pub reference: usize,
    #[serde(serialize_with = "ratio_as_f64")]
    pub similarity: Ratio<u64>,
}

fn ratio_as_f64<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(to_f64(*r))
}

fn to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl PairContribution {
    pub fn tp(&self) -> Ratio<u64> {
        self.similarity
    }

    pub fn fp(&self) -> Ratio<u64> {
        (Ratio::from_integer(1) - self.similarity) / 2
    }

    pub fn fn_(&self) -> Ratio<u64> {
        self.fp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Agreement {
    pub counts: AgreementCounts,
    pub prf: Prf,
    pub pairs: Vec<PairContribution>,
    pub unpaired_predicted: usize,
    pub unpaired_reference: usize,
}

pub type RoleMentions = BTreeMap<String, Vec<ArgumentMention>>;

/// Agreement of `predicted` against `reference` over the roles of one
/// frame. Roles absent from a side are null on that side.
pub fn score_agreement(
    reference: &RoleMentions,
    predicted: &RoleMentions,
    frame: &str,
    frame_roles: &[String],
    matcher: &Matcher,
) -> Result<Agreement, ScoringError> {
    for role in reference.keys().chain(predicted.keys()) {
        if !frame_roles.iter().any(|r| r == role) {
            return Err(ScoringError::RoleOutsideFrame {
                role: role.clone(),
                frame: frame.to_string(),
            });
        }
    }

    let mut counts = AgreementCounts::default();
    let mut pairs = Vec::new();
    let (mut unpaired_predicted, mut unpaired_reference) = (0usize, 0usize);
    let none: Vec<ArgumentMention> = Vec::new();

    for role in frame_roles {
        let refs = reference.get(role).unwrap_or(&none);
        let preds = predicted.get(role).unwrap_or(&none);
        if refs.is_empty() && preds.is_empty() {
            continue;
        }
        let distances: Vec<Vec<NormalizedDistance>> = preds
            .iter()
            .map(|p| {
                refs.iter()
                    .map(|g| matcher.normalized(&p.span.surface, &g.span.surface))
                    .collect::<Result<_, _>>()
            })
            .collect::<Result<_, _>>()?;
        let weights: Vec<Vec<f64>> = distances
            .iter()
            .map(|row| row.iter().map(|d| d.similarity().value()).collect())
            .collect();
        let assignment = max_weight_pairing(&weights);

        for &(pi, gi) in &assignment.pairs {
            let pair = PairContribution {
                role: role.clone(),
                predicted: pi,
                reference: gi,
                similarity: distances[pi][gi].similarity_ratio(),
            };
            counts.tp += to_f64(pair.tp());
            counts.fp += to_f64(pair.fp());
            counts.fn_ += to_f64(pair.fn_());
            pairs.push(pair);
        }
        let paired = assignment.pairs.len();
        counts.fp += (preds.len() - paired) as f64;
        counts.fn_ += (refs.len() - paired) as f64;
        unpaired_predicted += preds.len() - paired;
        unpaired_reference += refs.len() - paired;
    }

    Ok(Agreement {
        prf: counts.prf(),
        counts,
        pairs,
        unpaired_predicted,
        unpaired_reference,
    })
}

/// Ids whose score is at or below the nearest-rank 25th percentile, sorted
/// by (score, id). Ties at the threshold are all included.
pub fn bottom_quartile(scores: &BTreeMap<String, f64>) -> Vec<String> {
    if scores.is_empty() {
        return Vec::new();
    }
    let mut ranked: Vec<(&String, f64)> = scores.iter().map(|(id, &s)| (id, s)).collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)));
    let values: Vec<f64> = ranked.iter().map(|r| r.1).collect();
    let threshold = crate::percentile::nearest_rank(&values, 25);
    ranked
        .into_iter()
        .take_while(|r| r.1 <= threshold)
        .map(|r| r.0.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Side, TokenSpan};

    fn roles() -> Vec<String> {
        ["Agent", "Patient", "Time", "Place"].map(String::from).to_vec()
    }

    fn mention(role: &str, text: &str) -> ArgumentMention {
        let toks: Vec<String> = text.split_whitespace().map(String::from).collect();
        ArgumentMention {
            role: role.into(),
            span: TokenSpan::with_surface(0, toks.len(), toks),
            side: Side::Source,
        }
    }

    fn annotation(items: &[(&str, &str)]) -> RoleMentions {
        let mut out = RoleMentions::new();
        for (role, text) in items {
            out.entry(role.to_string())
                .or_default()
                .push(mention(role, text));
        }
        out
    }

    fn run(r: &RoleMentions, p: &RoleMentions) -> Agreement {
        score_agreement(r, p, "F", &roles(), &Matcher::default()).unwrap()
    }

    #[test]
    fn identical_annotations_agree_fully() {
        let x = annotation(&[("Agent", "the police"), ("Time", "on Monday")]);
        let a = run(&x, &x);
        assert_eq!((a.counts.fp, a.counts.fn_), (0.0, 0.0));
        assert_eq!(a.prf.f1, 1.0);
    }

    #[test]
    fn half_similar_single_role() {
        // "the police" vs "police officers": LCS 1 -> a = 2/4
        let r = annotation(&[("Agent", "the police")]);
        let p = annotation(&[("Agent", "police officers")]);
        let a = run(&r, &p);
        assert_eq!(a.counts, AgreementCounts { tp: 0.5, fp: 0.25, fn_: 0.25 });
        for v in [a.prf.precision, a.prf.recall, a.prf.f1] {
            assert!((v - 2.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn null_prediction_is_a_false_negative() {
        let r = annotation(&[("Agent", "the police")]);
        let a = run(&r, &RoleMentions::new());
        assert_eq!(a.counts, AgreementCounts { tp: 0.0, fp: 0.0, fn_: 1.0 });
        let a = run(&RoleMentions::new(), &r);
        assert_eq!(a.counts, AgreementCounts { tp: 0.0, fp: 1.0, fn_: 0.0 });
    }

    #[test]
    fn leftovers_pay_unit_penalties() {
        let r = annotation(&[("Agent", "police"), ("Agent", "army")]);
        let p = annotation(&[("Agent", "army"), ("Agent", "police"), ("Agent", "rebels")]);
        let a = run(&r, &p);
        assert_eq!(a.pairs.len(), 2);
        assert_eq!(a.counts, AgreementCounts { tp: 2.0, fp: 1.0, fn_: 0.0 });
        assert_eq!(a.unpaired_predicted, 1);
    }

    #[test]
    fn role_outside_frame_is_rejected() {
        let r = annotation(&[("Weapon", "a knife")]);
        let err = score_agreement(&r, &r, "F", &roles(), &Matcher::default()).unwrap_err();
        assert!(matches!(err, ScoringError::RoleOutsideFrame { .. }));
    }

    #[test]
    fn pair_contributions_sum_to_one_exactly() {
        let r = annotation(&[("Agent", "a b c d e f g")]);
        let p = annotation(&[("Agent", "a x c y")]);
        let a = run(&r, &p);
        let pair = &a.pairs[0];
        assert_eq!(pair.tp() + pair.fp() + pair.fn_(), Ratio::from_integer(1));
    }

    fn ids(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn bottom_quartile_examples() {
        let s: BTreeMap<String, f64> = [("a", 0.1), ("b", 0.5), ("c", 0.9), ("d", 1.0)]
            .map(|(k, v)| (k.to_string(), v))
            .into();
        assert_eq!(bottom_quartile(&s), ids(&["a"]));

        let same: BTreeMap<String, f64> = ["x", "y", "z"].map(|k| (k.to_string(), 0.7)).into();
        assert_eq!(bottom_quartile(&same), ids(&["x", "y", "z"]));

        let eight: BTreeMap<String, f64> = (0..8).map(|i| (format!("e{i}"), i as f64 / 10.0)).collect();
        assert_eq!(bottom_quartile(&eight), ids(&["e0", "e1"]));

        let tied: BTreeMap<String, f64> = [("q", 0.2), ("p", 0.2), ("r", 0.9), ("s", 1.0)]
            .map(|(k, v)| (k.to_string(), v))
            .into();
        assert_eq!(bottom_quartile(&tied), ids(&["p", "q"]));
        assert!(bottom_quartile(&BTreeMap::new()).is_empty());
    }
}
