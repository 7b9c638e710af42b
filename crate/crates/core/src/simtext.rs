//! Token-level span similarity.
//!
//! `ahat` is one minus the weighted Levenshtein distance between two token
//! sequences, normalized by `(S - 1) * min(Lp, Lg) + max(Lp, Lg)` where `S`
//! is the substitution cost. With `S = 2` this equals
//! `2 * LCS / (Lp + Lg)`. Entity similarity is the best `ahat` against any
//! mention of the entity.

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::model::ArgumentEntity;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimilarityError {
    #[error("cannot compare an empty {0} span")]
    EmptySpan(Operand),
    #[error("substitution cost must be at least 1")]
    InvalidCost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operand {
    Predicted,
    Reference,
}

impl std::fmt::Display for Operand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Operand::Predicted => "predicted",
            Operand::Reference => "reference",
        })
    }
}

/// A similarity value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize)]
#[serde(transparent)]
pub struct SimilarityScore(f64);

impl SimilarityScore {
    pub const ZERO: SimilarityScore = SimilarityScore(0.0);
    pub const ONE: SimilarityScore = SimilarityScore(1.0);

    /// Clamps into `[0, 1]`; NaN becomes 0.
    pub fn new(value: f64) -> Self {
        if value.is_nan() {
            SimilarityScore(0.0)
        } else {
            SimilarityScore(value.clamp(0.0, 1.0))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EditCosts {
    pub substitution: u32,
    pub insertion: u32,
    pub deletion: u32,
}

impl Default for EditCosts {
    fn default() -> Self {
        EditCosts {
            substitution: 2,
            insertion: 1,
            deletion: 1,
        }
    }
}

impl EditCosts {
    pub fn with_substitution(substitution: u32) -> Result<Self, SimilarityError> {
        if substitution < 1 {
            return Err(SimilarityError::InvalidCost);
        }
        Ok(EditCosts {
            substitution,
            ..EditCosts::default()
        })
    }
}

/// Weighted Levenshtein distance over whole tokens using `eq` for token
/// equality.
pub fn edit_distance_by<T, F>(p: &[T], g: &[T], costs: &EditCosts, eq: F) -> u64
where
    F: Fn(&T, &T) -> bool,
{
    let (sub, ins, del) = (
        u64::from(costs.substitution),
        u64::from(costs.insertion),
        u64::from(costs.deletion),
    );
    // prev[j] = distance(p[..i], g[..j])
    let mut prev: Vec<u64> = (0..=g.len() as u64).map(|j| j * ins).collect();
    let mut cur = vec![0u64; g.len() + 1];
    for (i, pt) in p.iter().enumerate() {
        cur[0] = (i as u64 + 1) * del;
        for (j, gt) in g.iter().enumerate() {
            let diag = prev[j] + if eq(pt, gt) { 0 } else { sub };
            cur[j + 1] = diag.min(prev[j + 1] + del).min(cur[j] + ins);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[g.len()]
}

/// Case-sensitive weighted Levenshtein distance between token sequences.
pub fn token_edit_distance<S: AsRef<str>>(p: &[S], g: &[S], costs: &EditCosts) -> u64 {
    edit_distance_by(p, g, costs, |a, b| a.as_ref() == b.as_ref())
}

/// An edit distance together with the normalizer of the similarity
/// formula, so callers can recover the similarity exactly as a fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizedDistance {
    pub distance: u64,
    pub normalizer: u64,
}

impl NormalizedDistance {
    pub fn similarity(self) -> SimilarityScore {
        SimilarityScore::new(1.0 - self.distance as f64 / self.normalizer as f64)
    }

    /// `1 - distance / normalizer`, floored at zero, as an exact fraction.
    pub fn similarity_ratio(self) -> Ratio<u64> {
        let kept = self.normalizer.saturating_sub(self.distance);
        Ratio::new(kept, self.normalizer)
    }
}

/// Token comparison settings shared by the scorers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Matcher {
    pub costs: EditCosts,
    pub case_insensitive: bool,
}

impl Matcher {
    pub fn new(costs: EditCosts, case_insensitive: bool) -> Self {
        Matcher {
            costs,
            case_insensitive,
        }
    }

    pub fn tokens_equal(&self, a: &str, b: &str) -> bool {
        if self.case_insensitive {
            a == b || a.to_lowercase() == b.to_lowercase()
        } else {
            a == b
        }
    }

    pub fn surfaces_equal<A: AsRef<str>, B: AsRef<str>>(&self, a: &[A], b: &[B]) -> bool {
        a.len() == b.len()
            && a
                .iter()
                .zip(b)
                .all(|(x, y)| self.tokens_equal(x.as_ref(), y.as_ref()))
    }

    pub fn normalized<A: AsRef<str>, B: AsRef<str>>(
        &self,
        p: &[A],
        g: &[B],
    ) -> Result<NormalizedDistance, SimilarityError> {
        if p.is_empty() {
            return Err(SimilarityError::EmptySpan(Operand::Predicted));
        }
        if g.is_empty() {
            return Err(SimilarityError::EmptySpan(Operand::Reference));
        }
        let distance = if self.case_insensitive {
            let lp: Vec<String> = p.iter().map(|t| t.as_ref().to_lowercase()).collect();
            let lg: Vec<String> = g.iter().map(|t| t.as_ref().to_lowercase()).collect();
            token_edit_distance(&lp, &lg, &self.costs)
        } else {
            let lp: Vec<&str> = p.iter().map(AsRef::as_ref).collect();
            let lg: Vec<&str> = g.iter().map(AsRef::as_ref).collect();
            token_edit_distance(&lp, &lg, &self.costs)
        };
        let (short, long) = if p.len() <= g.len() {
            (p.len() as u64, g.len() as u64)
        } else {
            (g.len() as u64, p.len() as u64)
        };
        let normalizer = (u64::from(self.costs.substitution) - 1) * short + long;
        Ok(NormalizedDistance {
            distance,
            normalizer,
        })
    }

    pub fn ahat<A: AsRef<str>, B: AsRef<str>>(
        &self,
        p: &[A],
        g: &[B],
    ) -> Result<SimilarityScore, SimilarityError> {
        self.normalized(p, g).map(NormalizedDistance::similarity)
    }

    /// The best `ahat` between `p` and any mention of `entity`, with the
    /// index of the mention that attains it (first on ties).
    pub fn best_mention<S: AsRef<str>>(
        &self,
        p: &[S],
        entity: &ArgumentEntity,
    ) -> Result<(SimilarityScore, Option<usize>), SimilarityError> {
        if p.is_empty() {
            return Err(SimilarityError::EmptySpan(Operand::Predicted));
        }
        let mut best = (SimilarityScore::ZERO, None);
        for (i, m) in entity.mentions.iter().enumerate() {
            let s = self.ahat(p, &m.surface[..])?;
            if best.1.is_none() || s > best.0 {
                best = (s, Some(i));
            }
        }
        Ok(best)
    }

    pub fn entity_similarity<S: AsRef<str>>(
        &self,
        p: &[S],
        entity: &ArgumentEntity,
    ) -> Result<SimilarityScore, SimilarityError> {
        self.best_mention(p, entity).map(|(s, _)| s)
    }
}

/// Normalized edit-distance similarity between two non-empty spans.
pub fn ahat<A: AsRef<str>, B: AsRef<str>>(
    p: &[A],
    g: &[B],
    costs: &EditCosts,
) -> Result<SimilarityScore, SimilarityError> {
    Matcher::new(*costs, false).ahat(p, g)
}

/// Maximum `ahat` between `p` and the mentions of `entity`.
pub fn entity_similarity<S: AsRef<str>>(
    p: &[S],
    entity: &ArgumentEntity,
    costs: &EditCosts,
) -> Result<SimilarityScore, SimilarityError> {
    Matcher::new(*costs, false).entity_similarity(p, entity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Side, TokenSpan};
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn entity(mentions: &[&str]) -> ArgumentEntity {
        ArgumentEntity::new(
            "Agent",
            Side::Source,
            mentions
                .iter()
                .enumerate()
                .map(|(i, m)| TokenSpan::with_surface(i * 10, i * 10 + toks(m).len(), toks(m)))
                .collect(),
        )
    }

    // Full (n+1)x(m+1) table, written independently of the rolling-row DP.
    fn table_distance(p: &[String], g: &[String], c: &EditCosts) -> u64 {
        let (n, m) = (p.len(), g.len());
        let mut d = vec![vec![0u64; m + 1]; n + 1];
        for i in 0..=n {
            d[i][0] = i as u64 * c.deletion as u64;
        }
        for j in 0..=m {
            d[0][j] = j as u64 * c.insertion as u64;
        }
        for i in 1..=n {
            for j in 1..=m {
                let sub = if p[i - 1] == g[j - 1] { 0 } else { c.substitution as u64 };
                d[i][j] = (d[i - 1][j - 1] + sub)
                    .min(d[i - 1][j] + c.deletion as u64)
                    .min(d[i][j - 1] + c.insertion as u64);
            }
        }
        d[n][m]
    }

    #[test]
    fn distance_examples() {
        let c = EditCosts::default();
        assert_eq!(token_edit_distance(&toks("a b"), &toks("a b"), &c), 0);
        assert_eq!(token_edit_distance(&toks("president"), &toks("the president"), &c), 1);
        assert_eq!(token_edit_distance(&toks("foo"), &toks("bar"), &c), 2);
        let empty: Vec<String> = vec![];
        assert_eq!(token_edit_distance(&empty, &toks("x y"), &c), 2);
    }

    #[test]
    fn ahat_examples() {
        let c = EditCosts::default();
        assert_eq!(ahat(&toks("the president"), &toks("the president"), &c).unwrap().value(), 1.0);
        let v = ahat(&toks("president"), &toks("the president"), &c).unwrap().value();
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(ahat(&toks("foo"), &toks("bar"), &c).unwrap().value(), 0.0);
    }

    #[test]
    fn ahat_rejects_empty_operands() {
        let c = EditCosts::default();
        let empty: Vec<String> = vec![];
        assert_eq!(
            ahat(&empty, &toks("x"), &c),
            Err(SimilarityError::EmptySpan(Operand::Predicted))
        );
        assert_eq!(
            ahat(&toks("x"), &empty, &c),
            Err(SimilarityError::EmptySpan(Operand::Reference))
        );
    }

    #[test]
    fn entity_similarity_examples() {
        let c = EditCosts::default();
        let e = entity(&["Obama", "Barack Obama"]);
        assert_eq!(entity_similarity(&toks("Obama"), &e, &c).unwrap().value(), 1.0);
        // vs "Barack Obama": LCS 1 -> 2*1/4; vs "he": 0.
        let e = entity(&["Barack Obama", "he"]);
        let brute = ["Barack Obama", "he"]
            .iter()
            .map(|m| ahat(&toks("President Obama"), &toks(m), &c).unwrap().value())
            .fold(0.0, f64::max);
        let got = entity_similarity(&toks("President Obama"), &e, &c).unwrap().value();
        assert_eq!(got, brute);
        assert!((got - 0.5).abs() < 1e-12);
        assert_eq!(entity_similarity(&toks("x"), &entity(&["y"]), &c).unwrap().value(), 0.0);
    }

    #[test]
    fn substitution_cost_one_and_three() {
        let c1 = EditCosts::with_substitution(1).unwrap();
        // plain Levenshtein: one substitution, normalizer max = 2
        assert_eq!(token_edit_distance(&toks("a b"), &toks("a c"), &c1), 1);
        assert!((ahat(&toks("a b"), &toks("a c"), &c1).unwrap().value() - 0.5).abs() < 1e-12);
        let c3 = EditCosts::with_substitution(3).unwrap();
        let v = ahat(&toks("x"), &toks("y"), &c3).unwrap().value();
        assert!((0.0..=1.0).contains(&v));
        assert!(EditCosts::with_substitution(0).is_err());
    }

    #[test]
    fn case_folding_is_opt_in() {
        let strict = Matcher::default();
        let folded = Matcher::new(EditCosts::default(), true);
        assert_eq!(strict.ahat(&toks("The Court"), &toks("the court")).unwrap().value(), 0.0);
        assert_eq!(folded.ahat(&toks("The Court"), &toks("the court")).unwrap().value(), 1.0);
    }

    fn seq(alpha: u8) -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec((0..alpha).prop_map(|c| format!("t{c}")), 1..=12)
    }

    proptest! {
        #[test]
        fn rolling_dp_matches_full_table(
            p in seq(4), g in seq(4), s in 1u32..4,
        ) {
            let c = EditCosts::with_substitution(s).unwrap();
            prop_assert_eq!(token_edit_distance(&p, &g, &c), table_distance(&p, &g, &c));
        }

        #[test]
        fn symmetric_bounded_and_exact_iff_equal(p in seq(3), g in seq(3)) {
            let c = EditCosts::default();
            let a = ahat(&p, &g, &c).unwrap().value();
            prop_assert_eq!(a, ahat(&g, &p, &c).unwrap().value());
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert_eq!(a == 1.0, p == g);
            prop_assert_eq!(token_edit_distance(&p, &p, &c), 0);
        }

        #[test]
        fn adding_a_mention_never_lowers_entity_similarity(
            p in seq(3), ms in prop::collection::vec(seq(3), 1..5), extra in seq(3),
        ) {
            let c = EditCosts::default();
            let mk = |ms: &[Vec<String>]| ArgumentEntity::new(
                "R", Side::Source,
                ms.iter().map(|m| TokenSpan::with_surface(0, m.len(), m.clone())).collect(),
            );
            let before = entity_similarity(&p, &mk(&ms), &c).unwrap();
            let mut more = ms.clone();
            more.push(extra);
            let after = entity_similarity(&p, &mk(&more), &c).unwrap();
            prop_assert!(after >= before);
            let mut with_p = ms.clone();
            with_p.push(p.clone());
            prop_assert_eq!(entity_similarity(&p, &mk(&with_p), &c).unwrap().value(), 1.0);
        }
    }
}
