use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::CurationError;

/// Positive examples wanted per frame (the negative binomial's `r`).
pub const TARGET_POSITIVES: u32 = 5;
/// Frames with fewer parser test examples than this fall back to the
/// average parser precision.
pub const MIN_SUPPORT: u64 = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameStats {
    pub frame: String,
    /// Parser precision on this frame.
    pub precision: f64,
    /// Number of parser test examples for the frame.
    pub support: u64,
    /// Parser precision averaged over all frames.
    pub avg_precision: f64,
    /// Source-validation accuracy.
    pub accuracy: f64,
}

/// Frame → number of pairs to annotate.
pub type SamplingPlan = BTreeMap<String, u32>;

fn check_unit(name: &'static str, value: f64) -> Result<(), CurationError> {
    if value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(CurationError::InvalidRate { name, value })
    }
}

/// `ceil` that ignores floating-point noise: a quotient within a relative
/// 1e-9 of an integer counts as that integer.
fn ceil_tolerant(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// Expected draws to see [`TARGET_POSITIVES`] positives when each draw is
/// positive with probability `precision * accuracy`: `ceil(5 / (P * v))`,
/// using the average precision when support is below [`MIN_SUPPORT`].
pub fn plan_sample_size(stats: &FrameStats) -> Result<u32, CurationError> {
    check_unit("precision", stats.precision)?;
    check_unit("avg_precision", stats.avg_precision)?;
    check_unit("accuracy", stats.accuracy)?;
    let p = if stats.support >= MIN_SUPPORT {
        stats.precision
    } else {
        stats.avg_precision
    };
    let draws = ceil_tolerant(f64::from(TARGET_POSITIVES) / (p * stats.accuracy));
    if draws > f64::from(u32::MAX) {
        return Err(CurationError::PlanOverflow(stats.frame.clone()));
    }
    Ok(draws as u32)
}

pub fn plan(stats: &[FrameStats]) -> Result<SamplingPlan, CurationError> {
    stats
        .iter()
        .map(|s| plan_sample_size(s).map(|d| (s.frame.clone(), d)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    fn stats(precision: f64, support: u64, avg: f64, accuracy: f64) -> FrameStats {
        FrameStats {
            frame: "F".into(),
            precision,
            support,
            avg_precision: avg,
            accuracy,
        }
    }

    // Exact rational ceil(5 / (p * v)) from hundredths.
    fn rational_draws(p_hundredths: u64, v_hundredths: u64) -> u32 {
        let q = Ratio::new(5u64 * 100 * 100, p_hundredths * v_hundredths);
        q.ceil().to_integer() as u32
    }

    #[test]
    fn fixture_rows() {
        assert_eq!(plan_sample_size(&stats(1.0, 10, 0.5, 1.0)).unwrap(), 5);
        assert_eq!(plan_sample_size(&stats(0.5, 10, 0.9, 0.8)).unwrap(), 13);
        assert_eq!(plan_sample_size(&stats(0.9, 3, 0.25, 0.8)).unwrap(), 25);
        assert_eq!(plan_sample_size(&stats(0.01, 3, 0.25, 0.8)).unwrap(), 25);
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(plan_sample_size(&stats(0.0, 10, 0.5, 0.8)).is_err());
        assert!(plan_sample_size(&stats(0.5, 10, 0.5, -0.1)).is_err());
        assert!(plan_sample_size(&stats(0.5, 10, 1.5, 0.8)).is_err());
        assert!(plan_sample_size(&stats(f64::NAN, 10, 0.5, 0.8)).is_err());
    }

    #[test]
    fn matches_rational_arithmetic_on_a_grid() {
        for p in 1..=100u64 {
            for v in (5..=100u64).step_by(5) {
                let s = stats(p as f64 / 100.0, 20, 0.5, v as f64 / 100.0);
                assert_eq!(
                    plan_sample_size(&s).unwrap(),
                    rational_draws(p, v),
                    "p={p} v={v}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn non_increasing_in_precision_and_accuracy(
            p1 in 0.01f64..=1.0, p2 in 0.01f64..=1.0, v1 in 0.01f64..=1.0, v2 in 0.01f64..=1.0,
        ) {
            let (plo, phi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            let (vlo, vhi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
            let d = |p, v| plan_sample_size(&stats(p, 50, 0.5, v)).unwrap();
            prop_assert!(d(phi, vlo) <= d(plo, vlo));
            prop_assert!(d(plo, vhi) <= d(plo, vlo));
            prop_assert!(d(phi, vhi) >= TARGET_POSITIVES);
        }
    }
}
