use serde::Serialize;

/// Precision, recall and F1 together with the raw sums they came from.
///
/// An empty denominator yields 1.0 when the other side is empty too
/// (nothing predicted and nothing to find) and 0.0 otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub precision_num: f64,
    pub precision_den: f64,
    pub recall_num: f64,
    pub recall_den: f64,
}

impl Prf {
    pub fn from_counts(precision_num: f64, precision_den: f64, recall_num: f64, recall_den: f64) -> Self {
        let precision = if precision_den > 0.0 {
            precision_num / precision_den
        } else if recall_den > 0.0 {
            0.0
        } else {
            1.0
        };
        let recall = if recall_den > 0.0 {
            recall_num / recall_den
        } else if precision_den > 0.0 {
            0.0
        } else {
            1.0
        };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Prf {
            precision,
            recall,
            f1,
            precision_num,
            precision_den,
            recall_num,
            recall_den,
        }
    }
}

/// Fixed-point accumulator with 80 fractional bits.
///
/// Addition is exact, so partial sums over any partition of the same values
/// add up to the total bit for bit. Every float at or above 2^-28 (and every
/// integer below 2^47) converts without rounding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactSum(i128);

impl ExactSum {
    const SCALE: f64 = (1u128 << 80) as f64;

    pub fn of(value: f64) -> Self {
        ExactSum((value * Self::SCALE).round() as i128)
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / Self::SCALE
    }
}

impl std::ops::Add for ExactSum {
    type Output = ExactSum;
    fn add(self, other: ExactSum) -> ExactSum {
        ExactSum(self.0 + other.0)
    }
}

impl std::ops::AddAssign for ExactSum {
    fn add_assign(&mut self, other: ExactSum) {
        self.0 += other.0;
    }
}

impl std::iter::Sum for ExactSum {
    fn sum<I: Iterator<Item = ExactSum>>(iter: I) -> Self {
        iter.fold(ExactSum::default(), |a, b| a + b)
    }
}

impl FromIterator<f64> for ExactSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        iter.into_iter().map(ExactSum::of).sum()
    }
}
