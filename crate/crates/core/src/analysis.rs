//! Scores broken down by source-document length percentile.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::model::{CdaeExample, PredictionSet, SvExample};
use crate::percentile::nearest_rank;
use crate::scoring::{
    score_ceaf_rme, score_sv, CeafReport, CeafSettings, ExactSum, Prf, ScoringError, SvCounts,
};
use crate::simtext::Matcher;

pub const BIN_PERCENTILES: [u32; 5] = [10, 25, 50, 75, 90];
pub const BIN_LABELS: [&str; 6] = ["0-10", "10-25", "25-50", "50-75", "75-90", "90-100"];

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("need at least 6 lengths to form percentile bins, got {0}")]
    TooFewLengths(usize),
    #[error("unknown metric '{0}' (expected sv-f1 or ceaf-rme-a-f1)")]
    UnknownMetric(String),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
}

/// Length edges at the 10th, 25th, 50th, 75th and 90th percentiles.
///
/// Bin `i` holds lengths in `[edges[i-1], edges[i])`, with the first bin
/// open below and the last closed above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LengthBins {
    pub edges: [usize; 5],
}

impl LengthBins {
    pub fn bin_of(&self, length: usize) -> usize {
        self.edges.iter().take_while(|&&e| e <= length).count()
    }

    /// True when two edges coincide, which leaves at least one bin empty.
    pub fn degenerate(&self) -> bool {
        self.edges.windows(2).any(|w| w[0] == w[1])
    }

    pub fn label(bin: usize) -> &'static str {
        BIN_LABELS[bin]
    }
}

pub fn compute_bins(lengths: &[usize]) -> Result<LengthBins, AnalysisError> {
    if lengths.len() < BIN_LABELS.len() {
        return Err(AnalysisError::TooFewLengths(lengths.len()));
    }
    let mut sorted = lengths.to_vec();
    sorted.sort_unstable();
    Ok(LengthBins {
        edges: BIN_PERCENTILES.map(|q| nearest_rank(&sorted, q)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    SvF1,
    CeafRmeAF1,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::SvF1 => "sv-f1",
            Metric::CeafRmeAF1 => "ceaf-rme-a-f1",
        }
    }
}

impl FromStr for Metric {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sv-f1" => Ok(Metric::SvF1),
            "ceaf-rme-a-f1" => Ok(Metric::CeafRmeAF1),
            other => Err(AnalysisError::UnknownMetric(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinRow {
    pub bin: &'static str,
    pub n: usize,
    /// `None` for an empty bin.
    pub prf: Option<Prf>,
    /// Exact P/R numerator and denominator sums; zero for an empty bin.
    #[serde(skip)]
    pub totals: [ExactSum; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinTable {
    pub metric: Metric,
    pub bins: LengthBins,
    pub rows: Vec<BinRow>,
    pub overall: Prf,
    #[serde(skip)]
    pub overall_totals: [ExactSum; 4],
}

fn prf_totals(p: &Prf) -> [ExactSum; 4] {
    [p.precision_num, p.precision_den, p.recall_num, p.recall_den].map(ExactSum::of)
}

fn partition<'a, T>(
    items: &'a [T],
    bins: &LengthBins,
    length: impl Fn(&T) -> usize,
) -> Vec<Vec<&'a T>> {
    let mut parts: Vec<Vec<&T>> = vec![Vec::new(); BIN_LABELS.len()];
    for item in items {
        parts[bins.bin_of(length(item))].push(item);
    }
    parts
}

/// Source-validation F1 per length bin.
pub fn per_bin_sv(
    examples: &[SvExample],
    preds: &BTreeMap<String, bool>,
    bins: &LengthBins,
) -> Result<BinTable, AnalysisError> {
    let overall = score_sv(examples, preds)?;
    let rows = partition(examples, bins, |e| e.source.len())
        .into_iter()
        .enumerate()
        .map(|(b, part)| {
            let mut counts = SvCounts::default();
            for e in &part {
                counts.add(e.label.is_positive(), preds[&e.id]);
            }
            let prf = counts.prf();
            BinRow {
                bin: BIN_LABELS[b],
                n: part.len(),
                totals: prf_totals(&prf),
                prf: (!part.is_empty()).then_some(prf),
            }
        })
        .collect();
    Ok(BinTable {
        metric: Metric::SvF1,
        bins: *bins,
        rows,
        overall_totals: prf_totals(&overall.prf),
        overall: overall.prf,
    })
}

/// CEAF-RME per length bin, micro-aggregated within each bin.
pub fn per_bin_cdae(
    examples: &[CdaeExample],
    preds: &[PredictionSet],
    settings: CeafSettings,
    bins: &LengthBins,
    matcher: &Matcher,
) -> Result<BinTable, AnalysisError> {
    let report = score_ceaf_rme(examples, preds, settings, matcher, None)?;
    let lengths: BTreeMap<&str, usize> = examples
        .iter()
        .map(|e| (e.id.as_str(), e.source.len()))
        .collect();
    let rows = partition(&report.examples, bins, |r| lengths[r.id.as_str()])
        .into_iter()
        .enumerate()
        .map(|(b, part)| BinRow {
            bin: BIN_LABELS[b],
            n: part.len(),
            totals: CeafReport::totals(part.iter().copied()),
            prf: (!part.is_empty()).then(|| CeafReport::aggregate(part.iter().copied())),
        })
        .collect();
    Ok(BinTable {
        metric: Metric::CeafRmeAF1,
        bins: *bins,
        rows,
        overall_totals: CeafReport::totals(&report.examples),
        overall: report.prf,
    })
}

fn cell(prf: Option<&Prf>, pick: impl Fn(&Prf) -> f64) -> String {
    prf.map_or_else(|| "NA".to_string(), |p| format!("{:.4}", pick(p)))
}

impl BinTable {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("bin\tn\tprecision\trecall\tf1\n");
        for row in &self.rows {
            let p = row.prf.as_ref();
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                row.bin,
                row.n,
                cell(p, |p| p.precision),
                cell(p, |p| p.recall),
                cell(p, |p| p.f1)
            );
        }
        out
    }

    /// A standalone line chart of per-bin F1.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 360.0;
        const LEFT: f64 = 60.0;
        const RIGHT: f64 = 20.0;
        const TOP: f64 = 30.0;
        const BOTTOM: f64 = 50.0;
        let plot_w = W - LEFT - RIGHT;
        let plot_h = H - TOP - BOTTOM;
        let x = |b: usize| LEFT + plot_w * (b as f64 + 0.5) / BIN_LABELS.len() as f64;
        let y = |v: f64| TOP + plot_h * (1.0 - v);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="18" text-anchor="middle">{} F1 by source length percentile</text>"#,
            W / 2.0,
            self.metric.as_str()
        );
        for tick in 0..=4 {
            let v = tick as f64 / 4.0;
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{v:.2}</text>"##,
                W - RIGHT,
                LEFT - 6.0,
                y(v) + 4.0,
                y = y(v)
            );
        }
        for (b, label) in BIN_LABELS.iter().enumerate() {
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{label}</text>"#,
                x(b),
                H - BOTTOM + 20.0
            );
        }
        let points: Vec<String> = self
            .rows
            .iter()
            .enumerate()
            .filter_map(|(b, r)| r.prf.map(|p| format!("{:.1},{:.1}", x(b), y(p.f1))))
            .collect();
        if !points.is_empty() {
            let _ = writeln!(
                s,
                r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="2"/>"##,
                points.join(" ")
            );
            for p in &points {
                let (px, py) = p.split_once(',').expect("formatted as x,y");
                let _ = writeln!(s, r##"<circle cx="{px}" cy="{py}" r="3" fill="#1f77b4"/>"##);
            }
        }
        s.push_str("</svg>\n");
        s
    }
}
