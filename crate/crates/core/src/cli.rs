//! The `famus` command line.
//!
//! Exit codes: 0 success, 1 validation or domain error, 2 I/O or schema
//! error, 3 provider failure after retries.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{compute_bins, per_bin_cdae, per_bin_sv, Metric};
use crate::baselines::{ensemble_rb, lemma_baseline_all, majority_baseline, report_baseline};
use crate::curation::{
    attach_embeddings, mine_negatives, plan, similarity_histogram, stratified_sample,
    CandidatePair, CurationError, FileProvider, FrameStats, HttpProvider, ProviderError,
    RetryPolicy, SimilarityProvider, CANDIDATE_CAP,
};
use crate::lemma::{LemmaTable, LemmaTableError};
use crate::model::records::{
    load_examples, read_all, read_lines, ExampleRecord, PredictionRecord, RecordError,
    SvPredictionRecord,
};
use crate::model::{
    validate_corpus, validate_structure, ArgumentMention, CdaeExample, Example, FrameOntology,
    Label, OntologyError, PredictionSet, Side, SvExample,
};
use crate::scoring::{
    bottom_quartile, score_agreement, score_ceaf_rme, score_sv, AgreementCounts, CeafReport,
    CeafSettings, MatchMode, Prf, RefMode, ScoringError,
};
use crate::simtext::{EditCosts, Matcher};

/// Input that parsed but does not fit the record schema.
#[derive(Debug, Error)]
#[error("{0}")]
struct SchemaError(String);

#[derive(Parser, Debug)]
#[command(name = "famus", version, about = "Scoring and curation tools for source validation and cross-document argument extraction")]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, env = "FAMUS_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a corpus file against the record schema and, optionally, an ontology.
    Validate(ValidateArgs),
    #[command(subcommand)]
    Score(ScoreCommand),
    /// Agreement F1 between two annotations of the same examples.
    Agreement(AgreementArgs),
    #[command(subcommand)]
    Baseline(BaselineCommand),
    /// Number of pairs to annotate per frame.
    Plan(PlanArgs),
    /// Pick a diverse annotation batch per frame.
    Sample(SampleArgs),
    /// Build silver negatives from unannotated pairs.
    MineNegatives(MineArgs),
    /// Scores broken down by source length percentile.
    Bins(BinsArgs),
}

#[derive(Subcommand, Debug)]
enum ScoreCommand {
    /// Source-validation accuracy and positive-class P/R/F1.
    Sv(ScoreSvArgs),
    /// CEAF-RME for argument extraction.
    Cdae(ScoreCdaeArgs),
}

#[derive(Subcommand, Debug)]
enum BaselineCommand {
    /// Predict the training majority label for every example.
    Majority(MajorityArgs),
    /// Valid iff the trigger lemma occurs in the source.
    Lemma(LemmaArgs),
    /// Copy the gold report arguments as source predictions.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Result file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Report,
    Source,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Report => Side::Report,
            SideArg::Source => Side::Source,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MatchArg {
    Exact,
    Soft,
    Both,
}

impl MatchArg {
    fn modes(self) -> Vec<MatchMode> {
        match self {
            MatchArg::Exact => vec![MatchMode::Exact],
            MatchArg::Soft => vec![MatchMode::Soft],
            MatchArg::Both => vec![MatchMode::Exact, MatchMode::Soft],
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RefsArg {
    Mention,
    Cluster,
}

impl From<RefsArg> for RefMode {
    fn from(r: RefsArg) -> RefMode {
        match r {
            RefsArg::Mention => RefMode::Mention,
            RefsArg::Cluster => RefMode::Cluster,
        }
    }
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Corpus file (one record per line).
    #[arg(long)]
    input: PathBuf,
    /// Frame ontology; without it frames and roles are not checked.
    #[arg(long)]
    ontology: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ScoreSvArgs {
    #[arg(long)]
    gold: PathBuf,
    /// Prediction file with `{"id", "label"}` records.
    #[arg(long)]
    pred: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ScoreCdaeArgs {
    #[arg(long)]
    gold: PathBuf,
    /// Prediction file; omit with --ensemble-report-baseline to score the baseline alone.
    #[arg(long, required_unless_present = "ensemble_report_baseline")]
    pred: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "source")]
    side: SideArg,
    #[arg(long = "match", value_enum, default_value = "both")]
    match_mode: MatchArg,
    #[arg(long, value_enum, default_value = "mention")]
    refs: RefsArg,
    /// Fill roles the model left empty with the gold report arguments.
    #[arg(long)]
    ensemble_report_baseline: bool,
    #[arg(long)]
    case_insensitive: bool,
    /// Warn about predicted roles outside the frame, counting them unmatched.
    #[arg(long)]
    ontology: Option<PathBuf>,
    /// Per-example breakdown file.
    #[arg(long)]
    per_example: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct AgreementArgs {
    /// Reference annotation (CDAE records).
    #[arg(long)]
    reference: PathBuf,
    /// Annotation compared against the reference.
    #[arg(long)]
    annotation: PathBuf,
    #[arg(long)]
    ontology: PathBuf,
    #[arg(long)]
    case_insensitive: bool,
    /// Keep only examples at or below the 25th-percentile F1.
    #[arg(long)]
    bottom_quartile: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct MajorityArgs {
    /// Labelled split the majority label is taken from.
    #[arg(long)]
    train: PathBuf,
    /// Split to predict.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct LemmaArgs {
    #[arg(long)]
    input: PathBuf,
    /// Tab-separated `token<TAB>lemma` overrides.
    #[arg(long, env = "FAMUS_LEMMA_TABLE")]
    lemma_table: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "mention")]
    refs: RefsArg,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct PlanArgs {
    /// Frame statistics, one `{"frame", "precision", "support"}` record per line.
    #[arg(long)]
    stats: PathBuf,
    /// Source-validation accuracy for records that do not carry one.
    #[arg(long)]
    accuracy: Option<f64>,
    /// Average parser precision; defaults to the mean over the stats file.
    #[arg(long)]
    avg_precision: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ProviderArgs {
    /// Similarity/embedding service base URL.
    #[arg(long, env = "FAMUS_PROVIDER_URL")]
    provider_url: Option<String>,
    /// Precomputed `{"report", "source", "score"}` records.
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Precomputed `{"id", "vector"}` records keyed by source reference.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    timeout_secs: u64,
    #[arg(long, default_value_t = 4)]
    attempts: u32,
}

impl ProviderArgs {
    fn configured(&self) -> bool {
        self.provider_url.is_some() || self.scores.is_some() || self.embeddings.is_some()
    }

    fn build(&self) -> Result<Box<dyn SimilarityProvider>> {
        if let Some(url) = &self.provider_url {
            let retry = RetryPolicy {
                max_attempts: self.attempts,
                ..RetryPolicy::default()
            };
            return Ok(Box::new(HttpProvider::new(
                url.clone(),
                Duration::from_secs(self.timeout_secs),
                retry,
            )));
        }
        Ok(Box::new(FileProvider::load(
            self.scores.as_deref(),
            self.embeddings.as_deref(),
        )?))
    }
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// Candidate pool (one pair per line).
    #[arg(long)]
    pool: PathBuf,
    /// Plan file written by `famus plan`.
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Candidates kept per frame before clustering.
    #[arg(long, default_value_t = CANDIDATE_CAP)]
    max_pool: usize,
    #[command(flatten)]
    provider: ProviderArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct MineArgs {
    #[arg(long)]
    pool: PathBuf,
    /// Records whose `id` marks an annotated pair.
    #[arg(long)]
    annotated: Option<PathBuf>,
    #[arg(long)]
    seed: u64,
    /// Targets drawn per frame.
    #[arg(long, default_value_t = 1)]
    per_frame: usize,
    /// Positive versus silver-negative score histogram.
    #[arg(long)]
    histogram: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    histogram_bins: usize,
    #[command(flatten)]
    provider: ProviderArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct BinsArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    /// sv-f1 or ceaf-rme-a-f1.
    #[arg(long)]
    metric: String,
    #[arg(long, value_enum, default_value = "source")]
    side: SideArg,
    #[arg(long, value_enum, default_value = "mention")]
    refs: RefsArg,
    #[arg(long)]
    case_insensitive: bool,
    /// Structured copy of the table.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Line chart of per-bin F1.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .format_target(false)
        .try_init();

    let result = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(anyhow::Error::from)
        .and_then(|pool| pool.install(|| dispatch(cli.command)));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

fn provider_code(e: &ProviderError) -> i32 {
    match e {
        ProviderError::Records(_) => 2,
        _ => 3,
    }
}

fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<ProviderError>() {
            return provider_code(e);
        }
        if let Some(CurationError::Provider(e)) = cause.downcast_ref::<CurationError>() {
            return provider_code(e);
        }
    }
    let io = err.chain().any(|c| {
        c.is::<std::io::Error>()
            || c.is::<RecordError>()
            || c.is::<OntologyError>()
            || c.is::<LemmaTableError>()
            || c.is::<serde_json::Error>()
            || c.is::<SchemaError>()
    });
    if io {
        2
    } else {
        1
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Validate(a) => validate(a),
        Command::Score(ScoreCommand::Sv(a)) => score_sv_cmd(a),
        Command::Score(ScoreCommand::Cdae(a)) => score_cdae_cmd(a),
        Command::Agreement(a) => agreement(a),
        Command::Baseline(BaselineCommand::Majority(a)) => baseline_majority(a),
        Command::Baseline(BaselineCommand::Lemma(a)) => baseline_lemma(a),
        Command::Baseline(BaselineCommand::Report(a)) => baseline_report(a),
        Command::Plan(a) => plan_cmd(a),
        Command::Sample(a) => sample(a),
        Command::MineNegatives(a) => mine(a),
        Command::Bins(a) => bins(a),
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

fn emit(output: &Output, content: &str) -> Result<()> {
    match &output.out {
        Some(path) => write_file(path, content),
        None => Ok(()),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn to_jsonl<T: Serialize>(records: &[T]) -> Result<String> {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r)?);
        s.push('\n');
    }
    Ok(s)
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn load_corpus(path: &Path) -> Result<Vec<Example>> {
    let examples = load_examples(path).with_context(|| format!("reading {}", path.display()))?;
    let report = validate_structure(&examples);
    if let Some(first) = report.violations.first() {
        bail!(
            "{}: {} violation(s); first: {} {}: {} (run `famus validate` for the full list)",
            path.display(),
            report.violations.len(),
            first.example,
            first.field,
            first.message
        );
    }
    Ok(examples)
}

fn sv_corpus(path: &Path) -> Result<Vec<SvExample>> {
    load_corpus(path)?
        .into_iter()
        .map(|e| match e {
            Example::Sv(sv) => Ok(sv),
            Example::Cdae(c) => Err(anyhow!(SchemaError(format!(
                "{}: '{}' is an argument-extraction record, expected source validation",
                path.display(),
                c.id
            )))),
        })
        .collect()
}

fn cdae_corpus(path: &Path) -> Result<Vec<CdaeExample>> {
    load_corpus(path)?
        .into_iter()
        .map(|e| match e {
            Example::Cdae(c) => Ok(c),
            Example::Sv(sv) => Err(anyhow!(SchemaError(format!(
                "{}: '{}' has no argument annotations",
                path.display(),
                sv.id
            )))),
        })
        .collect()
}

fn sv_predictions(path: &Path) -> Result<BTreeMap<String, bool>> {
    let mut out = BTreeMap::new();
    for r in read_all::<SvPredictionRecord>(path).with_context(|| format!("reading {}", path.display()))? {
        if out.insert(r.id.clone(), r.label.is_positive()).is_some() {
            bail!("{}: duplicate prediction for '{}'", path.display(), r.id);
        }
    }
    Ok(out)
}

/// Prediction sets for `side`, resolved against the gold documents.
fn cdae_predictions(path: &Path, gold: &[CdaeExample], side: Side) -> Result<Vec<PredictionSet>> {
    let docs: HashMap<&str, &CdaeExample> = gold.iter().map(|g| (g.id.as_str(), g)).collect();
    let records =
        read_all::<PredictionRecord>(path).with_context(|| format!("reading {}", path.display()))?;
    let mut sets = Vec::new();
    for r in records.iter().filter(|r| r.side == side) {
        let example = docs
            .get(r.id.as_str())
            .ok_or_else(|| ScoringError::UnknownExample(r.id.clone()))?;
        let set = r
            .resolve(example.document(side))
            .map_err(|m| SchemaError(format!("{}: {m}", path.display())))?;
        sets.push(set);
    }
    Ok(sets)
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        log::warn!("{w}");
    }
}

fn validate(a: ValidateArgs) -> Result<()> {
    let lines = read_lines::<ExampleRecord>(&a.input)
        .with_context(|| format!("reading {}", a.input.display()))?;
    let mut examples = Vec::new();
    let mut unparsed = Vec::new();
    for line in lines {
        match line.record {
            Ok(r) => examples.push(r.to_example()),
            Err(m) => unparsed.push((line.number, m)),
        }
    }
    let mut report = match &a.ontology {
        Some(path) => validate_corpus(
            &examples,
            &FrameOntology::load(path).with_context(|| format!("reading {}", path.display()))?,
        ),
        None => validate_structure(&examples),
    };
    for (number, message) in &unparsed {
        report.push_unparsed(*number, message.clone());
    }
    emit(&a.output, &to_json(&report)?)?;

    println!(
        "{}: {} record(s), {} violation(s)",
        a.input.display(),
        report.examples + unparsed.len(),
        report.violations.len()
    );
    for v in report.violations.iter().take(20) {
        println!("  {}\t{}\t{}", v.example, v.field, v.message);
    }
    if report.violations.len() > 20 {
        println!("  ... {} more", report.violations.len() - 20);
    }
    if !unparsed.is_empty() {
        return Err(SchemaError(format!("{} line(s) could not be parsed", unparsed.len())).into());
    }
    if !report.is_clean() {
        bail!(
            "validation failed for {} example(s)",
            report.failing_ids().len()
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct PrfOut {
    precision: f64,
    recall: f64,
    f1: f64,
    precision_num: f64,
    precision_den: f64,
    recall_num: f64,
    recall_den: f64,
}

impl From<&Prf> for PrfOut {
    fn from(p: &Prf) -> Self {
        PrfOut {
            precision: round4(p.precision),
            recall: round4(p.recall),
            f1: round4(p.f1),
            precision_num: p.precision_num,
            precision_den: p.precision_den,
            recall_num: p.recall_num,
            recall_den: p.recall_den,
        }
    }
}

#[derive(Serialize)]
struct SvOut {
    n: u64,
    accuracy: f64,
    precision: f64,
    recall: f64,
    f1: f64,
    tp: u64,
    fp: u64,
    #[serde(rename = "fn")]
    fn_: u64,
    tn: u64,
}

fn sv_summary(gold: &[SvExample], preds: &BTreeMap<String, bool>) -> Result<SvOut> {
    let s = score_sv(gold, preds)?;
    Ok(SvOut {
        n: s.n,
        accuracy: round4(s.accuracy),
        precision: round4(s.prf.precision),
        recall: round4(s.prf.recall),
        f1: round4(s.prf.f1),
        tp: s.counts.tp,
        fp: s.counts.fp,
        fn_: s.counts.fn_,
        tn: s.counts.tn,
    })
}

fn print_sv(s: &SvOut) {
    println!("n\taccuracy\tprecision\trecall\tf1");
    println!(
        "{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}",
        s.n, s.accuracy, s.precision, s.recall, s.f1
    );
}

fn score_sv_cmd(a: ScoreSvArgs) -> Result<()> {
    let gold = sv_corpus(&a.gold)?;
    let preds = sv_predictions(&a.pred)?;
    let out = sv_summary(&gold, &preds)?;
    emit(&a.output, &to_json(&out)?)?;
    print_sv(&out);
    Ok(())
}

#[derive(Serialize)]
struct CeafBlock {
    #[serde(rename = "match")]
    mode: MatchMode,
    #[serde(flatten)]
    prf: PrfOut,
}

#[derive(Serialize)]
struct CeafOut {
    side: Side,
    refs: RefMode,
    ensemble_report_baseline: bool,
    blocks: Vec<CeafBlock>,
    warnings: Vec<String>,
}

fn prf_header(modes: &[MatchMode]) -> String {
    modes
        .iter()
        .map(|m| {
            let m = m.as_str();
            format!("{m}_p\t{m}_r\t{m}_f1")
        })
        .collect::<Vec<_>>()
        .join("\t")
}

fn prf_cells(prfs: &[Prf]) -> String {
    prfs.iter()
        .map(|p| format!("{:.4}\t{:.4}\t{:.4}", p.precision, p.recall, p.f1))
        .collect::<Vec<_>>()
        .join("\t")
}

fn score_cdae_cmd(a: ScoreCdaeArgs) -> Result<()> {
    let side = Side::from(a.side);
    let refs = RefMode::from(a.refs);
    let gold = cdae_corpus(&a.gold)?;
    let ontology = match &a.ontology {
        Some(p) => Some(FrameOntology::load(p).with_context(|| format!("reading {}", p.display()))?),
        None => None,
    };
    let mut preds = match &a.pred {
        Some(p) => cdae_predictions(p, &gold, side)?,
        None => Vec::new(),
    };
    if a.ensemble_report_baseline {
        if side != Side::Source {
            bail!("--ensemble-report-baseline applies to source-side scoring only");
        }
        let mut by_id: BTreeMap<String, PredictionSet> =
            preds.into_iter().map(|p| (p.example_id.clone(), p)).collect();
        let mut merged = Vec::with_capacity(gold.len());
        for ex in &gold {
            let model = by_id
                .remove(&ex.id)
                .unwrap_or_else(|| PredictionSet::new(ex.id.clone(), Side::Source));
            merged.push(ensemble_rb(&model, &report_baseline(ex, refs))?);
        }
        preds = merged;
    }

    let matcher = Matcher::new(EditCosts::default(), a.case_insensitive);
    let modes = a.match_mode.modes();
    let reports: Vec<CeafReport> = modes
        .iter()
        .map(|&mode| {
            score_ceaf_rme(
                &gold,
                &preds,
                CeafSettings { side, mode, refs },
                &matcher,
                ontology.as_ref(),
            )
        })
        .collect::<Result<_, _>>()?;

    let warnings: Vec<String> = reports[0].warnings.clone();
    warn_all(&warnings);
    let out = CeafOut {
        side,
        refs,
        ensemble_report_baseline: a.ensemble_report_baseline,
        blocks: reports
            .iter()
            .map(|r| CeafBlock {
                mode: r.settings.mode,
                prf: PrfOut::from(&r.prf),
            })
            .collect(),
        warnings,
    };
    emit(&a.output, &to_json(&out)?)?;

    if let Some(path) = &a.per_example {
        let mut tsv = format!("id\t{}\n", prf_header(&modes));
        for (i, row) in reports[0].examples.iter().enumerate() {
            let prfs: Vec<Prf> = reports.iter().map(|r| r.examples[i].prf()).collect();
            let _ = writeln!(tsv, "{}\t{}", row.id, prf_cells(&prfs));
        }
        write_file(path, &tsv)?;
    }

    println!("side\trefs\t{}", prf_header(&modes));
    let prfs: Vec<Prf> = reports.iter().map(|r| r.prf).collect();
    println!("{}\t{}\t{}", side, refs.as_str(), prf_cells(&prfs));
    Ok(())
}

fn role_mentions(example: &CdaeExample, side: Side) -> BTreeMap<String, Vec<ArgumentMention>> {
    example
        .refs(side)
        .iter()
        .map(|(role, entities)| {
            let mentions = entities
                .iter()
                .flat_map(|e| &e.mentions)
                .map(|span| ArgumentMention {
                    role: role.clone(),
                    span: span.clone(),
                    side,
                })
                .collect();
            (role.clone(), mentions)
        })
        .collect()
}

#[derive(Serialize)]
struct AgreementRow {
    id: String,
    tp: f64,
    fp: f64,
    #[serde(rename = "fn")]
    fn_: f64,
    #[serde(skip)]
    prf: Prf,
}

fn agreement(a: AgreementArgs) -> Result<()> {
    let ontology = FrameOntology::load(&a.ontology)
        .with_context(|| format!("reading {}", a.ontology.display()))?;
    let reference = cdae_corpus(&a.reference)?;
    let annotation = cdae_corpus(&a.annotation)?;
    let theirs: BTreeMap<&str, &CdaeExample> =
        annotation.iter().map(|e| (e.id.as_str(), e)).collect();
    let ours: BTreeMap<&str, &CdaeExample> = reference.iter().map(|e| (e.id.as_str(), e)).collect();
    let unmatched: Vec<&str> = ours
        .keys()
        .filter(|id| !theirs.contains_key(*id))
        .chain(theirs.keys().filter(|id| !ours.contains_key(*id)))
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if !unmatched.is_empty() {
        bail!(
            "examples present in only one annotation: {}",
            unmatched.join(", ")
        );
    }

    let matcher = Matcher::new(EditCosts::default(), a.case_insensitive);
    let mut rows = Vec::with_capacity(ours.len());
    let mut total = AgreementCounts::default();
    for (id, r) in &ours {
        let p = theirs[id];
        let roles = ontology
            .roles(r.frame())
            .ok_or_else(|| anyhow!("example {id}: frame '{}' not in ontology", r.frame()))?;
        let mut counts = AgreementCounts::default();
        for side in [Side::Report, Side::Source] {
            let got = score_agreement(
                &role_mentions(r, side),
                &role_mentions(p, side),
                r.frame(),
                roles,
                &matcher,
            )
            .with_context(|| format!("example {id}, {side} side"))?;
            counts.tp += got.counts.tp;
            counts.fp += got.counts.fp;
            counts.fn_ += got.counts.fn_;
        }
        total.tp += counts.tp;
        total.fp += counts.fp;
        total.fn_ += counts.fn_;
        rows.push(AgreementRow {
            id: id.to_string(),
            tp: counts.tp,
            fp: counts.fp,
            fn_: counts.fn_,
            prf: counts.prf(),
        });
    }

    if a.bottom_quartile && !rows.is_empty() {
        let scores: BTreeMap<String, f64> = rows.iter().map(|r| (r.id.clone(), r.prf.f1)).collect();
        let keep = bottom_quartile(&scores);
        let mut by_id: BTreeMap<String, AgreementRow> =
            rows.into_iter().map(|r| (r.id.clone(), r)).collect();
        rows = keep.iter().filter_map(|id| by_id.remove(id)).collect();
    }

    let mut tsv = String::from("id\ttp\tfp\tfn\tprecision\trecall\tf1\n");
    for r in &rows {
        let _ = writeln!(
            tsv,
            "{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}",
            r.id, r.tp, r.fp, r.fn_, r.prf.precision, r.prf.recall, r.prf.f1
        );
    }
    emit(&a.output, &tsv)?;

    let prf = total.prf();
    println!("examples\tprecision\trecall\tf1");
    println!(
        "{}\t{:.4}\t{:.4}\t{:.4}",
        ours.len(),
        prf.precision,
        prf.recall,
        prf.f1
    );
    if a.bottom_quartile {
        println!("bottom quartile: {} example(s)", rows.len());
    }
    Ok(())
}

fn write_sv_predictions(output: &Output, preds: &BTreeMap<String, bool>) -> Result<()> {
    let records: Vec<SvPredictionRecord> = preds
        .iter()
        .map(|(id, &v)| SvPredictionRecord {
            id: id.clone(),
            label: Label::from_bool(v),
        })
        .collect();
    emit(output, &to_jsonl(&records)?)
}

fn baseline_majority(a: MajorityArgs) -> Result<()> {
    let train = sv_corpus(&a.train)?;
    let eval = sv_corpus(&a.input)?;
    let labels: Vec<Label> = train.iter().map(|e| e.label).collect();
    let ids: Vec<String> = eval.iter().map(|e| e.id.clone()).collect();
    let preds = majority_baseline(&labels, &ids)?;
    write_sv_predictions(&a.output, &preds)?;
    let positives = labels.iter().filter(|l| l.is_positive()).count();
    let majority = preds.values().next().copied().unwrap_or(positives * 2 >= labels.len());
    println!(
        "majority label: {} ({positives} of {} training examples positive)",
        Label::from_bool(majority).as_str(),
        labels.len()
    );
    print_sv(&sv_summary(&eval, &preds)?);
    Ok(())
}

fn baseline_lemma(a: LemmaArgs) -> Result<()> {
    let eval = sv_corpus(&a.input)?;
    let table = match &a.lemma_table {
        Some(p) => Some(LemmaTable::load(p).with_context(|| format!("reading {}", p.display()))?),
        None => None,
    };
    let preds = lemma_baseline_all(&eval, table.as_ref());
    write_sv_predictions(&a.output, &preds)?;
    print_sv(&sv_summary(&eval, &preds)?);
    Ok(())
}

fn baseline_report(a: ReportArgs) -> Result<()> {
    let gold = cdae_corpus(&a.input)?;
    let refs = RefMode::from(a.refs);
    let records: Vec<PredictionRecord> = gold
        .iter()
        .map(|ex| PredictionRecord::from_set(&report_baseline(ex, refs)))
        .collect();
    emit(&a.output, &to_jsonl(&records)?)?;
    let mentions: usize = records.iter().map(|r| r.args.values().map(Vec::len).sum::<usize>()).sum();
    println!(
        "{} prediction set(s), {mentions} mention(s), refs={}",
        records.len(),
        refs.as_str()
    );
    Ok(())
}

#[derive(Deserialize)]
struct StatsRecord {
    frame: String,
    precision: f64,
    support: u64,
    #[serde(default)]
    avg_precision: Option<f64>,
    #[serde(default)]
    accuracy: Option<f64>,
}

fn plan_cmd(a: PlanArgs) -> Result<()> {
    let records = read_all::<StatsRecord>(&a.stats)
        .with_context(|| format!("reading {}", a.stats.display()))?;
    if records.is_empty() {
        bail!("{}: no frame statistics", a.stats.display());
    }
    let mean = records.iter().map(|r| r.precision).sum::<f64>() / records.len() as f64;
    let stats: Vec<FrameStats> = records
        .into_iter()
        .map(|r| {
            let accuracy = a.accuracy.or(r.accuracy).ok_or_else(|| {
                anyhow!("frame '{}': no accuracy in the record and no --accuracy", r.frame)
            })?;
            Ok(FrameStats {
                avg_precision: a.avg_precision.or(r.avg_precision).unwrap_or(mean),
                frame: r.frame,
                precision: r.precision,
                support: r.support,
                accuracy,
            })
        })
        .collect::<Result<_>>()?;
    let planned = plan(&stats)?;
    let mut tsv = String::from("frame\tsamples\n");
    for (frame, d) in &planned {
        let _ = writeln!(tsv, "{frame}\t{d}");
    }
    emit(&a.output, &tsv)?;
    print!("{tsv}");
    println!(
        "total\t{}",
        planned.values().map(|&d| u64::from(d)).sum::<u64>()
    );
    Ok(())
}

fn read_plan(path: &Path) -> Result<BTreeMap<String, usize>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || (i == 0 && line.starts_with("frame\t")) {
            continue;
        }
        let (frame, d) = line
            .split_once('\t')
            .ok_or_else(|| SchemaError(format!("{} line {}: expected frame<TAB>samples", path.display(), i + 1)))?;
        let d: usize = d.trim().parse().map_err(|_| {
            SchemaError(format!("{} line {}: bad sample count '{d}'", path.display(), i + 1))
        })?;
        out.insert(frame.to_string(), d);
    }
    Ok(out)
}

/// Per-frame seed: the run seed mixed with an FNV-1a hash of the frame id,
/// so adding a frame does not disturb the others.
fn frame_seed(seed: u64, frame: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in frame.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    seed ^ h
}

fn read_pool(path: &Path) -> Result<Vec<CandidatePair>> {
    let mut pool =
        read_all::<CandidatePair>(path).with_context(|| format!("reading {}", path.display()))?;
    pool.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = pool.windows(2).find(|w| w[0].id == w[1].id) {
        bail!("{}: duplicate pair id '{}'", path.display(), w[0].id);
    }
    Ok(pool)
}

fn sample(a: SampleArgs) -> Result<()> {
    let pool = read_pool(&a.pool)?;
    let planned = read_plan(&a.plan)?;
    let provider = if a.provider.configured() {
        Some(a.provider.build()?)
    } else {
        None
    };
    let mut by_frame: BTreeMap<&str, Vec<CandidatePair>> = BTreeMap::new();
    for p in &pool {
        by_frame.entry(p.frame.as_str()).or_default().push(p.clone());
    }

    let mut selected = Vec::new();
    println!("frame\tplanned\tpool\tselected\tlemmas");
    for (frame, &draws) in &planned {
        let Some(mut candidates) = by_frame.remove(frame.as_str()) else {
            log::warn!("frame '{frame}': no candidates in the pool");
            continue;
        };
        let seed = frame_seed(a.seed, frame);
        if candidates.len() > a.max_pool {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(2);
            candidates.shuffle(&mut rng);
            candidates.truncate(a.max_pool);
            candidates.sort_by(|x, y| x.id.cmp(&y.id));
        }
        if let Some(p) = &provider {
            attach_embeddings(&mut candidates, p.as_ref())?;
        }
        let outcome = stratified_sample(&candidates, draws, seed)?;
        for w in &outcome.warnings {
            log::warn!("frame '{frame}': {w}");
        }
        let lemmas: BTreeSet<&str> = outcome.selected.iter().map(|p| p.lemma.as_str()).collect();
        println!(
            "{frame}\t{draws}\t{}\t{}\t{}",
            candidates.len(),
            outcome.selected.len(),
            lemmas.len()
        );
        selected.extend(outcome.selected.into_iter().map(|mut p| {
            p.embedding = None;
            p
        }));
    }
    emit(&a.output, &to_jsonl(&selected)?)
}

#[derive(Deserialize)]
struct IdRecord {
    id: String,
}

fn mine(a: MineArgs) -> Result<()> {
    let pool = read_pool(&a.pool)?;
    let annotated: HashSet<String> = match &a.annotated {
        Some(p) => read_all::<IdRecord>(p)
            .with_context(|| format!("reading {}", p.display()))?
            .into_iter()
            .map(|r| r.id)
            .collect(),
        None => HashSet::new(),
    };
    if !a.provider.configured() {
        bail!("mine-negatives needs --scores or --provider-url");
    }
    let provider = a.provider.build()?;
    let outcome = mine_negatives(&pool, &annotated, provider.as_ref(), a.per_frame, a.seed)?;
    warn_all(&outcome.warnings);
    emit(&a.output, &to_jsonl(&outcome.negatives)?)?;

    if let Some(path) = &a.histogram {
        let positive: Vec<f64> = pool
            .iter()
            .filter(|p| annotated.contains(&p.id))
            .map(|p| provider.similarity(&p.report, &p.source))
            .collect::<Result<_, _>>()?;
        let negative: Vec<f64> = outcome.negatives.iter().map(|n| n.score).collect();
        let mut tsv = String::from("lower\tupper\tannotated\tsilver_negative\n");
        for row in similarity_histogram(&positive, &negative, a.histogram_bins) {
            let _ = writeln!(
                tsv,
                "{:.4}\t{:.4}\t{}\t{}",
                row.lower, row.upper, row.positive, row.negative
            );
        }
        write_file(path, &tsv)?;
    }

    let frames: BTreeSet<&str> = outcome.negatives.iter().map(|n| n.frame.as_str()).collect();
    println!(
        "{} silver negative(s) across {} frame(s)",
        outcome.negatives.len(),
        frames.len()
    );
    Ok(())
}

fn bins(a: BinsArgs) -> Result<()> {
    let metric: Metric = a.metric.parse()?;
    let table = match metric {
        Metric::SvF1 => {
            let gold = sv_corpus(&a.gold)?;
            let lengths: Vec<usize> = gold.iter().map(|e| e.source.len()).collect();
            let bins = compute_bins(&lengths)?;
            per_bin_sv(&gold, &sv_predictions(&a.pred)?, &bins)?
        }
        Metric::CeafRmeAF1 => {
            let gold = cdae_corpus(&a.gold)?;
            let side = Side::from(a.side);
            let lengths: Vec<usize> = gold.iter().map(|e| e.source.len()).collect();
            let bins = compute_bins(&lengths)?;
            let preds = cdae_predictions(&a.pred, &gold, side)?;
            let settings = CeafSettings {
                side,
                mode: MatchMode::Soft,
                refs: a.refs.into(),
            };
            let matcher = Matcher::new(EditCosts::default(), a.case_insensitive);
            per_bin_cdae(&gold, &preds, settings, &bins, &matcher)?
        }
    };
    if table.bins.degenerate() {
        log::warn!(
            "length edges {:?} coincide; some bins are necessarily empty",
            table.bins.edges
        );
    }
    let tsv = table.to_tsv();
    emit(&a.output, &tsv)?;
    if let Some(path) = &a.json {
        write_file(path, &to_json(&table)?)?;
    }
    if let Some(path) = &a.svg {
        write_file(path, &table.to_svg())?;
    }
    println!("edges\t{:?}", table.bins.edges);
    print!("{tsv}");
    println!("overall\t{:.4}", table.overall.f1);
    Ok(())
}
