#![allow(dead_code)]

use std::collections::BTreeMap;

use famus::model::{
    ArgumentEntity, CdaeExample, Document, EventTrigger, Label, PredictionSet, Provenance,
    RoleEntities, Side, SvExample, TokenSpan,
};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const FRAME: &str = "Attack";
pub const ROLES: [&str; 8] = [
    "Assailant", "Victim", "Weapon", "Means", "Purpose", "Result", "Time", "Place",
];
const WORDS: [&str; 10] = [
    "the", "police", "officers", "rebels", "town", "city", "army", "two", "men", "on",
];

pub fn words(rng: &mut ChaCha8Rng, len: usize, alphabet: usize) -> Vec<String> {
    (0..len)
        .map(|_| WORDS[rng.random_range(0..alphabet.min(WORDS.len()))].to_string())
        .collect()
}

fn random_span(rng: &mut ChaCha8Rng, doc: &Document) -> TokenSpan {
    let len = rng.random_range(1..=3.min(doc.len()));
    let start = rng.random_range(0..=doc.len() - len);
    doc.span(start, start + len).unwrap()
}

pub fn random_refs(rng: &mut ChaCha8Rng, doc: &Document, roles: &[&str]) -> RoleEntities {
    let mut refs = RoleEntities::new();
    for role in roles {
        let entities: Vec<ArgumentEntity> = (0..rng.random_range(0..=3))
            .map(|_| {
                let mut mentions: Vec<TokenSpan> = Vec::new();
                for _ in 0..rng.random_range(1..=3) {
                    let s = random_span(rng, doc);
                    if !mentions.contains(&s) {
                        mentions.push(s);
                    }
                }
                ArgumentEntity::new(*role, doc.side, mentions)
            })
            .collect();
        if !entities.is_empty() {
            refs.insert(role.to_string(), entities);
        }
    }
    refs
}

pub fn random_example(rng: &mut ChaCha8Rng, id: &str, max_roles: usize, source_len: usize) -> CdaeExample {
    let report = Document::from_tokens(format!("{id}#report"), Side::Report, words(rng, 20, 6));
    let source = Document::from_tokens(format!("{id}#source"), Side::Source, words(rng, source_len, 6));
    let mut roles: Vec<&str> = ROLES.to_vec();
    let n = rng.random_range(1..=max_roles.min(ROLES.len()));
    roles.truncate(n);
    let trigger = EventTrigger {
        span: report.span(3, 4).unwrap(),
        frame: FRAME.to_string(),
    };
    CdaeExample {
        id: id.to_string(),
        report_refs: random_refs(rng, &report, &roles),
        source_refs: random_refs(rng, &source, &roles),
        report,
        trigger,
        source,
    }
}

/// Noisy predictions: copies of gold mentions, shifted copies and random
/// spans, over gold roles and a few extra ones.
pub fn random_predictions(rng: &mut ChaCha8Rng, ex: &CdaeExample, side: Side) -> PredictionSet {
    let doc = ex.document(side);
    let mut set = PredictionSet::new(ex.id.clone(), side);
    for role in ROLES.iter().take(6) {
        let gold: Vec<&TokenSpan> = ex
            .refs(side)
            .get(*role)
            .map(|es| es.iter().flat_map(|e| &e.mentions).collect())
            .unwrap_or_default();
        let mut spans = Vec::new();
        for _ in 0..rng.random_range(0..=3) {
            let span = match (rng.random_range(0..3), gold.choose(rng)) {
                (0, Some(g)) => (*g).clone(),
                (1, Some(g)) => {
                    let end = (g.end + 1).min(doc.len());
                    doc.span(g.start, end).unwrap()
                }
                _ => random_span(rng, doc),
            };
            spans.push(span);
        }
        if !spans.is_empty() {
            set.args.insert(role.to_string(), spans);
        }
    }
    set
}

pub fn random_corpus(
    rng: &mut ChaCha8Rng,
    max_examples: usize,
    max_roles: usize,
) -> (Vec<CdaeExample>, Vec<PredictionSet>) {
    let n = rng.random_range(1..=max_examples);
    let gold: Vec<CdaeExample> = (0..n)
        .map(|i| {
            let len = rng.random_range(8..40);
            random_example(rng, &format!("ex{i:03}"), max_roles, len)
        })
        .collect();
    let mut preds = Vec::new();
    for ex in &gold {
        if rng.random_bool(0.85) {
            preds.push(random_predictions(rng, ex, Side::Source));
        }
    }
    (gold, preds)
}

/// Predictions that reproduce the references as seen under `cluster`
/// (every mention) or mention mode (first mentions only).
pub fn reference_copy(ex: &CdaeExample, side: Side, cluster: bool) -> PredictionSet {
    let mut set = PredictionSet::new(ex.id.clone(), side);
    for (role, entities) in ex.refs(side) {
        let spans: Vec<TokenSpan> = entities
            .iter()
            .flat_map(|e| {
                if cluster {
                    e.mentions.clone()
                } else {
                    e.mentions[..1].to_vec()
                }
            })
            .collect();
        set.args.insert(role.clone(), spans);
    }
    set
}

pub fn ontology_json() -> String {
    let roles: Vec<String> = ROLES.iter().map(|r| format!("\"{r}\"")).collect();
    format!(
        "{{\"frames\":{{\"{FRAME}\":{{\"roles\":[{}]}}}}}}",
        roles.join(",")
    )
}

pub fn sv_example(id: &str, report: &str, trigger: (usize, usize), source: &str, label: Label) -> SvExample {
    let report = Document::from_text(format!("{id}#report"), Side::Report, report);
    let source = Document::from_text(format!("{id}#source"), Side::Source, source);
    SvExample {
        id: id.to_string(),
        trigger: EventTrigger {
            span: report.span(trigger.0, trigger.1).unwrap(),
            frame: FRAME.to_string(),
        },
        report,
        source,
        label,
        provenance: Provenance::Gold,
    }
}

/// Balanced SV split whose source lengths spread over every length bin.
pub fn sv_split(rng: &mut ChaCha8Rng, n: usize) -> (Vec<SvExample>, BTreeMap<String, bool>) {
    let mut gold = Vec::new();
    let mut preds = BTreeMap::new();
    for i in 0..n {
        let id = format!("sv{i:03}");
        let positive = i % 2 == 0;
        let len = 5 + i * 3;
        let mut source = words(rng, len, 10);
        if positive || rng.random_bool(0.3) {
            source[len / 2] = "attacked".into();
        }
        let ex = sv_example(
            &id,
            "rebels attacked the town",
            (1, 2),
            &source.join(" "),
            Label::from_bool(positive),
        );
        preds.insert(id, rng.random_bool(0.7) == positive);
        gold.push(ex);
    }
    (gold, preds)
}

pub struct Fixtures {
    pub dir: tempfile::TempDir,
    pub sv_gold: std::path::PathBuf,
    pub sv_pred: std::path::PathBuf,
    pub cdae_gold: std::path::PathBuf,
    pub cdae_pred: std::path::PathBuf,
    pub cdae_annotation: std::path::PathBuf,
    pub ontology: std::path::PathBuf,
    pub stats: std::path::PathBuf,
    pub pool: std::path::PathBuf,
    pub scores: std::path::PathBuf,
    pub plan: std::path::PathBuf,
}

impl Fixtures {
    pub fn path(&self, name: &str) -> std::path::PathBuf {
        self.dir.path().join(name)
    }
}

pub fn write_fixtures(seed: u64) -> Fixtures {
    use famus::curation::CandidatePair;
    use famus::curation::provider::ScoreRecord;
    use famus::model::records::{write_all, ExampleRecord, PredictionRecord, SvPredictionRecord};
    use rand::SeedableRng;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);

    let (sv, sv_preds) = sv_split(&mut rng, 30);
    write_all(&p("sv.jsonl"), &sv.iter().map(ExampleRecord::from_sv).collect::<Vec<_>>()).unwrap();
    let sv_pred: Vec<SvPredictionRecord> = sv_preds
        .iter()
        .map(|(id, &v)| SvPredictionRecord { id: id.clone(), label: Label::from_bool(v) })
        .collect();
    write_all(&p("sv_pred.jsonl"), &sv_pred).unwrap();

    let gold: Vec<CdaeExample> = (0..24)
        .map(|i| random_example(&mut rng, &format!("c{i:03}"), 6, 8 + 2 * i))
        .collect();
    write_all(&p("cdae.jsonl"), &gold.iter().map(ExampleRecord::from_cdae).collect::<Vec<_>>()).unwrap();
    let preds: Vec<PredictionRecord> = gold
        .iter()
        .flat_map(|ex| {
            [
                PredictionRecord::from_set(&random_predictions(&mut rng, ex, Side::Source)),
                PredictionRecord::from_set(&random_predictions(&mut rng, ex, Side::Report)),
            ]
        })
        .collect();
    write_all(&p("cdae_pred.jsonl"), &preds).unwrap();
    let annotation: Vec<ExampleRecord> = gold
        .iter()
        .enumerate()
        .map(|(i, ex)| {
            let mut ex = ex.clone();
            if i % 3 == 0 {
                let owned: Vec<String> = ex.source_refs.keys().cloned().collect();
                let roles: Vec<&str> = owned.iter().map(String::as_str).collect();
                ex.source_refs = random_refs(&mut rng, &ex.source, &roles);
            }
            ExampleRecord::from_cdae(&ex)
        })
        .collect();
    write_all(&p("cdae_annotation.jsonl"), &annotation).unwrap();
    std::fs::write(p("ontology.json"), ontology_json()).unwrap();

    std::fs::write(
        p("stats.jsonl"),
        concat!(
            "{\"frame\":\"Attack\",\"precision\":0.5,\"support\":10}\n",
            "{\"frame\":\"Arrest\",\"precision\":1.0,\"support\":40}\n",
            "{\"frame\":\"Escape\",\"precision\":0.9,\"support\":3}\n",
        ),
    )
    .unwrap();

    let lemmas = ["attack", "strike", "raid", "assault", "hit"];
    let mut pool = Vec::new();
    let mut scores = Vec::new();
    for frame in ["Arrest", "Attack", "Escape"] {
        for j in 0..20 {
            let center = (j % 4) as f64 * 5.0;
            pool.push(CandidatePair {
                id: format!("{frame}-{j:02}"),
                frame: frame.to_string(),
                report: format!("{frame}-r{j:02}"),
                source: format!("{frame}-s{j:02}"),
                lemma: lemmas[rng.random_range(0..lemmas.len())].to_string(),
                embedding: Some(vec![
                    center + rng.random_range(-0.5..0.5),
                    center + rng.random_range(-0.5..0.5),
                ]),
                source_text: None,
            });
        }
    }
    for a in &pool {
        for b in pool.iter().filter(|b| b.frame == a.frame) {
            scores.push(ScoreRecord {
                report: a.report.clone(),
                source: b.source.clone(),
                score: (rng.random_range(0..1000) as f64) / 1000.0,
            });
        }
    }
    write_all(&p("pool.jsonl"), &pool).unwrap();
    write_all(&p("scores.jsonl"), &scores).unwrap();
    std::fs::write(p("plan.tsv"), "frame\tsamples\nArrest\t5\nAttack\t13\nEscape\t25\n").unwrap();

    Fixtures {
        sv_gold: p("sv.jsonl"),
        sv_pred: p("sv_pred.jsonl"),
        cdae_gold: p("cdae.jsonl"),
        cdae_pred: p("cdae_pred.jsonl"),
        cdae_annotation: p("cdae_annotation.jsonl"),
        ontology: p("ontology.json"),
        stats: p("stats.jsonl"),
        pool: p("pool.jsonl"),
        scores: p("scores.jsonl"),
        plan: p("plan.tsv"),
        dir,
    }
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn famus<I, S>(args: I) -> Run
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_famus"))
        .args(args)
        .env_remove("FAMUS_PROVIDER_URL")
        .env_remove("FAMUS_LEMMA_TABLE")
        .output()
        .expect("famus runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}
