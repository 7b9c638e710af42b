//! Line-delimited JSON record formats.
//!
//! Every file is one JSON object per line; blank lines are skipped. Readers
//! report malformed lines individually so that validation can continue past
//! them, while I/O failures abort the whole read.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    tokenize, ArgumentEntity, CdaeExample, Document, EventTrigger, Example, Label,
    PredictionSet, Provenance, RoleEntities, Side, SvExample, TokenSpan,
};

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: String,
        line: usize,
        message: String,
    },
}

/// One parsed line: the record, or why the line was rejected.
#[derive(Debug)]
pub struct Line<T> {
    pub number: usize,
    pub record: Result<T, String>,
}

pub fn read_lines<T: DeserializeOwned>(path: &Path) -> Result<Vec<Line<T>>, RecordError> {
    let io_err = |source| RecordError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = File::open(path).map_err(io_err)?;
    read_lines_from(BufReader::new(file)).map_err(io_err)
}

pub fn read_lines_from<T: DeserializeOwned>(
    reader: impl BufRead,
) -> Result<Vec<Line<T>>, std::io::Error> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(Line {
            number: idx + 1,
            record: serde_json::from_str(&line).map_err(|e| e.to_string()),
        });
    }
    Ok(out)
}

/// Reads a file and fails on the first malformed record.
pub fn read_all<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, RecordError> {
    read_lines(path)?
        .into_iter()
        .map(|line| {
            line.record.map_err(|message| RecordError::Malformed {
                path: path.display().to_string(),
                line: line.number,
                message,
            })
        })
        .collect()
}

pub fn write_all<T: Serialize>(path: &Path, records: &[T]) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(File::create(path)?);
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanRecord {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DocumentRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tokens: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trigger: Option<SpanRecord>,
}

impl DocumentRecord {
    fn to_document(&self, id: String, side: Side) -> Document {
        let tokens = match (&self.tokens, &self.text) {
            (Some(tokens), _) => tokens.clone(),
            (None, Some(text)) => tokenize(text),
            (None, None) => Vec::new(),
        };
        Document {
            id,
            side,
            text: self.text.clone(),
            tokens,
        }
    }

    pub fn from_document(doc: &Document, trigger: Option<&TokenSpan>) -> Self {
        DocumentRecord {
            text: doc.text.clone(),
            tokens: if doc.text.is_some() {
                None
            } else {
                Some(doc.tokens.clone())
            },
            trigger: trigger.map(|s| SpanRecord {
                start: s.start,
                end: s.end,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityRecord {
    pub mentions: Vec<SpanRecord>,
}

pub type ArgsRecord = BTreeMap<String, Vec<EntityRecord>>;

/// A corpus line. SV and CDAE records share the document fields; a record
/// carrying `report_args` or `source_args` is a CDAE example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleRecord {
    pub id: String,
    pub frame: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub report: DocumentRecord,
    pub source: DocumentRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_args: Option<ArgsRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_args: Option<ArgsRecord>,
}

fn attach(doc: &Document, span: SpanRecord) -> TokenSpan {
    doc.span(span.start, span.end)
        .unwrap_or_else(|| TokenSpan::detached(span.start, span.end))
}

fn entities(args: &ArgsRecord, doc: &Document) -> RoleEntities {
    args.iter()
        .map(|(role, ents)| {
            let ents = ents
                .iter()
                .map(|e| ArgumentEntity {
                    role: role.clone(),
                    side: doc.side,
                    mentions: e.mentions.iter().map(|&m| attach(doc, m)).collect(),
                })
                .collect();
            (role.clone(), ents)
        })
        .collect()
}

fn args_record(refs: &RoleEntities) -> ArgsRecord {
    refs.iter()
        .map(|(role, ents)| {
            let ents = ents
                .iter()
                .map(|e| EntityRecord {
                    mentions: e
                        .mentions
                        .iter()
                        .map(|m| SpanRecord {
                            start: m.start,
                            end: m.end,
                        })
                        .collect(),
                })
                .collect();
            (role.clone(), ents)
        })
        .collect()
}

impl ExampleRecord {
    pub fn is_cdae(&self) -> bool {
        self.report_args.is_some() || self.source_args.is_some()
    }

    /// Converts to a domain example without rejecting anything: spans that
    /// do not fit their document keep their offsets but get no surface, and
    /// [`validate_corpus`](super::validate_corpus) reports them.
    pub fn to_example(&self) -> Example {
        let report = self
            .report
            .to_document(format!("{}#report", self.id), Side::Report);
        let source = self
            .source
            .to_document(format!("{}#source", self.id), Side::Source);
        let trigger_span = self
            .report
            .trigger
            .map(|t| attach(&report, t))
            .unwrap_or_else(|| TokenSpan::detached(0, 0));
        let trigger = EventTrigger {
            span: trigger_span,
            frame: self.frame.clone(),
        };
        if self.is_cdae() {
            let empty = ArgsRecord::new();
            let report_refs = entities(self.report_args.as_ref().unwrap_or(&empty), &report);
            let source_refs = entities(self.source_args.as_ref().unwrap_or(&empty), &source);
            Example::Cdae(CdaeExample {
                id: self.id.clone(),
                report,
                trigger,
                source,
                report_refs,
                source_refs,
            })
        } else {
            Example::Sv(SvExample {
                id: self.id.clone(),
                report,
                trigger,
                source,
                label: self.label.unwrap_or(Label::Negative),
                provenance: self.provenance.unwrap_or_default(),
            })
        }
    }

    pub fn from_sv(example: &SvExample) -> Self {
        ExampleRecord {
            id: example.id.clone(),
            frame: example.trigger.frame.clone(),
            label: Some(example.label),
            provenance: Some(example.provenance),
            report: DocumentRecord::from_document(&example.report, Some(&example.trigger.span)),
            source: DocumentRecord::from_document(&example.source, None),
            report_args: None,
            source_args: None,
        }
    }

    pub fn from_cdae(example: &CdaeExample) -> Self {
        ExampleRecord {
            id: example.id.clone(),
            frame: example.trigger.frame.clone(),
            label: None,
            provenance: None,
            report: DocumentRecord::from_document(&example.report, Some(&example.trigger.span)),
            source: DocumentRecord::from_document(&example.source, None),
            report_args: Some(args_record(&example.report_refs)),
            source_args: Some(args_record(&example.source_refs)),
        }
    }
}

/// A predicted mention. Spans proposed from another document carry their
/// own `tokens` and `"foreign": true`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedSpanRecord {
    pub start: usize,
    pub end: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tokens: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub foreign: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub side: Side,
    #[serde(default)]
    pub args: BTreeMap<String, Vec<PredictedSpanRecord>>,
}

impl PredictionRecord {
    pub fn from_set(set: &PredictionSet) -> Self {
        PredictionRecord {
            id: set.example_id.clone(),
            side: set.side,
            args: set
                .args
                .iter()
                .map(|(role, spans)| {
                    let spans = spans
                        .iter()
                        .map(|s| PredictedSpanRecord {
                            start: s.start,
                            end: s.end,
                            tokens: s.foreign.then(|| s.surface.clone()),
                            foreign: s.foreign,
                        })
                        .collect();
                    (role.clone(), spans)
                })
                .collect(),
        }
    }

    /// Attaches spans to the document they predict into. Native spans must
    /// fit the document; foreign spans must carry non-empty tokens.
    pub fn resolve(&self, doc: &Document) -> Result<PredictionSet, String> {
        let mut set = PredictionSet::new(self.id.clone(), self.side);
        for (role, spans) in &self.args {
            let mut resolved = Vec::with_capacity(spans.len());
            for s in spans {
                let span = if s.foreign {
                    match &s.tokens {
                        Some(tokens) if !tokens.is_empty() => {
                            TokenSpan::with_surface(s.start, s.end, tokens.iter().cloned())
                                .into_foreign()
                        }
                        _ => {
                            return Err(format!(
                                "prediction {} role {role}: foreign span without tokens",
                                self.id
                            ))
                        }
                    }
                } else {
                    doc.span(s.start, s.end).ok_or_else(|| {
                        format!(
                            "prediction {} role {role}: span [{}, {}) outside {} document of {} tokens",
                            self.id,
                            s.start,
                            s.end,
                            self.side,
                            doc.len()
                        )
                    })?
                };
                resolved.push(span);
            }
            set.args.insert(role.clone(), resolved);
        }
        Ok(set)
    }
}

/// Binary source-validation decision for one example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SvPredictionRecord {
    pub id: String,
    pub label: Label,
}

/// Loads a corpus file, failing on malformed lines.
pub fn load_examples(path: &Path) -> Result<Vec<Example>, RecordError> {
    Ok(read_all::<ExampleRecord>(path)?
        .iter()
        .map(ExampleRecord::to_example)
        .collect())
}
