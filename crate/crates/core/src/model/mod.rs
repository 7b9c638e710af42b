//! Domain types shared by every scorer, baseline and curation routine.
//!
//! Spans are token-index based and end-exclusive. A role that has no key in
//! an argument map is the null argument; there is no empty-span sentinel.

mod ontology;
pub mod records;
mod tokenize;
mod validate;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use ontology::{FrameDef, FrameOntology, OntologyError, PLACE_ROLE, TIME_ROLE};
pub use tokenize::{is_punctuation, tokenize};
pub use validate::{validate_corpus, validate_structure, ValidationReport, Violation};

/// Which document of a (report, source) pair a span lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Report,
    Source,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Report => "report",
            Side::Source => "source",
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "report" => Ok(Side::Report),
            "source" => Ok(Side::Source),
            other => Err(format!("unknown side '{other}' (expected report|source)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn is_positive(self) -> bool {
        matches!(self, Label::Positive)
    }

    pub fn from_bool(valid: bool) -> Self {
        if valid {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    #[default]
    Gold,
    Silver,
    Platinum,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub side: Side,
    pub text: Option<String>,
    pub tokens: Vec<String>,
}

impl Document {
    pub fn from_text(id: impl Into<String>, side: Side, text: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        Document {
            id: id.into(),
            side,
            text: Some(text),
            tokens,
        }
    }

    /// Pre-tokenized input is kept verbatim.
    pub fn from_tokens<S: Into<String>>(
        id: impl Into<String>,
        side: Side,
        tokens: impl IntoIterator<Item = S>,
    ) -> Self {
        Document {
            id: id.into(),
            side,
            text: None,
            tokens: tokens.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Builds a span attached to this document, or `None` when the offsets
    /// are empty or out of range.
    pub fn span(&self, start: usize, end: usize) -> Option<TokenSpan> {
        if start < end && end <= self.tokens.len() {
            Some(TokenSpan {
                start,
                end,
                surface: self.tokens[start..end].to_vec(),
                foreign: false,
            })
        } else {
            None
        }
    }
}

/// A contiguous run of tokens `[start, end)`.
///
/// `foreign` marks spans whose offsets refer to some other document (for
/// example report arguments proposed as source predictions). Such spans can
/// only be compared through their surface tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenSpan {
    pub start: usize,
    pub end: usize,
    pub surface: Vec<String>,
    pub foreign: bool,
}

impl TokenSpan {
    /// A span with no attached document; the surface is left empty.
    pub fn detached(start: usize, end: usize) -> Self {
        TokenSpan {
            start,
            end,
            surface: Vec::new(),
            foreign: false,
        }
    }

    pub fn with_surface<S: Into<String>>(
        start: usize,
        end: usize,
        surface: impl IntoIterator<Item = S>,
    ) -> Self {
        TokenSpan {
            start,
            end,
            surface: surface.into_iter().map(Into::into).collect(),
            foreign: false,
        }
    }

    pub fn into_foreign(mut self) -> Self {
        self.foreign = true;
        self
    }

    pub fn offsets(&self) -> (usize, usize) {
        (self.start, self.end)
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    /// Checks `0 <= start < end <= doc_len`.
    pub fn fits(&self, doc_len: usize) -> bool {
        self.start < self.end && self.end <= doc_len
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventTrigger {
    pub span: TokenSpan,
    pub frame: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgumentMention {
    pub role: String,
    pub span: TokenSpan,
    pub side: Side,
}

/// A role-labelled cluster of coreferent mentions. The first mention is the
/// one a human annotator marked; the rest come from coreference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgumentEntity {
    pub role: String,
    pub mentions: Vec<TokenSpan>,
    pub side: Side,
}

impl ArgumentEntity {
    pub fn new(role: impl Into<String>, side: Side, mentions: Vec<TokenSpan>) -> Self {
        ArgumentEntity {
            role: role.into(),
            mentions,
            side,
        }
    }

    /// The annotated mention, i.e. the first listed one.
    pub fn head(&self) -> Option<&TokenSpan> {
        self.mentions.first()
    }
}

/// Role → reference entities. Absent roles are null arguments.
pub type RoleEntities = BTreeMap<String, Vec<ArgumentEntity>>;

/// Role → predicted mentions.
pub type RoleSpans = BTreeMap<String, Vec<TokenSpan>>;

#[derive(Debug, Clone, PartialEq)]
pub struct SvExample {
    pub id: String,
    pub report: Document,
    pub trigger: EventTrigger,
    pub source: Document,
    pub label: Label,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdaeExample {
    pub id: String,
    pub report: Document,
    pub trigger: EventTrigger,
    pub source: Document,
    pub report_refs: RoleEntities,
    pub source_refs: RoleEntities,
}

impl CdaeExample {
    pub fn refs(&self, side: Side) -> &RoleEntities {
        match side {
            Side::Report => &self.report_refs,
            Side::Source => &self.source_refs,
        }
    }

    pub fn document(&self, side: Side) -> &Document {
        match side {
            Side::Report => &self.report,
            Side::Source => &self.source,
        }
    }

    pub fn frame(&self) -> &str {
        &self.trigger.frame
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Example {
    Sv(SvExample),
    Cdae(CdaeExample),
}

impl Example {
    pub fn id(&self) -> &str {
        match self {
            Example::Sv(e) => &e.id,
            Example::Cdae(e) => &e.id,
        }
    }

    pub fn report(&self) -> &Document {
        match self {
            Example::Sv(e) => &e.report,
            Example::Cdae(e) => &e.report,
        }
    }

    pub fn source(&self) -> &Document {
        match self {
            Example::Sv(e) => &e.source,
            Example::Cdae(e) => &e.source,
        }
    }

    pub fn trigger(&self) -> &EventTrigger {
        match self {
            Example::Sv(e) => &e.trigger,
            Example::Cdae(e) => &e.trigger,
        }
    }
}

/// Model output for one document of one example.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionSet {
    pub example_id: String,
    pub side: Side,
    pub args: RoleSpans,
}

impl PredictionSet {
    pub fn new(example_id: impl Into<String>, side: Side) -> Self {
        PredictionSet {
            example_id: example_id.into(),
            side,
            args: RoleSpans::new(),
        }
    }

    pub fn mention_count(&self) -> usize {
        self.args.values().map(Vec::len).sum()
    }

    /// Whether the role has at least one predicted mention.
    pub fn fills(&self, role: &str) -> bool {
        self.args.get(role).is_some_and(|spans| !spans.is_empty())
    }
}
