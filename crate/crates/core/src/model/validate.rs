use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use super::{tokenize, Document, Example, FrameOntology, RoleEntities};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    /// Example id, or `line N` for records that could not be parsed.
    pub example: String,
    /// Dotted path to the offending field.
    pub field: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub examples: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push_unparsed(&mut self, line: usize, message: impl Into<String>) {
        self.violations.push(Violation {
            example: format!("line {line}"),
            field: String::new(),
            message: message.into(),
        });
        self.violations.sort();
    }

    /// Ids of examples with at least one violation.
    pub fn failing_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.violations.iter().map(|v| v.example.as_str()).collect();
        ids.dedup();
        ids
    }
}

/// Checks every structural and ontology invariant. The report is sorted, so
/// the result does not depend on record order.
pub fn validate_corpus(examples: &[Example], ontology: &FrameOntology) -> ValidationReport {
    run(examples, Some(ontology))
}

/// Structural checks only (spans, tokens, duplicate ids); frames and roles
/// are not looked up.
pub fn validate_structure(examples: &[Example]) -> ValidationReport {
    run(examples, None)
}

fn run(examples: &[Example], ontology: Option<&FrameOntology>) -> ValidationReport {
    let mut violations: Vec<Violation> = examples
        .par_iter()
        .flat_map_iter(|ex| check_example(ex, ontology))
        .collect();

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for ex in examples {
        *counts.entry(ex.id()).or_default() += 1;
    }
    for (id, n) in counts.into_iter().filter(|&(_, n)| n > 1) {
        violations.push(Violation {
            example: id.to_string(),
            field: "id".into(),
            message: format!("id appears {n} times"),
        });
    }
    violations.sort();
    ValidationReport {
        examples: examples.len(),
        violations,
    }
}

struct Checker<'a> {
    id: &'a str,
    out: Vec<Violation>,
}

impl Checker<'_> {
    fn fail(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.out.push(Violation {
            example: self.id.to_string(),
            field: field.into(),
            message: message.into(),
        });
    }

    fn document(&mut self, field: &str, doc: &Document) {
        if doc.tokens.is_empty() {
            self.fail(format!("{field}.tokens"), "document has no tokens");
        }
        if let Some(text) = &doc.text {
            if doc.tokens != tokenize(text) {
                self.fail(
                    format!("{field}.tokens"),
                    "tokens disagree with the tokenization of text",
                );
            }
        }
    }

    fn refs(
        &mut self,
        field: &str,
        refs: &RoleEntities,
        doc: &Document,
        frame: &str,
        ontology: Option<&FrameOntology>,
    ) {
        let roles = ontology.and_then(|o| o.frame(frame));
        for (role, entities) in refs {
            let path = format!("{field}.{role}");
            if let (Some(_), Some(def)) = (ontology, roles) {
                if !def.has_role(role) {
                    self.fail(
                        path.clone(),
                        format!("role '{role}' is not in the FrameOntology role set of '{frame}'"),
                    );
                }
            }
            for (i, entity) in entities.iter().enumerate() {
                let epath = format!("{path}[{i}]");
                if entity.role != *role {
                    self.fail(
                        epath.clone(),
                        format!("entity role '{}' filed under '{role}'", entity.role),
                    );
                }
                if entity.mentions.is_empty() {
                    self.fail(epath.clone(), "entity has no mentions");
                }
                let mut seen = HashSet::new();
                for (j, m) in entity.mentions.iter().enumerate() {
                    let mpath = format!("{epath}.mentions[{j}]");
                    if !m.fits(doc.len()) {
                        self.fail(
                            mpath.clone(),
                            format!(
                                "span [{}, {}) outside document of {} tokens",
                                m.start,
                                m.end,
                                doc.len()
                            ),
                        );
                    }
                    if !seen.insert(m.offsets()) {
                        self.fail(mpath, format!("duplicate mention [{}, {})", m.start, m.end));
                    }
                }
            }
        }
    }
}

fn check_example(example: &Example, ontology: Option<&FrameOntology>) -> Vec<Violation> {
    let mut c = Checker {
        id: example.id(),
        out: Vec::new(),
    };
    c.document("report", example.report());
    c.document("source", example.source());

    let trigger = example.trigger();
    let report_len = example.report().len();
    if !trigger.span.fits(report_len) {
        c.fail(
            "report.trigger",
            format!(
                "trigger span [{}, {}) outside report of {} tokens",
                trigger.span.start, trigger.span.end, report_len
            ),
        );
    }
    if let Some(o) = ontology {
        if o.frame(&trigger.frame).is_none() {
            c.fail(
                "frame",
                format!("frame '{}' is not in the FrameOntology", trigger.frame),
            );
        }
    }

    if let Example::Cdae(ex) = example {
        c.refs("report_args", &ex.report_refs, &ex.report, ex.frame(), ontology);
        c.refs("source_args", &ex.source_refs, &ex.source, ex.frame(), ontology);
    }
    c.out
}
