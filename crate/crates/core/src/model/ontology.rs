use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const TIME_ROLE: &str = "Time";
pub const PLACE_ROLE: &str = "Place";

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error("cannot read ontology {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed ontology file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("frame '{frame}': {message}")]
    InvalidFrame { frame: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameDef {
    /// Core roles followed by Time and Place.
    pub roles: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub situation: Option<bool>,
}

impl FrameDef {
    pub fn has_role(&self, role: &str) -> bool {
        self.roles.iter().any(|r| r == role)
    }
}

/// Event frames and their role sets, loaded from a user-supplied file of the
/// form `{"frames": {frame_id: {"roles": [...]}}}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameOntology {
    pub frames: BTreeMap<String, FrameDef>,
}

impl FrameOntology {
    pub fn from_json(text: &str) -> Result<Self, OntologyError> {
        let ontology: FrameOntology = serde_json::from_str(text)?;
        ontology.check()?;
        Ok(ontology)
    }

    pub fn load(path: &Path) -> Result<Self, OntologyError> {
        let text = std::fs::read_to_string(path).map_err(|source| OntologyError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Builds an ontology from `(frame, core roles)` pairs, appending Time
    /// and Place where missing.
    pub fn with_core_roles<'a>(
        frames: impl IntoIterator<Item = (&'a str, &'a [&'a str])>,
    ) -> Result<Self, OntologyError> {
        let mut ontology = FrameOntology::default();
        for (frame, core) in frames {
            let mut roles: Vec<String> = core.iter().map(|r| r.to_string()).collect();
            for extra in [TIME_ROLE, PLACE_ROLE] {
                if !roles.iter().any(|r| r == extra) {
                    roles.push(extra.to_string());
                }
            }
            ontology.frames.insert(
                frame.to_string(),
                FrameDef {
                    roles,
                    situation: None,
                },
            );
        }
        ontology.check()?;
        Ok(ontology)
    }

    pub fn frame(&self, id: &str) -> Option<&FrameDef> {
        self.frames.get(id)
    }

    pub fn roles(&self, id: &str) -> Option<&[String]> {
        self.frames.get(id).map(|f| f.roles.as_slice())
    }

    fn check(&self) -> Result<(), OntologyError> {
        for (frame, def) in &self.frames {
            let invalid = |message: String| OntologyError::InvalidFrame {
                frame: frame.clone(),
                message,
            };
            if def.roles.is_empty() {
                return Err(invalid("role list is empty".into()));
            }
            let mut seen = HashSet::new();
            for role in &def.roles {
                if !seen.insert(role.as_str()) {
                    return Err(invalid(format!("duplicate role '{role}'")));
                }
            }
            for required in [TIME_ROLE, PLACE_ROLE] {
                if !seen.contains(required) {
                    return Err(invalid(format!("missing required role '{required}'")));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_checks_roles() {
        let ontology = FrameOntology::from_json(
            r#"{"frames":{"Attack":{"roles":["Assailant","Victim","Time","Place"]}}}"#,
        )
        .unwrap();
        assert!(ontology.frame("Attack").unwrap().has_role("Victim"));
    }

    #[test]
    fn rejects_missing_place() {
        let err = FrameOntology::from_json(r#"{"frames":{"A":{"roles":["Agent","Time"]}}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("Place"), "{err}");
    }

    #[test]
    fn rejects_duplicates_and_empty_lists() {
        assert!(FrameOntology::from_json(
            r#"{"frames":{"A":{"roles":["Time","Place","Time"]}}}"#
        )
        .is_err());
        assert!(FrameOntology::from_json(r#"{"frames":{"A":{"roles":[]}}}"#).is_err());
    }

    #[test]
    fn core_role_builder_appends_time_and_place() {
        let o = FrameOntology::with_core_roles([("Arrest", &["Authorities", "Suspect"][..])])
            .unwrap();
        assert_eq!(
            o.roles("Arrest").unwrap(),
            ["Authorities", "Suspect", "Time", "Place"]
        );
    }
}
