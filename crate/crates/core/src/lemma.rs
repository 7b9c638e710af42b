//! Rule-based English lemmatizer with an optional lookup table.

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LemmaTableError {
    #[error("cannot read lemma table {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("lemma table line {line}: expected `token<TAB>lemma`")]
    Malformed { line: usize },
}

/// Token → lemma overrides. Keys are stored lowercased.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LemmaTable {
    entries: HashMap<String, String>,
}

impl LemmaTable {
    pub fn parse(text: &str) -> Result<Self, LemmaTableError> {
        let mut entries = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (token, lemma) = line
                .split_once('\t')
                .ok_or(LemmaTableError::Malformed { line: i + 1 })?;
            let (token, lemma) = (token.trim(), lemma.trim());
            if token.is_empty() || lemma.is_empty() {
                return Err(LemmaTableError::Malformed { line: i + 1 });
            }
            entries.insert(token.to_lowercase(), lemma.to_lowercase());
        }
        Ok(LemmaTable { entries })
    }

    pub fn load(path: &Path) -> Result<Self, LemmaTableError> {
        let text = std::fs::read_to_string(path).map_err(|source| LemmaTableError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn insert(&mut self, token: &str, lemma: &str) {
        self.entries.insert(token.to_lowercase(), lemma.to_lowercase());
    }

    pub fn get(&self, token: &str) -> Option<&str> {
        self.entries.get(token).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn has_vowel(s: &str) -> bool {
    s.bytes().any(|c| is_vowel(c) || c == b'y')
}

/// `stopp` → `stop`; `l`, `s` and `z` doubles are kept (`call`, `pass`).
fn undouble(stem: &str) -> &str {
    let b = stem.as_bytes();
    let n = b.len();
    if n >= 3 && b[n - 1] == b[n - 2] && !is_vowel(b[n - 1]) && !matches!(b[n - 1], b'l' | b's' | b'z')
    {
        &stem[..n - 1]
    } else {
        stem
    }
}

fn strip_suffix_rules(word: &str) -> String {
    if !word.is_ascii() {
        return word.to_string();
    }
    let n = word.len();

    if n > 4 {
        if let Some(stem) = word.strip_suffix("ies") {
            return format!("{stem}y");
        }
        if let Some(stem) = word.strip_suffix("ied") {
            return format!("{stem}y");
        }
    }
    if let Some(stem) = word.strip_suffix("sses") {
        return format!("{stem}ss");
    }
    if n > 4 {
        for tail in ["ches", "shes", "xes", "zes"] {
            if word.ends_with(tail) {
                return word[..n - 2].to_string();
            }
        }
    }
    if n > 3 && word.ends_with('s') && !["ss", "us", "is"].iter().any(|t| word.ends_with(t)) {
        return word[..n - 1].to_string();
    }
    for suffix in ["ing", "ed"] {
        if let Some(stem) = word.strip_suffix(suffix) {
            if stem.len() >= 3 && has_vowel(stem) {
                return undouble(stem).to_string();
            }
        }
    }
    for suffix in ["est", "er"] {
        if let Some(stem) = word.strip_suffix(suffix) {
            if stem.len() >= 3 && has_vowel(stem) {
                return undouble(stem).to_string();
            }
        }
    }
    word.to_string()
}

/// Lowercases, consults `table`, then applies the first matching suffix
/// rule: `-ies`/`-ied` → `-y`, `-sses` → `-ss`, sibilant `-es`, plural `-s`,
/// `-ing`, `-ed`, then comparative `-est`/`-er`. Consonant doubling
/// before `-ing`/`-ed`/`-er`/`-est` is undone.
pub fn lemmatize(token: &str, table: Option<&LemmaTable>) -> String {
    let lower = token.to_lowercase();
    if let Some(lemma) = table.and_then(|t| t.get(&lower)) {
        return lemma.to_string();
    }
    strip_suffix_rules(&lower)
}
