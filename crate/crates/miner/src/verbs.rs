//! Verb extraction via a bundled lexicon: the first instruction token found
//! in the lexicon represents the instruction, with an optional fallback to
//! the bare first token.

use crate::MinerError;
use std::collections::BTreeSet;
use std::path::Path;

/// Known action verbs, one per line in the data file (`#` starts a comment).
#[derive(Debug, Clone, Default)]
pub struct VerbLexicon {
    verbs: BTreeSet<String>,
    fallback_to_first: bool,
}

impl VerbLexicon {
    pub fn new(verbs: impl IntoIterator<Item = String>) -> Self {
        Self {
            verbs: verbs.into_iter().map(|v| v.trim().to_lowercase()).collect(),
            fallback_to_first: true,
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, MinerError> {
        let path = path.as_ref();
        let raw = std::fs::read_to_string(path).map_err(|e| MinerError::Io {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        let verbs = raw
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_lowercase());
        Ok(Self::new(verbs))
    }

    /// Disable the first-token fallback; unknown instructions then error.
    pub fn without_fallback(mut self) -> Self {
        self.fallback_to_first = false;
        self
    }

    pub fn contains(&self, word: &str) -> bool {
        self.verbs.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.verbs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verbs.is_empty()
    }
}

fn clean_token(token: &str) -> String {
    token
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase()
}

/// Lower-cased head verb of the instruction: the first token present in the
/// lexicon, else (when enabled) the first token.
pub fn extract_verb(instruction: &str, lexicon: &VerbLexicon) -> Result<String, MinerError> {
    let tokens: Vec<String> = instruction
        .split_whitespace()
        .map(clean_token)
        .filter(|t| !t.is_empty())
        .collect();
    if tokens.is_empty() {
        return Err(MinerError::EmptyInstruction);
    }
    if let Some(hit) = tokens.iter().find(|t| lexicon.contains(t)) {
        return Ok(hit.clone());
    }
    if lexicon.fallback_to_first {
        Ok(tokens[0].clone())
    } else {
        Err(MinerError::NoVerbFound(instruction.to_string()))
    }
}
