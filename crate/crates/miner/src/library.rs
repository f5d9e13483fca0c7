//! Library assembly: frequency filtering, the human-edited overlay that
//! supplies names/arities/flags, and the end-to-end mining pipeline.

use crate::segment::segment_corpus;
use crate::summarize::summarize_cluster;
use crate::synonyms::{cluster_segments, SynonymTable, VerbCluster};
use crate::verbs::{extract_verb, VerbLexicon};
use crate::MinerError;
use chop_backends::CompletionBackend;
use chop_core::{BasisSubtask, SubtaskDoc, SubtaskLibrary, TrajectoryRecord};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// The `k` highest-frequency clusters, ties broken by lexicographically
/// smaller canonical verb. Stable and deterministic; returns everything when
/// fewer than `k` clusters exist.
pub fn filter_top_k(clusters: &[VerbCluster], k: usize) -> Vec<VerbCluster> {
    let mut sorted: Vec<VerbCluster> = clusters.to_vec();
    sorted.sort_by(|a, b| {
        b.frequency
            .cmp(&a.frequency)
            .then_with(|| a.canonical_verb.cmp(&b.canonical_verb))
    });
    sorted.truncate(k);
    sorted
}

/// Per-verb manual review: the display name, parameter roles, and batching
/// eligibility the pipeline cannot derive on its own.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlayEntry {
    pub name: String,
    #[serde(default)]
    pub parameter_roles: Vec<String>,
    #[serde(default)]
    pub fixed_flow: bool,
}

/// canonical verb -> overlay entry, loaded from a JSON config.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LibraryOverlay {
    entries: BTreeMap<String, OverlayEntry>,
}

impl LibraryOverlay {
    pub fn new(entries: BTreeMap<String, OverlayEntry>) -> Self {
        Self { entries }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, MinerError> {
        let path = path.as_ref();
        let raw = std::fs::read_to_string(path).map_err(|e| MinerError::Io {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        serde_json::from_str(&raw).map_err(|e| MinerError::Malformed {
            path: path.display().to_string(),
            detail: e.to_string(),
        })
    }

    pub fn get(&self, canonical_verb: &str) -> Option<&OverlayEntry> {
        self.entries.get(canonical_verb)
    }
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// One [`BasisSubtask`] per cluster. Arity and parameter roles come from the
/// overlay; clusters without an entry default to one generic parameter and
/// no batching.
pub fn build_library(
    clusters: &[VerbCluster],
    docs: &BTreeMap<String, SubtaskDoc>,
    overlay: &LibraryOverlay,
) -> Result<SubtaskLibrary, MinerError> {
    let mut subtasks = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let doc = docs
            .get(&cluster.canonical_verb)
            .ok_or_else(|| MinerError::MissingDoc(cluster.canonical_verb.clone()))?;
        let (name, parameter_roles, fixed_flow) = match overlay.get(&cluster.canonical_verb) {
            Some(entry) => (
                entry.name.clone(),
                if entry.parameter_roles.is_empty() {
                    vec!["parameter".to_string()]
                } else {
                    entry.parameter_roles.clone()
                },
                entry.fixed_flow,
            ),
            None => (
                capitalize(&cluster.canonical_verb),
                vec!["parameter".to_string()],
                false,
            ),
        };
        subtasks.push(BasisSubtask {
            name,
            arity: parameter_roles.len(),
            parameter_roles,
            doc: doc.clone(),
            fixed_flow,
            frequency: cluster.frequency,
        });
    }
    Ok(SubtaskLibrary::new(subtasks)?)
}

#[derive(Debug, Clone)]
pub struct MinerConfig {
    /// Minimum steps per demonstration (the K >= 3 rule).
    pub min_steps: usize,
    /// Basis subtasks to retain (top-k by frequency).
    pub top_k: usize,
}

impl Default for MinerConfig {
    fn default() -> Self {
        Self {
            min_steps: 3,
            top_k: 10,
        }
    }
}

/// The full pipeline: segment, tag, cluster, filter, summarize, assemble.
/// Returns the library plus the retained clusters for reporting.
pub fn mine_library(
    records: &[TrajectoryRecord],
    config: &MinerConfig,
    lexicon: &VerbLexicon,
    table: &SynonymTable,
    overlay: &LibraryOverlay,
    backend: &dyn CompletionBackend,
) -> Result<(SubtaskLibrary, Vec<VerbCluster>), MinerError> {
    let segments = segment_corpus(records, config.min_steps)?;
    let mut tagged = Vec::with_capacity(segments.len());
    for segment in segments {
        let verb = extract_verb(&segment.instruction, lexicon)?;
        tagged.push((verb, segment));
    }
    let clusters = cluster_segments(tagged, table);
    let retained = filter_top_k(&clusters, config.top_k);

    let mut docs = BTreeMap::new();
    for cluster in &retained {
        let doc = summarize_cluster(cluster, backend)?;
        docs.insert(cluster.canonical_verb.clone(), doc);
    }
    let library = build_library(&retained, &docs, overlay)?;
    Ok((library, retained))
}

/// Write the library as deterministic pretty JSON.
pub fn save_library(library: &SubtaskLibrary, path: impl AsRef<Path>) -> Result<(), MinerError> {
    let path = path.as_ref();
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| MinerError::Io {
            path: parent.display().to_string(),
            detail: e.to_string(),
        })?;
    }
    let json = serde_json::to_string_pretty(library).expect("library serializes");
    std::fs::write(path, json + "\n").map_err(|e| MinerError::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })
}

pub fn load_library(path: impl AsRef<Path>) -> Result<SubtaskLibrary, MinerError> {
    let path = path.as_ref();
    let raw = std::fs::read_to_string(path).map_err(|e| MinerError::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let library: SubtaskLibrary = serde_json::from_str(&raw).map_err(|e| MinerError::Malformed {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    Ok(library)
}
