//! Basis-subtask mining: turn an annotated trajectory corpus into the
//! library the plan agent composes from. The pipeline has four stages —
//! verb extraction, synonym clustering, summarization, frequency filtering —
//! plus a human-edited overlay supplying what no stage can derive
//! (display names, parameter roles, batching eligibility).
//!
//! Everything except summarization is pure and single-threaded
//! deterministic; summarization goes through a [`chop_backends`] backend and
//! is deterministic under replay.

pub mod library;
pub mod segment;
pub mod summarize;
pub mod synonyms;
pub mod verbs;

pub use chop_core::AnnotatedStep;
pub use library::{
    build_library, filter_top_k, load_library, mine_library, save_library, LibraryOverlay,
    MinerConfig, OverlayEntry,
};
pub use segment::{segment_corpus, DemoSegment};
pub use summarize::{
    build_summary_prompt, parse_summary, render_cluster_sequences, summarize_cluster,
    SUMMARY_PROMPT_TEMPLATE,
};
pub use synonyms::{cluster_segments, cluster_synonyms, SynonymTable, VerbCluster};
pub use verbs::{extract_verb, VerbLexicon};

use chop_backends::BackendError;
use chop_core::LibraryError;

#[derive(Debug, thiserror::Error)]
pub enum MinerError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("segmentation threshold must be >= 1, got {0}")]
    InvalidThreshold(usize),
    #[error("instruction has no tokens")]
    EmptyInstruction,
    #[error("no lexicon verb found in `{0}` and fallback is disabled")]
    NoVerbFound(String),
    #[error("cluster `{0}` has no segments to summarize")]
    EmptyCluster(String),
    #[error("summary for `{verb}` is unparseable: {detail}")]
    UnparseableSummary { verb: String, detail: String },
    #[error("no summary doc for cluster `{0}`")]
    MissingDoc(String),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Library(#[from] LibraryError),
    #[error("{path}: {detail}")]
    Io { path: String, detail: String },
    #[error("{path}: malformed: {detail}")]
    Malformed { path: String, detail: String },
}

/// Load a trajectory corpus (JSON list of records).
pub fn load_corpus(path: impl AsRef<std::path::Path>) -> Result<Vec<chop_core::TrajectoryRecord>, MinerError> {
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
