//! Record/replay cassettes: persisted request→response stores that make
//! model interactions deterministic. Files are human-readable JSON; entries
//! may be hand-authored with a `prompt` (the fingerprint is derived at load
//! time) or carry an explicit `fingerprint` as written by the recorder.

use crate::{fingerprint, fingerprint_parts, BackendError, BackendRequest, CompletionBackend};
use chop_core::BackendRole;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CassetteMode {
    Record,
    Replay,
    ReplayStrict,
}

/// One persisted exchange. At least one of `prompt` / `fingerprint` must be
/// present; the recorder writes both so cassettes stay auditable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CassetteEntry {
    pub role: BackendRole,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
    pub response: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CassetteFile {
    pub entries: Vec<CassetteEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum CassetteError {
    #[error("cassette {path}: {detail}")]
    Io { path: String, detail: String },
    #[error("cassette {path}: malformed: {detail}")]
    Malformed { path: String, detail: String },
    #[error("cassette entry {index} has neither prompt nor fingerprint")]
    MissingKey { index: usize },
    #[error("duplicate fingerprint `{fingerprint}` not allowed in replay_strict")]
    DuplicateFingerprint { fingerprint: String },
}

/// An in-memory cassette: ordered (fingerprint, response) entries plus the
/// mode they will be used under.
#[derive(Debug, Clone)]
pub struct Cassette {
    entries: Vec<(String, CassetteEntry)>,
    mode: CassetteMode,
}

impl Cassette {
    pub fn from_entries(entries: Vec<CassetteEntry>, mode: CassetteMode) -> Result<Self, CassetteError> {
        let mut keyed = Vec::with_capacity(entries.len());
        let mut seen = BTreeMap::new();
        for (index, entry) in entries.into_iter().enumerate() {
            let fp = match (&entry.fingerprint, &entry.prompt) {
                (Some(fp), _) => fp.clone(),
                (None, Some(prompt)) => fingerprint_parts(entry.role, prompt),
                (None, None) => return Err(CassetteError::MissingKey { index }),
            };
            if mode == CassetteMode::ReplayStrict && seen.insert(fp.clone(), ()).is_some() {
                return Err(CassetteError::DuplicateFingerprint { fingerprint: fp });
            }
            keyed.push((fp, entry));
        }
        Ok(Self { entries: keyed, mode })
    }

    pub fn load(path: impl AsRef<Path>, mode: CassetteMode) -> Result<Self, CassetteError> {
        let path = path.as_ref();
        let raw = std::fs::read_to_string(path).map_err(|e| CassetteError::Io {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        let file: CassetteFile = serde_json::from_str(&raw).map_err(|e| CassetteError::Malformed {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        Self::from_entries(file.entries, mode)
    }

    pub fn mode(&self) -> CassetteMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Replays stored responses by request fingerprint.
///
/// Strict mode resolves by pure lookup (fingerprints are unique). Plain
/// replay dispenses duplicate entries in recorded order and repeats the last
/// one once exhausted, so recorded loops keep looping.
pub struct ReplayBackend {
    strict: BTreeMap<String, String>,
    queues: Mutex<BTreeMap<String, VecDeque<String>>>,
    last: BTreeMap<String, String>,
    mode: CassetteMode,
}

impl ReplayBackend {
    pub fn new(cassette: Cassette) -> Self {
        let mut strict = BTreeMap::new();
        let mut queues: BTreeMap<String, VecDeque<String>> = BTreeMap::new();
        let mut last = BTreeMap::new();
        for (fp, entry) in &cassette.entries {
            strict.entry(fp.clone()).or_insert_with(|| entry.response.clone());
            queues.entry(fp.clone()).or_default().push_back(entry.response.clone());
            last.insert(fp.clone(), entry.response.clone());
        }
        Self {
            strict,
            queues: Mutex::new(queues),
            last,
            mode: cassette.mode(),
        }
    }

    pub fn from_file(path: impl AsRef<Path>, mode: CassetteMode) -> Result<Self, CassetteError> {
        Ok(Self::new(Cassette::load(path, mode)?))
    }
}

impl CompletionBackend for ReplayBackend {
    fn complete(&self, req: &BackendRequest) -> Result<String, BackendError> {
        if req.prompt.trim().is_empty() {
            return Err(BackendError::EmptyPrompt);
        }
        let fp = fingerprint(req);
        if self.mode == CassetteMode::ReplayStrict {
            return self
                .strict
                .get(&fp)
                .cloned()
                .ok_or(BackendError::CassetteMiss { fingerprint: fp });
        }
        let mut queues = self.queues.lock().expect("replay queue lock");
        match queues.get_mut(&fp).and_then(VecDeque::pop_front) {
            Some(response) => Ok(response),
            None => self
                .last
                .get(&fp)
                .cloned()
                .ok_or(BackendError::CassetteMiss { fingerprint: fp }),
        }
    }
}

/// Wraps another backend and persists every exchange, in request order, to a
/// cassette file. Writes are serialized internally.
pub struct RecordingBackend<B> {
    inner: B,
    path: PathBuf,
    entries: Mutex<Vec<CassetteEntry>>,
}

impl<B: CompletionBackend> RecordingBackend<B> {
    pub fn new(inner: B, path: impl Into<PathBuf>) -> Self {
        Self {
            inner,
            path: path.into(),
            entries: Mutex::new(Vec::new()),
        }
    }

    fn persist(&self, entries: &[CassetteEntry]) -> Result<(), BackendError> {
        let file = CassetteFile {
            entries: entries.to_vec(),
        };
        let json = serde_json::to_string_pretty(&file).expect("cassette serializes");
        std::fs::write(&self.path, json + "\n").map_err(|e| BackendError::Io {
            path: self.path.display().to_string(),
            detail: e.to_string(),
        })
    }
}

impl<B: CompletionBackend> CompletionBackend for RecordingBackend<B> {
    fn complete(&self, req: &BackendRequest) -> Result<String, BackendError> {
        let response = self.inner.complete(req)?;
        let entry = CassetteEntry {
            role: req.role,
            prompt: Some(req.prompt.clone()),
            fingerprint: Some(fingerprint(req)),
            response: response.clone(),
        };
        let mut entries = self.entries.lock().expect("recorder lock");
        entries.push(entry);
        self.persist(&entries)?;
        Ok(response)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scripted::{ScriptEntry, ScriptedBackend};
    use crate::RequestMetadata;

    fn req(prompt: &str) -> BackendRequest {
        BackendRequest::new(BackendRole::Plan, prompt, RequestMetadata::for_task("t"))
    }

    #[test]
    fn hand_authored_prompt_entries_replay() {
        let cassette = Cassette::from_entries(
            vec![CassetteEntry {
                role: BackendRole::Plan,
                prompt: Some("plan   this".to_string()),
                fingerprint: None,
                response: "1. Search Item (news)".to_string(),
            }],
            CassetteMode::Replay,
        )
        .unwrap();
        let backend = ReplayBackend::new(cassette);
        // Whitespace-collapsed fingerprints tolerate reflowed prompts.
        assert_eq!(backend.complete(&req("plan this")).unwrap(), "1. Search Item (news)");
    }

    #[test]
    fn strict_mode_misses_on_unseen_fingerprint() {
        let cassette = Cassette::from_entries(vec![], CassetteMode::ReplayStrict).unwrap();
        let backend = ReplayBackend::new(cassette);
        assert!(matches!(
            backend.complete(&req("never recorded")),
            Err(BackendError::CassetteMiss { .. })
        ));
    }

    #[test]
    fn strict_mode_rejects_duplicate_fingerprints() {
        let entry = CassetteEntry {
            role: BackendRole::Plan,
            prompt: Some("same".to_string()),
            fingerprint: None,
            response: "r".to_string(),
        };
        let err = Cassette::from_entries(vec![entry.clone(), entry], CassetteMode::ReplayStrict);
        assert!(matches!(err, Err(CassetteError::DuplicateFingerprint { .. })));
    }

    #[test]
    fn plain_replay_dispenses_duplicates_in_order_then_sticks() {
        let mk = |response: &str| CassetteEntry {
            role: BackendRole::Plan,
            prompt: Some("same".to_string()),
            fingerprint: None,
            response: response.to_string(),
        };
        let cassette =
            Cassette::from_entries(vec![mk("first"), mk("second")], CassetteMode::Replay).unwrap();
        let backend = ReplayBackend::new(cassette);
        assert_eq!(backend.complete(&req("same")).unwrap(), "first");
        assert_eq!(backend.complete(&req("same")).unwrap(), "second");
        assert_eq!(backend.complete(&req("same")).unwrap(), "second");
    }

    #[test]
    fn record_then_replay_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cassette.json");

        let scripted = ScriptedBackend::new(vec![ScriptEntry {
            role: BackendRole::Plan,
            task_id: "t".to_string(),
            response: "scripted answer".to_string(),
            repeat: false,
        }]);
        let recorder = RecordingBackend::new(scripted, &path);
        let recorded = recorder.complete(&req("the prompt")).unwrap();

        let replay = ReplayBackend::from_file(&path, CassetteMode::ReplayStrict).unwrap();
        let replayed = replay.complete(&req("the prompt")).unwrap();
        assert_eq!(recorded, replayed);
    }

    #[test]
    fn entry_without_any_key_is_rejected() {
        let err = Cassette::from_entries(
            vec![CassetteEntry {
                role: BackendRole::Plan,
                prompt: None,
                fingerprint: None,
                response: "r".to_string(),
            }],
            CassetteMode::Replay,
        );
        assert!(matches!(err, Err(CassetteError::MissingKey { index: 0 })));
    }
}
