//! Pluggable completion backends. Every agent role talks to a
//! [`CompletionBackend`]; what sits behind it is a hand-authored script, a
//! recorded cassette, or a live HTTP provider. Backends must be safe to call
//! from concurrent episode runners.

pub mod cassette;
pub mod http;
pub mod request;
pub mod scripted;

pub use cassette::{
    Cassette, CassetteEntry, CassetteError, CassetteFile, CassetteMode, RecordingBackend,
    ReplayBackend,
};
pub use http::{HttpBackend, HttpConfig};
pub use request::{fingerprint, fingerprint_parts, BackendRequest, RequestMetadata};
pub use scripted::{ScriptEntry, ScriptFile, ScriptedBackend};

use chop_core::BackendRole;

#[derive(Debug, thiserror::Error)]
pub enum BackendError {
    #[error("backend request has an empty prompt")]
    EmptyPrompt,
    #[error("script exhausted for role `{role}`, task `{task_id}`")]
    ScriptExhausted { role: BackendRole, task_id: String },
    #[error("cassette miss for fingerprint `{fingerprint}`")]
    CassetteMiss { fingerprint: String },
    #[error("transport failed after {attempts} attempt(s): {detail}")]
    Transport { attempts: u32, detail: String },
    #[error("credential environment variable `{var}` is not set")]
    MissingCredential { var: String },
    #[error("{path}: {detail}")]
    Io { path: String, detail: String },
    #[error("{path}: malformed: {detail}")]
    Malformed { path: String, detail: String },
}

/// A completion provider. Implementations must tolerate concurrent calls.
pub trait CompletionBackend: Send + Sync {
    fn complete(&self, req: &BackendRequest) -> Result<String, BackendError>;
}

impl<B: CompletionBackend + ?Sized> CompletionBackend for &B {
    fn complete(&self, req: &BackendRequest) -> Result<String, BackendError> {
        (**self).complete(req)
    }
}

impl<B: CompletionBackend + ?Sized> CompletionBackend for Box<B> {
    fn complete(&self, req: &BackendRequest) -> Result<String, BackendError> {
        (**self).complete(req)
    }
}

impl<B: CompletionBackend + ?Sized> CompletionBackend for std::sync::Arc<B> {
    fn complete(&self, req: &BackendRequest) -> Result<String, BackendError> {
        (**self).complete(req)
    }
}
