//! Shared domain types for the CHOP benchmarking harness: the canonical
//! action grammar, normalized action equality, and the task/episode/library
//! records every other crate exchanges.
//!
//! All types here are immutable values after construction and safe to share
//! across concurrent episode runners.

pub mod action;
pub mod episode;
pub mod equality;
pub mod types;

pub use action::{parse_action, render_action, Action, ParseActionError, ScrollDirection};
pub use episode::{BackendRole, Episode, EpisodeError, TerminalReason, TranscriptEntry};
pub use equality::{actions_equal, ElementRegistry, EqualityPolicy};
pub use types::{
    AnnotatedStep, BasisSubtask, CallValidationError, Difficulty, History, Language, LibraryError,
    MemoryEntry, ScreenState, SubtaskCall, SubtaskDoc, SubtaskLibrary, Task, TaskError,
    TrajectoryRecord,
};

/// Marker prefixed to observation feedback when grounding a named element
/// failed; the error classifier keys on it.
pub const GROUNDING_ERROR_MARKER: &str = "[grounding-error]";

/// Marker prefixed to observation feedback when the environment rejected an
/// action (wrong focus, out-of-bounds click, ...).
pub const ENV_ERROR_MARKER: &str = "[env-error]";

/// Marker prefixed to observation feedback when an action-agent turn could
/// not be parsed; the turn is retried with the note attached.
pub const PARSE_ERROR_MARKER: &str = "[parse-error]";
