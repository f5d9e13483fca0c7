//! Episode records: everything one end-to-end task execution leaves behind.

use crate::action::Action;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Which agent role issued a backend request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendRole {
    Plan,
    Action,
    Summarize,
    Judge,
}

impl fmt::Display for BackendRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BackendRole::Plan => "plan",
            BackendRole::Action => "action",
            BackendRole::Summarize => "summarize",
            BackendRole::Judge => "judge",
        };
        f.write_str(s)
    }
}

/// Why an episode stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalReason {
    Exit,
    MaxRounds,
    ParseError,
    EnvError,
}

/// One backend exchange, in request order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub role: BackendRole,
    pub request: String,
    pub response: String,
    pub turn: u32,
}

/// The record of one executed task: actions taken, backend traffic, call
/// counts, and the terminal outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub task_id: String,
    pub executed_actions: Vec<Action>,
    pub transcripts: Vec<TranscriptEntry>,
    /// Number of action-agent backend calls.
    pub action_agent_calls: u32,
    /// Plan + action + summarization calls; grounding lookups cost zero.
    pub api_calls_total: u32,
    pub success: bool,
    pub terminal_reason: TerminalReason,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EpisodeError {
    #[error("episode `{0}`: action_agent_calls exceeds api_calls_total")]
    CallCountInverted(String),
}

impl Episode {
    pub fn validate(&self) -> Result<(), EpisodeError> {
        if self.action_agent_calls > self.api_calls_total {
            return Err(EpisodeError::CallCountInverted(self.task_id.clone()));
        }
        Ok(())
    }

    /// Count of transcript entries issued under `role`.
    pub fn calls_with_role(&self, role: BackendRole) -> usize {
        self.transcripts.iter().filter(|t| t.role == role).count()
    }
}
