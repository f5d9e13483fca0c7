//! The constrained plan/act loop: a plan agent decomposing instructions
//! into basis-library subtasks (with custom placeholders where the library
//! falls short), and an action agent executing each subtask against the
//! simulated device with documentation, accumulated memory, and one-shot
//! multi-action batching for fixed-flow subtasks.
//!
//! One episode is one logical thread of control owning its device state;
//! many episodes may run concurrently against a shared backend.

pub mod plan;
pub mod prompts;
pub mod runner;
pub mod turn;

pub use plan::{parse_plan_output, plan, PlanResult};
pub use prompts::{build_action_prompt, build_plan_prompt, render_call, render_library};
pub use runner::{
    execute_subtask, resolve_app, run_episode, run_episode_in, RunnerConfig, SubtaskExecution,
};
pub use turn::{parse_action_output, ActionTurn};

use chop_backends::BackendError;
use chop_core::ParseActionError;
use chop_simenv::BundleError;

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("basis subtask library is empty")]
    EmptyLibrary,
    #[error("plan response contains no numbered subtask lines")]
    EmptyPlan,
    #[error("subtask `{subtask}` expects {expected} parameter(s), got {got}")]
    PlanArityMismatch {
        subtask: String,
        expected: usize,
        got: usize,
    },
    #[error("action response contains no Action line")]
    NoActionFound,
    #[error("{got} actions emitted on a non-fixed-flow subtask")]
    BatchNotAllowed { got: usize },
    #[error("invalid action line `{line}`: {source}")]
    InvalidAction {
        line: String,
        source: ParseActionError,
    },
    #[error("no app bundle loaded for app `{app_id}`")]
    UnknownApp { app_id: String },
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
}

impl AgentError {
    /// Model-output failures that terminate an episode as `parse_error`,
    /// as opposed to infrastructure errors that propagate.
    pub fn is_parse_failure(&self) -> bool {
        matches!(
            self,
            AgentError::EmptyPlan
                | AgentError::PlanArityMismatch { .. }
                | AgentError::NoActionFound
                | AgentError::BatchNotAllowed { .. }
                | AgentError::InvalidAction { .. }
        )
    }
}
