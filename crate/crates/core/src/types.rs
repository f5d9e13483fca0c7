//! Domain types shared across the simulator, miner, agents, and evaluator.

use crate::action::Action;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Textual stand-in for a screenshot: what the device showed at one instant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenState {
    pub screen_id: String,
    pub app_id: String,
    /// Element names visible on the current scroll page, in declaration order.
    pub visible_elements: Vec<String>,
    /// Deterministic rendering of the screen used as the observation.
    pub observation_text: String,
}

/// Append-only record of (state, action) pairs, one per executed action.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct History {
    entries: Vec<(ScreenState, Action)>,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, state: ScreenState, action: Action) {
        self.entries.push((state, action));
    }

    pub fn entries(&self) -> &[(ScreenState, Action)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    En,
    Zh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Difficulty::Easy => "easy",
            Difficulty::Medium => "medium",
            Difficulty::Hard => "hard",
        };
        f.write_str(s)
    }
}

/// One benchmark instruction with its human golden action sequence and,
/// when annotated, the human subtask plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: String,
    pub instruction: String,
    pub language: Language,
    pub difficulty: Difficulty,
    pub app_id: String,
    pub golden_actions: Vec<Action>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub golden_plan: Option<Vec<SubtaskCall>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaskError {
    #[error("task `{0}`: golden_actions must be non-empty")]
    GoldenEmpty(String),
    #[error("task `{0}`: last golden action must be EXIT")]
    GoldenNotExitTerminated(String),
}

impl Task {
    pub fn validate(&self) -> Result<(), TaskError> {
        match self.golden_actions.last() {
            None => Err(TaskError::GoldenEmpty(self.id.clone())),
            Some(Action::Exit) => Ok(()),
            Some(_) => Err(TaskError::GoldenNotExitTerminated(self.id.clone())),
        }
    }
}

/// One planned subtask invocation: a library name (or a custom placeholder)
/// with its arguments, plus the planner's purpose and stopping condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtaskCall {
    pub name: String,
    pub parameters: Vec<String>,
    pub is_custom: bool,
    #[serde(default)]
    pub purpose: String,
    #[serde(default)]
    pub stop_condition: String,
}

/// Documentation attached to a basis subtask: the standardized process the
/// action agent follows plus its boundary conditions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtaskDoc {
    pub standardized_process: Vec<String>,
    pub boundary_conditions: Vec<String>,
}

/// A mined, named, parameterized subtask: one "basis vector" of the planning
/// vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSubtask {
    pub name: String,
    pub arity: usize,
    pub parameter_roles: Vec<String>,
    pub doc: SubtaskDoc,
    /// Whether the workflow is fixed enough for one-shot multi-action batching.
    pub fixed_flow: bool,
    /// Occurrences in the mining corpus.
    pub frequency: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LibraryError {
    #[error("duplicate basis subtask name `{0}`")]
    DuplicateName(String),
    #[error("basis subtask `{name}`: arity {arity} != {roles} parameter roles")]
    ArityRoleMismatch { name: String, arity: usize, roles: usize },
    #[error("basis subtask `{0}`: standardized process must be non-empty")]
    EmptyProcess(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CallValidationError {
    #[error("subtask `{0}` is not in the basis library and is not marked custom")]
    UnknownSubtask(String),
    #[error("subtask `{name}` expects {expected} parameter(s), got {got}")]
    ArityMismatch { name: String, expected: usize, got: usize },
}

/// The basis-subtask library: unique names, arity consistent with roles,
/// every shipped subtask documented.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubtaskLibrary {
    subtasks: Vec<BasisSubtask>,
}

impl SubtaskLibrary {
    pub fn new(subtasks: Vec<BasisSubtask>) -> Result<Self, LibraryError> {
        let mut seen = std::collections::BTreeSet::new();
        for st in &subtasks {
            if !seen.insert(st.name.trim().to_lowercase()) {
                return Err(LibraryError::DuplicateName(st.name.clone()));
            }
            if st.arity != st.parameter_roles.len() {
                return Err(LibraryError::ArityRoleMismatch {
                    name: st.name.clone(),
                    arity: st.arity,
                    roles: st.parameter_roles.len(),
                });
            }
            if st.doc.standardized_process.is_empty() {
                return Err(LibraryError::EmptyProcess(st.name.clone()));
            }
        }
        Ok(Self { subtasks })
    }

    /// Case-insensitive, trimmed lookup.
    pub fn find(&self, name: &str) -> Option<&BasisSubtask> {
        let folded = name.trim().to_lowercase();
        self.subtasks.iter().find(|s| s.name.trim().to_lowercase() == folded)
    }

    pub fn subtasks(&self) -> &[BasisSubtask] {
        &self.subtasks
    }

    pub fn len(&self) -> usize {
        self.subtasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subtasks.is_empty()
    }

    /// Check a planned call against the library: non-custom names must match
    /// a basis subtask and carry its declared arity.
    pub fn validate_call(&self, call: &SubtaskCall) -> Result<(), CallValidationError> {
        if call.is_custom {
            return Ok(());
        }
        let Some(basis) = self.find(&call.name) else {
            return Err(CallValidationError::UnknownSubtask(call.name.clone()));
        };
        if call.parameters.len() != basis.arity {
            return Err(CallValidationError::ArityMismatch {
                name: basis.name.clone(),
                expected: basis.arity,
                got: call.parameters.len(),
            });
        }
        Ok(())
    }
}

/// Summary memory produced while executing a subtask, carried forward to
/// later subtasks of the same episode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryEntry {
    pub subtask_name: String,
    pub summary: String,
}

/// One action with the annotator's accompanying thought.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedStep {
    pub action: Action,
    pub thought: String,
}

/// A human-annotated action sequence for one instruction; the unit both the
/// miner and the evaluator consume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub instruction: String,
    pub steps: Vec<AnnotatedStep>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::parse_action;

    fn doc() -> SubtaskDoc {
        SubtaskDoc {
            standardized_process: vec!["Click on the search bar".to_string()],
            boundary_conditions: vec![],
        }
    }

    fn basis(name: &str, arity: usize) -> BasisSubtask {
        BasisSubtask {
            name: name.to_string(),
            arity,
            parameter_roles: (0..arity).map(|i| format!("parameter{}", i + 1)).collect(),
            doc: doc(),
            fixed_flow: false,
            frequency: 1,
        }
    }

    #[test]
    fn task_validation_requires_exit_terminator() {
        let mut task = Task {
            id: "t1".to_string(),
            instruction: "Send an email to Bob".to_string(),
            language: Language::En,
            difficulty: Difficulty::Easy,
            app_id: "email_app".to_string(),
            golden_actions: vec![parse_action("CLICK(Compose)").unwrap()],
            golden_plan: None,
        };
        assert_eq!(
            task.validate(),
            Err(TaskError::GoldenNotExitTerminated("t1".to_string()))
        );
        task.golden_actions.push(Action::Exit);
        assert!(task.validate().is_ok());
        task.golden_actions.clear();
        assert_eq!(task.validate(), Err(TaskError::GoldenEmpty("t1".to_string())));
    }

    #[test]
    fn library_rejects_duplicates_and_arity_drift() {
        let err = SubtaskLibrary::new(vec![basis("Search Item", 1), basis("search item", 1)]);
        assert_eq!(err, Err(LibraryError::DuplicateName("search item".to_string())));

        let mut bad = basis("Share Content", 2);
        bad.parameter_roles.pop();
        assert!(matches!(
            SubtaskLibrary::new(vec![bad]),
            Err(LibraryError::ArityRoleMismatch { .. })
        ));
    }

    #[test]
    fn call_validation_enforces_library_arity() {
        let lib = SubtaskLibrary::new(vec![basis("Share Content", 2)]).unwrap();
        let call = SubtaskCall {
            name: "Share Content".to_string(),
            parameters: vec!["WeChat".to_string()],
            is_custom: false,
            purpose: String::new(),
            stop_condition: String::new(),
        };
        assert_eq!(
            lib.validate_call(&call),
            Err(CallValidationError::ArityMismatch {
                name: "Share Content".to_string(),
                expected: 2,
                got: 1
            })
        );

        let custom = SubtaskCall {
            name: "Open Video".to_string(),
            parameters: vec!["Stephen Curry".to_string()],
            is_custom: true,
            purpose: String::new(),
            stop_condition: String::new(),
        };
        assert!(lib.validate_call(&custom).is_ok());
    }

    #[test]
    fn history_counts_executed_actions() {
        let mut history = History::new();
        assert!(history.is_empty());
        let state = ScreenState {
            screen_id: "home".to_string(),
            app_id: "email_app".to_string(),
            visible_elements: vec![],
            observation_text: String::new(),
        };
        history.push(state.clone(), Action::Back);
        history.push(state, Action::Exit);
        assert_eq!(history.len(), 2);
    }
}
