//! Scripted oracle backend: hand-authored responses dispensed from
//! per-(role, task) queues, so concurrent episodes cannot steal each
//! other's lines.

use crate::{BackendError, BackendRequest, CompletionBackend};
use chop_core::BackendRole;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use std::path::Path;
use std::sync::Mutex;

/// One scripted line. An empty `task_id` is a wildcard matched when no
/// task-specific queue has lines left. `repeat` pins the entry at the tail
/// of its queue so it is dispensed forever (used by looping fixtures).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptEntry {
    pub role: BackendRole,
    #[serde(default)]
    pub task_id: String,
    pub response: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub repeat: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ScriptFile {
    pub entries: Vec<ScriptEntry>,
}

#[derive(Debug)]
struct Queue {
    lines: VecDeque<(String, bool)>,
}

/// Deterministic test backend that replays a fixed script.
pub struct ScriptedBackend {
    queues: Mutex<BTreeMap<(String, String), Queue>>,
}

impl ScriptedBackend {
    pub fn new(entries: Vec<ScriptEntry>) -> Self {
        let mut queues: BTreeMap<(String, String), Queue> = BTreeMap::new();
        for entry in entries {
            queues
                .entry((entry.role.to_string(), entry.task_id))
                .or_insert_with(|| Queue {
                    lines: VecDeque::new(),
                })
                .lines
                .push_back((entry.response, entry.repeat));
        }
        Self {
            queues: Mutex::new(queues),
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, BackendError> {
        let path = path.as_ref();
        let raw = std::fs::read_to_string(path).map_err(|e| BackendError::Io {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        let file: ScriptFile = serde_json::from_str(&raw).map_err(|e| BackendError::Malformed {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        Ok(Self::new(file.entries))
    }

    fn pop(&self, role: BackendRole, task_id: &str) -> Option<String> {
        let mut queues = self.queues.lock().expect("script queue lock");
        for key in [
            (role.to_string(), task_id.to_string()),
            (role.to_string(), String::new()),
        ] {
            if let Some(queue) = queues.get_mut(&key) {
                match queue.lines.front().cloned() {
                    Some((line, true)) => return Some(line),
                    Some((line, false)) => {
                        queue.lines.pop_front();
                        return Some(line);
                    }
                    None => {}
                }
            }
        }
        None
    }
}

impl CompletionBackend for ScriptedBackend {
    fn complete(&self, req: &BackendRequest) -> Result<String, BackendError> {
        if req.prompt.trim().is_empty() {
            return Err(BackendError::EmptyPrompt);
        }
        self.pop(req.role, &req.metadata.task_id)
            .ok_or_else(|| BackendError::ScriptExhausted {
                role: req.role,
                task_id: req.metadata.task_id.clone(),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RequestMetadata;

    fn entry(role: BackendRole, task: &str, response: &str) -> ScriptEntry {
        ScriptEntry {
            role,
            task_id: task.to_string(),
            response: response.to_string(),
            repeat: false,
        }
    }

    fn req(role: BackendRole, task: &str) -> BackendRequest {
        BackendRequest::new(role, "prompt", RequestMetadata::for_task(task))
    }

    #[test]
    fn dispenses_in_order_per_key() {
        let backend = ScriptedBackend::new(vec![
            entry(BackendRole::Action, "t1", "first"),
            entry(BackendRole::Action, "t1", "second"),
        ]);
        assert_eq!(backend.complete(&req(BackendRole::Action, "t1")).unwrap(), "first");
        assert_eq!(backend.complete(&req(BackendRole::Action, "t1")).unwrap(), "second");
        assert!(matches!(
            backend.complete(&req(BackendRole::Action, "t1")),
            Err(BackendError::ScriptExhausted { .. })
        ));
    }

    #[test]
    fn tasks_do_not_steal_each_others_lines() {
        let backend = ScriptedBackend::new(vec![
            entry(BackendRole::Plan, "t1", "plan for t1"),
            entry(BackendRole::Plan, "t2", "plan for t2"),
        ]);
        assert_eq!(backend.complete(&req(BackendRole::Plan, "t2")).unwrap(), "plan for t2");
        assert_eq!(backend.complete(&req(BackendRole::Plan, "t1")).unwrap(), "plan for t1");
    }

    #[test]
    fn wildcard_queue_backs_missing_tasks() {
        let backend = ScriptedBackend::new(vec![entry(BackendRole::Summarize, "", "summary")]);
        assert_eq!(
            backend.complete(&req(BackendRole::Summarize, "anything")).unwrap(),
            "summary"
        );
    }

    #[test]
    fn repeat_entry_loops_forever() {
        let backend = ScriptedBackend::new(vec![ScriptEntry {
            role: BackendRole::Action,
            task_id: "looper".to_string(),
            response: "Action: SCROLL(down)".to_string(),
            repeat: true,
        }]);
        for _ in 0..50 {
            assert_eq!(
                backend.complete(&req(BackendRole::Action, "looper")).unwrap(),
                "Action: SCROLL(down)"
            );
        }
    }

    #[test]
    fn empty_prompt_is_rejected() {
        let backend = ScriptedBackend::new(vec![entry(BackendRole::Plan, "t", "x")]);
        let bad = BackendRequest::new(BackendRole::Plan, "  ", RequestMetadata::for_task("t"));
        assert!(matches!(backend.complete(&bad), Err(BackendError::EmptyPrompt)));
    }

    #[test]
    fn concurrent_tasks_get_their_own_lines() {
        let backend = std::sync::Arc::new(ScriptedBackend::new(vec![
            entry(BackendRole::Action, "a", "line-a"),
            entry(BackendRole::Action, "b", "line-b"),
        ]));
        let handles: Vec<_> = ["a", "b"]
            .into_iter()
            .map(|task| {
                let backend = backend.clone();
                std::thread::spawn(move || backend.complete(&req(BackendRole::Action, task)).unwrap())
            })
            .collect();
        let mut got: Vec<String> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        got.sort();
        assert_eq!(got, vec!["line-a".to_string(), "line-b".to_string()]);
    }
}
