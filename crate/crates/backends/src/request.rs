//! Backend requests and their stable fingerprints.

use chop_core::BackendRole;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Routing metadata carried alongside a prompt: which task, subtask, and
/// turn produced it. Scripted backends key their queues on it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequestMetadata {
    pub task_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subtask_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub turn: Option<u32>,
}

impl RequestMetadata {
    pub fn for_task(task_id: &str) -> Self {
        Self {
            task_id: task_id.to_string(),
            subtask_index: None,
            turn: None,
        }
    }
}

/// One completion request: role, prompt, and routing metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackendRequest {
    pub role: BackendRole,
    pub prompt: String,
    pub metadata: RequestMetadata,
}

impl BackendRequest {
    pub fn new(role: BackendRole, prompt: impl Into<String>, metadata: RequestMetadata) -> Self {
        Self {
            role,
            prompt: prompt.into(),
            metadata,
        }
    }
}

/// Stable content hash over role + whitespace-collapsed prompt.
///
/// Collapsing whitespace keeps hand-edited cassettes stable across
/// reformatting; case is preserved because prompts embed typed user content.
pub fn fingerprint(req: &BackendRequest) -> String {
    fingerprint_parts(req.role, &req.prompt)
}

pub fn fingerprint_parts(role: BackendRole, prompt: &str) -> String {
    let normalized: Vec<&str> = prompt.split_whitespace().collect();
    let mut hasher = Sha256::new();
    hasher.update(role.to_string().as_bytes());
    hasher.update(b"\n");
    hasher.update(normalized.join(" ").as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(prompt: &str) -> BackendRequest {
        BackendRequest::new(BackendRole::Plan, prompt, RequestMetadata::for_task("t"))
    }

    #[test]
    fn identical_requests_collide() {
        assert_eq!(fingerprint(&req("hello world")), fingerprint(&req("hello world")));
    }

    #[test]
    fn whitespace_is_collapsed_but_case_is_kept() {
        assert_eq!(
            fingerprint(&req("hello   world \n")),
            fingerprint(&req("hello world"))
        );
        assert_ne!(fingerprint(&req("Hello world")), fingerprint(&req("hello world")));
    }

    #[test]
    fn one_token_difference_changes_the_hash() {
        assert_ne!(fingerprint(&req("hello world")), fingerprint(&req("hello worlds")));
    }

    #[test]
    fn role_is_part_of_the_key() {
        let plan = req("same prompt");
        let action = BackendRequest::new(
            BackendRole::Action,
            "same prompt",
            RequestMetadata::for_task("t"),
        );
        assert_ne!(fingerprint(&plan), fingerprint(&action));
    }
}
