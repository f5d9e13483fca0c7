//! Plan-agent output: numbered `Name (params)` lines, validated against the
//! basis library. Unknown names become custom placeholder calls; basis calls
//! must carry the declared arity.

use crate::prompts::build_plan_prompt;
use crate::AgentError;
use chop_backends::{BackendRequest, CompletionBackend, RequestMetadata};
use chop_core::{BackendRole, SubtaskCall, SubtaskLibrary, Task};

/// A parsed plan plus the raw model response it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub subtasks: Vec<SubtaskCall>,
    pub raw_response: String,
}

/// Strip `N.` / `N)` numbering; non-numbered lines are not plan items.
fn numbered_body(line: &str) -> Option<&str> {
    let line = line.trim();
    let digits = line.chars().take_while(char::is_ascii_digit).count();
    if digits == 0 {
        return None;
    }
    let rest = &line[digits..];
    let body = rest.strip_prefix('.').or_else(|| rest.strip_prefix(')'))?;
    let body = body.trim();
    if body.is_empty() { None } else { Some(body) }
}

/// Split `call | purpose: ... | stop: ...` into its labeled segments.
fn split_annotations(body: &str) -> (&str, String, String) {
    let mut call = body;
    let mut purpose = String::new();
    let mut stop = String::new();
    for (i, segment) in body.split('|').enumerate() {
        let segment = segment.trim();
        if i == 0 {
            call = segment;
            continue;
        }
        let lower = segment.to_lowercase();
        if let Some(rest) = lower.strip_prefix("purpose:") {
            let offset = segment.len() - rest.len();
            purpose = segment[offset..].trim().to_string();
        } else if let Some(rest) = lower.strip_prefix("stop:") {
            let offset = segment.len() - rest.len();
            stop = segment[offset..].trim().to_string();
        }
    }
    (call, purpose, stop)
}

/// Parse one call body like `Share Content (WeChat, Bob)`.
///
/// Parameter splitting is arity-aware for basis subtasks: an arity-1
/// subtask takes the whole interior as its single parameter (so commas in
/// text arguments survive), and extra comma parts beyond the declared arity
/// fold into the final parameter. Fewer parts than the arity is an error.
fn parse_call(call: &str, purpose: String, stop: String, library: &SubtaskLibrary) -> Result<SubtaskCall, AgentError> {
    let (raw_name, interior) = match (call.find('('), call.rfind(')')) {
        (Some(open), Some(close)) if open < close => {
            (call[..open].trim(), Some(call[open + 1..close].trim()))
        }
        _ => (call.trim(), None),
    };

    let loose_params = |interior: Option<&str>| -> Vec<String> {
        interior
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.split(',')
                    .map(|p| p.trim().to_string())
                    .filter(|p| !p.is_empty())
                    .collect()
            })
            .unwrap_or_default()
    };

    match library.find(raw_name) {
        None => Ok(SubtaskCall {
            name: raw_name.to_string(),
            parameters: loose_params(interior),
            is_custom: true,
            purpose,
            stop_condition: stop,
        }),
        Some(basis) => {
            let interior = interior.unwrap_or("");
            let parameters: Vec<String> = if basis.arity == 0 {
                if !interior.is_empty() {
                    return Err(AgentError::PlanArityMismatch {
                        subtask: basis.name.clone(),
                        expected: 0,
                        got: interior.split(',').count(),
                    });
                }
                Vec::new()
            } else if basis.arity == 1 {
                if interior.is_empty() {
                    return Err(AgentError::PlanArityMismatch {
                        subtask: basis.name.clone(),
                        expected: 1,
                        got: 0,
                    });
                }
                vec![interior.to_string()]
            } else {
                let parts: Vec<&str> = interior.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
                if parts.len() < basis.arity {
                    return Err(AgentError::PlanArityMismatch {
                        subtask: basis.name.clone(),
                        expected: basis.arity,
                        got: parts.len(),
                    });
                }
                let mut params: Vec<String> =
                    parts[..basis.arity - 1].iter().map(|p| p.to_string()).collect();
                params.push(parts[basis.arity - 1..].join(", "));
                params
            };
            Ok(SubtaskCall {
                name: basis.name.clone(),
                parameters,
                is_custom: false,
                purpose,
                stop_condition: stop,
            })
        }
    }
}

/// Parse the plan agent's full response.
pub fn parse_plan_output(text: &str, library: &SubtaskLibrary) -> Result<PlanResult, AgentError> {
    let mut subtasks = Vec::new();
    for line in text.lines() {
        let Some(body) = numbered_body(line) else { continue };
        let (call, purpose, stop) = split_annotations(body);
        subtasks.push(parse_call(call, purpose, stop, library)?);
    }
    if subtasks.is_empty() {
        return Err(AgentError::EmptyPlan);
    }
    Ok(PlanResult {
        subtasks,
        raw_response: text.to_string(),
    })
}

/// One backend call to the plan agent, parsed against the library.
pub fn plan(
    task: &Task,
    library: &SubtaskLibrary,
    backend: &dyn CompletionBackend,
) -> Result<PlanResult, AgentError> {
    let prompt = build_plan_prompt(task, library)?;
    let request = BackendRequest::new(BackendRole::Plan, prompt, RequestMetadata::for_task(&task.id));
    let response = backend.complete(&request)?;
    parse_plan_output(&response, library)
}
