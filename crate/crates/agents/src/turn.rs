//! Action-agent output: labeled Observation/Thought/Action/Summary/Done
//! sections. Multiple Action lines are accepted only for fixed-flow
//! subtasks (one-shot batching).

use crate::AgentError;
use chop_core::{parse_action, Action};

/// One parsed action-agent turn.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionTurn {
    pub observation: String,
    pub thought: String,
    pub actions: Vec<Action>,
    pub summarization: Option<String>,
    pub subtask_done: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Section {
    Observation,
    Thought,
    Summary,
    None,
}

fn label_of(line: &str) -> Option<(&'static str, &str)> {
    for (label, tag) in [
        ("observation:", "observation"),
        ("thought:", "thought"),
        ("actions:", "action"),
        ("action:", "action"),
        ("summarization:", "summary"),
        ("summary:", "summary"),
        ("done:", "done"),
    ] {
        let matches = line
            .get(..label.len())
            .is_some_and(|head| head.eq_ignore_ascii_case(label));
        if matches {
            return Some((tag, line[label.len()..].trim()));
        }
    }
    None
}

/// Parse a full action-agent response.
///
/// `fixed_flow` gates batching: more than one action line on a non-fixed-flow
/// subtask is rejected. `Done: yes` or an `EXIT` action marks the subtask
/// complete.
pub fn parse_action_output(text: &str, fixed_flow: bool) -> Result<ActionTurn, AgentError> {
    let mut observation = Vec::new();
    let mut thought = Vec::new();
    let mut summary = Vec::new();
    let mut actions = Vec::new();
    let mut done = false;
    let mut section = Section::None;

    for raw_line in text.lines() {
        let line = raw_line.trim();
        if line.is_empty() {
            continue;
        }
        match label_of(line) {
            Some(("observation", rest)) => {
                section = Section::Observation;
                if !rest.is_empty() {
                    observation.push(rest.to_string());
                }
            }
            Some(("thought", rest)) => {
                section = Section::Thought;
                if !rest.is_empty() {
                    thought.push(rest.to_string());
                }
            }
            Some(("summary", rest)) => {
                section = Section::Summary;
                if !rest.is_empty() {
                    summary.push(rest.to_string());
                }
            }
            Some(("action", rest)) => {
                section = Section::None;
                if !rest.is_empty() {
                    let action = parse_action(rest).map_err(|source| AgentError::InvalidAction {
                        line: rest.to_string(),
                        source,
                    })?;
                    actions.push(action);
                }
            }
            Some(("done", rest)) => {
                section = Section::None;
                let v = rest.to_lowercase();
                if v.starts_with("yes") || v.starts_with("true") || v.starts_with("done") {
                    done = true;
                }
            }
            Some(_) => unreachable!("label_of returns known tags"),
            None => match section {
                Section::Observation => observation.push(line.to_string()),
                Section::Thought => thought.push(line.to_string()),
                Section::Summary => summary.push(line.to_string()),
                Section::None => {}
            },
        }
    }

    if actions.is_empty() {
        return Err(AgentError::NoActionFound);
    }
    if actions.len() > 1 && !fixed_flow {
        return Err(AgentError::BatchNotAllowed { got: actions.len() });
    }
    if actions.contains(&Action::Exit) {
        done = true;
    }

    let summarization = if summary.is_empty() { None } else { Some(summary.join("\n")) };
    Ok(ActionTurn {
        observation: observation.join("\n"),
        thought: thought.join("\n"),
        actions,
        summarization,
        subtask_done: done,
    })
}
