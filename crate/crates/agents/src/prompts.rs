//! Prompt construction. Templates are data files with named substitution
//! slots; building a prompt is deterministic byte-for-byte for the same
//! inputs, which is what makes cassette fingerprints stable.

use crate::AgentError;
use chop_core::{
    BasisSubtask, Language, MemoryEntry, ScreenState, SubtaskCall, SubtaskDoc, SubtaskLibrary, Task,
};

const PLAN_EN: &str = include_str!("../templates/plan_en.txt");
const PLAN_ZH: &str = include_str!("../templates/plan_zh.txt");
const ACTION_EN: &str = include_str!("../templates/action_en.txt");
const ACTION_ZH: &str = include_str!("../templates/action_zh.txt");

fn fill(template: &str, slots: &[(&str, &str)]) -> String {
    let mut out = template.to_string();
    for (slot, value) in slots {
        out = out.replace(&format!("{{{{{slot}}}}}"), value);
    }
    out
}

/// `Search Item (XXX)` / `Share Content (XXX, XXX)` / bare name at arity 0.
fn output_format(subtask: &BasisSubtask) -> String {
    if subtask.arity == 0 {
        subtask.name.clone()
    } else {
        let xs = vec!["XXX"; subtask.arity].join(", ");
        format!("{} ({xs})", subtask.name)
    }
}

/// One library block entry: name, parameter roles, the standardized process
/// as the explanation, and the output format line.
fn render_subtask_entry(subtask: &BasisSubtask) -> String {
    let params = if subtask.parameter_roles.is_empty() {
        "no parameters".to_string()
    } else {
        subtask.parameter_roles.join(", ")
    };
    let explanation = subtask.doc.standardized_process.join(" ");
    format!(
        "- {} (parameters: {params}): {explanation} Output format is \"{}\".",
        subtask.name,
        output_format(subtask)
    )
}

pub fn render_library(library: &SubtaskLibrary) -> String {
    library
        .subtasks()
        .iter()
        .map(render_subtask_entry)
        .collect::<Vec<_>>()
        .join("\n")
}

/// The plan-agent prompt: instruction + full library + placeholder rule.
pub fn build_plan_prompt(task: &Task, library: &SubtaskLibrary) -> Result<String, AgentError> {
    if library.is_empty() {
        return Err(AgentError::EmptyLibrary);
    }
    let template = match task.language {
        Language::En => PLAN_EN,
        Language::Zh => PLAN_ZH,
    };
    Ok(fill(
        template,
        &[
            ("instruction", task.instruction.as_str()),
            ("library", render_library(library).as_str()),
        ],
    ))
}

fn render_doc(doc: Option<&SubtaskDoc>) -> String {
    let Some(doc) = doc else {
        return "none (custom subtask)".to_string();
    };
    let mut lines = vec!["Standardized process:".to_string()];
    for (i, step) in doc.standardized_process.iter().enumerate() {
        lines.push(format!("{}. {step}", i + 1));
    }
    if !doc.boundary_conditions.is_empty() {
        lines.push("Boundary conditions:".to_string());
        for (i, condition) in doc.boundary_conditions.iter().enumerate() {
            lines.push(format!("{}. {condition}", i + 1));
        }
    }
    lines.join("\n")
}

fn render_memories(memories: &[MemoryEntry]) -> String {
    if memories.is_empty() {
        return "none".to_string();
    }
    memories
        .iter()
        .map(|m| format!("- {}: {}", m.subtask_name, m.summary))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn render_call(call: &SubtaskCall) -> String {
    if call.parameters.is_empty() {
        call.name.clone()
    } else {
        format!("{} ({})", call.name, call.parameters.join(", "))
    }
}

/// The action-agent prompt: the five inputs of the action policy —
/// task instruction, subtask, documentation, current screen, memories —
/// plus the batching rule in force.
pub fn build_action_prompt(
    task: &Task,
    subtask: &SubtaskCall,
    doc: Option<&SubtaskDoc>,
    observation: &ScreenState,
    memories: &[MemoryEntry],
    batching: bool,
) -> String {
    let template = match task.language {
        Language::En => ACTION_EN,
        Language::Zh => ACTION_ZH,
    };
    let batching_rule = if batching {
        "This subtask has a fixed workflow: you may emit its full action sequence in this one turn, one Action line per step."
    } else {
        "Emit exactly one Action line this turn."
    };
    let purpose = if subtask.purpose.is_empty() { "-" } else { subtask.purpose.as_str() };
    let stop = if subtask.stop_condition.is_empty() {
        "-"
    } else {
        subtask.stop_condition.as_str()
    };
    fill(
        template,
        &[
            ("instruction", task.instruction.as_str()),
            ("subtask", render_call(subtask).as_str()),
            ("purpose", purpose),
            ("stop_condition", stop),
            ("doc", render_doc(doc).as_str()),
            ("observation", observation.observation_text.as_str()),
            ("memories", render_memories(memories).as_str()),
            ("batching", batching_rule),
        ],
    )
}
