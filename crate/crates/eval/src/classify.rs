//! Failure classification: a deterministic rule cascade standing in for the
//! manual error labeling. Categories are assigned in a fixed order so every
//! failed episode gets exactly one label, reproducibly.

use crate::EvalError;
use chop_core::{Episode, Task, TerminalReason, GROUNDING_ERROR_MARKER};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCategory {
    Hallucination,
    PoorGraphicalRecognition,
    MisinterpretationOfTaskContext,
    ExceedsMaxIterations,
    OutputParseError,
}

impl fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ErrorCategory::Hallucination => "hallucination",
            ErrorCategory::PoorGraphicalRecognition => "poor_graphical_recognition",
            ErrorCategory::MisinterpretationOfTaskContext => "misinterpretation_of_task_context",
            ErrorCategory::ExceedsMaxIterations => "exceeds_max_iterations",
            ErrorCategory::OutputParseError => "output_parse_error",
        };
        f.write_str(s)
    }
}

/// Classify one failed episode. The cascade:
/// 1. parse_error terminal -> OutputParseError
/// 2. max_rounds terminal  -> ExceedsMaxIterations
/// 3. grounding failure in the transcript -> PoorGraphicalRecognition
/// 4. plan parameter naming entities absent from the instruction, golden
///    plan, and app id -> Hallucination
/// 5. otherwise -> MisinterpretationOfTaskContext
pub fn classify_error(episode: &Episode, golden: &Task) -> Result<ErrorCategory, EvalError> {
    if episode.success {
        return Err(EvalError::NotAFailure {
            task_id: episode.task_id.clone(),
        });
    }
    match episode.terminal_reason {
        TerminalReason::ParseError => return Ok(ErrorCategory::OutputParseError),
        TerminalReason::MaxRounds => return Ok(ErrorCategory::ExceedsMaxIterations),
        TerminalReason::Exit | TerminalReason::EnvError => {}
    }
    let grounding_failed = episode.transcripts.iter().any(|t| {
        t.request.contains(GROUNDING_ERROR_MARKER) || t.response.contains(GROUNDING_ERROR_MARKER)
    });
    if grounding_failed {
        return Ok(ErrorCategory::PoorGraphicalRecognition);
    }
    if plan_hallucinates(episode, golden) {
        return Ok(ErrorCategory::Hallucination);
    }
    Ok(ErrorCategory::MisinterpretationOfTaskContext)
}

/// Lightweight plan reading: numbered `Name (p1, p2)` lines from the first
/// plan-role transcript response.
pub(crate) fn parse_plan_calls(text: &str) -> Vec<(String, Vec<String>)> {
    let mut calls = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        let digits: String = line.chars().take_while(char::is_ascii_digit).collect();
        if digits.is_empty() {
            continue;
        }
        let rest = &line[digits.len()..];
        let Some(body) = rest.strip_prefix('.').or_else(|| rest.strip_prefix(')')) else {
            continue;
        };
        // Drop `| purpose: ...` / `| stop: ...` annotations before reading
        // the call itself.
        let body = body.split('|').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        match (body.find('('), body.rfind(')')) {
            (Some(open), Some(close)) if open < close => {
                let name = body[..open].trim().to_string();
                let params = body[open + 1..close]
                    .split(',')
                    .map(|p| p.trim().to_string())
                    .filter(|p| !p.is_empty())
                    .collect();
                calls.push((name, params));
            }
            _ => calls.push((body.to_string(), Vec::new())),
        }
    }
    calls
}

/// Reference vocabulary for entity grounding: the instruction, the golden
/// plan when present, and the app id.
fn reference_vocabulary(golden: &Task) -> BTreeSet<String> {
    let mut vocab = BTreeSet::new();
    let mut absorb = |text: &str| {
        for token in text.split(|c: char| !c.is_alphanumeric()) {
            if token.len() >= 3 {
                vocab.insert(token.to_lowercase());
            }
        }
    };
    absorb(&golden.instruction);
    absorb(&golden.app_id);
    if let Some(plan) = &golden.golden_plan {
        for call in plan {
            absorb(&call.name);
            for param in &call.parameters {
                absorb(param);
            }
        }
    }
    vocab
}

/// True when some planned parameter names an entity with no token overlap
/// with the reference vocabulary.
fn plan_hallucinates(episode: &Episode, golden: &Task) -> bool {
    let Some(plan_entry) = episode
        .transcripts
        .iter()
        .find(|t| t.role == chop_core::BackendRole::Plan)
    else {
        return false;
    };
    let vocab = reference_vocabulary(golden);
    for (_, params) in parse_plan_calls(&plan_entry.response) {
        for param in params {
            let tokens: Vec<String> = param
                .split(|c: char| !c.is_alphanumeric())
                .filter(|t| t.len() >= 3)
                .map(str::to_lowercase)
                .collect();
            if !tokens.is_empty() && tokens.iter().all(|t| !vocab.contains(t)) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use chop_core::{parse_action, BackendRole, Difficulty, Language, TranscriptEntry};

    fn golden() -> Task {
        Task {
            id: "t1".to_string(),
            instruction: "Search for cat videos on TubeApp".to_string(),
            language: Language::En,
            difficulty: Difficulty::Easy,
            app_id: "tube_app".to_string(),
            golden_actions: vec![parse_action("EXIT").unwrap()],
            golden_plan: None,
        }
    }

    fn failed(reason: TerminalReason, transcripts: Vec<TranscriptEntry>) -> Episode {
        Episode {
            task_id: "t1".to_string(),
            executed_actions: vec![],
            transcripts,
            action_agent_calls: 1,
            api_calls_total: 2,
            success: false,
            terminal_reason: reason,
        }
    }

    fn entry(role: BackendRole, request: &str, response: &str) -> TranscriptEntry {
        TranscriptEntry {
            role,
            request: request.to_string(),
            response: response.to_string(),
            turn: 0,
        }
    }

    #[test]
    fn terminal_reasons_map_directly() {
        assert_eq!(
            classify_error(&failed(TerminalReason::MaxRounds, vec![]), &golden()).unwrap(),
            ErrorCategory::ExceedsMaxIterations
        );
        assert_eq!(
            classify_error(&failed(TerminalReason::ParseError, vec![]), &golden()).unwrap(),
            ErrorCategory::OutputParseError
        );
    }

    #[test]
    fn grounding_failure_in_transcript_wins() {
        let transcripts = vec![entry(
            BackendRole::Action,
            &format!("observation...\n{GROUNDING_ERROR_MARKER} no element named \"Search Barr\""),
            "Action: CLICK(Search Barr)",
        )];
        assert_eq!(
            classify_error(&failed(TerminalReason::EnvError, transcripts), &golden()).unwrap(),
            ErrorCategory::PoorGraphicalRecognition
        );
    }

    #[test]
    fn foreign_plan_entities_are_hallucinations() {
        let transcripts = vec![entry(
            BackendRole::Plan,
            "plan prompt",
            "1. Search Item (quantum blockchain)\n2. Open Section (comments)",
        )];
        assert_eq!(
            classify_error(&failed(TerminalReason::EnvError, transcripts), &golden()).unwrap(),
            ErrorCategory::Hallucination
        );
    }

    #[test]
    fn everything_else_is_misinterpretation() {
        let transcripts = vec![entry(
            BackendRole::Plan,
            "plan prompt",
            "1. Search Item (cat videos)",
        )];
        assert_eq!(
            classify_error(&failed(TerminalReason::EnvError, transcripts), &golden()).unwrap(),
            ErrorCategory::MisinterpretationOfTaskContext
        );
    }

    #[test]
    fn plan_annotations_do_not_leak_into_parameters() {
        let calls = parse_plan_calls(
            "1. Search Item (cat videos) | purpose: find them (quickly) | stop: results (any)",
        );
        assert_eq!(calls.len(), 1);
        assert_eq!(calls[0].0, "Search Item");
        assert_eq!(calls[0].1, vec!["cat videos"]);
    }

    #[test]
    fn successful_episodes_are_not_classified() {
        let mut episode = failed(TerminalReason::Exit, vec![]);
        episode.success = true;
        assert!(matches!(
            classify_error(&episode, &golden()),
            Err(EvalError::NotAFailure { .. })
        ));
    }
}
