//! Cluster summarization: send the rendered action sequences to a
//! completion backend and parse the standardized process plus boundary
//! conditions out of the response.

use crate::synonyms::VerbCluster;
use crate::MinerError;
use chop_backends::{BackendRequest, CompletionBackend, RequestMetadata};
use chop_core::{render_action, BackendRole, SubtaskDoc};

/// The summarization prompt with its action-sequence slot.
pub const SUMMARY_PROMPT_TEMPLATE: &str = "Please summarize the following {{action sequence}} into a standardized process and specify boundary conditions.";

/// Render a cluster's demonstrations, one line per segment.
pub fn render_cluster_sequences(cluster: &VerbCluster) -> String {
    cluster
        .segments
        .iter()
        .map(|segment| {
            let actions: Vec<String> = segment.steps.iter().map(|s| render_action(&s.action)).collect();
            format!("- {}: {}", segment.instruction, actions.join(" -> "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// The exact prompt sent for a cluster.
pub fn build_summary_prompt(cluster: &VerbCluster) -> String {
    let rendered = format!("action sequences:\n{}\n", render_cluster_sequences(cluster));
    SUMMARY_PROMPT_TEMPLATE.replace("{{action sequence}}", &rendered)
}

/// Ask the backend for a summary and parse it into a [`SubtaskDoc`].
pub fn summarize_cluster(
    cluster: &VerbCluster,
    backend: &dyn CompletionBackend,
) -> Result<SubtaskDoc, MinerError> {
    if cluster.segments.is_empty() {
        return Err(MinerError::EmptyCluster(cluster.canonical_verb.clone()));
    }
    let request = BackendRequest::new(
        BackendRole::Summarize,
        build_summary_prompt(cluster),
        RequestMetadata::for_task(&cluster.canonical_verb),
    );
    let response = backend.complete(&request)?;
    parse_summary(&response).map_err(|detail| MinerError::UnparseableSummary {
        verb: cluster.canonical_verb.clone(),
        detail,
    })
}

/// Parse a summary response: numbered (or dashed) lines are items; a
/// "Standardized process" heading routes items to the process, a
/// "Boundary conditions" heading to the conditions. Headingless numbered
/// text counts as process steps. No numbered steps at all is an error.
pub fn parse_summary(text: &str) -> Result<SubtaskDoc, String> {
    #[derive(PartialEq)]
    enum Section {
        Process,
        Boundary,
    }

    let mut section = Section::Process;
    let mut doc = SubtaskDoc::default();
    for raw_line in text.lines() {
        let line = raw_line.trim();
        if line.is_empty() {
            continue;
        }
        let lower = line.to_lowercase();
        let remainder = if lower.contains("boundary condition") {
            section = Section::Boundary;
            line.split_once(':').map(|(_, rest)| rest.trim())
        } else if lower.contains("standardized process") {
            section = Section::Process;
            line.split_once(':').map(|(_, rest)| rest.trim())
        } else {
            Some(line)
        };
        if let Some(item) = remainder.and_then(strip_item_marker) {
            match section {
                Section::Process => doc.standardized_process.push(item),
                Section::Boundary => doc.boundary_conditions.push(item),
            }
        }
    }
    if doc.standardized_process.is_empty() {
        return Err("no numbered process steps found".to_string());
    }
    Ok(doc)
}

/// `1. text`, `2) text`, or `- text` -> `text`.
fn strip_item_marker(line: &str) -> Option<String> {
    let line = line.trim();
    if let Some(rest) = line.strip_prefix("- ") {
        return Some(rest.trim().to_string());
    }
    let digits: String = line.chars().take_while(char::is_ascii_digit).collect();
    if digits.is_empty() {
        return None;
    }
    let rest = &line[digits.len()..];
    let rest = rest.strip_prefix('.').or_else(|| rest.strip_prefix(')'))?;
    let item = rest.trim();
    if item.is_empty() { None } else { Some(item.to_string()) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chop_backends::ScriptedBackend;
    use chop_core::{parse_action, AnnotatedStep};

    /// The canonical worked example: a search cluster summary with four
    /// process steps and three boundary conditions.
    pub(crate) const SEARCH_SUMMARY: &str = "Standardized process: 1. Click on the search bar located at the designated area of the screen.\n2. Type in the content specified by the search term parameter.\n3. If applicable, select a search suggestion from the dropdown list that appears after typing.\n4. Press enter or click on the search button to execute the search.\nBoundary conditions:\n1. If the search term is not found, check for spelling errors.\n2. If selecting a suggestion, ensure it is the correct item before proceeding.\n3. If navigating to a specific website, ensure the URL is entered correctly in the address bar.";

    fn search_cluster() -> VerbCluster {
        let steps = ["CLICK(Search Bar)", "TYPE(news)", "CLICK(Search Button)"]
            .into_iter()
            .map(|line| AnnotatedStep {
                action: parse_action(line).unwrap(),
                thought: "do it".to_string(),
            })
            .collect();
        VerbCluster {
            canonical_verb: "search".to_string(),
            members: ["search".to_string(), "lookup".to_string()].into_iter().collect(),
            segments: vec![crate::segment::DemoSegment {
                instruction: "search news".to_string(),
                steps,
            }],
            frequency: 1,
        }
    }

    #[test]
    fn example_summary_parses_into_four_and_three() {
        let doc = parse_summary(SEARCH_SUMMARY).unwrap();
        assert_eq!(doc.standardized_process.len(), 4);
        assert_eq!(doc.boundary_conditions.len(), 3);
        assert_eq!(
            doc.standardized_process[0],
            "Click on the search bar located at the designated area of the screen."
        );
        assert_eq!(
            doc.boundary_conditions[2],
            "If navigating to a specific website, ensure the URL is entered correctly in the address bar."
        );
    }

    #[test]
    fn prose_without_numbers_is_unparseable() {
        assert!(parse_summary("The user should search and then maybe click around.").is_err());
    }

    #[test]
    fn prompt_embeds_template_and_sequences() {
        let cluster = search_cluster();
        let prompt = build_summary_prompt(&cluster);
        assert!(prompt.starts_with("Please summarize the following"));
        assert!(prompt.contains("search news: CLICK(Search Bar) -> TYPE(news) -> CLICK(Search Button)"));
        assert!(prompt.ends_with("into a standardized process and specify boundary conditions."));
        // Deterministic byte-for-byte.
        assert_eq!(prompt, build_summary_prompt(&cluster));
    }

    #[test]
    fn scripted_backend_round_trip() {
        let cluster = search_cluster();
        let backend = ScriptedBackend::new(vec![chop_backends::ScriptEntry {
            role: chop_core::BackendRole::Summarize,
            task_id: "search".to_string(),
            response: SEARCH_SUMMARY.to_string(),
            repeat: false,
        }]);
        let doc = summarize_cluster(&cluster, &backend).unwrap();
        assert_eq!(doc.standardized_process.len(), 4);
        assert_eq!(doc.boundary_conditions.len(), 3);
    }

    #[test]
    fn empty_cluster_is_rejected() {
        let mut cluster = search_cluster();
        cluster.segments.clear();
        let backend = ScriptedBackend::new(vec![]);
        assert!(matches!(
            summarize_cluster(&cluster, &backend),
            Err(MinerError::EmptyCluster(_))
        ));
    }
}
