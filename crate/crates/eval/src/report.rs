//! Report aggregation: all metrics overall, per difficulty, and per app,
//! plus plan-quality scores and the failure histogram. The report is a pure
//! function of its inputs; identical episodes produce identical bytes.

use crate::classify::{classify_error, parse_plan_calls};
use crate::lcs::lcs_intersection;
use crate::metrics::{compute_ae, compute_cr, compute_me, compute_sr, golden_for, GoldenSet};
use crate::text::{compute_rouge_l, corpus_bleu, tokenize};
use crate::EvalError;
use chop_core::{BackendRole, Episode, EqualityPolicy, SubtaskCall};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Raw corpus sums, kept in the report so every ratio can be re-derived.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSums {
    pub golden_actions: u64,
    pub agent_actions: u64,
    pub matched_actions: u64,
    pub action_agent_calls: u64,
    pub api_calls: u64,
}

/// One row of metrics: overall, per difficulty, or per app.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricGroup {
    pub episodes: usize,
    pub sr: f64,
    pub cr: f64,
    pub me: Option<f64>,
    pub ae: Option<f64>,
    pub aac: Option<f64>,
    pub raw: RawSums,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub episode_count: usize,
    pub sr: f64,
    pub cr: f64,
    pub me: Option<f64>,
    pub ae: Option<f64>,
    pub aac: Option<f64>,
    pub per_difficulty: BTreeMap<String, MetricGroup>,
    pub per_app: BTreeMap<String, MetricGroup>,
    pub subtask_bleu: Option<f64>,
    pub subtask_rouge_l: Option<f64>,
    /// Plan pairs scored for the subtask metrics.
    pub subtask_pairs: usize,
    pub error_histogram: BTreeMap<String, u64>,
    pub raw: RawSums,
}

#[derive(Debug, Clone)]
pub struct ReportConfig {
    pub policy: EqualityPolicy,
    pub bleu_max_n: usize,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            policy: EqualityPolicy::default(),
            bleu_max_n: 4,
        }
    }
}

fn group_metrics(
    episodes: &[&Episode],
    goldens: &GoldenSet,
    policy: &EqualityPolicy,
) -> Result<MetricGroup, EvalError> {
    let owned: Vec<Episode> = episodes.iter().map(|e| (*e).clone()).collect();
    let mut raw = RawSums::default();
    for episode in &owned {
        let golden = golden_for(goldens, episode)?;
        raw.golden_actions += golden.golden_actions.len() as u64;
        raw.agent_actions += episode.executed_actions.len() as u64;
        raw.matched_actions +=
            lcs_intersection(&golden.golden_actions, &episode.executed_actions, policy) as u64;
        raw.action_agent_calls += u64::from(episode.action_agent_calls);
        raw.api_calls += u64::from(episode.api_calls_total);
    }
    let allow_div0 = |r: Result<f64, EvalError>| match r {
        Ok(v) => Ok(Some(v)),
        Err(EvalError::DivisionByZero { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    let aac = allow_div0(crate::metrics::compute_aac(&owned, goldens, policy))?;
    Ok(MetricGroup {
        episodes: owned.len(),
        sr: compute_sr(&owned),
        cr: compute_cr(&owned, goldens, policy)?,
        me: allow_div0(compute_me(goldens, &owned))?,
        ae: allow_div0(compute_ae(goldens, &owned))?,
        aac,
        raw,
    })
}

/// Canonical token stream for a plan: `Name (p1, p2)` per call.
pub fn render_plan_tokens(calls: &[SubtaskCall]) -> Vec<String> {
    let mut rendered = Vec::new();
    for call in calls {
        if call.parameters.is_empty() {
            rendered.push(call.name.clone());
        } else {
            rendered.push(format!("{} ({})", call.name, call.parameters.join(", ")));
        }
    }
    tokenize(&rendered.join("\n"))
}

fn agent_plan_tokens(episode: &Episode) -> Option<Vec<String>> {
    let plan = episode.transcripts.iter().find(|t| t.role == BackendRole::Plan)?;
    let calls = parse_plan_calls(&plan.response);
    if calls.is_empty() {
        return None;
    }
    let rendered: Vec<String> = calls
        .into_iter()
        .map(|(name, params)| {
            if params.is_empty() { name } else { format!("{name} ({})", params.join(", ")) }
        })
        .collect();
    Some(tokenize(&rendered.join("\n")))
}

/// Compute every metric overall, per difficulty, and per app.
pub fn aggregate_report(
    episodes: &[Episode],
    goldens: &GoldenSet,
    config: &ReportConfig,
) -> Result<MetricsReport, EvalError> {
    let refs: Vec<&Episode> = episodes.iter().collect();
    let overall = group_metrics(&refs, goldens, &config.policy)?;

    let mut per_difficulty: BTreeMap<String, Vec<&Episode>> = BTreeMap::new();
    let mut per_app: BTreeMap<String, Vec<&Episode>> = BTreeMap::new();
    for episode in episodes {
        let golden = golden_for(goldens, episode)?;
        per_difficulty
            .entry(golden.difficulty.to_string())
            .or_default()
            .push(episode);
        per_app.entry(golden.app_id.clone()).or_default().push(episode);
    }
    let mut difficulty_groups = BTreeMap::new();
    for (difficulty, group) in per_difficulty {
        difficulty_groups.insert(difficulty, group_metrics(&group, goldens, &config.policy)?);
    }
    let mut app_groups = BTreeMap::new();
    for (app, group) in per_app {
        app_groups.insert(app, group_metrics(&group, goldens, &config.policy)?);
    }

    // Plan-quality scores over episodes whose golden carries an annotated plan.
    let mut pairs: Vec<(Vec<String>, Vec<String>)> = Vec::new();
    for episode in episodes {
        let golden = golden_for(goldens, episode)?;
        let Some(golden_plan) = &golden.golden_plan else { continue };
        let Some(candidate) = agent_plan_tokens(episode) else { continue };
        pairs.push((candidate, render_plan_tokens(golden_plan)));
    }
    let (subtask_bleu, subtask_rouge_l) = if pairs.is_empty() {
        (None, None)
    } else {
        let bleu = corpus_bleu(&pairs, config.bleu_max_n)?;
        let mut rouge_sum = 0.0;
        for (candidate, reference) in &pairs {
            rouge_sum += compute_rouge_l(candidate, reference)?;
        }
        (Some(bleu), Some(rouge_sum / pairs.len() as f64))
    };

    let mut error_histogram: BTreeMap<String, u64> = BTreeMap::new();
    for episode in episodes.iter().filter(|e| !e.success) {
        let golden = golden_for(goldens, episode)?;
        let category = classify_error(episode, golden)?;
        *error_histogram.entry(category.to_string()).or_insert(0) += 1;
    }

    Ok(MetricsReport {
        episode_count: episodes.len(),
        sr: overall.sr,
        cr: overall.cr,
        me: overall.me,
        ae: overall.ae,
        aac: overall.aac,
        per_difficulty: difficulty_groups,
        per_app: app_groups,
        subtask_bleu,
        subtask_rouge_l,
        subtask_pairs: pairs.len(),
        error_histogram,
        raw: overall.raw,
    })
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
}

/// Fixed-width text summary shaped like the headline results table:
/// the five metrics overall and per difficulty, plus plan quality and the
/// failure histogram. Per-app rows are appended when `per_app` is set.
pub fn render_text_report(report: &MetricsReport, per_app: bool) -> String {
    let mut out = String::new();
    let push = |out: &mut String, line: &str| {
        out.push_str(line);
        out.push('\n');
    };

    push(&mut out, &format!("episodes: {}", report.episode_count));
    push(&mut out, "");
    push(
        &mut out,
        &format!("{:<12} {:>9} {:>9} {:>9} {:>9} {:>9}", "bucket", "SR", "CR", "ME", "AE", "AAC"),
    );
    let row = |label: &str, g: &MetricGroup| {
        format!(
            "{:<12} {:>9.4} {:>9.4} {:>9} {:>9} {:>9}",
            label,
            g.sr,
            g.cr,
            fmt_opt(g.me),
            fmt_opt(g.ae),
            fmt_opt(g.aac)
        )
    };
    let overall = MetricGroup {
        episodes: report.episode_count,
        sr: report.sr,
        cr: report.cr,
        me: report.me,
        ae: report.ae,
        aac: report.aac,
        raw: report.raw.clone(),
    };
    push(&mut out, &row("overall", &overall));
    for difficulty in ["easy", "medium", "hard"] {
        if let Some(group) = report.per_difficulty.get(difficulty) {
            push(&mut out, &row(difficulty, group));
        }
    }
    if per_app {
        push(&mut out, "");
        push(&mut out, "per-app:");
        for (app, group) in &report.per_app {
            push(&mut out, &row(app, group));
        }
    }
    push(&mut out, "");
    push(
        &mut out,
        &format!(
            "subtask quality: BLEU {}  ROUGE-L {}  (pairs: {})",
            fmt_opt(report.subtask_bleu),
            fmt_opt(report.subtask_rouge_l),
            report.subtask_pairs
        ),
    );
    if report.error_histogram.is_empty() {
        push(&mut out, "failures: none");
    } else {
        push(&mut out, "failures:");
        for (category, count) in &report.error_histogram {
            push(&mut out, &format!("  {category}: {count}"));
        }
    }
    out
}
