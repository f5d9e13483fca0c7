//! The five headline metrics. All ratio metrics are corpus-level Σ-over-Σ,
//! matching the formulas' shape: numerators and denominators are summed
//! over tasks separately, never averaged per task.

use crate::lcs::lcs_intersection;
use crate::EvalError;
use chop_core::{Episode, EqualityPolicy, Task};
use std::collections::BTreeMap;

/// Golden tasks keyed by task id.
pub type GoldenSet = BTreeMap<String, Task>;

pub fn golden_for<'a>(goldens: &'a GoldenSet, episode: &Episode) -> Result<&'a Task, EvalError> {
    goldens.get(&episode.task_id).ok_or_else(|| EvalError::MissingGolden {
        task_id: episode.task_id.clone(),
    })
}

/// Success rate: fraction of episodes completed (terminal Exit within the
/// action cap). Empty input yields 0.
pub fn compute_sr(episodes: &[Episode]) -> f64 {
    if episodes.is_empty() {
        return 0.0;
    }
    episodes.iter().filter(|e| e.success).count() as f64 / episodes.len() as f64
}

/// Completion rate: Σ |a_human ∩ a_agent| / Σ |a_human|, with the
/// intersection realized as the LCS under the equality policy.
pub fn compute_cr(
    episodes: &[Episode],
    goldens: &GoldenSet,
    policy: &EqualityPolicy,
) -> Result<f64, EvalError> {
    let mut matched = 0usize;
    let mut total = 0usize;
    for episode in episodes {
        let golden = golden_for(goldens, episode)?;
        matched += lcs_intersection(&golden.golden_actions, &episode.executed_actions, policy);
        total += golden.golden_actions.len();
    }
    if total == 0 {
        return Ok(0.0);
    }
    Ok(matched as f64 / total as f64)
}

/// Mapping efficiency: Σ |a_human| / Σ C_a. Batched multi-action turns push
/// this above 1.
pub fn compute_me(goldens: &GoldenSet, episodes: &[Episode]) -> Result<f64, EvalError> {
    let mut human = 0u64;
    let mut calls = 0u64;
    for episode in episodes {
        let golden = golden_for(goldens, episode)?;
        human += golden.golden_actions.len() as u64;
        calls += u64::from(episode.action_agent_calls);
    }
    if calls == 0 {
        return Err(EvalError::DivisionByZero { metric: "ME" });
    }
    Ok(human as f64 / calls as f64)
}

/// Action efficiency: Σ |a_human| / Σ |a_agent|. Reported unclamped; values
/// above 1 mean the agent found a shorter route.
pub fn compute_ae(goldens: &GoldenSet, episodes: &[Episode]) -> Result<f64, EvalError> {
    let mut human = 0u64;
    let mut agent = 0u64;
    for episode in episodes {
        let golden = golden_for(goldens, episode)?;
        human += golden.golden_actions.len() as u64;
        agent += episode.executed_actions.len() as u64;
    }
    if agent == 0 {
        return Err(EvalError::DivisionByZero { metric: "AE" });
    }
    Ok(human as f64 / agent as f64)
}

/// Average API cost: API_count / Σ |a_human ∩ a_agent|. Counts LLM calls
/// only; the registry grounding stand-in costs zero.
pub fn compute_aac(
    episodes: &[Episode],
    goldens: &GoldenSet,
    policy: &EqualityPolicy,
) -> Result<f64, EvalError> {
    let mut api = 0u64;
    let mut matched = 0u64;
    for episode in episodes {
        let golden = golden_for(goldens, episode)?;
        api += u64::from(episode.api_calls_total);
        matched += lcs_intersection(&golden.golden_actions, &episode.executed_actions, policy) as u64;
    }
    if matched == 0 {
        return Err(EvalError::DivisionByZero { metric: "AAC" });
    }
    Ok(api as f64 / matched as f64)
}
