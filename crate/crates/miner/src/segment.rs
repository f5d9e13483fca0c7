//! Corpus segmentation: keep only demonstrations long enough to count as
//! single-step subtask demos (at least K actions, K = 3 by default).

use crate::MinerError;
use chop_core::{AnnotatedStep, TrajectoryRecord};
use serde::{Deserialize, Serialize};

/// One demonstration: an instruction with its annotated action steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoSegment {
    pub instruction: String,
    pub steps: Vec<AnnotatedStep>,
}

/// Segments with at least `k` steps, in corpus order.
pub fn segment_corpus(records: &[TrajectoryRecord], k: usize) -> Result<Vec<DemoSegment>, MinerError> {
    if k < 1 {
        return Err(MinerError::InvalidThreshold(k));
    }
    if records.is_empty() {
        return Err(MinerError::EmptyCorpus);
    }
    Ok(records
        .iter()
        .filter(|r| r.steps.len() >= k)
        .map(|r| DemoSegment {
            instruction: r.instruction.clone(),
            steps: r.steps.clone(),
        })
        .collect())
}
