//! The evaluation engine: effectiveness (SR, CR), efficiency (ME, AE, AAC),
//! plan-quality matching scores (BLEU, ROUGE-L), and deterministic failure
//! classification, aggregated overall, per difficulty, and per app.
//!
//! All computations are pure functions over immutable episode records.

pub mod classify;
pub mod lcs;
pub mod metrics;
pub mod report;
pub mod text;

pub use classify::{classify_error, ErrorCategory};
pub use lcs::{lcs_intersection, lcs_len_by};
pub use metrics::{compute_aac, compute_ae, compute_cr, compute_me, compute_sr, GoldenSet};
pub use report::{
    aggregate_report, render_plan_tokens, render_text_report, MetricGroup, MetricsReport, RawSums,
    ReportConfig,
};
pub use text::{compute_bleu, compute_rouge_l, corpus_bleu, tokenize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("no golden task for episode `{task_id}`")]
    MissingGolden { task_id: String },
    #[error("{metric} is undefined: denominator is zero")]
    DivisionByZero { metric: &'static str },
    #[error("reference token sequence is empty")]
    EmptyReference,
    #[error("episode `{task_id}` succeeded; nothing to classify")]
    NotAFailure { task_id: String },
}
