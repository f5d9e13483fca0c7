//! `chop eval`: score episode archives against golden tasks and write the
//! metrics report (machine-readable JSON plus a fixed-width table).

use crate::io::{load_bundles, load_episodes, load_tasks, write_json};
use crate::CliError;
use chop_core::{ElementRegistry, EqualityPolicy};
use chop_eval::{aggregate_report, render_text_report, GoldenSet, MetricsReport, ReportConfig};
use chop_simenv::merge_bundles;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, clap::Args)]
pub struct EvalArgs {
    /// Directory of episode archives.
    #[arg(long)]
    pub episodes: PathBuf,
    /// Golden task file or directory.
    #[arg(long)]
    pub tasks: PathBuf,
    /// Bundle directory; builds the grounding registry for action equality.
    #[arg(long)]
    pub bundles: Option<PathBuf>,
    /// Directory to write report.json and report.txt into.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include the per-app section in the text report.
    #[arg(long = "per-app", default_value_t = false)]
    pub per_app: bool,
}

/// The single timestamped wrapper around the deterministic report body.
#[derive(Debug, Serialize)]
pub struct ReportFile {
    pub generated_at_epoch: u64,
    pub report: MetricsReport,
}

fn grounding_registry(bundles: &[chop_simenv::AppDefinition]) -> ElementRegistry {
    let mut registry = ElementRegistry::new();
    let mut absorb = |other: ElementRegistry| {
        // first insertion wins; bundle order is sorted and deterministic
        for (name, center) in other.entries() {
            if registry.resolve(name).is_none() {
                registry.insert(name, center);
            }
        }
    };
    for bundle in bundles {
        absorb(bundle.element_registry());
    }
    if let Ok(merged) = merge_bundles(bundles) {
        absorb(merged.element_registry());
    }
    registry
}

pub fn cmd_eval(args: &EvalArgs) -> Result<MetricsReport, CliError> {
    let episodes = load_episodes(&args.episodes)?;
    let goldens: GoldenSet = load_tasks(&args.tasks)?
        .into_iter()
        .map(|t| (t.id.clone(), t))
        .collect();

    let policy = match &args.bundles {
        Some(dir) => {
            let bundles = load_bundles(dir)?;
            EqualityPolicy::with_registry(grounding_registry(&bundles))
        }
        None => EqualityPolicy::default(),
    };

    let report = aggregate_report(&episodes, &goldens, &ReportConfig { policy, bleu_max_n: 4 })
        .map_err(|e| CliError::Validation(e.to_string()))?;

    let text = render_text_report(&report, args.per_app);
    print!("{text}");

    if let Some(out) = &args.out {
        std::fs::create_dir_all(out).map_err(|e| CliError::Infra(format!("{}: {e}", out.display())))?;
        let epoch = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        write_json(
            &out.join("report.json"),
            &ReportFile {
                generated_at_epoch: epoch,
                report: report.clone(),
            },
        )?;
        let txt = format!("generated_at_epoch: {epoch}\n{text}");
        std::fs::write(out.join("report.txt"), txt)
            .map_err(|e| CliError::Infra(format!("{}: {e}", out.display())))?;
    }
    Ok(report)
}
