//! `chop validate`: schema-check every fixture kind, BFS-check bundle
//! reachability, and replay golden action sequences through the simulator.
//! Lists every violation; any violation fails the command.

use crate::io::{json_files, load_tasks};
use crate::CliError;
use chop_backends::{Cassette, CassetteMode};
use chop_core::Task;
use chop_simenv::{load_app_bundle, merge_bundles, reset, step, AppDefinition, StepOutcome, PHONE_APP_ID};
use std::collections::BTreeSet;
use std::path::PathBuf;

#[derive(Debug, clap::Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub tasks: Option<PathBuf>,
    #[arg(long)]
    pub bundles: Option<PathBuf>,
    #[arg(long)]
    pub library: Option<PathBuf>,
    #[arg(long)]
    pub cassettes: Option<PathBuf>,
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<Vec<String>, CliError> {
    let mut violations = Vec::new();
    let mut bundles: Vec<AppDefinition> = Vec::new();

    if let Some(dir) = &args.bundles {
        match json_files(dir) {
            Err(e) => violations.push(e.to_string()),
            Ok(files) => {
                for path in files {
                    match load_app_bundle(&path) {
                        Err(e) => violations.push(format!("{}: {e}", path.display())),
                        Ok(app) => {
                            let reachable = app.reachable_screens();
                            let declared: BTreeSet<String> =
                                app.screen_ids().map(str::to_string).collect();
                            for screen in declared.difference(&reachable) {
                                violations.push(format!(
                                    "bundle {}: screen `{screen}` is unreachable from home",
                                    app.app_id
                                ));
                            }
                            bundles.push(app);
                        }
                    }
                }
            }
        }
    }

    if let Some(path) = &args.library
        && let Err(e) = chop_miner::load_library(path)
    {
        violations.push(format!("{}: {e}", path.display()));
    }

    if let Some(path) = &args.tasks {
        match load_tasks(path) {
            Err(e) => violations.push(e.to_string()),
            Ok(tasks) => {
                for task in &tasks {
                    if let Err(e) = task.validate() {
                        violations.push(e.to_string());
                        continue;
                    }
                    if !bundles.is_empty() {
                        replay_golden(task, &bundles, &mut violations);
                    }
                }
            }
        }
    }

    if let Some(dir) = &args.cassettes {
        match json_files(dir) {
            Err(e) => violations.push(e.to_string()),
            Ok(files) => {
                for path in files {
                    if let Err(e) = Cassette::load(&path, CassetteMode::Replay) {
                        violations.push(format!("{e}"));
                    }
                }
            }
        }
    }

    for violation in &violations {
        println!("violation: {violation}");
    }
    if violations.is_empty() {
        println!("ok");
    }
    Ok(violations)
}

/// Golden actions must replay from reset to a terminal Exit.
fn replay_golden(task: &Task, bundles: &[AppDefinition], violations: &mut Vec<String>) {
    let app = if task.app_id == PHONE_APP_ID {
        match merge_bundles(bundles) {
            Ok(app) => app,
            Err(e) => {
                violations.push(format!("task {}: cannot build phone environment: {e}", task.id));
                return;
            }
        }
    } else {
        match bundles.iter().find(|b| b.app_id == task.app_id) {
            Some(app) => app.clone(),
            None => {
                violations.push(format!(
                    "task {}: no bundle for app `{}`",
                    task.id, task.app_id
                ));
                return;
            }
        }
    };

    let mut state = reset(&app);
    let mut last_outcome = None;
    for (index, action) in task.golden_actions.iter().enumerate() {
        match step(&app, &state, action) {
            Ok((next, outcome)) => {
                state = next;
                last_outcome = Some(outcome);
            }
            Err(e) => {
                violations.push(format!(
                    "task {}: golden action #{index} ({action}) failed: {e}",
                    task.id
                ));
                return;
            }
        }
    }
    if last_outcome != Some(StepOutcome::Exited) {
        violations.push(format!("task {}: golden replay did not end in EXIT", task.id));
    }
}
