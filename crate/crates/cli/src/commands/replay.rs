//! `chop replay`: re-execute an episode archive's actions through the
//! simulator, printing each step, and verify the terminal state matches
//! what the archive claims.

use crate::io::load_tasks;
use crate::CliError;
use chop_core::{Episode, TerminalReason};
use chop_simenv::{merge_bundles, reset, step, PHONE_APP_ID};
use std::path::PathBuf;

#[derive(Debug, clap::Args)]
pub struct ReplayArgs {
    /// Episode archive file.
    #[arg(long)]
    pub episode: PathBuf,
    /// Golden task file or directory (resolves the episode's app).
    #[arg(long)]
    pub tasks: PathBuf,
    /// Directory of app bundle files.
    #[arg(long)]
    pub bundles: PathBuf,
}

pub fn cmd_replay(args: &ReplayArgs) -> Result<(), CliError> {
    let raw = std::fs::read_to_string(&args.episode)
        .map_err(|e| CliError::Validation(format!("{}: {e}", args.episode.display())))?;
    let episode: Episode = serde_json::from_str(&raw)
        .map_err(|e| CliError::Validation(format!("{}: {e}", args.episode.display())))?;

    let tasks = load_tasks(&args.tasks)?;
    let task = tasks
        .iter()
        .find(|t| t.id == episode.task_id)
        .ok_or_else(|| CliError::Validation(format!("no task `{}` in {}", episode.task_id, args.tasks.display())))?;

    let bundles = crate::io::load_bundles(&args.bundles)?;
    let app = if task.app_id == PHONE_APP_ID {
        merge_bundles(&bundles).map_err(|e| CliError::Validation(e.to_string()))?
    } else {
        bundles
            .iter()
            .find(|b| b.app_id == task.app_id)
            .cloned()
            .ok_or_else(|| CliError::Validation(format!("no bundle for app `{}`", task.app_id)))?
    };

    let mut state = reset(&app);
    for (index, action) in episode.executed_actions.iter().enumerate() {
        match step(&app, &state, action) {
            Ok((next, outcome)) => {
                println!("step {index}: {action} -> {outcome:?} [{}]", next.current.screen_id);
                state = next;
            }
            Err(e) => {
                return Err(CliError::Validation(format!(
                    "replay diverged at step {index} ({action}): {e}"
                )));
            }
        }
    }

    let expect_terminal = episode.terminal_reason == TerminalReason::Exit;
    if state.terminal != expect_terminal {
        return Err(CliError::Validation(format!(
            "terminal mismatch: device terminal={} but archive says {:?}",
            state.terminal, episode.terminal_reason
        )));
    }
    println!(
        "replayed {} actions for task {}; terminal={:?}",
        episode.executed_actions.len(),
        episode.task_id,
        episode.terminal_reason
    );
    Ok(())
}
