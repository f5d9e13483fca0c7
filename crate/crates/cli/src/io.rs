//! File loading shared by the subcommands: tasks (file or directory),
//! bundle directories, and episode archives. Directory listings are sorted
//! so every command is deterministic.

use crate::CliError;
use chop_core::{Episode, Task};
use chop_simenv::{load_app_bundle, AppDefinition};
use std::path::{Path, PathBuf};

pub fn json_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::Validation(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn load_task_file(path: &Path) -> Result<Task, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let task: Task = serde_json::from_str(&raw)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    task.validate()
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(task)
}

/// Load tasks from a single JSON file (one task or an array) or from a
/// directory of task files.
pub fn load_tasks(path: &Path) -> Result<Vec<Task>, CliError> {
    if path.is_dir() {
        return json_files(path)?.iter().map(|p| load_task_file(p)).collect();
    }
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let tasks: Vec<Task> = if raw.trim_start().starts_with('[') {
        serde_json::from_str(&raw)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
    } else {
        vec![serde_json::from_str(&raw)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?]
    };
    for task in &tasks {
        task.validate()
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    }
    Ok(tasks)
}

pub fn load_bundles(dir: &Path) -> Result<Vec<AppDefinition>, CliError> {
    let mut bundles = Vec::new();
    for path in json_files(dir)? {
        let app = load_app_bundle(&path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        bundles.push(app);
    }
    if bundles.is_empty() {
        return Err(CliError::Validation(format!(
            "{}: no bundle files found",
            dir.display()
        )));
    }
    Ok(bundles)
}

pub fn load_episodes(dir: &Path) -> Result<Vec<Episode>, CliError> {
    let mut episodes = Vec::new();
    for path in json_files(dir)? {
        let raw = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let episode: Episode = serde_json::from_str(&raw)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        episodes.push(episode);
    }
    Ok(episodes)
}

pub fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Infra(format!("{}: {e}", parent.display())))?;
    }
    let json = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Infra(format!("{}: {e}", path.display())))?;
    std::fs::write(path, json + "\n").map_err(|e| CliError::Infra(format!("{}: {e}", path.display())))
}
