//! `chop run`: execute every task against its app bundle and write one
//! episode archive per task. Agent failures are recorded in the archives;
//! only infrastructure problems make the command fail.

use crate::backend::BackendOptions;
use crate::io::{load_bundles, load_tasks, write_json};
use crate::CliError;
use chop_agents::{run_episode, RunnerConfig};
use chop_core::{Episode, Language, Task};
use std::path::PathBuf;
use std::sync::Mutex;

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// Task file or directory of task files.
    #[arg(long)]
    pub tasks: PathBuf,
    /// Directory of app bundle files.
    #[arg(long)]
    pub bundles: PathBuf,
    /// Basis-subtask library file.
    #[arg(long)]
    pub library: PathBuf,
    /// Output directory for episode archives.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long = "max-rounds", default_value_t = 20)]
    pub max_rounds: usize,
    #[arg(long = "max-turns-per-subtask", default_value_t = 8)]
    pub max_turns_per_subtask: usize,
    /// Disable one-shot multi-action batching for fixed-flow subtasks.
    #[arg(long = "no-batching", default_value_t = false)]
    pub no_batching: bool,
    /// Concurrent episode runners.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Only run tasks in this language.
    #[arg(long, value_enum)]
    pub language: Option<CliLanguage>,
    #[command(flatten)]
    pub backend: crate::BackendArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CliLanguage {
    En,
    Zh,
}

impl From<CliLanguage> for Language {
    fn from(l: CliLanguage) -> Self {
        match l {
            CliLanguage::En => Language::En,
            CliLanguage::Zh => Language::Zh,
        }
    }
}

pub fn cmd_run(args: &RunArgs) -> Result<Vec<Episode>, CliError> {
    if args.max_rounds < 1 {
        return Err(CliError::Usage("--max-rounds must be >= 1".to_string()));
    }
    let mut tasks = load_tasks(&args.tasks)?;
    if let Some(language) = args.language {
        let language: Language = language.into();
        tasks.retain(|t| t.language == language);
    }
    if tasks.is_empty() {
        return Err(CliError::Validation("no tasks to run".to_string()));
    }
    let bundles = load_bundles(&args.bundles)?;
    let library = chop_miner::load_library(&args.library)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Infra(format!("{}: {e}", args.out.display())))?;

    let options: BackendOptions = args.backend.to_options();
    let shared_backend = if options.per_task() { None } else { Some(options.build("shared")?) };

    let config = RunnerConfig {
        max_rounds: args.max_rounds,
        max_turns_per_subtask: args.max_turns_per_subtask,
        allow_batching: !args.no_batching,
        ground_clicks: true,
        language: None,
    };

    let jobs = args.jobs.max(1);
    let results: Mutex<Vec<(String, Result<Episode, CliError>)>> = Mutex::new(Vec::new());
    let queue: Mutex<std::collections::VecDeque<&Task>> =
        Mutex::new(tasks.iter().collect());

    std::thread::scope(|scope| {
        for _ in 0..jobs.min(tasks.len()) {
            scope.spawn(|| loop {
                let Some(task) = queue.lock().expect("task queue").pop_front() else {
                    break;
                };
                let outcome = run_one(task, &bundles, &library, &options, &shared_backend, &config, args);
                results
                    .lock()
                    .expect("result collector")
                    .push((task.id.clone(), outcome));
            });
        }
    });

    let mut results = results.into_inner().expect("result collector");
    results.sort_by(|a, b| a.0.cmp(&b.0));

    let mut episodes = Vec::new();
    let mut failures = Vec::new();
    for (task_id, outcome) in results {
        match outcome {
            Ok(episode) => {
                println!(
                    "task {task_id}: success={} reason={:?} actions={} action_calls={} api_calls={}",
                    episode.success,
                    episode.terminal_reason,
                    episode.executed_actions.len(),
                    episode.action_agent_calls,
                    episode.api_calls_total
                );
                episodes.push(episode);
            }
            Err(e) => failures.push(format!("task {task_id}: {e}")),
        }
    }
    if !failures.is_empty() {
        return Err(CliError::Infra(failures.join("\n")));
    }
    Ok(episodes)
}

fn run_one(
    task: &Task,
    bundles: &[chop_simenv::AppDefinition],
    library: &chop_core::SubtaskLibrary,
    options: &BackendOptions,
    shared: &Option<std::sync::Arc<dyn chop_backends::CompletionBackend>>,
    config: &RunnerConfig,
    args: &RunArgs,
) -> Result<Episode, CliError> {
    let backend = match shared {
        Some(backend) => backend.clone(),
        None => options.build(&task.id)?,
    };
    let episode = run_episode(task, bundles, library, &*backend, config)
        .map_err(|e| CliError::Infra(format!("{e}")))?;
    write_json(&args.out.join(format!("{}.json", task.id)), &episode)?;
    Ok(episode)
}
