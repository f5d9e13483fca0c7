//! The episode runner: one plan call, then sequential subtask execution
//! against the simulated device. Grounding failures, environment errors,
//! and unparseable action turns feed back into the next observation instead
//! of aborting; an unparseable plan terminates the episode as `parse_error`;
//! backend transport problems are infrastructure errors and propagate.

use crate::plan::{parse_plan_output, PlanResult};
use crate::prompts::{build_action_prompt, build_plan_prompt};
use crate::turn::parse_action_output;
use crate::AgentError;
use chop_backends::{BackendRequest, CompletionBackend, RequestMetadata};
use chop_core::{
    Action, BackendRole, Episode, History, Language, MemoryEntry, SubtaskCall, SubtaskDoc,
    SubtaskLibrary, Task, TerminalReason, TranscriptEntry, ENV_ERROR_MARKER,
    GROUNDING_ERROR_MARKER, PARSE_ERROR_MARKER,
};
use chop_simenv::{ground, merge_bundles, observe, reset, step, AppDefinition, DeviceState, StepOutcome, PHONE_APP_ID};
use std::borrow::Cow;

#[derive(Debug, Clone)]
pub struct RunnerConfig {
    /// Hard cap on executed actions per episode.
    pub max_rounds: usize,
    /// Action-agent turns allowed per subtask before moving on.
    pub max_turns_per_subtask: usize,
    /// When false, fixed-flow subtasks lose their one-shot batching.
    pub allow_batching: bool,
    /// Resolve `CLICK(name)` to coordinates through the element registry
    /// before execution (the grounding-model stand-in).
    pub ground_clicks: bool,
    /// Override the task's prompt language when set.
    pub language: Option<Language>,
}

impl Default for RunnerConfig {
    fn default() -> Self {
        Self {
            max_rounds: 20,
            max_turns_per_subtask: 8,
            allow_batching: true,
            ground_clicks: true,
            language: None,
        }
    }
}

struct LoopState<'a> {
    app: &'a AppDefinition,
    device: DeviceState,
    transcripts: Vec<TranscriptEntry>,
    executed: Vec<Action>,
    history: History,
    memories: Vec<MemoryEntry>,
    action_calls: u32,
    api_calls: u32,
    turn_index: u32,
    pending_note: Option<String>,
}

impl<'a> LoopState<'a> {
    fn new(app: &'a AppDefinition) -> Self {
        Self {
            app,
            device: reset(app),
            transcripts: Vec::new(),
            executed: Vec::new(),
            history: History::new(),
            memories: Vec::new(),
            action_calls: 0,
            api_calls: 0,
            turn_index: 0,
            pending_note: None,
        }
    }

    fn record(&mut self, role: BackendRole, request: String, response: String) {
        self.transcripts.push(TranscriptEntry {
            role,
            request,
            response,
            turn: self.turn_index,
        });
        self.turn_index += 1;
    }
}

enum SubtaskEnd {
    Done,
    Exhausted,
    Exit,
    MaxRounds,
}

struct SubtaskRun {
    end: SubtaskEnd,
    turns: usize,
    summary: Option<String>,
}

#[allow(clippy::too_many_arguments)]
fn run_subtask(
    ls: &mut LoopState<'_>,
    task: &Task,
    subtask_index: usize,
    call: &SubtaskCall,
    doc: Option<&SubtaskDoc>,
    fixed_flow: bool,
    backend: &dyn CompletionBackend,
    config: &RunnerConfig,
) -> Result<SubtaskRun, AgentError> {
    let mut summary: Option<String> = None;
    let mut turns = 0usize;

    for turn_no in 0..config.max_turns_per_subtask {
        if ls.executed.len() >= config.max_rounds {
            return Ok(SubtaskRun {
                end: SubtaskEnd::MaxRounds,
                turns,
                summary,
            });
        }

        let mut obs = observe(&ls.device);
        if let Some(note) = ls.pending_note.take() {
            obs.observation_text.push('\n');
            obs.observation_text.push_str(&note);
        }
        let prompt = build_action_prompt(task, call, doc, &obs, &ls.memories, fixed_flow);
        let request = BackendRequest::new(
            BackendRole::Action,
            prompt.clone(),
            RequestMetadata {
                task_id: task.id.clone(),
                subtask_index: Some(subtask_index),
                turn: Some(turn_no as u32),
            },
        );
        let response = backend.complete(&request)?;
        ls.action_calls += 1;
        ls.api_calls += 1;
        ls.record(BackendRole::Action, prompt, response.clone());
        turns += 1;

        // Unparseable action turns feed back and retry: the turn is spent
        // (it counts toward C_a with zero valid actions) but the subtask
        // continues with the error attached to the next observation.
        let turn = match parse_action_output(&response, fixed_flow) {
            Ok(turn) => turn,
            Err(e) if e.is_parse_failure() => {
                ls.pending_note = Some(format!("{PARSE_ERROR_MARKER} turn {turn_no}: {e}"));
                continue;
            }
            Err(e) => return Err(e),
        };
        if let Some(s) = turn.summarization.as_ref().filter(|s| !s.trim().is_empty()) {
            summary = Some(s.clone());
        }

        for action in &turn.actions {
            if ls.executed.len() >= config.max_rounds {
                return Ok(SubtaskRun {
                    end: SubtaskEnd::MaxRounds,
                    turns,
                    summary,
                });
            }
            let exec = match action {
                Action::ClickTarget { element } if config.ground_clicks => {
                    match ground(ls.app, &ls.device, element) {
                        Ok((x, y)) => Action::Click { x, y },
                        Err(err) => {
                            ls.pending_note =
                                Some(format!("{GROUNDING_ERROR_MARKER} turn {turn_no}: {err}"));
                            break;
                        }
                    }
                }
                other => other.clone(),
            };
            let before = observe(&ls.device);
            match step(ls.app, &ls.device, &exec) {
                Ok((next, outcome)) => {
                    ls.device = next;
                    ls.history.push(before, exec.clone());
                    ls.executed.push(exec);
                    if outcome == StepOutcome::Exited {
                        return Ok(SubtaskRun {
                            end: SubtaskEnd::Exit,
                            turns,
                            summary,
                        });
                    }
                }
                Err(err) => {
                    ls.pending_note = Some(format!("{ENV_ERROR_MARKER} turn {turn_no}: {err}"));
                    break;
                }
            }
        }

        // An error note from this turn means the flow broke; the done
        // marker only counts when every action landed.
        if turn.subtask_done && ls.pending_note.is_none() {
            return Ok(SubtaskRun {
                end: SubtaskEnd::Done,
                turns,
                summary,
            });
        }
    }

    Ok(SubtaskRun {
        end: SubtaskEnd::Exhausted,
        turns,
        summary,
    })
}

fn effective_task<'a>(task: &'a Task, config: &RunnerConfig) -> Cow<'a, Task> {
    match config.language {
        Some(language) if language != task.language => {
            let mut t = task.clone();
            t.language = language;
            Cow::Owned(t)
        }
        _ => Cow::Borrowed(task),
    }
}

fn subtask_doc<'a>(call: &SubtaskCall, library: &'a SubtaskLibrary) -> Option<&'a SubtaskDoc> {
    if call.is_custom {
        None
    } else {
        library.find(&call.name).map(|b| &b.doc)
    }
}

fn subtask_fixed_flow(call: &SubtaskCall, library: &SubtaskLibrary, config: &RunnerConfig) -> bool {
    !call.is_custom
        && config.allow_batching
        && library.find(&call.name).is_some_and(|b| b.fixed_flow)
}

/// Result of executing one subtask in isolation.
pub struct SubtaskExecution {
    pub state: DeviceState,
    pub actions: Vec<Action>,
    pub turns: usize,
    pub memory: Option<MemoryEntry>,
    pub done: bool,
}

/// Run a single validated subtask against a live device state.
///
/// `fixed_flow` is the caller's statement of batching eligibility (from the
/// basis library); custom subtasks never batch regardless.
#[allow(clippy::too_many_arguments)]
pub fn execute_subtask(
    app: &AppDefinition,
    env_state: DeviceState,
    subtask: &SubtaskCall,
    doc: Option<&SubtaskDoc>,
    fixed_flow: bool,
    task: &Task,
    memories: &[MemoryEntry],
    backend: &dyn CompletionBackend,
    config: &RunnerConfig,
) -> Result<SubtaskExecution, AgentError> {
    let task = effective_task(task, config);
    let mut ls = LoopState::new(app);
    ls.device = env_state;
    ls.memories = memories.to_vec();
    let fixed_flow = fixed_flow && config.allow_batching && !subtask.is_custom;
    let run = run_subtask(&mut ls, &task, 0, subtask, doc, fixed_flow, backend, config)?;
    let done = matches!(run.end, SubtaskEnd::Done | SubtaskEnd::Exit);
    let memory = run.summary.map(|summary| MemoryEntry {
        subtask_name: subtask.name.clone(),
        summary,
    });
    Ok(SubtaskExecution {
        state: ls.device,
        actions: ls.executed,
        turns: run.turns,
        memory,
        done,
    })
}

/// Resolve the environment a task runs on: its own bundle, or the merged
/// phone environment for multi-app tasks.
pub fn resolve_app<'a>(task: &Task, bundles: &'a [AppDefinition]) -> Result<Cow<'a, AppDefinition>, AgentError> {
    if task.app_id == PHONE_APP_ID {
        return Ok(Cow::Owned(merge_bundles(bundles)?));
    }
    bundles
        .iter()
        .find(|b| b.app_id == task.app_id)
        .map(Cow::Borrowed)
        .ok_or_else(|| AgentError::UnknownApp {
            app_id: task.app_id.clone(),
        })
}

/// Run one full episode: plan once, execute subtasks in order, stop on EXIT,
/// the action cap, or a parse failure. All agent-behavior failures are
/// encoded in the episode's terminal reason; only infrastructure problems
/// (backend transport, unknown app) return `Err`.
pub fn run_episode(
    task: &Task,
    bundles: &[AppDefinition],
    library: &SubtaskLibrary,
    backend: &dyn CompletionBackend,
    config: &RunnerConfig,
) -> Result<Episode, AgentError> {
    let app = resolve_app(task, bundles)?;
    run_episode_in(task, app.as_ref(), library, backend, config)
}

/// [`run_episode`] against an already-resolved environment.
pub fn run_episode_in(
    task: &Task,
    app: &AppDefinition,
    library: &SubtaskLibrary,
    backend: &dyn CompletionBackend,
    config: &RunnerConfig,
) -> Result<Episode, AgentError> {
    let task = effective_task(task, config);
    let mut ls = LoopState::new(app);

    // Plan exactly once per episode.
    let plan_prompt = build_plan_prompt(&task, library)?;
    let plan_request = BackendRequest::new(
        BackendRole::Plan,
        plan_prompt.clone(),
        RequestMetadata::for_task(&task.id),
    );
    let plan_response = backend.complete(&plan_request)?;
    ls.api_calls += 1;
    ls.record(BackendRole::Plan, plan_prompt, plan_response.clone());

    let plan: PlanResult = match parse_plan_output(&plan_response, library) {
        Ok(plan) => plan,
        Err(e) if e.is_parse_failure() => {
            return Ok(finish(&task, ls, false, TerminalReason::ParseError));
        }
        Err(e) => return Err(e),
    };

    let mut all_done = true;
    let mut terminal: Option<TerminalReason> = None;

    for (subtask_index, call) in plan.subtasks.iter().enumerate() {
        let doc = subtask_doc(call, library);
        let fixed_flow = subtask_fixed_flow(call, library, config);
        let run = run_subtask(&mut ls, &task, subtask_index, call, doc, fixed_flow, backend, config)?;

        if let Some(summary) = run.summary {
            ls.memories.push(MemoryEntry {
                subtask_name: call.name.clone(),
                summary,
            });
        }
        match run.end {
            SubtaskEnd::Done => {}
            SubtaskEnd::Exhausted => all_done = false,
            SubtaskEnd::Exit => {
                if subtask_index + 1 < plan.subtasks.len() {
                    all_done = false;
                }
                terminal = Some(TerminalReason::Exit);
                break;
            }
            SubtaskEnd::MaxRounds => {
                all_done = false;
                terminal = Some(TerminalReason::MaxRounds);
                break;
            }
        }
    }

    // A plan that runs out of subtasks without EXIT spent its budget
    // without completing: counted against the round cap.
    let terminal = terminal.unwrap_or(TerminalReason::MaxRounds);
    let success = terminal == TerminalReason::Exit && all_done;
    Ok(finish(&task, ls, success, terminal))
}

fn finish(task: &Task, ls: LoopState<'_>, success: bool, terminal: TerminalReason) -> Episode {
    debug_assert_eq!(ls.history.len(), ls.executed.len());
    Episode {
        task_id: task.id.clone(),
        executed_actions: ls.executed,
        transcripts: ls.transcripts,
        action_agent_calls: ls.action_calls,
        api_calls_total: ls.api_calls,
        success,
        terminal_reason: terminal,
    }
}
