//! End-to-end runner behavior against an in-memory app and scripted
//! backends: grounding, batching, budgets, failure encoding, and replay
//! determinism.

use chop_agents::{execute_subtask, run_episode, RunnerConfig};
use chop_backends::{
    CassetteMode, RecordingBackend, ReplayBackend, ScriptEntry, ScriptedBackend,
};
use chop_core::{
    parse_action, Action, BackendRole, BasisSubtask, Difficulty, Language, SubtaskCall,
    SubtaskDoc, SubtaskLibrary, Task, TerminalReason, GROUNDING_ERROR_MARKER,
};
use chop_simenv::{reset, AppDefinition, Element, Screen, TextField, TransitionRule};

fn tube_app() -> AppDefinition {
    AppDefinition {
        app_id: "tube_app".to_string(),
        device_bounds: (1080, 1920),
        home_screen: "home".to_string(),
        screens: vec![
            Screen {
                screen_id: "home".to_string(),
                elements: vec![
                    Element {
                        name: "Search Bar".to_string(),
                        bounds: [100, 100, 500, 200].into(),
                        on_click: TransitionRule::SetFocus("query".to_string()),
                    },
                    Element {
                        name: "Search Button".to_string(),
                        bounds: [600, 100, 800, 200].into(),
                        on_click: TransitionRule::SubmitSearch("results".to_string()),
                    },
                    Element {
                        name: "Trending".to_string(),
                        bounds: [100, 300, 500, 400].into(),
                        on_click: TransitionRule::GoTo("trending".to_string()),
                    },
                ],
                scroll_pages: None,
                text_fields: vec![TextField {
                    name: "query".to_string(),
                    value: String::new(),
                }],
            },
            Screen {
                screen_id: "results".to_string(),
                elements: vec![
                    Element {
                        name: "First Video".to_string(),
                        bounds: [100, 100, 900, 300].into(),
                        on_click: TransitionRule::GoTo("player".to_string()),
                    },
                    Element {
                        name: "Second Video".to_string(),
                        bounds: [100, 350, 900, 550].into(),
                        on_click: TransitionRule::GoTo("player".to_string()),
                    },
                ],
                scroll_pages: None,
                text_fields: vec![],
            },
            Screen {
                screen_id: "player".to_string(),
                elements: vec![Element {
                    name: "Like Button".to_string(),
                    bounds: [100, 1000, 300, 1100].into(),
                    on_click: TransitionRule::Stay,
                }],
                scroll_pages: None,
                text_fields: vec![],
            },
            Screen {
                screen_id: "trending".to_string(),
                elements: vec![Element {
                    name: "Top Video".to_string(),
                    bounds: [100, 100, 900, 300].into(),
                    on_click: TransitionRule::Stay,
                }],
                scroll_pages: None,
                text_fields: vec![],
            },
        ],
    }
}

fn library() -> SubtaskLibrary {
    SubtaskLibrary::new(vec![
        BasisSubtask {
            name: "Search Item".to_string(),
            arity: 1,
            parameter_roles: vec!["search term".to_string()],
            doc: SubtaskDoc {
                standardized_process: vec![
                    "Click on the search bar located at the designated area of the screen."
                        .to_string(),
                    "Type in the content specified by the search term parameter.".to_string(),
                    "Press enter or click on the search button to execute the search.".to_string(),
                ],
                boundary_conditions: vec![
                    "If the search term is not found, check for spelling errors.".to_string(),
                ],
            },
            fixed_flow: true,
            frequency: 9,
        },
        BasisSubtask {
            name: "Open Section".to_string(),
            arity: 1,
            parameter_roles: vec!["section".to_string()],
            doc: SubtaskDoc {
                standardized_process: vec![
                    "Find and enter the specified section in the application.".to_string(),
                ],
                boundary_conditions: vec![],
            },
            fixed_flow: false,
            frequency: 5,
        },
    ])
    .unwrap()
}

fn task() -> Task {
    Task {
        id: "tube-easy-1".to_string(),
        instruction: "Search for cat videos on TubeApp and open the first result".to_string(),
        language: Language::En,
        difficulty: Difficulty::Easy,
        app_id: "tube_app".to_string(),
        golden_actions: [
            "CLICK(Search Bar)",
            "TYPE(cat videos)",
            "CLICK(Search Button)",
            "CLICK(First Video)",
            "EXIT",
        ]
        .iter()
        .map(|l| parse_action(l).unwrap())
        .collect(),
        golden_plan: None,
    }
}

fn entry(role: BackendRole, task_id: &str, response: &str) -> ScriptEntry {
    ScriptEntry {
        role,
        task_id: task_id.to_string(),
        response: response.to_string(),
        repeat: false,
    }
}

fn happy_script() -> Vec<ScriptEntry> {
    vec![
        entry(
            BackendRole::Plan,
            "tube-easy-1",
            "1. Search Item (cat videos) | purpose: find cat videos | stop: results visible\n2. Open First Video (first result) | purpose: open the top result | stop: player open",
        ),
        entry(
            BackendRole::Action,
            "tube-easy-1",
            "Observation: the home screen with a search bar\nThought: run the fixed search flow in one shot\nAction: CLICK(Search Bar)\nAction: TYPE(cat videos)\nAction: CLICK(Search Button)\nSummary: searched for cat videos\nDone: yes",
        ),
        entry(
            BackendRole::Action,
            "tube-easy-1",
            "Observation: search results are listed\nThought: open the first video\nAction: CLICK(First Video)\nDone: no",
        ),
        entry(
            BackendRole::Action,
            "tube-easy-1",
            "Observation: the player is open\nThought: the task is complete\nAction: EXIT",
        ),
    ]
}

#[test]
fn happy_path_batched_episode() {
    let app = tube_app();
    let backend = ScriptedBackend::new(happy_script());
    let episode = run_episode(&task(), &[app], &library(), &backend, &RunnerConfig::default()).unwrap();

    assert!(episode.success);
    assert_eq!(episode.terminal_reason, TerminalReason::Exit);
    assert_eq!(episode.executed_actions.len(), 5);
    assert_eq!(episode.action_agent_calls, 3, "one batched turn + two singles");
    assert_eq!(episode.api_calls_total, 4, "plan + three action calls");
    assert_eq!(episode.calls_with_role(BackendRole::Plan), 1);
    assert!(episode.validate().is_ok());

    // ClickTarget actions were grounded to coordinates before execution.
    assert_eq!(episode.executed_actions[0], Action::Click { x: 300, y: 150 });
    assert_eq!(
        episode.executed_actions[1],
        Action::Type { text: "cat videos".to_string() }
    );
    assert_eq!(episode.executed_actions[4], Action::Exit);
}

#[test]
fn batching_disabled_needs_single_action_turns() {
    let app = tube_app();
    let single_script = vec![
        entry(
            BackendRole::Plan,
            "tube-easy-1",
            "1. Search Item (cat videos)\n2. Open First Video (first result)",
        ),
        entry(BackendRole::Action, "tube-easy-1", "Thought: focus\nAction: CLICK(Search Bar)\nDone: no"),
        entry(BackendRole::Action, "tube-easy-1", "Thought: type\nAction: TYPE(cat videos)\nDone: no"),
        entry(BackendRole::Action, "tube-easy-1", "Thought: go\nAction: CLICK(Search Button)\nDone: yes"),
        entry(BackendRole::Action, "tube-easy-1", "Thought: open\nAction: CLICK(First Video)\nDone: no"),
        entry(BackendRole::Action, "tube-easy-1", "Thought: finish\nAction: EXIT"),
    ];
    let backend = ScriptedBackend::new(single_script);
    let config = RunnerConfig {
        allow_batching: false,
        ..RunnerConfig::default()
    };
    let episode = run_episode(&task(), &[app], &library(), &backend, &config).unwrap();
    assert!(episode.success);
    assert_eq!(episode.executed_actions.len(), 5);
    assert_eq!(
        episode.action_agent_calls, 5,
        "without batching C_a equals executed actions"
    );
}

#[test]
fn looping_cassette_hits_the_round_cap_exactly() {
    let app = tube_app();
    let mut script = vec![entry(
        BackendRole::Plan,
        "tube-easy-1",
        "1. Browse Around (feed)\n2. Browse More (feed)\n3. Browse Again (feed)",
    )];
    script.push(ScriptEntry {
        role: BackendRole::Action,
        task_id: "tube-easy-1".to_string(),
        response: "Observation: scrolling\nThought: keep scrolling\nAction: SCROLL(down)\nDone: no".to_string(),
        repeat: true,
    });
    let backend = ScriptedBackend::new(script);
    let episode = run_episode(&task(), &[app], &library(), &backend, &RunnerConfig::default()).unwrap();

    assert!(!episode.success);
    assert_eq!(episode.terminal_reason, TerminalReason::MaxRounds);
    assert_eq!(episode.executed_actions.len(), 20, "exactly the action cap");
}

#[test]
fn garbage_plan_terminates_as_parse_error_with_transcript() {
    let app = tube_app();
    let script = vec![entry(
        BackendRole::Plan,
        "tube-easy-1",
        "I would probably search for the videos somehow.",
    )];
    let backend = ScriptedBackend::new(script);
    let episode = run_episode(&task(), &[app], &library(), &backend, &RunnerConfig::default()).unwrap();

    assert!(!episode.success);
    assert_eq!(episode.terminal_reason, TerminalReason::ParseError);
    assert_eq!(episode.transcripts.len(), 1, "the garbage plan exchange is retained");
    assert_eq!(episode.api_calls_total, 1);
}

#[test]
fn garbage_action_turn_feeds_back_and_retries() {
    let app = tube_app();
    let script = vec![
        entry(BackendRole::Plan, "tube-easy-1", "1. Search Item (cat videos)"),
        entry(BackendRole::Action, "tube-easy-1", "I am not sure what to do here."),
        entry(
            BackendRole::Action,
            "tube-easy-1",
            "Thought: focus the bar properly this time\nAction: CLICK(Search Bar)\nDone: yes",
        ),
    ];
    let backend = ScriptedBackend::new(script);
    let episode = run_episode(&task(), &[app], &library(), &backend, &RunnerConfig::default()).unwrap();

    // The broken turn is spent but recoverable: two action calls, one
    // executed action, and the parse note reaches the retry prompt.
    assert_eq!(episode.action_agent_calls, 2);
    assert_eq!(episode.executed_actions.len(), 1);
    assert!(episode.transcripts[2]
        .request
        .contains(chop_core::PARSE_ERROR_MARKER));
    assert!(
        episode.action_agent_calls as usize
            <= episode.executed_actions.len() + 1,
        "C_a bounded by executed actions plus zero-valid turns"
    );
}

#[test]
fn grounding_failure_feeds_back_and_the_agent_recovers() {
    let app = tube_app();
    let script = vec![
        entry(BackendRole::Plan, "tube-easy-1", "1. Search Item (cat videos)"),
        entry(
            BackendRole::Action,
            "tube-easy-1",
            "Thought: click the bar\nAction: CLICK(Search Barr)\nDone: no",
        ),
        entry(
            BackendRole::Action,
            "tube-easy-1",
            "Thought: fix the name\nAction: CLICK(Search Bar)\nDone: yes",
        ),
    ];
    let backend = ScriptedBackend::new(script);
    let episode = run_episode(&task(), &[app], &library(), &backend, &RunnerConfig::default()).unwrap();

    assert_eq!(episode.executed_actions.len(), 1, "only the corrected click executed");
    let second_request = &episode.transcripts[2].request;
    assert!(
        second_request.contains(GROUNDING_ERROR_MARKER),
        "feedback note reaches the next observation"
    );
    assert!(second_request.contains("Search Barr"));
}

#[test]
fn standalone_subtask_batches_three_actions_in_one_turn() {
    let app = tube_app();
    let backend = ScriptedBackend::new(vec![entry(
        BackendRole::Action,
        "tube-easy-1",
        "Observation: home\nThought: the whole flow at once\nAction: CLICK(Search Bar)\nAction: TYPE(cat videos)\nAction: CLICK(Search Button)\nSummary: searched\nDone: yes",
    )]);
    let call = SubtaskCall {
        name: "Search Item".to_string(),
        parameters: vec!["cat videos".to_string()],
        is_custom: false,
        purpose: String::new(),
        stop_condition: String::new(),
    };
    let doc = library().find("Search Item").unwrap().doc.clone();
    let run = execute_subtask(
        &app,
        reset(&app),
        &call,
        Some(&doc),
        true,
        &task(),
        &[],
        &backend,
        &RunnerConfig::default(),
    )
    .unwrap();
    assert_eq!(run.actions.len(), 3, "three executed actions");
    assert_eq!(run.turns, 1, "one backend turn");
    assert!(run.done);
    assert_eq!(run.memory.as_ref().unwrap().summary, "searched");
    assert_eq!(run.state.current.screen_id, "results#cat-videos");
}

#[test]
fn standalone_subtask_recovers_from_a_parse_failure_in_two_turns() {
    let app = tube_app();
    let backend = ScriptedBackend::new(vec![
        entry(BackendRole::Action, "tube-easy-1", "no structured output at all"),
        entry(
            BackendRole::Action,
            "tube-easy-1",
            "Thought: try again\nAction: CLICK(Search Bar)\nDone: yes",
        ),
    ]);
    let call = SubtaskCall {
        name: "Open Section".to_string(),
        parameters: vec!["search".to_string()],
        is_custom: false,
        purpose: String::new(),
        stop_condition: String::new(),
    };
    let run = execute_subtask(
        &app,
        reset(&app),
        &call,
        None,
        false,
        &task(),
        &[],
        &backend,
        &RunnerConfig::default(),
    )
    .unwrap();
    assert_eq!(run.turns, 2, "the failed turn is spent, the retry succeeds");
    assert_eq!(run.actions.len(), 1);
    assert!(run.done);
}

#[test]
fn zero_turn_budget_returns_immediately() {
    let app = tube_app();
    let backend = ScriptedBackend::new(vec![]);
    let call = SubtaskCall {
        name: "Search Item".to_string(),
        parameters: vec!["cat videos".to_string()],
        is_custom: false,
        purpose: String::new(),
        stop_condition: String::new(),
    };
    let config = RunnerConfig {
        max_turns_per_subtask: 0,
        ..RunnerConfig::default()
    };
    let state = reset(&app);
    let run = execute_subtask(
        &app,
        state,
        &call,
        None,
        true,
        &task(),
        &[],
        &backend,
        &config,
    )
    .unwrap();
    assert_eq!(run.turns, 0);
    assert!(run.actions.is_empty());
    assert!(!run.done);
}

#[test]
fn success_at_exactly_the_action_cap_counts() {
    let app = tube_app();
    let mut script = vec![entry(
        BackendRole::Plan,
        "tube-easy-1",
        "1. March Along (the feed) | purpose: walk to the end | stop: task done",
    )];
    for _ in 0..19 {
        script.push(entry(
            BackendRole::Action,
            "tube-easy-1",
            "Thought: keep going\nAction: SCROLL(down)\nDone: no",
        ));
    }
    script.push(entry(
        BackendRole::Action,
        "tube-easy-1",
        "Thought: finish on the last allowed action\nAction: EXIT",
    ));
    let backend = ScriptedBackend::new(script);
    let config = RunnerConfig {
        max_turns_per_subtask: 32,
        ..RunnerConfig::default()
    };
    let episode = run_episode(&task(), &[app], &library(), &backend, &config).unwrap();

    assert_eq!(episode.executed_actions.len(), 20, "EXIT lands as action 20");
    assert!(episode.success, "completing at exactly the cap still counts");
    assert_eq!(episode.terminal_reason, TerminalReason::Exit);
}

#[test]
fn record_then_replay_yields_byte_identical_episodes() {
    let dir = tempfile::tempdir().unwrap();
    let cassette_path = dir.path().join("episode.json");
    let app = tube_app();
    let lib = library();
    let config = RunnerConfig::default();

    let recorded = {
        let recorder = RecordingBackend::new(ScriptedBackend::new(happy_script()), &cassette_path);
        run_episode(&task(), std::slice::from_ref(&app), &lib, &recorder, &config).unwrap()
    };

    let replay_once = {
        let backend = ReplayBackend::from_file(&cassette_path, CassetteMode::ReplayStrict).unwrap();
        run_episode(&task(), std::slice::from_ref(&app), &lib, &backend, &config).unwrap()
    };
    let replay_twice = {
        let backend = ReplayBackend::from_file(&cassette_path, CassetteMode::ReplayStrict).unwrap();
        run_episode(&task(), &[app], &lib, &backend, &config).unwrap()
    };

    assert_eq!(recorded, replay_once);
    assert_eq!(
        serde_json::to_string(&replay_once).unwrap(),
        serde_json::to_string(&replay_twice).unwrap()
    );
}

#[test]
fn memories_flow_between_subtasks() {
    let app = tube_app();
    let script = vec![
        entry(
            BackendRole::Plan,
            "tube-easy-1",
            "1. Open Section (Trending)\n2. Check Top Video (trending)",
        ),
        entry(
            BackendRole::Action,
            "tube-easy-1",
            "Thought: enter trending\nAction: CLICK(Trending)\nSummary: trending section opened\nDone: yes",
        ),
        entry(BackendRole::Action, "tube-easy-1", "Thought: all done\nAction: EXIT"),
    ];
    let backend = ScriptedBackend::new(script);
    let episode = run_episode(&task(), &[app], &library(), &backend, &RunnerConfig::default()).unwrap();

    let last_request = &episode.transcripts.last().unwrap().request;
    assert!(
        last_request.contains("- Open Section: trending section opened"),
        "memory from the first subtask appears in the second prompt"
    );
    assert!(episode.success);
}
