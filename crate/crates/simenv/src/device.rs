//! The device itself: a pure value state plus the step function applying
//! transition rules. Same (state, action) always yields the same result;
//! step never mutates its input.

use crate::bundle::{base_screen_id, AppDefinition, Guard, Screen, TransitionRule};
use chop_core::{Action, ScreenState, ScrollDirection};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Snapshot of everything the simulated device holds between steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviceState {
    pub current: ScreenState,
    /// Screens to return to, most recent last; never has the current screen
    /// on top.
    pub back_stack: Vec<String>,
    pub focused_field: Option<String>,
    pub typed_values: BTreeMap<String, String>,
    pub clock_seconds: u64,
    pub scroll_page: usize,
    pub terminal: bool,
    pub visited: BTreeSet<String>,
}

/// What a step did to the device.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepOutcome {
    Navigated { to: String },
    Stayed,
    /// Back with an empty stack: a stay, not an error.
    BottomOfStack,
    Focused { field: String },
    Typed { field: String },
    Scrolled { page: usize },
    Waited { seconds: u32 },
    Exited,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("no element `{target}` on screen `{screen}`")]
    NoSuchElement { target: String, screen: String },
    #[error("TYPE with no focused field on screen `{screen}`")]
    NoFocusedField { screen: String },
    #[error("click ({x}, {y}) is outside device bounds {width}x{height}")]
    OutOfBounds { x: i64, y: i64, width: i64, height: i64 },
    #[error("screen `{0}` is not declared by app `{1}`")]
    UndeclaredScreen(String, String),
    #[error("device already terminal")]
    AlreadyTerminal,
}

/// Fresh state at the app's home screen: empty stack, cleared fields,
/// clock 0. Deterministic by construction.
pub fn reset(app: &AppDefinition) -> DeviceState {
    let mut state = DeviceState {
        current: ScreenState {
            screen_id: app.home_screen.clone(),
            app_id: app.app_id.clone(),
            visible_elements: Vec::new(),
            observation_text: String::new(),
        },
        back_stack: Vec::new(),
        focused_field: None,
        typed_values: BTreeMap::new(),
        clock_seconds: 0,
        scroll_page: 0,
        terminal: false,
        visited: BTreeSet::from([app.home_screen.clone()]),
    };
    refresh_observation(app, &mut state).expect("home screen is declared");
    state
}

/// Center of the named element, if visible on the current scroll page.
pub fn ground(
    app: &AppDefinition,
    state: &DeviceState,
    element_name: &str,
) -> Result<(i64, i64), SimError> {
    let screen = current_screen(app, state)?;
    let wanted = element_name.trim().to_lowercase();
    screen
        .visible_elements(state.scroll_page)
        .into_iter()
        .find(|e| e.name.to_lowercase() == wanted)
        .map(|e| e.bounds.center())
        .ok_or_else(|| SimError::NoSuchElement {
            target: element_name.to_string(),
            screen: state.current.screen_id.clone(),
        })
}

/// The current observation. Pure: two observes without a step are identical.
pub fn observe(state: &DeviceState) -> ScreenState {
    state.current.clone()
}

/// Apply one action, returning the successor state and what happened.
pub fn step(
    app: &AppDefinition,
    state: &DeviceState,
    action: &Action,
) -> Result<(DeviceState, StepOutcome), SimError> {
    if state.terminal {
        return Err(SimError::AlreadyTerminal);
    }
    let mut next = state.clone();
    let outcome = match action {
        Action::Click { x, y } => {
            let (width, height) = app.device_bounds;
            if *x < 0 || *y < 0 || *x >= width || *y >= height {
                return Err(SimError::OutOfBounds {
                    x: *x,
                    y: *y,
                    width,
                    height,
                });
            }
            let screen = current_screen(app, state)?;
            let Some(element) = screen
                .visible_elements(state.scroll_page)
                .into_iter()
                .find(|e| e.bounds.contains(*x, *y))
            else {
                return Err(SimError::NoSuchElement {
                    target: format!("({x}, {y})"),
                    screen: state.current.screen_id.clone(),
                });
            };
            let rule = element.on_click.clone();
            apply_rule(&mut next, &rule)
        }
        Action::ClickTarget { element } => {
            let screen = current_screen(app, state)?;
            let wanted = element.trim().to_lowercase();
            let Some(found) = screen
                .visible_elements(state.scroll_page)
                .into_iter()
                .find(|e| e.name.to_lowercase() == wanted)
            else {
                return Err(SimError::NoSuchElement {
                    target: element.clone(),
                    screen: state.current.screen_id.clone(),
                });
            };
            let rule = found.on_click.clone();
            apply_rule(&mut next, &rule)
        }
        Action::Scroll(direction) => {
            let screen = current_screen(app, state)?;
            let pages = screen.page_count();
            let page = match direction {
                ScrollDirection::Down => (state.scroll_page + 1).min(pages.saturating_sub(1)),
                ScrollDirection::Up => state.scroll_page.saturating_sub(1),
                // Horizontal scrolling has no page model; the screen stays.
                ScrollDirection::Left | ScrollDirection::Right => state.scroll_page,
            };
            if page == state.scroll_page {
                StepOutcome::Stayed
            } else {
                next.scroll_page = page;
                StepOutcome::Scrolled { page }
            }
        }
        Action::Type { text } => match state.focused_field.clone() {
            Some(field) => {
                next.typed_values.insert(field.clone(), text.clone());
                StepOutcome::Typed { field }
            }
            None => {
                return Err(SimError::NoFocusedField {
                    screen: state.current.screen_id.clone(),
                });
            }
        },
        Action::Back => match next.back_stack.pop() {
            Some(previous) => {
                navigate(&mut next, previous.clone(), false);
                StepOutcome::Navigated { to: previous }
            }
            None => StepOutcome::BottomOfStack,
        },
        Action::Exit => {
            next.terminal = true;
            StepOutcome::Exited
        }
        Action::Wait { seconds } => {
            next.clock_seconds += u64::from(*seconds);
            StepOutcome::Waited { seconds: *seconds }
        }
    };
    refresh_observation(app, &mut next)?;
    Ok((next, outcome))
}

fn current_screen<'a>(app: &'a AppDefinition, state: &DeviceState) -> Result<&'a Screen, SimError> {
    app.resolve_screen(&state.current.screen_id)
        .ok_or_else(|| SimError::UndeclaredScreen(state.current.screen_id.clone(), app.app_id.clone()))
}

fn apply_rule(next: &mut DeviceState, rule: &TransitionRule) -> StepOutcome {
    match rule {
        TransitionRule::Stay => StepOutcome::Stayed,
        TransitionRule::SetFocus(field) => {
            next.focused_field = Some(field.clone());
            StepOutcome::Focused { field: field.clone() }
        }
        TransitionRule::GoTo(target) => {
            if base_screen_id(&next.current.screen_id) == target {
                return StepOutcome::Stayed;
            }
            navigate(next, target.clone(), true);
            StepOutcome::Navigated { to: target.clone() }
        }
        TransitionRule::SubmitSearch(template) => {
            let query = next
                .focused_field
                .as_ref()
                .and_then(|f| next.typed_values.get(f))
                .cloned()
                .unwrap_or_default();
            let target = format!("{template}#{}", slug(&query));
            navigate(next, target.clone(), true);
            StepOutcome::Navigated { to: target }
        }
        TransitionRule::Conditional {
            guard,
            then_rule,
            else_rule,
        } => {
            let taken = if eval_guard(next, guard) { then_rule } else { else_rule };
            apply_rule(next, taken)
        }
    }
}

fn eval_guard(state: &DeviceState, guard: &Guard) -> bool {
    match guard {
        Guard::TypedContains { field, needle } => state
            .typed_values
            .get(field)
            .is_some_and(|v| v.to_lowercase().contains(&needle.to_lowercase())),
        Guard::Visited { screen } => state.visited.contains(screen),
    }
}

fn navigate(state: &mut DeviceState, target: String, push_back: bool) {
    if push_back {
        state.back_stack.push(state.current.screen_id.clone());
    }
    state.visited.insert(base_screen_id(&target).to_string());
    state.current.screen_id = target;
    state.focused_field = None;
    state.scroll_page = 0;
}

/// Deterministic query slug for derived search screens.
fn slug(query: &str) -> String {
    let mut out = String::new();
    let mut last_dash = true;
    for ch in query.trim().to_lowercase().chars() {
        if ch.is_alphanumeric() {
            out.push(ch);
            last_dash = false;
        } else if !last_dash {
            out.push('-');
            last_dash = true;
        }
    }
    let trimmed = out.trim_end_matches('-').to_string();
    if trimmed.is_empty() { "empty".to_string() } else { trimmed }
}

fn refresh_observation(app: &AppDefinition, state: &mut DeviceState) -> Result<(), SimError> {
    let screen = current_screen(app, state)?;
    state.current.app_id = screen_app_id(app, &state.current.screen_id);
    state.current.visible_elements = screen.visible_names(state.scroll_page);
    state.current.observation_text = render_observation(state, screen);
    Ok(())
}

/// On a merged multi-app environment, screens are namespaced `app::screen`.
fn screen_app_id(app: &AppDefinition, screen_id: &str) -> String {
    base_screen_id(screen_id)
        .split_once("::")
        .map_or_else(|| app.app_id.clone(), |(owner, _)| owner.to_string())
}

fn render_observation(state: &DeviceState, screen: &Screen) -> String {
    let mut lines = Vec::new();
    lines.push(format!("screen: {}", state.current.screen_id));
    lines.push(format!("app: {}", state.current.app_id));
    if screen.page_count() > 1 {
        lines.push(format!("page: {}/{}", state.scroll_page + 1, screen.page_count()));
    }
    lines.push(format!(
        "elements: {}",
        if state.current.visible_elements.is_empty() {
            "(none)".to_string()
        } else {
            state.current.visible_elements.join(" | ")
        }
    ));
    match &state.focused_field {
        Some(field) => lines.push(format!("focused: {field}")),
        None => lines.push("focused: none".to_string()),
    }
    let typed: Vec<String> = state
        .typed_values
        .iter()
        .map(|(k, v)| format!("{k}=\"{v}\""))
        .collect();
    lines.push(format!(
        "typed: {}",
        if typed.is_empty() { "none".to_string() } else { typed.join("; ") }
    ));
    lines.join("\n")
}
