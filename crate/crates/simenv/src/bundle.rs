//! Declarative app bundles: the screen graph that *is* the transition
//! function. Bundles are JSON files validated on load; every cross-reference
//! must resolve and every element must fit the device.
//!
//! Screens produced by `SubmitSearch` are derived at runtime as
//! `<template>#<query-slug>`; [`AppDefinition::resolve_screen`] strips the
//! suffix, so derived screens always share a declared template.

use chop_core::ElementRegistry;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};
use std::path::Path;

/// Pixel rectangle as `[x1, y1, x2, y2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[i64; 4]", into = "[i64; 4]")]
pub struct Rect {
    pub x1: i64,
    pub y1: i64,
    pub x2: i64,
    pub y2: i64,
}

impl From<[i64; 4]> for Rect {
    fn from([x1, y1, x2, y2]: [i64; 4]) -> Self {
        Self { x1, y1, x2, y2 }
    }
}

impl From<Rect> for [i64; 4] {
    fn from(r: Rect) -> Self {
        [r.x1, r.y1, r.x2, r.y2]
    }
}

impl Rect {
    pub fn center(&self) -> (i64, i64) {
        ((self.x1 + self.x2) / 2, (self.y1 + self.y2) / 2)
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        self.x1 <= x && x <= self.x2 && self.y1 <= y && y <= self.y2
    }

    fn degenerate(&self) -> bool {
        self.x1 >= self.x2 || self.y1 >= self.y2
    }
}

/// Condition a [`TransitionRule::Conditional`] branches on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Guard {
    /// The named text field's typed value contains `needle` (case-insensitive).
    TypedContains { field: String, needle: String },
    /// The named screen has been visited this session.
    Visited { screen: String },
}

/// What clicking an element does. These rules are the transition function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionRule {
    GoTo(String),
    Stay,
    SetFocus(String),
    /// Navigate to a screen derived from the template and the focused
    /// field's typed query, so distinct queries yield distinct screen ids.
    SubmitSearch(String),
    Conditional {
        guard: Guard,
        then_rule: Box<TransitionRule>,
        else_rule: Box<TransitionRule>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Element {
    pub name: String,
    pub bounds: Rect,
    pub on_click: TransitionRule,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextField {
    pub name: String,
    #[serde(default)]
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Screen {
    pub screen_id: String,
    pub elements: Vec<Element>,
    /// Ordered pages of element names; page 0 is the default visible set.
    /// Absent means the whole element list is one page.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scroll_pages: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub text_fields: Vec<TextField>,
}

impl Screen {
    pub fn page_count(&self) -> usize {
        self.scroll_pages.as_ref().map_or(1, Vec::len)
    }

    /// Element names visible on `page`, in declaration order.
    pub fn visible_names(&self, page: usize) -> Vec<String> {
        match &self.scroll_pages {
            None => self.elements.iter().map(|e| e.name.clone()).collect(),
            Some(pages) => pages.get(page).cloned().unwrap_or_default(),
        }
    }

    /// Elements visible on `page`.
    pub fn visible_elements(&self, page: usize) -> Vec<&Element> {
        match &self.scroll_pages {
            None => self.elements.iter().collect(),
            Some(pages) => {
                let Some(names) = pages.get(page) else { return Vec::new() };
                names
                    .iter()
                    .filter_map(|n| self.elements.iter().find(|e| &e.name == n))
                    .collect()
            }
        }
    }

    pub fn find_field(&self, name: &str) -> Option<&TextField> {
        self.text_fields.iter().find(|f| f.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppDefinition {
    pub app_id: String,
    /// `[width, height]` in pixels.
    pub device_bounds: (i64, i64),
    pub home_screen: String,
    pub screens: Vec<Screen>,
}

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error("{path}: {detail}")]
    Io { path: String, detail: String },
    #[error("{path}: schema error at `{field}`: {detail}")]
    Schema {
        path: String,
        field: String,
        detail: String,
    },
    #[error("screen `{screen}`: {kind} references missing {target_kind} `{target}`")]
    DanglingReference {
        screen: String,
        kind: String,
        target_kind: String,
        target: String,
    },
    #[error("screen `{screen}`: duplicate element name `{name}`")]
    DuplicateElement { screen: String, name: String },
    #[error("screen `{screen}`: element `{name}`: {detail}")]
    InvalidElement {
        screen: String,
        name: String,
        detail: String,
    },
    #[error("duplicate screen id `{0}`")]
    DuplicateScreen(String),
    #[error("home screen `{0}` is not declared")]
    MissingHome(String),
    #[error("screen `{screen}`: scroll pages invalid: {detail}")]
    InvalidScrollPages { screen: String, detail: String },
    #[error("device bounds {0}x{1} are not positive")]
    InvalidDeviceBounds(i64, i64),
}

impl AppDefinition {
    /// Exact lookup, or template lookup for derived `base#suffix` ids.
    pub fn resolve_screen(&self, screen_id: &str) -> Option<&Screen> {
        let base = base_screen_id(screen_id);
        self.screens.iter().find(|s| s.screen_id == base)
    }

    pub fn screen_ids(&self) -> impl Iterator<Item = &str> {
        self.screens.iter().map(|s| s.screen_id.as_str())
    }

    /// All element names with their centers; the grounding registry.
    pub fn element_registry(&self) -> ElementRegistry {
        let mut registry = ElementRegistry::new();
        for screen in &self.screens {
            for element in &screen.elements {
                if registry.resolve(&element.name).is_none() {
                    registry.insert(&element.name, element.bounds.center());
                }
            }
        }
        registry
    }

    pub fn validate(&self) -> Result<(), BundleError> {
        let (width, height) = self.device_bounds;
        if width <= 0 || height <= 0 {
            return Err(BundleError::InvalidDeviceBounds(width, height));
        }

        let mut ids = BTreeSet::new();
        for screen in &self.screens {
            if !ids.insert(screen.screen_id.clone()) {
                return Err(BundleError::DuplicateScreen(screen.screen_id.clone()));
            }
        }
        if !ids.contains(&self.home_screen) {
            return Err(BundleError::MissingHome(self.home_screen.clone()));
        }

        let all_fields: BTreeSet<&str> = self
            .screens
            .iter()
            .flat_map(|s| s.text_fields.iter().map(|f| f.name.as_str()))
            .collect();

        for screen in &self.screens {
            let mut names = BTreeSet::new();
            for element in &screen.elements {
                let trimmed = element.name.trim();
                if trimmed.is_empty() || trimmed != element.name {
                    return Err(BundleError::InvalidElement {
                        screen: screen.screen_id.clone(),
                        name: element.name.clone(),
                        detail: "element names must be trimmed and non-empty".to_string(),
                    });
                }
                if element.name.contains(',') || element.name.contains('\n') {
                    return Err(BundleError::InvalidElement {
                        screen: screen.screen_id.clone(),
                        name: element.name.clone(),
                        detail: "element names may not contain commas or newlines".to_string(),
                    });
                }
                if element.name.parse::<i64>().is_ok() {
                    return Err(BundleError::InvalidElement {
                        screen: screen.screen_id.clone(),
                        name: element.name.clone(),
                        detail: "element names may not be bare integers".to_string(),
                    });
                }
                if !names.insert(element.name.to_lowercase()) {
                    return Err(BundleError::DuplicateElement {
                        screen: screen.screen_id.clone(),
                        name: element.name.clone(),
                    });
                }
                let b = element.bounds;
                if b.degenerate() {
                    return Err(BundleError::InvalidElement {
                        screen: screen.screen_id.clone(),
                        name: element.name.clone(),
                        detail: format!("degenerate bounds {:?}", <[i64; 4]>::from(b)),
                    });
                }
                if b.x1 < 0 || b.y1 < 0 || b.x2 > width || b.y2 > height {
                    return Err(BundleError::InvalidElement {
                        screen: screen.screen_id.clone(),
                        name: element.name.clone(),
                        detail: format!(
                            "bounds {:?} exceed device bounds {}x{}",
                            <[i64; 4]>::from(b),
                            width,
                            height
                        ),
                    });
                }
                self.check_rule(screen, &element.on_click, &ids, &all_fields)?;
            }

            if let Some(pages) = &screen.scroll_pages {
                if pages.is_empty() || pages[0].is_empty() {
                    return Err(BundleError::InvalidScrollPages {
                        screen: screen.screen_id.clone(),
                        detail: "page 0 (the default visible set) must be non-empty".to_string(),
                    });
                }
                let declared: BTreeSet<&str> =
                    screen.elements.iter().map(|e| e.name.as_str()).collect();
                let mut listed: BTreeSet<&str> = BTreeSet::new();
                for page in pages {
                    for name in page {
                        if !declared.contains(name.as_str()) {
                            return Err(BundleError::DanglingReference {
                                screen: screen.screen_id.clone(),
                                kind: "scroll page".to_string(),
                                target_kind: "element".to_string(),
                                target: name.clone(),
                            });
                        }
                        listed.insert(name);
                    }
                }
                if let Some(missing) = declared.difference(&listed).next() {
                    return Err(BundleError::InvalidScrollPages {
                        screen: screen.screen_id.clone(),
                        detail: format!("element `{missing}` appears on no page"),
                    });
                }
            }
        }
        Ok(())
    }

    fn check_rule(
        &self,
        screen: &Screen,
        rule: &TransitionRule,
        ids: &BTreeSet<String>,
        all_fields: &BTreeSet<&str>,
    ) -> Result<(), BundleError> {
        let dangling = |kind: &str, target_kind: &str, target: &str| BundleError::DanglingReference {
            screen: screen.screen_id.clone(),
            kind: kind.to_string(),
            target_kind: target_kind.to_string(),
            target: target.to_string(),
        };
        match rule {
            TransitionRule::GoTo(target) => {
                if !ids.contains(target) {
                    return Err(dangling("go_to", "screen", target));
                }
            }
            TransitionRule::Stay => {}
            TransitionRule::SetFocus(field) => {
                if screen.find_field(field).is_none() {
                    return Err(dangling("set_focus", "text field", field));
                }
            }
            TransitionRule::SubmitSearch(template) => {
                if !ids.contains(template) {
                    return Err(dangling("submit_search", "screen", template));
                }
            }
            TransitionRule::Conditional {
                guard,
                then_rule,
                else_rule,
            } => {
                match guard {
                    Guard::TypedContains { field, .. } => {
                        if !all_fields.contains(field.as_str()) {
                            return Err(dangling("guard", "text field", field));
                        }
                    }
                    Guard::Visited { screen: target } => {
                        if !ids.contains(target) {
                            return Err(dangling("guard", "screen", target));
                        }
                    }
                }
                self.check_rule(screen, then_rule, ids, all_fields)?;
                self.check_rule(screen, else_rule, ids, all_fields)?;
            }
        }
        Ok(())
    }

    /// Screens reachable from home by exhaustively following every
    /// transition rule (both branches of conditionals).
    pub fn reachable_screens(&self) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([self.home_screen.clone()]);
        while let Some(id) = queue.pop_front() {
            if !seen.insert(id.clone()) {
                continue;
            }
            let Some(screen) = self.resolve_screen(&id) else { continue };
            for element in &screen.elements {
                collect_targets(&element.on_click, &mut |target| {
                    if !seen.contains(target) {
                        queue.push_back(target.to_string());
                    }
                });
            }
        }
        seen
    }
}

fn collect_targets(rule: &TransitionRule, found: &mut impl FnMut(&str)) {
    match rule {
        TransitionRule::GoTo(target) | TransitionRule::SubmitSearch(target) => found(target),
        TransitionRule::Stay | TransitionRule::SetFocus(_) => {}
        TransitionRule::Conditional {
            then_rule,
            else_rule,
            ..
        } => {
            collect_targets(then_rule, found);
            collect_targets(else_rule, found);
        }
    }
}

/// Strip the derived-screen suffix: `results#bob` -> `results`.
pub fn base_screen_id(screen_id: &str) -> &str {
    screen_id.split_once('#').map_or(screen_id, |(base, _)| base)
}

/// Load and fully validate an app bundle file.
pub fn load_app_bundle(path: impl AsRef<Path>) -> Result<AppDefinition, BundleError> {
    let path = path.as_ref();
    let raw = std::fs::read_to_string(path).map_err(|e| BundleError::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let de = &mut serde_json::Deserializer::from_str(&raw);
    let app: AppDefinition = serde_path_to_error::deserialize(de).map_err(|e| BundleError::Schema {
        path: path.display().to_string(),
        field: e.path().to_string(),
        detail: e.inner().to_string(),
    })?;
    app.validate()?;
    Ok(app)
}
