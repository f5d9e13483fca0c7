//! Multi-app environments: merge several bundles behind a meta "phone home"
//! screen whose icons jump into each app. Screen and field names are
//! namespaced `app_id::name` so apps cannot collide; element names stay
//! unprefixed because grounding is always scoped to the current screen.

use crate::bundle::{
    AppDefinition, BundleError, Element, Guard, Rect, Screen, TextField, TransitionRule,
};

pub const PHONE_APP_ID: &str = "phone";
pub const PHONE_HOME_SCREEN: &str = "phone_home";

/// Build the phone environment hosting every given app. The start screen is
/// the phone homepage; clicking an app's icon (element named after the
/// app id) enters that app's home screen.
pub fn merge_bundles(apps: &[AppDefinition]) -> Result<AppDefinition, BundleError> {
    let icon_count = apps.len() as i64;
    let width = apps.iter().map(|a| a.device_bounds.0).max().unwrap_or(1080);
    let height = apps
        .iter()
        .map(|a| a.device_bounds.1)
        .max()
        .unwrap_or(1920)
        .max(icon_count * 200 + 200);

    let icons = apps
        .iter()
        .enumerate()
        .map(|(i, app)| Element {
            name: app.app_id.clone(),
            bounds: Rect {
                x1: 100,
                y1: 100 + 200 * i as i64,
                x2: width.min(500),
                y2: 200 + 200 * i as i64,
            },
            on_click: TransitionRule::GoTo(qualify(&app.app_id, &app.home_screen)),
        })
        .collect();

    let mut screens = vec![Screen {
        screen_id: PHONE_HOME_SCREEN.to_string(),
        elements: icons,
        scroll_pages: None,
        text_fields: vec![],
    }];

    for app in apps {
        for screen in &app.screens {
            screens.push(Screen {
                screen_id: qualify(&app.app_id, &screen.screen_id),
                elements: screen
                    .elements
                    .iter()
                    .map(|e| Element {
                        name: e.name.clone(),
                        bounds: e.bounds,
                        on_click: qualify_rule(&app.app_id, &e.on_click),
                    })
                    .collect(),
                scroll_pages: screen.scroll_pages.clone(),
                text_fields: screen
                    .text_fields
                    .iter()
                    .map(|f| TextField {
                        name: qualify(&app.app_id, &f.name),
                        value: f.value.clone(),
                    })
                    .collect(),
            });
        }
    }

    let merged = AppDefinition {
        app_id: PHONE_APP_ID.to_string(),
        device_bounds: (width, height),
        home_screen: PHONE_HOME_SCREEN.to_string(),
        screens,
    };
    merged.validate()?;
    Ok(merged)
}

fn qualify(app_id: &str, name: &str) -> String {
    format!("{app_id}::{name}")
}

fn qualify_rule(app_id: &str, rule: &TransitionRule) -> TransitionRule {
    match rule {
        TransitionRule::GoTo(target) => TransitionRule::GoTo(qualify(app_id, target)),
        TransitionRule::Stay => TransitionRule::Stay,
        TransitionRule::SetFocus(field) => TransitionRule::SetFocus(qualify(app_id, field)),
        TransitionRule::SubmitSearch(template) => {
            TransitionRule::SubmitSearch(qualify(app_id, template))
        }
        TransitionRule::Conditional {
            guard,
            then_rule,
            else_rule,
        } => TransitionRule::Conditional {
            guard: match guard {
                Guard::TypedContains { field, needle } => Guard::TypedContains {
                    field: qualify(app_id, field),
                    needle: needle.clone(),
                },
                Guard::Visited { screen } => Guard::Visited {
                    screen: qualify(app_id, screen),
                },
            },
            then_rule: Box::new(qualify_rule(app_id, then_rule)),
            else_rule: Box::new(qualify_rule(app_id, else_rule)),
        },
    }
}
