//! Deterministic simulated mobile device. App bundles declare the screen
//! graph (the transition function in data form); the device applies actions
//! to pure value states and renders textual observations in place of
//! screenshots.
//!
//! `AppDefinition` is immutable and shareable; each episode owns its own
//! `DeviceState` value. There is no interior mutability anywhere.

pub mod bundle;
pub mod device;
pub mod merge;

pub use bundle::{
    base_screen_id, load_app_bundle, AppDefinition, BundleError, Element, Guard, Rect, Screen,
    TextField, TransitionRule,
};
pub use device::{ground, observe, reset, step, DeviceState, SimError, StepOutcome};
pub use merge::{merge_bundles, PHONE_APP_ID, PHONE_HOME_SCREEN};
