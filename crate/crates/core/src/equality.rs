//! Normalized action equality, the comparison primitive behind the
//! completion-rate metric. When two actions count as the same step is a
//! judgment call, so the policy is explicit and configurable: text
//! attributes compare case-folded and trimmed by default, and a coordinate
//! click can unify with a named click through an element registry.

use crate::action::Action;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Element name -> center coordinate, as declared by an app bundle.
///
/// Keys are stored case-folded and trimmed so model-cased names
/// (`Search Bar` vs `search bar`) resolve identically.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementRegistry {
    centers: BTreeMap<String, (i64, i64)>,
}

impl ElementRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, center: (i64, i64)) {
        self.centers.insert(fold(name), center);
    }

    pub fn resolve(&self, name: &str) -> Option<(i64, i64)> {
        self.centers.get(&fold(name)).copied()
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Folded names with their centers, in key order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, (i64, i64))> {
        self.centers.iter().map(|(name, center)| (name.as_str(), *center))
    }
}

fn fold(name: &str) -> String {
    name.trim().to_lowercase()
}

/// How [`actions_equal`] normalizes attributes and whether `Click` may match
/// `ClickTarget` through a registry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualityPolicy {
    pub case_fold: bool,
    pub trim: bool,
    pub ground_aware: bool,
    pub registry: Option<ElementRegistry>,
}

impl Default for EqualityPolicy {
    fn default() -> Self {
        Self {
            case_fold: true,
            trim: true,
            ground_aware: true,
            registry: None,
        }
    }
}

impl EqualityPolicy {
    pub fn with_registry(registry: ElementRegistry) -> Self {
        Self {
            registry: Some(registry),
            ..Self::default()
        }
    }

    /// Exact comparison: no folding, no trimming, no registry unification.
    pub fn strict() -> Self {
        Self {
            case_fold: false,
            trim: false,
            ground_aware: false,
            registry: None,
        }
    }

    fn norm(&self, s: &str) -> String {
        let s = if self.trim { s.trim() } else { s };
        if self.case_fold { s.to_lowercase() } else { s.to_string() }
    }
}

/// Reflexive and symmetric equality under `policy`. On the `Click`-free
/// subset it is a full equivalence relation; registry unification keeps
/// symmetry but (like any cross-representation match) not transitivity.
pub fn actions_equal(a: &Action, b: &Action, policy: &EqualityPolicy) -> bool {
    match (a, b) {
        (Action::Click { x: ax, y: ay }, Action::Click { x: bx, y: by }) => ax == bx && ay == by,
        (Action::ClickTarget { element: ae }, Action::ClickTarget { element: be }) => {
            policy.norm(ae) == policy.norm(be)
        }
        (Action::Click { x, y }, Action::ClickTarget { element })
        | (Action::ClickTarget { element }, Action::Click { x, y }) => {
            policy.ground_aware
                && policy
                    .registry
                    .as_ref()
                    .and_then(|r| r.resolve(element))
                    .is_some_and(|center| center == (*x, *y))
        }
        (Action::Scroll(da), Action::Scroll(db)) => da == db,
        (Action::Type { text: ta }, Action::Type { text: tb }) => policy.norm(ta) == policy.norm(tb),
        (Action::Back, Action::Back) | (Action::Exit, Action::Exit) => true,
        (Action::Wait { seconds: sa }, Action::Wait { seconds: sb }) => sa == sb,
        _ => false,
    }
}
