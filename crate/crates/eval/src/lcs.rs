//! Order-aware sequence intersection: the longest common subsequence under
//! a configurable match predicate. This is the |a_human ∩ a_agent| used by
//! the completion-rate and API-cost metrics.

use chop_core::{actions_equal, Action, EqualityPolicy};

/// LCS length over arbitrary items under `matches`.
pub fn lcs_len_by<T, F: Fn(&T, &T) -> bool>(a: &[T], b: &[T], matches: F) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut curr = vec![0usize; b.len() + 1];
    for item_a in a {
        for (j, item_b) in b.iter().enumerate() {
            curr[j + 1] = if matches(item_a, item_b) {
                prev[j] + 1
            } else {
                prev[j + 1].max(curr[j])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Length of the longest common subsequence of two action sequences under
/// the equality policy.
pub fn lcs_intersection(human: &[Action], agent: &[Action], policy: &EqualityPolicy) -> usize {
    lcs_len_by(human, agent, |a, b| actions_equal(a, b, policy))
}
