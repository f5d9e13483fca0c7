//! Token-level matching metrics for plan quality: BLEU with uniform n-gram
//! weights and brevity penalty, and the LCS-based ROUGE-L F-measure.

use crate::lcs::lcs_len_by;
use crate::EvalError;
use std::collections::BTreeMap;

fn ngram_counts(tokens: &[String], n: usize) -> BTreeMap<&[String], usize> {
    let mut counts: BTreeMap<&[String], usize> = BTreeMap::new();
    if tokens.len() >= n && n > 0 {
        for window in tokens.windows(n) {
            *counts.entry(window).or_insert(0) += 1;
        }
    }
    counts
}

/// Clipped n-gram matches and candidate n-gram count for one order `n`.
fn clipped_matches(candidate: &[String], reference: &[String], n: usize) -> (usize, usize) {
    let cand = ngram_counts(candidate, n);
    let reference = ngram_counts(reference, n);
    let matched = cand
        .iter()
        .map(|(gram, count)| (*count).min(reference.get(gram).copied().unwrap_or(0)))
        .sum();
    let total = candidate.len().saturating_sub(n - 1).min(candidate.len());
    (matched, total)
}

fn brevity_penalty(candidate_len: usize, reference_len: usize) -> f64 {
    if candidate_len == 0 {
        return 0.0;
    }
    if candidate_len > reference_len {
        1.0
    } else {
        (1.0 - reference_len as f64 / candidate_len as f64).exp()
    }
}

/// Sentence BLEU with uniform weights over n = 1..=N and brevity penalty,
/// where N is `max_n` clamped to both sequence lengths so that identical
/// short plans still score 1. Any zero precision zeroes the score.
pub fn compute_bleu(
    candidate: &[String],
    reference: &[String],
    max_n: usize,
) -> Result<f64, EvalError> {
    if reference.is_empty() {
        return Err(EvalError::EmptyReference);
    }
    if candidate.is_empty() {
        return Ok(0.0);
    }
    let effective_n = max_n.min(candidate.len()).min(reference.len()).max(1);
    let mut log_sum = 0.0;
    for n in 1..=effective_n {
        let (matched, total) = clipped_matches(candidate, reference, n);
        if matched == 0 || total == 0 {
            return Ok(0.0);
        }
        log_sum += (matched as f64 / total as f64).ln();
    }
    let precision_mean = (log_sum / effective_n as f64).exp();
    Ok(brevity_penalty(candidate.len(), reference.len()) * precision_mean)
}

/// Corpus BLEU over many (candidate, reference) pairs: clipped counts and
/// lengths are summed across pairs before combining.
pub fn corpus_bleu(pairs: &[(Vec<String>, Vec<String>)], max_n: usize) -> Result<f64, EvalError> {
    if pairs.iter().any(|(_, reference)| reference.is_empty()) {
        return Err(EvalError::EmptyReference);
    }
    if pairs.is_empty() {
        return Ok(0.0);
    }
    let cand_len: usize = pairs.iter().map(|(c, _)| c.len()).sum();
    let ref_len: usize = pairs.iter().map(|(_, r)| r.len()).sum();
    if cand_len == 0 {
        return Ok(0.0);
    }
    let mut log_sum = 0.0;
    let mut orders = 0usize;
    for n in 1..=max_n.max(1) {
        let mut matched = 0usize;
        let mut total = 0usize;
        for (candidate, reference) in pairs {
            let (m, t) = clipped_matches(candidate, reference, n);
            matched += m;
            total += t;
        }
        if total == 0 {
            continue; // no candidate has n-grams of this order
        }
        if matched == 0 {
            return Ok(0.0);
        }
        log_sum += (matched as f64 / total as f64).ln();
        orders += 1;
    }
    if orders == 0 {
        return Ok(0.0);
    }
    let precision_mean = (log_sum / orders as f64).exp();
    Ok(brevity_penalty(cand_len, ref_len) * precision_mean)
}

/// ROUGE-L: LCS-based F-measure with β = 1.
pub fn compute_rouge_l(candidate: &[String], reference: &[String]) -> Result<f64, EvalError> {
    if reference.is_empty() {
        return Err(EvalError::EmptyReference);
    }
    if candidate.is_empty() {
        return Ok(0.0);
    }
    let lcs = lcs_len_by(candidate, reference, |a, b| a == b);
    if lcs == 0 {
        return Ok(0.0);
    }
    let precision = lcs as f64 / candidate.len() as f64;
    let recall = lcs as f64 / reference.len() as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}

pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn identical_plans_score_one() {
        let plan = toks("Search Item (news) Open Section (comments)");
        assert!((compute_bleu(&plan, &plan, 4).unwrap() - 1.0).abs() < 1e-12);
        assert!((compute_rouge_l(&plan, &plan).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_plans_score_zero() {
        let a = toks("alpha beta gamma");
        let b = toks("delta epsilon zeta");
        assert_eq!(compute_bleu(&a, &b, 4).unwrap(), 0.0);
        assert_eq!(compute_rouge_l(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn bleu_bigram_worked_example() {
        // candidate "a b c d" vs reference "a b c e", max_n = 2:
        // p1 = 3/4, p2 = 2/3, BP = 1 -> sqrt(1/2)
        let candidate = toks("a b c d");
        let reference = toks("a b c e");
        let got = compute_bleu(&candidate, &reference, 2).unwrap();
        assert!((got - (0.75f64 * (2.0 / 3.0)).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rouge_worked_example() {
        // candidate len 4, reference len 5, LCS 3:
        // P = 3/4, R = 3/5, F1 = 2PR/(P+R) = 2/3
        let candidate = toks("a b c x");
        let reference = toks("a b q c y");
        let got = compute_rouge_l(&candidate, &reference).unwrap();
        assert!((got - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_reference_is_an_error() {
        let candidate = toks("a");
        assert!(matches!(compute_bleu(&candidate, &[], 4), Err(EvalError::EmptyReference)));
        assert!(matches!(compute_rouge_l(&candidate, &[]), Err(EvalError::EmptyReference)));
    }

    #[test]
    fn brevity_penalty_punishes_short_candidates() {
        let candidate = toks("a b");
        let reference = toks("a b c d");
        let got = compute_bleu(&candidate, &reference, 2).unwrap();
        assert!(got < 1.0);
        assert!((got - (1.0f64 - 2.0).exp()).abs() < 1e-12, "p1 = p2 = 1, BP = e^-1");
    }

    proptest! {
        /// Deleting a matched token never increases either metric.
        #[test]
        fn non_increasing_under_matched_deletion(
            tokens in proptest::collection::vec("[a-c]", 2..8),
            idx in 0usize..8
        ) {
            let reference = tokens.clone();
            let candidate = tokens.clone();
            let idx = idx % candidate.len();
            let mut deleted = candidate.clone();
            deleted.remove(idx);

            let before_bleu = compute_bleu(&candidate, &reference, 2).unwrap();
            let after_bleu = compute_bleu(&deleted, &reference, 2).unwrap();
            prop_assert!(after_bleu <= before_bleu + 1e-12);

            let before_rouge = compute_rouge_l(&candidate, &reference).unwrap();
            let after_rouge = compute_rouge_l(&deleted, &reference).unwrap();
            prop_assert!(after_rouge <= before_rouge + 1e-12);
        }

        #[test]
        fn scores_stay_in_unit_interval(
            a in proptest::collection::vec("[a-d]", 0..10),
            b in proptest::collection::vec("[a-d]", 1..10)
        ) {
            let bleu = compute_bleu(&a, &b, 4).unwrap();
            let rouge = compute_rouge_l(&a, &b).unwrap();
            prop_assert!((0.0..=1.0).contains(&bleu));
            prop_assert!((0.0..=1.0).contains(&rouge));
        }
    }
}
