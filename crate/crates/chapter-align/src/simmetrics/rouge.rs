//! N-gram and longest-common-subsequence overlap scoring, in plain and
//! word-weighted forms. Weighted scoring replaces every n-gram count by
//! count times the summed word weights of the gram, and replaces LCS length
//! by the summed weights of one LCS witness.

use std::collections::BTreeSet;

use crate::textcore::{lcs, ngram_counts, Segment};
use crate::weighting::WeightTable;

use super::ScoreTriple;

/// Projects a segment onto the key sequence metrics consume: punctuation
/// tokens dropped, stop words dropped when a set is given, stem or norm per
/// `use_stems`.
pub(crate) fn eligible_keys<'a>(
    seg: &'a Segment,
    use_stems: bool,
    stopwords: Option<&BTreeSet<String>>,
) -> Vec<&'a str> {
    seg.tokens
        .iter()
        .filter(|t| !t.is_punct && stopwords.is_none_or(|set| !set.contains(&t.norm)))
        .map(|t| if use_stems { t.stem.as_str() } else { t.norm.as_str() })
        .collect()
}

fn gram_weight_or_one(gram: &[&str], table: Option<&WeightTable>) -> f64 {
    match table {
        None => 1.0,
        Some(t) => gram.iter().map(|w| t.weight(w)).sum(),
    }
}

/// N-gram overlap triple over pre-projected key sequences. With a weight
/// table, every count is scaled by the gram's summed word weights. Either
/// side having no grams yields the all-zero triple.
pub(crate) fn rouge_n_keys(
    cand_keys: &[&str],
    ref_keys: &[&str],
    n: usize,
    table: Option<&WeightTable>,
) -> ScoreTriple {
    let cand_counts = ngram_counts(cand_keys, n);
    let ref_counts = ngram_counts(ref_keys, n);
    if cand_counts.is_empty() || ref_counts.is_empty() {
        return ScoreTriple::ZERO;
    }
    let mut matched = 0.0;
    let mut cand_total = 0.0;
    for (gram, &cc) in &cand_counts {
        let w = gram_weight_or_one(gram, table);
        cand_total += cc as f64 * w;
        if let Some(&rc) = ref_counts.get(gram) {
            matched += cc.min(rc) as f64 * w;
        }
    }
    let mut ref_total = 0.0;
    for (gram, &rc) in &ref_counts {
        ref_total += rc as f64 * gram_weight_or_one(gram, table);
    }
    if cand_total == 0.0 || ref_total == 0.0 {
        return ScoreTriple::ZERO;
    }
    ScoreTriple::from_pr(matched / cand_total, matched / ref_total)
}

/// LCS overlap triple over pre-projected key sequences. Unweighted: match
/// mass is the LCS length and the denominators are the key counts.
/// Weighted: match mass is the summed weight of one LCS witness and the
/// denominators are the summed token weights of each side.
pub(crate) fn rouge_l_keys(
    cand_keys: &[&str],
    ref_keys: &[&str],
    table: Option<&WeightTable>,
) -> ScoreTriple {
    if cand_keys.is_empty() || ref_keys.is_empty() {
        return ScoreTriple::ZERO;
    }
    let witness = lcs(cand_keys, ref_keys);
    let (matched, cand_total, ref_total) = match table {
        None => (
            witness.len() as f64,
            cand_keys.len() as f64,
            ref_keys.len() as f64,
        ),
        Some(t) => (
            witness.iter().map(|w| t.weight(w)).sum(),
            cand_keys.iter().map(|w| t.weight(w)).sum(),
            ref_keys.iter().map(|w| t.weight(w)).sum(),
        ),
    };
    if cand_total == 0.0 || ref_total == 0.0 {
        return ScoreTriple::ZERO;
    }
    ScoreTriple::from_pr(matched / cand_total, matched / ref_total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weighting::KeyMode;

    #[test]
    fn unigram_overlap_hand_case() {
        // "the cat sat" vs "the cat ran": 2 of 3 unigrams shared
        let t = rouge_n_keys(&["the", "cat", "sat"], &["the", "cat", "ran"], 1, None);
        assert!((t.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((t.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((t.f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn identical_keys_score_one() {
        let keys = ["a", "b", "c"];
        for n in 1..=2 {
            let t = rouge_n_keys(&keys, &keys, n, None);
            assert_eq!((t.precision, t.recall, t.f1), (1.0, 1.0, 1.0));
        }
        let t = rouge_l_keys(&keys, &keys, None);
        assert_eq!((t.precision, t.recall, t.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn disjoint_keys_score_zero() {
        let t = rouge_n_keys(&["a", "b"], &["c", "d"], 1, None);
        assert_eq!((t.precision, t.recall, t.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn clipping_limits_repeated_grams() {
        // candidate has three "b", reference two: clipped match is 2
        let t = rouge_n_keys(&["b", "b", "b"], &["b", "b"], 1, None);
        assert!((t.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((t.recall - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_sides_are_degenerate_zero() {
        assert_eq!(rouge_n_keys(&[], &["a"], 1, None).f1, 0.0);
        assert_eq!(rouge_n_keys(&["a"], &[], 1, None).f1, 0.0);
        assert_eq!(rouge_l_keys(&[], &[], None).f1, 0.0);
        // too short for bigrams counts as no grams
        assert_eq!(rouge_n_keys(&["a"], &["a"], 2, None).f1, 0.0);
    }

    #[test]
    fn lcs_overlap_hand_case() {
        // LCS of abcd/acde is acd: P = R = 3/4
        let t = rouge_l_keys(&["a", "b", "c", "d"], &["a", "c", "d", "e"], None);
        assert!((t.precision - 0.75).abs() < 1e-12);
        assert!((t.recall - 0.75).abs() < 1e-12);
        assert!((t.f1 - 0.75).abs() < 1e-12);
    }

    #[test]
    fn constant_weights_reduce_to_unweighted() {
        let table = WeightTable::constant(1.0, KeyMode::Norm);
        let cand = ["the", "cat", "sat", "on", "the", "mat"];
        let refr = ["the", "cat", "ran", "off", "the", "mat"];
        for n in 1..=2 {
            let w = rouge_n_keys(&cand, &refr, n, Some(&table));
            let u = rouge_n_keys(&cand, &refr, n, None);
            assert_eq!((w.precision, w.recall, w.f1), (u.precision, u.recall, u.f1));
        }
        let w = rouge_l_keys(&cand, &refr, Some(&table));
        let u = rouge_l_keys(&cand, &refr, None);
        assert_eq!((w.precision, w.recall, w.f1), (u.precision, u.recall, u.f1));
    }

    #[test]
    fn weighting_shifts_scores_toward_rare_words() {
        // "rare" carries weight 1.0, "common" 0.1: a candidate matching the
        // rare word outscores one matching the common word.
        let mut table = WeightTable::constant(1.0, KeyMode::Norm);
        table.weights.insert("common".into(), 0.1);
        let with_rare = rouge_n_keys(&["rare"], &["rare", "common"], 1, Some(&table));
        let with_common = rouge_n_keys(&["common"], &["rare", "common"], 1, Some(&table));
        assert!(with_rare.recall > with_common.recall);
    }

    #[test]
    fn swapping_sides_swaps_precision_and_recall() {
        let a = ["a", "b", "c"];
        let b = ["a", "b"];
        let fwd = rouge_n_keys(&a, &b, 1, None);
        let rev = rouge_n_keys(&b, &a, 1, None);
        assert_eq!(fwd.precision, rev.recall);
        assert_eq!(fwd.recall, rev.precision);
        assert_eq!(fwd.f1, rev.f1);
    }
}
