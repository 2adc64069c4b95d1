//! Smooth-inverse-frequency word weighting: W(w) = alpha / (alpha + p(w)),
//! with p estimated per chapter. Frequent words get small weights, rare and
//! unseen words get weights near 1, so overlap metrics built on these
//! weights emphasize salient content words.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::textcore::Document;

pub const DEFAULT_ALPHA: f64 = 1e-3;

/// Which token projection keys the probability and weight maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyMode {
    Stem,
    Norm,
}

/// Per-word salience weights plus the probability estimates behind them.
#[derive(Clone, Debug)]
pub struct WeightTable {
    pub alpha: f64,
    pub probs: BTreeMap<String, f64>,
    pub weights: BTreeMap<String, f64>,
    /// Weight of a word absent from `probs` (estimated probability 0).
    pub default_weight: f64,
    pub key_mode: KeyMode,
}

impl WeightTable {
    /// Weight lookup; unseen keys get `default_weight`.
    pub fn weight(&self, key: &str) -> f64 {
        self.weights.get(key).copied().unwrap_or(self.default_weight)
    }

    /// Sum of the word weights of a gram (an n-gram or an LCS witness).
    pub fn gram_weight(&self, gram: &[&str]) -> Result<f64> {
        if gram.is_empty() {
            return Err(Error::invalid("gram_weight of an empty gram"));
        }
        Ok(gram.iter().map(|w| self.weight(w)).sum())
    }

    /// A table that assigns every word the same weight. Useful for
    /// diagnostics: weighted metrics over a constant table reduce to their
    /// unweighted forms.
    pub fn constant(value: f64, key_mode: KeyMode) -> WeightTable {
        WeightTable {
            alpha: DEFAULT_ALPHA,
            probs: BTreeMap::new(),
            weights: BTreeMap::new(),
            default_weight: value,
            key_mode,
        }
    }
}

/// Counts word keys over a document's non-punctuation tokens. Returns the
/// count map and the total count.
pub fn key_counts(
    doc: &Document,
    key_mode: KeyMode,
    include_stopwords: bool,
) -> Result<(BTreeMap<String, u64>, u64)> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut total = 0u64;
    for segment in &doc.segments {
        for token in &segment.tokens {
            if token.is_punct || (!include_stopwords && token.is_stopword) {
                continue;
            }
            let key = match key_mode {
                KeyMode::Stem => &token.stem,
                KeyMode::Norm => &token.norm,
            };
            *counts.entry(key.clone()).or_insert(0) += 1;
            total += 1;
        }
    }
    if total == 0 {
        return Err(Error::DegenerateChapter(doc.doc_id.clone()));
    }
    Ok((counts, total))
}

/// Maximum-likelihood word probabilities over a chapter's non-punctuation
/// tokens: p(w) = count(w) / total.
pub fn estimate_probs(
    chapter: &Document,
    key_mode: KeyMode,
    include_stopwords: bool,
) -> Result<BTreeMap<String, f64>> {
    let (counts, total) = key_counts(chapter, key_mode, include_stopwords)?;
    Ok(counts
        .into_iter()
        .map(|(k, c)| (k, c as f64 / total as f64))
        .collect())
}

/// Builds the weight table W(w) = alpha / (alpha + p(w)). Unseen words get
/// the limit value alpha / (alpha + 0) = 1.
pub fn build_weight_table(probs: BTreeMap<String, f64>, alpha: f64) -> Result<WeightTable> {
    build_weight_table_with_mode(probs, alpha, KeyMode::Stem)
}

pub fn build_weight_table_with_mode(
    probs: BTreeMap<String, f64>,
    alpha: f64,
    key_mode: KeyMode,
) -> Result<WeightTable> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    let mut sum = 0.0;
    for (key, &p) in &probs {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("probability of '{key}' out of range: {p}")));
        }
        sum += p;
    }
    if !probs.is_empty() && (sum - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("probabilities sum to {sum}, expected 1")));
    }
    let weights = probs
        .iter()
        .map(|(k, &p)| (k.clone(), alpha / (alpha + p)))
        .collect();
    Ok(WeightTable {
        alpha,
        probs,
        weights,
        default_weight: 1.0,
        key_mode,
    })
}

/// Convenience: estimate probabilities from `chapter` and build the table
/// in one call (stemmed keys, stop words included).
pub fn chapter_weight_table(chapter: &Document, alpha: f64) -> Result<WeightTable> {
    let probs = estimate_probs(chapter, KeyMode::Stem, true)?;
    build_weight_table_with_mode(probs, alpha, KeyMode::Stem)
}

/// Debug dump: one `key<TAB>count<TAB>p<TAB>W` row per word, sorted by
/// descending weight (ties by key) under a header line.
pub fn weight_dump_tsv(table: &WeightTable, counts: &BTreeMap<String, u64>) -> String {
    let mut rows: Vec<(&String, f64)> = table
        .weights
        .iter()
        .map(|(k, &w)| (k, w))
        .collect();
    rows.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(b.0)));
    let mut out = String::from("key\tcount\tp\tW\n");
    for (key, w) in rows {
        let count = counts.get(key).copied().unwrap_or(0);
        let p = table.probs.get(key).copied().unwrap_or(0.0);
        out.push_str(&format!("{key}\t{count}\t{p}\t{w}\n"));
    }
    out
}
