//! Word budgets for generated and oracle summaries, derived from a
//! 10-bin compression-ratio quantile table over chapter word counts, and
//! assembly of extracts under such a budget.

use std::collections::BTreeMap;
use std::path::Path;

use crate::aligner::AlignmentResult;
use crate::error::{Error, Result};
use crate::textcore::{Document, Segment};

/// Bundled quantile table fitted on full-corpus training pairs, used when
/// no `--quantiles` file is supplied.
pub const DEFAULT_QUANTILES: &str = include_str!("../data/quantiles.tsv");

/// One chapter word-count bin and the mean compression ratio observed in
/// it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantileBin {
    pub min_wc: u64,
    pub max_wc: u64,
    pub mean_cr: f64,
}

/// Ten word-count bins mapping chapter length to expected compression.
#[derive(Clone, Debug)]
pub struct QuantileModel {
    bins: Vec<QuantileBin>,
    pub fitted_on: String,
}

pub const QUANTILE_BIN_COUNT: usize = 10;

impl QuantileModel {
    /// Requires exactly ten bins, each with a positive compression ratio
    /// and an ordered range.
    pub fn new(bins: Vec<QuantileBin>, fitted_on: impl Into<String>) -> Result<QuantileModel> {
        if bins.len() != QUANTILE_BIN_COUNT {
            return Err(Error::invalid(format!(
                "quantile model needs exactly {QUANTILE_BIN_COUNT} bins, got {}",
                bins.len()
            )));
        }
        for (i, bin) in bins.iter().enumerate() {
            if bin.mean_cr <= 0.0 || !bin.mean_cr.is_finite() {
                return Err(Error::invalid(format!(
                    "bin {i} has non-positive compression ratio {}",
                    bin.mean_cr
                )));
            }
            if bin.min_wc > bin.max_wc {
                return Err(Error::invalid(format!(
                    "bin {i} range {}..{} is reversed",
                    bin.min_wc, bin.max_wc
                )));
            }
        }
        Ok(QuantileModel {
            bins,
            fitted_on: fitted_on.into(),
        })
    }

    pub fn bins(&self) -> &[QuantileBin] {
        &self.bins
    }

    /// Non-fatal oddities: ranges that overlap or leave gaps, and
    /// compression ratios that decrease from one bin to the next.
    pub fn validate_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        for i in 1..self.bins.len() {
            let prev = &self.bins[i - 1];
            let bin = &self.bins[i];
            if bin.min_wc <= prev.max_wc {
                warnings.push(format!(
                    "bin {i} starts at {} inside bin {}'s range ending at {}",
                    bin.min_wc,
                    i - 1,
                    prev.max_wc
                ));
            } else if bin.min_wc > prev.max_wc + 1 {
                warnings.push(format!(
                    "gap between bin {} (ends {}) and bin {i} (starts {})",
                    i - 1,
                    prev.max_wc,
                    bin.min_wc
                ));
            }
            if bin.mean_cr < prev.mean_cr {
                warnings.push(format!(
                    "compression ratio decreases from bin {} ({}) to bin {i} ({})",
                    i - 1,
                    prev.mean_cr,
                    bin.mean_cr
                ));
            }
        }
        warnings
    }
}

/// Parses a quantile TSV (`bin_index min_wc max_wc mean_cr` per row,
/// `#` comments and blank lines ignored). `origin` labels errors and
/// becomes the model's `fitted_on` tag.
pub fn parse_quantile_tsv(text: &str, origin: &str) -> Result<QuantileModel> {
    let mut bins = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::format(
                origin,
                lineno + 1,
                format!("expected 4 fields, got {}", fields.len()),
            ));
        }
        let parse_u64 = |s: &str, what: &str| {
            s.parse::<u64>()
                .map_err(|_| Error::format(origin, lineno + 1, format!("bad {what} '{s}'")))
        };
        let index = parse_u64(fields[0], "bin index")? as usize;
        if index != bins.len() {
            return Err(Error::format(
                origin,
                lineno + 1,
                format!("bin index {index} out of order, expected {}", bins.len()),
            ));
        }
        let min_wc = parse_u64(fields[1], "min word count")?;
        let max_wc = parse_u64(fields[2], "max word count")?;
        let mean_cr = fields[3]
            .parse::<f64>()
            .map_err(|_| Error::format(origin, lineno + 1, format!("bad ratio '{}'", fields[3])))?;
        bins.push(QuantileBin {
            min_wc,
            max_wc,
            mean_cr,
        });
    }
    QuantileModel::new(bins, origin)
}

/// Serializes a model back to the TSV row format.
pub fn quantile_tsv(model: &QuantileModel) -> String {
    let mut out = String::new();
    for (i, bin) in model.bins.iter().enumerate() {
        out.push_str(&format!("{i}\t{}\t{}\t{}\n", bin.min_wc, bin.max_wc, bin.mean_cr));
    }
    out
}

pub fn load_quantiles(path: &Path) -> Result<QuantileModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_quantile_tsv(&text, &path.display().to_string())
}

/// The bundled table.
pub fn default_quantiles() -> QuantileModel {
    parse_quantile_tsv(DEFAULT_QUANTILES, "bundled").expect("bundled quantile table is valid")
}

/// Fits a fresh model from (chapter word count, summary word count)
/// pairs: ranked by chapter length into ten equal-frequency bins (the
/// remainder spread over the lowest bins), each bin keeping its observed
/// word-count range and mean chapter/summary ratio.
pub fn fit_quantiles(pairs: &[(u64, u64)], fitted_on: &str) -> Result<QuantileModel> {
    if pairs.len() < QUANTILE_BIN_COUNT {
        return Err(Error::InsufficientData {
            need: QUANTILE_BIN_COUNT,
            got: pairs.len(),
        });
    }
    if let Some((cw, sw)) = pairs.iter().find(|(cw, sw)| *cw == 0 || *sw == 0) {
        return Err(Error::invalid(format!(
            "word counts must be positive, got pair ({cw}, {sw})"
        )));
    }
    let mut sorted: Vec<(u64, u64)> = pairs.to_vec();
    sorted.sort_unstable();
    let base = sorted.len() / QUANTILE_BIN_COUNT;
    let remainder = sorted.len() % QUANTILE_BIN_COUNT;
    let mut bins = Vec::with_capacity(QUANTILE_BIN_COUNT);
    let mut start = 0;
    for i in 0..QUANTILE_BIN_COUNT {
        let size = base + usize::from(i < remainder);
        let slice = &sorted[start..start + size];
        start += size;
        let mean_cr = slice
            .iter()
            .map(|&(cw, sw)| cw as f64 / sw as f64)
            .sum::<f64>()
            / slice.len() as f64;
        bins.push(QuantileBin {
            min_wc: slice.first().unwrap().0,
            max_wc: slice.last().unwrap().0,
            mean_cr,
        });
    }
    QuantileModel::new(bins, fitted_on)
}

/// Target word length for a chapter's summary: its bin's mean compression
/// ratio divides the chapter word count, rounded half-up, never below 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtractBudget {
    pub target_words: u64,
    pub bin_index: usize,
    pub chapter_wc: u64,
}

/// Budget for a chapter of `chapter_wc` words. The first bin containing
/// the count wins; counts outside every bin take the bin with the nearest
/// boundary (ties to the lower bin), so out-of-range chapters clamp to the
/// end bins.
pub fn target_length(chapter_wc: u64, model: &QuantileModel) -> ExtractBudget {
    let mut best: Option<(u64, usize)> = None;
    for (i, bin) in model.bins.iter().enumerate() {
        let distance = if chapter_wc < bin.min_wc {
            bin.min_wc - chapter_wc
        } else { chapter_wc.saturating_sub(bin.max_wc) };
        if best.is_none_or(|(d, _)| distance < d) {
            best = Some((distance, i));
        }
    }
    let bin_index = best.map_or(0, |(_, i)| i);
    let raw = chapter_wc as f64 / model.bins[bin_index].mean_cr;
    let target_words = ((raw + 0.5).floor() as u64).max(1);
    ExtractBudget {
        target_words,
        bin_index,
        chapter_wc,
    }
}

fn chapter_positions(chapter: &Document) -> BTreeMap<&str, usize> {
    chapter
        .segments
        .iter()
        .enumerate()
        .map(|(i, s)| (s.id.as_str(), i))
        .collect()
}

/// Takes segments in ranked order until their cumulative word count
/// reaches the budget (the crossing segment is kept whole), then emits
/// them re-sorted into chapter order as a `<chapter>/extract` document.
pub fn assemble_extract(
    chapter: &Document,
    ranked_ids: &[String],
    budget: &ExtractBudget,
) -> Result<Document> {
    if ranked_ids.is_empty() {
        return Err(Error::EmptyRanking);
    }
    let positions = chapter_positions(chapter);
    let mut taken: Vec<usize> = Vec::new();
    let mut seen = BTreeMap::new();
    let mut words = 0u64;
    for id in ranked_ids {
        if seen.insert(id.as_str(), ()).is_some() {
            return Err(Error::invalid(format!("ranked ids repeat '{id}'")));
        }
        let &pos = positions
            .get(id.as_str())
            .ok_or_else(|| Error::InconsistentAlignment(id.clone()))?;
        if words >= budget.target_words {
            continue; // keep scanning only to validate the remaining ids
        }
        taken.push(pos);
        words += chapter.segments[pos].word_count() as u64;
    }
    taken.sort_unstable();
    Ok(Document {
        doc_id: format!("{}/extract", chapter.doc_id),
        role: chapter.role,
        segments: taken.iter().map(|&i| chapter.segments[i].clone()).collect(),
        source_label: chapter.source_label.clone(),
    })
}

/// Builds the oracle extract for a sentence-level alignment: one chapter
/// segment per aligned summary segment, deduplicated (keeping each
/// segment's best score), ranked by descending score for the budget cut.
/// The result may undershoot the budget when pairs are few; an alignment
/// with no pairs yields an empty extract.
pub fn oracle_extract(
    chapter: &Document,
    summary: &Document,
    alignment: &AlignmentResult,
    budget: &ExtractBudget,
) -> Result<Document> {
    if alignment.method.is_summary_level() {
        return Err(Error::WrongAlignmentKind {
            expected: "sentence-level".to_string(),
            got: alignment.method.as_str().to_string(),
        });
    }
    if alignment.chapter_id != chapter.doc_id {
        return Err(Error::InconsistentAlignment(format!(
            "alignment is for chapter '{}', not '{}'",
            alignment.chapter_id, chapter.doc_id
        )));
    }
    if alignment.summary_id != summary.doc_id {
        return Err(Error::InconsistentAlignment(format!(
            "alignment is for summary '{}', not '{}'",
            alignment.summary_id, summary.doc_id
        )));
    }
    let mut doc = if alignment.pairs.is_empty() {
        Document {
            doc_id: format!("{}/extract", chapter.doc_id),
            role: chapter.role,
            segments: Vec::new(),
            source_label: None,
        }
    } else {
        let positions = chapter_positions(chapter);
        let mut best_score: BTreeMap<&str, f64> = BTreeMap::new();
        for pair in &alignment.pairs {
            let id = pair.chapter_segment_id.as_str();
            if !positions.contains_key(id) {
                return Err(Error::InconsistentAlignment(id.to_string()));
            }
            let entry = best_score.entry(id).or_insert(f64::NEG_INFINITY);
            *entry = entry.max(pair.score);
        }
        let mut ranked: Vec<(&str, f64)> =
            best_score.into_iter().collect();
        ranked.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap()
                .then_with(|| positions[a.0].cmp(&positions[b.0]))
        });
        let ids: Vec<String> = ranked.into_iter().map(|(id, _)| id.to_string()).collect();
        assemble_extract(chapter, &ids, budget)?
    };
    doc.source_label = Some(summary.doc_id.clone());
    Ok(doc)
}

/// A chapter sentence pulled in as context for one or more extracted
/// constituents, with the constituent token ranges marked.
#[derive(Clone, Debug)]
pub struct ExpandedSentence {
    pub sentence: Segment,
    /// Half-open token ranges covered by extracted constituents.
    pub marked_token_ranges: Vec<(usize, usize)>,
}

impl ExpandedSentence {
    /// Sentence text with `|` separators at interior constituent
    /// boundaries.
    pub fn render(&self) -> String {
        let n = self.sentence.tokens.len();
        let mut boundaries = std::collections::BTreeSet::new();
        for &(start, end) in &self.marked_token_ranges {
            for edge in [start, end] {
                if edge > 0 && edge < n {
                    boundaries.insert(edge);
                }
            }
        }
        let mut out = String::new();
        for (i, token) in self.sentence.tokens.iter().enumerate() {
            if i > 0 {
                out.push_str(if boundaries.contains(&i) { " | " } else { " " });
            }
            out.push_str(&token.surface);
        }
        out
    }
}

/// Replaces each extracted constituent with its full containing sentence,
/// deduplicated and in chapter order, marking where the constituents sit
/// inside each sentence.
pub fn context_expand(extract: &Document, chapter: &Document) -> Result<Vec<ExpandedSentence>> {
    let positions = chapter_positions(chapter);
    // sentence position -> constituent ranges, accumulated in extract order
    let mut by_sentence: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for constituent in &extract.segments {
        let sid = constituent.source_sentence_id.as_str();
        let &pos = positions
            .get(sid)
            .ok_or_else(|| Error::InconsistentInput(sid.to_string()))?;
        let sentence = &chapter.segments[pos];
        let ranges = by_sentence.entry(pos).or_default();
        let scan_from = ranges.last().map_or(0, |&(_, end)| end);
        let needle: Vec<&str> = constituent.tokens.iter().map(|t| t.surface.as_str()).collect();
        let hay: Vec<&str> = sentence.tokens.iter().map(|t| t.surface.as_str()).collect();
        let mismatch = || {
            Error::InconsistentInput(format!(
                "constituent '{}' does not occur in sentence '{sid}'",
                constituent.id
            ))
        };
        let limit = hay.len().checked_sub(needle.len()).ok_or_else(mismatch)?;
        let start = (scan_from..=limit)
            .find(|&s| hay[s..s + needle.len()] == needle[..])
            .ok_or_else(mismatch)?;
        ranges.push((start, start + needle.len()));
    }
    Ok(by_sentence
        .into_iter()
        .map(|(pos, marked_token_ranges)| ExpandedSentence {
            sentence: chapter.segments[pos].clone(),
            marked_token_ranges,
        })
        .collect())
}
