//! Pairing summary segments with chapter segments to produce proxy
//! extract labels: greedy per-sentence argmax, Gale–Shapley stable
//! matching, and two summary-level greedy set builders.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::simmetrics::{MetricId, Scorer};
use crate::textcore::{Document, Segment};

/// Alignment strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Each summary segment independently takes its best chapter segment.
    GreedySent,
    /// One-to-one stable matching, summary segments proposing.
    StableSent,
    /// Add chapter segments greedily until the summary's word count is reached.
    SummaryWl,
    /// Add chapter segments greedily while the score strictly increases.
    SummaryWs,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::GreedySent,
        Method::StableSent,
        Method::SummaryWl,
        Method::SummaryWs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::GreedySent => "greedy_sent",
            Method::StableSent => "stable_sent",
            Method::SummaryWl => "summary_wl",
            Method::SummaryWs => "summary_ws",
        }
    }

    /// Accepts both the full names and the short command-line spellings.
    pub fn parse(s: &str) -> Result<Method> {
        match s {
            "greedy" | "greedy_sent" => Ok(Method::GreedySent),
            "stable" | "stable_sent" => Ok(Method::StableSent),
            "wl" | "summary_wl" => Ok(Method::SummaryWl),
            "ws" | "summary_ws" => Ok(Method::SummaryWs),
            other => Err(Error::invalid(format!(
                "unknown method '{other}' (expected greedy, stable, wl, or ws)"
            ))),
        }
    }

    pub fn is_summary_level(self) -> bool {
        matches!(self, Method::SummaryWl | Method::SummaryWs)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One matched summary/chapter segment pair with its score at pairing time.
#[derive(Clone, Debug, PartialEq)]
pub struct AlignmentPair {
    pub summary_segment_id: String,
    pub chapter_segment_id: String,
    pub score: f64,
}

/// Outcome of aligning one summary with one chapter. Sentence-level
/// methods fill `pairs`; summary-level methods fill `selected_ids`
/// (in selection order); the other stays empty.
#[derive(Clone, Debug)]
pub struct AlignmentResult {
    pub summary_id: String,
    pub chapter_id: String,
    pub method: Method,
    pub metric_id: MetricId,
    pub pairs: Vec<AlignmentPair>,
    pub selected_ids: Vec<String>,
    pub unmatched_summary_ids: Vec<String>,
}

/// Index-level matching over a score matrix (rows = summary segments,
/// columns = chapter segments).
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixAlignment {
    /// (row, column, score), sorted by row.
    pub pairs: Vec<(usize, usize, f64)>,
    /// Rows left unmatched, ascending.
    pub unmatched: Vec<usize>,
}

fn eligible(score: f64, floor: Option<f64>) -> bool {
    floor.is_none_or(|f| score >= f)
}

/// Row-independent argmax matching. Ties go to the lowest column; the same
/// column may be taken by several rows. Rows whose best eligible score is
/// below the floor stay unmatched.
pub fn greedy_from_matrix(scores: &[Vec<f64>], floor: Option<f64>) -> MatrixAlignment {
    let mut pairs = Vec::new();
    let mut unmatched = Vec::new();
    for (s, row) in scores.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for (c, &score) in row.iter().enumerate() {
            if !eligible(score, floor) {
                continue;
            }
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((c, score));
            }
        }
        match best {
            Some((c, score)) => pairs.push((s, c, score)),
            None => unmatched.push(s),
        }
    }
    MatrixAlignment { pairs, unmatched }
}

/// True when row `s` ranks column `a` ahead of column `b`
/// (higher score first, lower index on ties).
fn row_prefers(scores: &[Vec<f64>], s: usize, a: usize, b: usize) -> bool {
    scores[s][a] > scores[s][b] || (scores[s][a] == scores[s][b] && a < b)
}

/// True when column `c` ranks row `a` ahead of row `b`.
fn col_prefers(scores: &[Vec<f64>], c: usize, a: usize, b: usize) -> bool {
    scores[a][c] > scores[b][c] || (scores[a][c] == scores[b][c] && a < b)
}

/// Gale–Shapley stable matching with rows proposing. Both sides rank by
/// descending score with index-order tie-breaking, so the result is the
/// row-optimal stable matching and independent of proposal order. Pairs
/// scoring below the floor are struck from preference lists entirely.
pub fn stable_from_matrix(scores: &[Vec<f64>], floor: Option<f64>) -> MatrixAlignment {
    let n_rows = scores.len();
    let n_cols = scores.first().map_or(0, Vec::len);
    let mut prefs: Vec<Vec<usize>> = Vec::with_capacity(n_rows);
    for (s, row) in scores.iter().enumerate() {
        let mut cols: Vec<usize> = (0..n_cols).filter(|&c| eligible(row[c], floor)).collect();
        cols.sort_by(|&a, &b| {
            if a == b {
                std::cmp::Ordering::Equal
            } else if row_prefers(scores, s, a, b) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        prefs.push(cols);
    }

    let mut col_match: Vec<Option<usize>> = vec![None; n_cols];
    let mut next_choice = vec![0usize; n_rows];
    let mut queue: VecDeque<usize> = (0..n_rows).collect();
    while let Some(s) = queue.pop_front() {
        if next_choice[s] >= prefs[s].len() {
            continue; // exhausted every eligible column; stays unmatched
        }
        let c = prefs[s][next_choice[s]];
        next_choice[s] += 1;
        match col_match[c] {
            None => col_match[c] = Some(s),
            Some(incumbent) => {
                if col_prefers(scores, c, s, incumbent) {
                    col_match[c] = Some(s);
                    queue.push_back(incumbent);
                } else {
                    queue.push_back(s);
                }
            }
        }
    }

    let mut matched_rows = vec![false; n_rows];
    let mut pairs = Vec::new();
    for (c, slot) in col_match.iter().enumerate() {
        if let Some(s) = *slot {
            matched_rows[s] = true;
            pairs.push((s, c, scores[s][c]));
        }
    }
    pairs.sort_by_key(|&(s, _, _)| s);
    let unmatched = (0..n_rows).filter(|&s| !matched_rows[s]).collect();
    MatrixAlignment { pairs, unmatched }
}

/// All blocking pairs of a matching: (s, c) not matched together where both
/// strictly improve by score over their current assignment (unmatched
/// counts as improvable by anything). Empty output means stable.
pub fn blocking_pairs(scores: &[Vec<f64>], matching: &MatrixAlignment) -> Vec<(usize, usize)> {
    let n_rows = scores.len();
    let n_cols = scores.first().map_or(0, Vec::len);
    let mut row_of_col: Vec<Option<usize>> = vec![None; n_cols];
    let mut col_of_row: Vec<Option<usize>> = vec![None; n_rows];
    for &(s, c, _) in &matching.pairs {
        row_of_col[c] = Some(s);
        col_of_row[s] = Some(c);
    }
    let mut blocking = Vec::new();
    for s in 0..n_rows {
        for c in 0..n_cols {
            if col_of_row[s] == Some(c) {
                continue;
            }
            let s_gains = match col_of_row[s] {
                Some(current) => scores[s][c] > scores[s][current],
                None => true,
            };
            let c_gains = match row_of_col[c] {
                Some(current) => scores[s][c] > scores[current][c],
                None => true,
            };
            if s_gains && c_gains {
                blocking.push((s, c));
            }
        }
    }
    blocking
}

/// Scores every summary segment (candidate) against every chapter segment
/// (reference); `matrix[s][c]` holds the scalar for that pair.
pub fn score_matrix(
    summary: &Document,
    chapter: &Document,
    scorer: Scorer<'_>,
) -> Result<Vec<Vec<f64>>> {
    let mut matrix = Vec::with_capacity(summary.segments.len());
    for s in &summary.segments {
        let mut row = Vec::with_capacity(chapter.segments.len());
        for c in &chapter.segments {
            row.push(scorer.scalar(s, c)?);
        }
        matrix.push(row);
    }
    Ok(matrix)
}

fn require_nonempty(summary: &Document, chapter: &Document) -> Result<()> {
    if summary.segments.is_empty() {
        return Err(Error::invalid(format!("document '{}' has no segments", summary.doc_id)));
    }
    if chapter.segments.is_empty() {
        return Err(Error::invalid(format!("document '{}' has no segments", chapter.doc_id)));
    }
    Ok(())
}

fn sentence_level_result(
    summary: &Document,
    chapter: &Document,
    method: Method,
    metric_id: MetricId,
    matching: MatrixAlignment,
) -> AlignmentResult {
    AlignmentResult {
        summary_id: summary.doc_id.clone(),
        chapter_id: chapter.doc_id.clone(),
        method,
        metric_id,
        pairs: matching
            .pairs
            .into_iter()
            .map(|(s, c, score)| AlignmentPair {
                summary_segment_id: summary.segments[s].id.clone(),
                chapter_segment_id: chapter.segments[c].id.clone(),
                score,
            })
            .collect(),
        selected_ids: Vec::new(),
        unmatched_summary_ids: matching
            .unmatched
            .into_iter()
            .map(|s| summary.segments[s].id.clone())
            .collect(),
    }
}

/// For each summary segment independently, pairs the best-scoring chapter
/// segment (ties to the lowest index). Several summary segments may pick
/// the same chapter segment; duplicates are kept here and deduplicated
/// only by [`extract_labels`].
pub fn greedy_sentence_align(
    summary: &Document,
    chapter: &Document,
    scorer: Scorer<'_>,
    min_score: Option<f64>,
) -> Result<AlignmentResult> {
    require_nonempty(summary, chapter)?;
    let matrix = score_matrix(summary, chapter, scorer)?;
    let matching = greedy_from_matrix(&matrix, min_score);
    Ok(sentence_level_result(summary, chapter, Method::GreedySent, scorer.cfg.metric_id, matching))
}

/// One-to-one stable matching between summary and chapter segments, summary
/// segments proposing. With more summary segments than chapter segments,
/// the excess stays unmatched and is reported.
pub fn stable_align(
    summary: &Document,
    chapter: &Document,
    scorer: Scorer<'_>,
    min_score: Option<f64>,
) -> Result<AlignmentResult> {
    require_nonempty(summary, chapter)?;
    let matrix = score_matrix(summary, chapter, scorer)?;
    let matching = stable_from_matrix(&matrix, min_score);
    Ok(sentence_level_result(summary, chapter, Method::StableSent, scorer.cfg.metric_id, matching))
}

/// Greedily grows a set of chapter segments, each step adding the segment
/// that maximizes metric(selected segments concatenated in chapter order,
/// whole summary). `SummaryWl` stops once the selection's word count
/// reaches the summary's (the crossing segment is kept); `SummaryWs` stops
/// when no candidate strictly raises the score.
pub fn summary_level_align(
    summary: &Document,
    chapter: &Document,
    scorer: Scorer<'_>,
    rule: Method,
) -> Result<AlignmentResult> {
    if !rule.is_summary_level() {
        return Err(Error::invalid(format!("{rule} is not a summary-level method")));
    }
    if scorer.cfg.metric_id == MetricId::Cosine {
        return Err(Error::invalid(
            "cosine cannot drive summary-level alignment; no vectors exist for growing concatenations",
        ));
    }
    require_nonempty(summary, chapter)?;

    let reference = summary.concat_segment();
    let target_words = reference.word_count();
    let concat_id = format!("{}/sel", chapter.doc_id);
    let n = chapter.segments.len();
    let mut selected: Vec<usize> = Vec::new();
    let mut in_set = vec![false; n];
    let mut current_score = 0.0;
    let mut current_words = 0usize;

    loop {
        if rule == Method::SummaryWl && current_words >= target_words {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        for (c, _) in in_set.iter().enumerate().filter(|(_, &used)| !used) {
            let mut indices: Vec<usize> = selected.iter().copied().chain([c]).collect();
            indices.sort_unstable();
            let parts: Vec<&Segment> = indices.iter().map(|&i| &chapter.segments[i]).collect();
            let concat = Segment::concat(concat_id.clone(), &parts);
            let score = scorer.scalar(&concat, &reference)?;
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((c, score));
            }
        }
        let Some((c, score)) = best else {
            break; // every chapter segment already selected
        };
        if rule == Method::SummaryWs && score <= current_score {
            break;
        }
        selected.push(c);
        in_set[c] = true;
        current_score = score;
        current_words += chapter.segments[c].word_count();
    }

    Ok(AlignmentResult {
        summary_id: summary.doc_id.clone(),
        chapter_id: chapter.doc_id.clone(),
        method: rule,
        metric_id: scorer.cfg.metric_id,
        pairs: Vec::new(),
        selected_ids: selected
            .into_iter()
            .map(|c| chapter.segments[c].id.clone())
            .collect(),
        unmatched_summary_ids: Vec::new(),
    })
}

/// Runs whichever method is named. `min_score` applies to the
/// sentence-level methods only.
pub fn align(
    summary: &Document,
    chapter: &Document,
    scorer: Scorer<'_>,
    method: Method,
    min_score: Option<f64>,
) -> Result<AlignmentResult> {
    match method {
        Method::GreedySent => greedy_sentence_align(summary, chapter, scorer, min_score),
        Method::StableSent => stable_align(summary, chapter, scorer, min_score),
        Method::SummaryWl | Method::SummaryWs => {
            summary_level_align(summary, chapter, scorer, method)
        }
    }
}

/// Binary saliency labels in chapter order: 1 for every chapter segment
/// that appears in the alignment (pairs or selection), deduplicated.
pub fn extract_labels(result: &AlignmentResult, chapter: &Document) -> Result<Vec<u8>> {
    let mut chosen: BTreeSet<&str> = BTreeSet::new();
    if result.method.is_summary_level() {
        for id in &result.selected_ids {
            chosen.insert(id);
        }
    } else {
        for pair in &result.pairs {
            chosen.insert(&pair.chapter_segment_id);
        }
    }
    let known: BTreeSet<&str> = chapter.segments.iter().map(|s| s.id.as_str()).collect();
    for id in &chosen {
        if !known.contains(id) {
            return Err(Error::InconsistentAlignment(format!(
                "alignment names segment '{id}' which is not in chapter '{}'",
                chapter.doc_id
            )));
        }
    }
    Ok(chapter
        .segments
        .iter()
        .map(|s| u8::from(chosen.contains(s.id.as_str())))
        .collect())
}
