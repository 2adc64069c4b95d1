//! Corpus data model: chapter/summary pairs, the length and compression
//! filters, book-level split assignment, vocabulary overlap, and
//! descriptive statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::textcore::Document;

/// Which split a pair belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Split {
    Train,
    Dev,
    Test,
    Unassigned,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
            Split::Unassigned => "unassigned",
        }
    }

    pub fn parse(s: &str) -> Result<Split> {
        match s {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            "unassigned" => Ok(Split::Unassigned),
            other => Err(Error::invalid(format!("unknown split '{other}'"))),
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One chapter with one reference summary of it.
#[derive(Clone, Debug)]
pub struct CorpusPair {
    pub book_id: String,
    pub chapter: Document,
    pub summary: Document,
    pub split: Split,
}

impl CorpusPair {
    /// Chapter words per summary word; infinite when the summary has no
    /// words.
    pub fn compression_ratio(&self) -> f64 {
        let summary_wc = self.summary.word_count();
        if summary_wc == 0 {
            return f64::INFINITY;
        }
        self.chapter.word_count() as f64 / summary_wc as f64
    }
}

pub const MAX_CHAPTER_SENTENCES: usize = 700;
pub const MIN_COMPRESSION_RATIO: f64 = 2.0;

/// Why a pair was dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterRule {
    /// Chapter longer than 700 sentences.
    TooLong,
    /// Chapter/summary word ratio under 2.0.
    LowCompression,
}

impl fmt::Display for FilterRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FilterRule::TooLong => "chapter_over_700_sentences",
            FilterRule::LowCompression => "compression_below_2",
        })
    }
}

/// Drops pairs whose chapter exceeds 700 sentences or whose compression
/// ratio is under 2.0 (both boundaries inclusive on the kept side). Each
/// removal carries the first rule that fired.
pub fn filter_pairs(pairs: Vec<CorpusPair>) -> (Vec<CorpusPair>, Vec<(CorpusPair, FilterRule)>) {
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for pair in pairs {
        if pair.chapter.segments.len() > MAX_CHAPTER_SENTENCES {
            removed.push((pair, FilterRule::TooLong));
        } else if pair.compression_ratio() < MIN_COMPRESSION_RATIO {
            removed.push((pair, FilterRule::LowCompression));
        } else {
            kept.push(pair);
        }
    }
    (kept, removed)
}

/// Randomly assigns every BOOK (not pair) to train/dev/test so that no
/// book straddles splits. Book order is canonicalized before shuffling,
/// so the assignment depends only on the book-id set, the ratios, and the
/// seed.
pub fn assign_splits(pairs: &mut [CorpusPair], ratios: (f64, f64, f64), seed: u64) -> Result<()> {
    let (train, dev, test) = ratios;
    if train < 0.0 || dev < 0.0 || test < 0.0 {
        return Err(Error::invalid("split ratios must be non-negative"));
    }
    if (train + dev + test - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "split ratios must sum to 1, got {}",
            train + dev + test
        )));
    }
    let mut books: Vec<&str> = pairs
        .iter()
        .map(|p| p.book_id.as_str())
        .collect::<BTreeSet<&str>>()
        .into_iter()
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    books.shuffle(&mut rng);
    let n = books.len();
    let cut_train = ((n as f64 * train).round() as usize).min(n);
    let cut_dev = ((n as f64 * (train + dev)).round() as usize).clamp(cut_train, n);
    let mut split_of: BTreeMap<&str, Split> = BTreeMap::new();
    for (i, book) in books.iter().enumerate() {
        let split = if i < cut_train {
            Split::Train
        } else if i < cut_dev {
            Split::Dev
        } else {
            Split::Test
        };
        split_of.insert(book, split);
    }
    let split_of: BTreeMap<String, Split> =
        split_of.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    for pair in pairs {
        pair.split = split_of[&pair.book_id];
    }
    Ok(())
}

fn vocabulary(doc: &Document) -> Result<BTreeSet<&str>> {
    let types: BTreeSet<&str> = doc
        .segments
        .iter()
        .flat_map(|s| s.tokens.iter())
        .filter(|t| !t.is_punct)
        .map(|t| t.norm.as_str())
        .collect();
    if types.is_empty() {
        return Err(Error::DegenerateChapter(doc.doc_id.clone()));
    }
    Ok(types)
}

/// The three ways to normalize shared vocabulary size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapVariants {
    /// Shared types over summary types (the headline number).
    pub summary_coverage: f64,
    /// Shared types over chapter types.
    pub chapter_coverage: f64,
    /// Shared types over the union.
    pub jaccard: f64,
}

/// All overlap normalizations at once. Vocabulary is the set of
/// lowercased non-punctuation surface types (no stemming).
pub fn word_overlap_variants(summary: &Document, chapter: &Document) -> Result<OverlapVariants> {
    let sv = vocabulary(summary)?;
    let cv = vocabulary(chapter)?;
    let shared = sv.intersection(&cv).count() as f64;
    let union = sv.union(&cv).count() as f64;
    Ok(OverlapVariants {
        summary_coverage: shared / sv.len() as f64,
        chapter_coverage: shared / cv.len() as f64,
        jaccard: shared / union,
    })
}

/// Fraction of the summary's vocabulary that also occurs in the chapter.
pub fn word_overlap(summary: &Document, chapter: &Document) -> Result<f64> {
    Ok(word_overlap_variants(summary, chapter)?.summary_coverage)
}

/// Mean, sample standard deviation, median, and total of one quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumStats {
    pub count: usize,
    pub mean: f64,
    pub stdev: f64,
    pub median: f64,
    pub total: f64,
}

/// Descriptive statistics of a non-empty sample: mean, sample (n−1)
/// standard deviation (0 for a single value), median (midpoint of the two
/// middle values when even), and sum.
pub fn stats_of(values: &[f64]) -> NumStats {
    let n = values.len();
    assert!(n > 0, "stats_of requires at least one value");
    let total: f64 = values.iter().sum();
    let mean = total / n as f64;
    let stdev = if n == 1 {
        0.0
    } else {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1) as f64).sqrt()
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    NumStats {
        count: n,
        mean,
        stdev,
        median,
        total,
    }
}

/// Word-count and overlap statistics over a set of pairs.
#[derive(Clone, Debug)]
pub struct CorpusStats {
    /// Summary word-count statistics per source label, sorted by label.
    pub summary_by_source: Vec<(String, NumStats)>,
    /// Summary word counts over all pairs.
    pub summaries: NumStats,
    /// Chapter word counts over all pairs.
    pub chapters: NumStats,
    /// Per-pair compression ratios.
    pub compression: NumStats,
    /// Per-pair summary-vocabulary coverage.
    pub overlap: NumStats,
    /// Mean coverage (the headline overlap number).
    pub word_overlap: f64,
}

/// Computes the statistics table for a set of pairs. Pairs whose summary
/// has no source label are grouped under `unknown`.
pub fn corpus_stats(pairs: &[CorpusPair]) -> Result<CorpusStats> {
    if pairs.is_empty() {
        return Err(Error::invalid("no pairs to summarize"));
    }
    let mut by_source: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut summary_wcs = Vec::new();
    let mut chapter_wcs = Vec::new();
    let mut ratios = Vec::new();
    let mut overlaps = Vec::new();
    for pair in pairs {
        let wc = pair.summary.word_count() as f64;
        let source = pair
            .summary
            .source_label
            .clone()
            .unwrap_or_else(|| "unknown".to_string());
        by_source.entry(source).or_default().push(wc);
        summary_wcs.push(wc);
        chapter_wcs.push(pair.chapter.word_count() as f64);
        ratios.push(pair.compression_ratio());
        overlaps.push(word_overlap(&pair.summary, &pair.chapter)?);
    }
    let overlap = stats_of(&overlaps);
    Ok(CorpusStats {
        summary_by_source: by_source
            .into_iter()
            .map(|(source, wcs)| (source, stats_of(&wcs)))
            .collect(),
        summaries: stats_of(&summary_wcs),
        chapters: stats_of(&chapter_wcs),
        compression: stats_of(&ratios),
        overlap,
        word_overlap: overlap.mean,
    })
}

/// Renders the statistics as TSV with columns
/// `source count mean stdev median total`.
pub fn stats_tsv(stats: &CorpusStats) -> String {
    let mut out = String::from("source\tcount\tmean\tstdev\tmedian\ttotal\n");
    let mut row = |name: &str, s: &NumStats| {
        out.push_str(&format!(
            "{name}\t{}\t{:.2}\t{:.2}\t{:.2}\t{:.0}\n",
            s.count, s.mean, s.stdev, s.median, s.total
        ));
    };
    for (source, s) in &stats.summary_by_source {
        row(&format!("summary/{source}"), s);
    }
    row("summary/all", &stats.summaries);
    row("chapter", &stats.chapters);
    row("compression", &stats.compression);
    row("overlap", &stats.overlap);
    out
}
