//! The two summary-level alignment methods grow a set of chapter sentences
//! scored as one concatenation against the whole summary. The word-limited
//! variant stops at the summary's length; the score-maximizing variant
//! stops when no sentence improves the score. Compare their selections.
//!
//! Run with: cargo run --example summary_level_methods

use std::path::Path;

use chapter_align::aligner::{summary_level_align, Method};
use chapter_align::io::read_documents;
use chapter_align::simmetrics::{MetricConfig, MetricId, Scorer};
use chapter_align::textcore::default_stopwords;

fn main() -> chapter_align::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixtures");
    let stopwords = default_stopwords();
    let chapter = read_documents(
        &fixtures.join("awakening_ch11_chapter.jsonl"),
        true,
        &stopwords,
    )?
    .remove(0);
    let summaries = read_documents(
        &fixtures.join("awakening_ch11_summaries.jsonl"),
        true,
        &stopwords,
    )?;
    let summary = &summaries[2];

    let cfg = MetricConfig::new(MetricId::R2);
    let scorer = Scorer::new(&cfg);

    for (tag, method) in [("word-limited", Method::SummaryWl), ("score-stop", Method::SummaryWs)] {
        let result = summary_level_align(summary, &chapter, scorer, method)?;
        let words: usize = result
            .selected_ids
            .iter()
            .map(|id| chapter.segment_by_id(id).unwrap().word_count())
            .sum();
        println!(
            "{tag}: {} sentences, {} words (summary has {}),",
            result.selected_ids.len(),
            words,
            summary.word_count()
        );
        println!("  selection order: {}\n", result.selected_ids.join(", "));
    }
    Ok(())
}
