//! Align a reference summary with its chapter twice — greedy per-sentence
//! argmax vs one-to-one stable matching — and show where the two disagree.
//! Greedy lets several summary sentences claim the same chapter sentence;
//! stable matching forces them apart.
//!
//! Run with: cargo run --example align_stable

use std::path::Path;

use chapter_align::aligner::{greedy_sentence_align, stable_align, AlignmentResult};
use chapter_align::io::read_documents;
use chapter_align::simmetrics::{MetricConfig, MetricId, Scorer};
use chapter_align::textcore::{default_stopwords, Document};
use chapter_align::weighting::{chapter_weight_table, DEFAULT_ALPHA};

fn show(tag: &str, result: &AlignmentResult, chapter: &Document) {
    println!("{tag}:");
    for pair in &result.pairs {
        let text = chapter
            .segment_by_id(&pair.chapter_segment_id)
            .map(|s| s.text())
            .unwrap_or_default();
        let text: String = text.chars().take(60).collect();
        println!(
            "  {} -> {}  ({:.4})  {text}",
            pair.summary_segment_id, pair.chapter_segment_id, pair.score
        );
    }
    for id in &result.unmatched_summary_ids {
        println!("  {id} -> (unmatched)");
    }
    println!();
}

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
    let summary = &summaries[0];

    let table = chapter_weight_table(&chapter, DEFAULT_ALPHA)?;
    let cfg = MetricConfig::new(MetricId::RWtd).with_table(table);
    let scorer = Scorer::new(&cfg);

    let greedy = greedy_sentence_align(summary, &chapter, scorer, None)?;
    let stable = stable_align(summary, &chapter, scorer, None)?;

    println!(
        "summary {} ({} sentences) vs chapter {} ({} sentences)\n",
        summary.doc_id,
        summary.segments.len(),
        chapter.doc_id,
        chapter.segments.len()
    );
    show("greedy", &greedy, &chapter);
    show("stable", &stable, &chapter);

    let moved = greedy
        .pairs
        .iter()
        .zip(&stable.pairs)
        .filter(|(g, s)| g.chapter_segment_id != s.chapter_segment_id)
        .count();
    println!("pairs that moved between the two methods: {moved}");
    Ok(())
}
