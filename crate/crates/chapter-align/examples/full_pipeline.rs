//! The whole path from raw documents to a scored extract, in one program:
//! weight the chapter, stable-align the label summary, mark per-sentence
//! labels, budget the extract length from the quantile table, assemble the
//! oracle extract, and score it against every reference summary.
//!
//! Run with: cargo run --example full_pipeline

use std::path::Path;

use chapter_align::aligner::{extract_labels, stable_align};
use chapter_align::budgeter::{default_quantiles, oracle_extract, target_length};
use chapter_align::io::read_documents;
use chapter_align::simmetrics::{score_multi_reference, MetricConfig, MetricId, Scorer};
use chapter_align::textcore::default_stopwords;
use chapter_align::weighting::{chapter_weight_table, DEFAULT_ALPHA};

fn main() -> chapter_align::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixtures");
    let stopwords = default_stopwords();
    let chapter = read_documents(
        &fixtures.join("awakening_ch11_chapter.jsonl"),
        true,
        &stopwords,
    )?
    .remove(0);
    let references = read_documents(
        &fixtures.join("awakening_ch11_summaries.jsonl"),
        true,
        &stopwords,
    )?;
    let label_summary = &references[0];

    // 1. chapter-specific word weights
    let table = chapter_weight_table(&chapter, DEFAULT_ALPHA)?;

    // 2. one-to-one alignment under the weighted metric
    let cfg = MetricConfig::new(MetricId::RWtd).with_table(table);
    let alignment = stable_align(label_summary, &chapter, Scorer::new(&cfg), None)?;
    println!(
        "aligned {} of {} summary sentences",
        alignment.pairs.len(),
        label_summary.segments.len()
    );

    // 3. per-sentence oracle labels, in chapter order
    let labels = extract_labels(&alignment, &chapter)?;
    let marked = labels.iter().filter(|&&l| l == 1).count();
    println!("labels mark {marked} of {} chapter sentences", labels.len());

    // 4. extract budget from the chapter's word count
    let budget = target_length(chapter.word_count() as u64, &default_quantiles());
    println!(
        "budget: {} words (bin {})",
        budget.target_words, budget.bin_index
    );

    // 5. budget-cut extract from the alignment
    let extract = oracle_extract(&chapter, label_summary, &alignment, &budget)?;
    println!(
        "extract: {} sentences, {} words\n",
        extract.segments.len(),
        extract.word_count()
    );

    // 6. multi-reference report
    let rows = score_multi_reference(
        &extract,
        &references,
        &[MetricId::R1, MetricId::R2, MetricId::RL, MetricId::Meteor],
        None,
        None,
        Some(&stopwords),
    )?;
    for row in rows.iter().filter(|r| r.reference_id == "mean") {
        println!(
            "{:<8} mean F1 over references: {:.4}",
            row.metric.as_str(),
            row.triple.f1
        );
    }
    Ok(())
}
