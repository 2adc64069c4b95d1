//! Score one generated extract against several reference summaries at once.
//! Every metric gets a row per reference plus two aggregates: the
//! componentwise mean (the headline number) and the best reference by F1.
//!
//! Run with: cargo run --example score_multi_reference

use std::path::Path;

use chapter_align::aligner::stable_align;
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

    // build an extract driven by the first reference, then judge it
    // against all three
    let table = chapter_weight_table(&chapter, DEFAULT_ALPHA)?;
    let cfg = MetricConfig::new(MetricId::RWtd).with_table(table);
    let alignment = stable_align(&references[0], &chapter, Scorer::new(&cfg), None)?;
    let budget = target_length(chapter.word_count() as u64, &default_quantiles());
    let extract = oracle_extract(&chapter, &references[0], &alignment, &budget)?;

    let rows = score_multi_reference(
        &extract,
        &references,
        &[MetricId::R1, MetricId::R2, MetricId::RL, MetricId::Meteor],
        None,
        None,
        Some(&stopwords),
    )?;

    println!(
        "extract ({} words) vs {} references\n",
        extract.word_count(),
        references.len()
    );
    println!("{:<8} {:<28} {:>8} {:>8} {:>8}", "metric", "reference", "P", "R", "F1");
    for row in &rows {
        println!(
            "{:<8} {:<28} {:>8.4} {:>8.4} {:>8.4}",
            row.metric.as_str(),
            row.reference_id,
            row.triple.precision,
            row.triple.recall,
            row.triple.f1
        );
    }
    Ok(())
}
