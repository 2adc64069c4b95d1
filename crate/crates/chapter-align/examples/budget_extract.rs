//! Pick an extract length from the chapter's word count via the bundled
//! compression-ratio quantile table, then build the oracle extract for an
//! alignment: best-scoring aligned chapter sentences, cut to the budget,
//! re-sorted into chapter order.
//!
//! Run with: cargo run --example budget_extract

use std::path::Path;

use chapter_align::aligner::stable_align;
use chapter_align::budgeter::{default_quantiles, oracle_extract, target_length};
use chapter_align::io::read_documents;
use chapter_align::simmetrics::{MetricConfig, MetricId, Scorer};
use chapter_align::textcore::default_stopwords;
use chapter_align::weighting::{chapter_weight_table, DEFAULT_ALPHA};

fn main() -> chapter_align::Result<()> {
    let model = default_quantiles();
    println!("chapter words -> extract budget:");
    for wc in [500u64, 847, 2000, 4122, 9000] {
        let budget = target_length(wc, &model);
        println!(
            "  {wc:>5} words: bin {} (mean ratio {:.2}) -> {} words",
            budget.bin_index,
            model.bins()[budget.bin_index].mean_cr,
            budget.target_words
        );
    }

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
    let summary = &summaries[1];

    let table = chapter_weight_table(&chapter, DEFAULT_ALPHA)?;
    let cfg = MetricConfig::new(MetricId::RWtd).with_table(table);
    let alignment = stable_align(summary, &chapter, Scorer::new(&cfg), None)?;

    let budget = target_length(chapter.word_count() as u64, &model);
    let extract = oracle_extract(&chapter, summary, &alignment, &budget)?;
    println!(
        "\nchapter {} has {} words; budget {} words; extract has {} words in {} sentences:\n",
        chapter.doc_id,
        chapter.word_count(),
        budget.target_words,
        extract.word_count(),
        extract.segments.len()
    );
    for segment in &extract.segments {
        println!("  {}", segment.text());
    }
    Ok(())
}
