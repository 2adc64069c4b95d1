//! Score one candidate/reference sentence pair under every overlap metric
//! the crate offers and print the precision / recall / F1 triples side by
//! side, including the SIF-weighted variants driven by a chapter table.
//!
//! Run with: cargo run --example score_metrics

use std::path::Path;

use chapter_align::io::read_documents;
use chapter_align::simmetrics::{MetricConfig, MetricId, Scorer};
use chapter_align::textcore::{default_stopwords, tokenize, Segment};
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
    let table = chapter_weight_table(&chapter, DEFAULT_ALPHA)?;

    let cand = Segment::sentence(
        "ex/cand",
        tokenize(
            "Edna remains outside in the hammock and refuses to come in .",
            true,
            &stopwords,
        )?,
    );
    let refr = Segment::sentence(
        "ex/ref",
        tokenize(
            "Edna , still in the hammock , refused to go inside .",
            true,
            &stopwords,
        )?,
    );

    println!("candidate: {}", cand.text());
    println!("reference: {}\n", refr.text());
    println!("{:<12} {:>9} {:>9} {:>9}", "metric", "P", "R", "F1");
    for metric in [
        MetricId::R1,
        MetricId::R2,
        MetricId::RL,
        MetricId::R1StopStem,
        MetricId::RWtd,
        MetricId::Rm,
        MetricId::RmWtd,
        MetricId::Meteor,
    ] {
        let mut cfg = MetricConfig::new(metric);
        if metric.is_weighted() {
            cfg = cfg.with_table(table.clone());
        }
        if metric == MetricId::R1StopStem {
            cfg = cfg.with_stopwords(stopwords.clone());
        }
        let triple = Scorer::new(&cfg).triple(&cand, &refr)?;
        println!(
            "{:<12} {:>9.4} {:>9.4} {:>9.4}",
            metric.as_str(),
            triple.precision,
            triple.recall,
            triple.f1
        );
    }
    Ok(())
}
