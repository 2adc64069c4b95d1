//! Build a chapter's word-weight table, W(w) = alpha / (alpha + p(w)) over
//! stemmed in-chapter frequencies, and show how it separates rare content
//! words from ubiquitous function words.
//!
//! Run with: cargo run --example weight_table

use std::collections::BTreeSet;
use std::path::Path;

use chapter_align::io::read_documents;
use chapter_align::weighting::{chapter_weight_table, DEFAULT_ALPHA};

fn main() -> chapter_align::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixtures");
    let chapter = read_documents(
        &fixtures.join("awakening_ch11_chapter.jsonl"),
        true,
        &BTreeSet::new(),
    )?
    .remove(0);

    let table = chapter_weight_table(&chapter, DEFAULT_ALPHA)?;
    let mut rows: Vec<(&String, f64)> = table.weights.iter().map(|(k, &w)| (k, w)).collect();
    rows.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(b.0)));

    println!("chapter: {} ({} words)\n", chapter.doc_id, chapter.word_count());
    println!("highest weights (rare within the chapter):");
    for (key, w) in rows.iter().take(5) {
        println!("  {key:<12} W = {w:.6}");
    }
    println!("\nlowest weights (frequent within the chapter):");
    for (key, w) in rows.iter().rev().take(5) {
        println!("  {key:<12} W = {w:.6}");
    }
    println!("\nwords never seen in the chapter get W = {}", table.weight("zeppelin"));
    Ok(())
}
