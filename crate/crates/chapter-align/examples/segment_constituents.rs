//! Split chapter sentences into constituent spans using their bracketed
//! parse trees: noun-phrase/verb-phrase pairs and relative clauses become
//! standalone spans, anything shorter than the minimum length merges into
//! a neighbor, and every token lands in exactly one span.
//!
//! Run with: cargo run --example segment_constituents

use std::collections::BTreeSet;
use std::path::Path;

use chapter_align::io::{read_documents, read_trees};
use chapter_align::segmenter::constituent_segments;

fn main() -> chapter_align::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixtures");
    let chapter = read_documents(
        &fixtures.join("awakening_ch11_chapter.jsonl"),
        true,
        &BTreeSet::new(),
    )?
    .remove(0);
    let trees = read_trees(&fixtures.join("awakening_ch11_trees.txt"))?;

    for min_len in [2, 5] {
        println!("=== min span length {min_len} ===");
        for index in [1usize, 32, 43] {
            let sentence = &chapter.segments[index];
            println!("\n{}", sentence.text());
            for span in constituent_segments(&trees[index], min_len) {
                println!("  | {}", span.text);
            }
        }
        println!();
    }

    let total: usize = trees
        .iter()
        .map(|t| constituent_segments(t, 5).len())
        .sum();
    println!(
        "{} sentences became {} spans at min length 5",
        chapter.segments.len(),
        total
    );
    Ok(())
}
