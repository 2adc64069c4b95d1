//! Exercise the corpus utilities on a small synthetic collection: filter
//! out over-long and under-compressed pairs, compute descriptive stats,
//! and split books into train/val/test so no book straddles two splits.
//!
//! Run with: cargo run --example corpus_stats

use std::collections::BTreeSet;

use chapter_align::corpus::{assign_splits, corpus_stats, filter_pairs, CorpusPair};
use chapter_align::textcore::{tokenize, Document, Role, Segment};

fn doc(id: &str, role: Role, sentences: &[&str]) -> Document {
    let segments = sentences
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Segment::sentence(
                format!("{id}/s{i}"),
                tokenize(s, true, &BTreeSet::new()).unwrap(),
            )
        })
        .collect();
    Document {
        doc_id: id.to_string(),
        role,
        segments,
        source_label: None,
    }
}

fn pair(book: &str, chapter_sents: &[&str], summary_sents: &[&str]) -> CorpusPair {
    CorpusPair {
        book_id: book.to_string(),
        chapter: doc(&format!("{book}_ch"), Role::Chapter, chapter_sents),
        summary: doc(
            &format!("{book}_ch_summary"),
            Role::ReferenceSummary,
            summary_sents,
        ),
        split: chapter_align::corpus::Split::Unassigned,
    }
}

fn main() -> chapter_align::Result<()> {
    let long_chapter: Vec<String> = (0..80)
        .map(|i| format!("The captain counted wave number {i} from the deck ."))
        .collect();
    let long_refs: Vec<&str> = long_chapter.iter().map(String::as_str).collect();

    let mut pairs = vec![
        pair("moby", &long_refs, &["The captain counted waves ."]),
        pair(
            "verne",
            &long_refs[..40],
            &["The captain counted many waves from the deck ."],
        ),
        // a pair whose summary is nearly as long as its chapter
        pair(
            "short",
            &["The storm passed over the bay ."],
            &["A storm passed over the bay quickly ."],
        ),
    ];
    for i in 0..6 {
        pairs.push(pair(
            &format!("book{i}"),
            &long_refs[..(10 + 4 * i)],
            &["Sailors watched the sea ."],
        ));
    }

    let total = pairs.len();
    let (kept, removed) = filter_pairs(pairs);
    println!("filtered {total} pairs down to {}:", kept.len());
    for (pair, rule) in &removed {
        println!("  dropped {}: {rule}", pair.book_id);
    }

    let stats = corpus_stats(&kept)?;
    println!(
        "\nchapter words: mean {:.1}, median {:.1}, stdev {:.1}",
        stats.chapters.mean, stats.chapters.median, stats.chapters.stdev
    );
    println!(
        "compression ratio: mean {:.1}, median {:.1}; summary vocabulary coverage {:.3}",
        stats.compression.mean, stats.compression.median, stats.word_overlap
    );

    let mut kept = kept;
    assign_splits(&mut kept, (0.6, 0.2, 0.2), 7)?;
    println!("\nsplits (book-atomic, seeded):");
    for pair in &kept {
        println!("  {:<8} {}", pair.book_id, pair.split.as_str());
    }
    Ok(())
}
