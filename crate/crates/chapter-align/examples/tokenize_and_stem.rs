//! Tokenize a sentence and inspect what each token carries: surface form,
//! lowercased norm, Porter stem, and the stop-word / punctuation flags that
//! downstream metrics use to include or drop it.
//!
//! Run with: cargo run --example tokenize_and_stem

use chapter_align::textcore::{default_stopwords, tokenize};

fn main() -> chapter_align::Result<()> {
    let stopwords = default_stopwords();
    let text = "She was seeking herself and finding herself in just such \
                sweet , half-darkness .";

    let tokens = tokenize(text, true, &stopwords)?;
    println!("{:<16} {:<16} {:<12} {:>5} {:>6}", "surface", "norm", "stem", "stop", "punct");
    for t in &tokens {
        println!(
            "{:<16} {:<16} {:<12} {:>5} {:>6}",
            t.surface, t.norm, t.stem, t.is_stopword, t.is_punct
        );
    }

    let content: Vec<&str> = tokens
        .iter()
        .filter(|t| !t.is_stopword && !t.is_punct)
        .map(|t| t.stem.as_str())
        .collect();
    println!("\ncontent stems: {}", content.join(" "));
    Ok(())
}
