//! Splitting sentences into constituent segments using their constituency
//! parses, so alignment and extraction can operate below the sentence
//! level.
//!
//! The pass walks each parse top-down collecting clause-like subtrees
//! (S/SBAR/VP nodes with both an NP and a VP child, widened to the
//! enclosing clause, plus WH-relative clauses), cuts them out of the tree
//! in collection order, splits what is left into contiguous runs,
//! re-attaches punctuation to the span holding the nearest preceding word,
//! and finally merges spans shorter than a word-count floor into a
//! neighbor.

pub mod tree;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::textcore::{Document, Segment, SegmentKind, Token};
use tree::ParseTree;

/// Default minimum constituent length in words.
pub const DEFAULT_MIN_CONST_LEN: usize = 5;

const CLAUSE_LABELS: [&str; 3] = ["SBAR", "S", "VP"];
const WH_LABELS: [&str; 3] = ["WHNP", "WHADVP", "WHPP"];

/// One constituent span of a sentence: the token indices it covers
/// (sorted, always a contiguous run) and their surfaces joined by spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstituentSpan {
    pub indices: Vec<usize>,
    pub text: String,
}

fn is_punct_word(word: &str) -> bool {
    !word.chars().any(char::is_alphanumeric)
}

fn sorted_word_indices(tree: &ParseTree, node: usize) -> Vec<usize> {
    let mut indices: Vec<usize> = tree
        .leaves(node)
        .into_iter()
        .map(|leaf| tree.word_index(leaf).unwrap())
        .collect();
    indices.sort_unstable();
    indices
}

/// True for `(SBAR (WHNP ...) ...)` and the WHADVP/WHPP variants.
fn is_relative_clause(tree: &ParseTree, node: usize) -> bool {
    tree.label(node) == "SBAR"
        && tree.children(node).first().is_some_and(|&first| {
            !tree.is_leaf(first) && WH_LABELS.contains(&tree.label(first))
        })
}

/// From a clause-core node, widens to the outermost enclosing S/SBAR/VP
/// chain, stopping early at an S/SBAR that has neither an NP nor a VP
/// child of its own.
fn widen_to_clause(tree: &ParseTree, node: usize, root: usize) -> usize {
    let mut stag = node;
    while let Some(parent) = tree.parent(stag) {
        if parent == root || !CLAUSE_LABELS.contains(&tree.label(parent)) {
            break;
        }
        stag = parent;
        if tree.label(stag) == "S" || tree.label(stag) == "SBAR" {
            let labels = tree.internal_child_labels(stag);
            if !labels.contains(&"NP") && !labels.contains(&"VP") {
                break;
            }
        }
    }
    stag
}

/// Cuts one parsed sentence into constituent spans. Every token index of
/// the sentence (punctuation included) lands in exactly one span; spans
/// shorter than `min_len` words are merged into their left neighbor (the
/// first span merges right). A sentence with no word tokens at all becomes
/// a single span.
pub fn constituent_segments(parse: &ParseTree, min_len: usize) -> Vec<ConstituentSpan> {
    let words: Vec<String> = parse.leaf_surfaces().iter().map(|w| w.to_string()).collect();
    let mut work = parse.clone();
    let root = work.root();

    // drop punctuation leaves, pruning ancestors that become empty
    let mut punct_indices = Vec::new();
    for leaf in work.leaves(root) {
        if !is_punct_word(work.token(leaf).unwrap()) {
            continue;
        }
        punct_indices.push(work.word_index(leaf).unwrap());
        let mut n = leaf;
        while let Some(p) = work.parent(n) {
            work.detach(n);
            if !work.children(p).is_empty() {
                break;
            }
            n = p;
        }
    }

    // rank of each surviving word among the survivors; contiguity below
    // means adjacency in this punctuation-free sequence
    let stripped = sorted_word_indices(&work, root);
    let strip_pos: BTreeMap<usize, usize> =
        stripped.iter().enumerate().map(|(k, &orig)| (orig, k)).collect();

    // collect clause subtrees in pre-order (the root itself is never cut)
    let mut collected: Vec<usize> = Vec::new();
    for node in work.internal_descendants(root) {
        let target = if is_relative_clause(&work, node) {
            Some(node)
        } else {
            let labels = work.internal_child_labels(node);
            if labels.contains(&"NP") && labels.contains(&"VP") {
                Some(widen_to_clause(&work, node, root))
            } else {
                None
            }
        };
        if let Some(t) = target {
            if !collected.contains(&t) {
                collected.push(t);
            }
        }
    }

    // cut the collected subtrees out in order; a coordinating conjunction
    // directly before a cut subtree becomes its own span
    let mut word_lists: Vec<Vec<usize>> = Vec::new();
    for node in collected {
        if !work.is_attached(node) {
            continue; // an earlier cut already removed it
        }
        let node_words = sorted_word_indices(&work, node);
        if node_words.is_empty() {
            work.detach(node);
            continue;
        }
        if let Some(parent) = work.parent(node) {
            let pos = work.children(parent).iter().position(|&c| c == node).unwrap();
            let conjunctions: Vec<usize> = work.children(parent)[..pos]
                .iter()
                .filter(|&&c| !work.is_leaf(c) && work.label(c) == "CC")
                .copied()
                .collect();
            for cc in conjunctions {
                let cc_words = sorted_word_indices(&work, cc);
                if !cc_words.is_empty() {
                    word_lists.push(cc_words);
                }
                work.detach(cc);
            }
        }
        word_lists.push(node_words);
        work.detach(node);
    }
    let leftover = sorted_word_indices(&work, root);
    if !leftover.is_empty() {
        word_lists.push(leftover);
    }

    // split lists that are noncontiguous among the surviving words
    let mut spans: Vec<Vec<usize>> = Vec::new();
    for list in word_lists {
        let mut run = vec![list[0]];
        for pair in list.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if strip_pos[&b] == strip_pos[&a] + 1 {
                run.push(b);
            } else {
                spans.push(std::mem::replace(&mut run, vec![b]));
            }
        }
        spans.push(run);
    }
    spans.sort_by_key(|span| span[0]);

    // give each punctuation mark to the span holding the nearest word
    // before it; marks before any word go to the first span
    if spans.is_empty() {
        if punct_indices.is_empty() {
            return Vec::new();
        }
        spans.push(punct_indices.clone());
    } else {
        let word_spans = spans.clone();
        for &p in &punct_indices {
            let mut best: Option<(usize, usize)> = None; // (word index, span)
            for (k, span) in word_spans.iter().enumerate() {
                for &w in span {
                    if w < p && best.is_none_or(|(bw, _)| w > bw) {
                        best = Some((w, k));
                    }
                }
            }
            spans[best.map_or(0, |(_, k)| k)].push(p);
        }
        for span in &mut spans {
            span.sort_unstable();
        }
    }

    // merge under-length spans into a neighbor until every span passes
    let word_count =
        |span: &Vec<usize>| span.iter().filter(|&&i| !is_punct_word(&words[i])).count();
    while spans.len() > 1 {
        let Some(k) = spans.iter().position(|span| word_count(span) < min_len) else {
            break;
        };
        if k == 0 {
            let head = spans.remove(0);
            spans[0].extend(head);
            spans[0].sort_unstable();
        } else {
            let short = spans.remove(k);
            spans[k - 1].extend(short);
            spans[k - 1].sort_unstable();
        }
    }

    spans
        .into_iter()
        .map(|indices| {
            let text = indices
                .iter()
                .map(|&i| words[i].as_str())
                .collect::<Vec<_>>()
                .join(" ");
            ConstituentSpan { indices, text }
        })
        .collect()
}

/// Re-segments a sentence-level document into constituent segments. Each
/// sentence id must appear in `trees`, and the parse's words must match
/// the sentence's tokens one for one. Constituent ids append `c<j>` to the
/// sentence id.
pub fn segment_document(
    chapter: &Document,
    trees: &BTreeMap<String, ParseTree>,
    min_len: usize,
) -> Result<Document> {
    let mut segments = Vec::new();
    for sentence in &chapter.segments {
        let parse = trees
            .get(&sentence.id)
            .ok_or_else(|| Error::MissingParse(sentence.id.clone()))?;
        let surfaces = parse.leaf_surfaces();
        if surfaces.len() != sentence.tokens.len() {
            return Err(Error::invalid(format!(
                "parse for '{}' has {} words but the sentence has {} tokens",
                sentence.id,
                surfaces.len(),
                sentence.tokens.len()
            )));
        }
        for (word, token) in surfaces.iter().zip(&sentence.tokens) {
            if *word != token.surface {
                return Err(Error::invalid(format!(
                    "parse for '{}' disagrees with the sentence at token {}: '{}' vs '{}'",
                    sentence.id, token.index, word, token.surface
                )));
            }
        }
        for (j, span) in constituent_segments(parse, min_len).into_iter().enumerate() {
            let tokens: Vec<Token> = span
                .indices
                .iter()
                .enumerate()
                .map(|(i, &w)| {
                    let mut token = sentence.tokens[w].clone();
                    token.index = i;
                    token
                })
                .collect();
            segments.push(Segment {
                id: format!("{}c{}", sentence.id, j),
                kind: SegmentKind::Constituent,
                tokens,
                source_sentence_id: sentence.id.clone(),
                char_span: None,
            });
        }
    }
    Ok(Document {
        doc_id: chapter.doc_id.clone(),
        role: chapter.role,
        segments,
        source_label: chapter.source_label.clone(),
    })
}
