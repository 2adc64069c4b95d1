//! Tokenization, normalization, stemming, stop words, n-grams, and longest
//! common subsequence: the text primitives every metric builds on.

pub mod porter;

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};

pub use porter::stem;

/// Bundled English stop-word list (179 words), used when no `--stopwords`
/// file is supplied.
pub const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

/// One token of a segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    /// The surface form exactly as it appeared in the input.
    pub surface: String,
    /// Lowercased surface form.
    pub norm: String,
    /// Stemmed `norm`.
    pub stem: String,
    /// 0-based position within the owning segment.
    pub index: usize,
    /// True when `norm` is in the active stop-word list.
    pub is_stopword: bool,
    /// True when the surface contains no alphanumeric character.
    pub is_punct: bool,
}

impl Token {
    fn new(surface: &str, index: usize, stopwords: &BTreeSet<String>) -> Token {
        let norm = surface.to_lowercase();
        let stem = porter::stem(&norm);
        let is_punct = !surface.chars().any(char::is_alphanumeric);
        let is_stopword = stopwords.contains(&norm);
        Token {
            surface: surface.to_string(),
            norm,
            stem,
            index,
            is_stopword,
            is_punct,
        }
    }
}

/// Whether a segment is an original sentence or a constituent span cut from
/// one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentKind {
    Sentence,
    Constituent,
}

/// A tokenized unit of text — the atom that gets aligned and scored.
#[derive(Clone, Debug)]
pub struct Segment {
    /// Unique within the owning document.
    pub id: String,
    pub kind: SegmentKind,
    pub tokens: Vec<Token>,
    /// Id of the containing sentence; equals `id` when `kind` is
    /// `Sentence`.
    pub source_sentence_id: String,
    /// Optional half-open byte span into the original text.
    pub char_span: Option<(usize, usize)>,
}

impl Segment {
    /// Builds a sentence segment; `source_sentence_id` is set to `id`.
    pub fn sentence(id: impl Into<String>, tokens: Vec<Token>) -> Segment {
        let id = id.into();
        Segment {
            source_sentence_id: id.clone(),
            id,
            kind: SegmentKind::Sentence,
            tokens,
            char_span: None,
        }
    }

    /// Number of non-punctuation tokens.
    pub fn word_count(&self) -> usize {
        self.tokens.iter().filter(|t| !t.is_punct).count()
    }

    /// Surfaces joined by single spaces.
    pub fn text(&self) -> String {
        let parts: Vec<&str> = self.tokens.iter().map(|t| t.surface.as_str()).collect();
        parts.join(" ")
    }

    /// Concatenates `parts` in the given order into one segment with
    /// re-numbered token indices.
    pub fn concat(id: impl Into<String>, parts: &[&Segment]) -> Segment {
        let mut tokens = Vec::new();
        for part in parts {
            for token in &part.tokens {
                let mut token = token.clone();
                token.index = tokens.len();
                tokens.push(token);
            }
        }
        let id = id.into();
        Segment {
            source_sentence_id: id.clone(),
            id,
            kind: SegmentKind::Sentence,
            tokens,
            char_span: None,
        }
    }
}

/// Whether a document is source material or a reference summary of it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Chapter,
    ReferenceSummary,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Chapter => "chapter",
            Role::ReferenceSummary => "reference_summary",
        }
    }

    pub fn parse(s: &str) -> Result<Role> {
        match s {
            "chapter" => Ok(Role::Chapter),
            "reference_summary" => Ok(Role::ReferenceSummary),
            other => Err(Error::invalid(format!("unknown role '{other}'"))),
        }
    }
}

/// An ordered collection of segments with provenance.
#[derive(Clone, Debug)]
pub struct Document {
    pub doc_id: String,
    pub role: Role,
    pub segments: Vec<Segment>,
    /// Provenance tag, e.g. which summary site a reference came from.
    pub source_label: Option<String>,
}

impl Document {
    /// Total non-punctuation tokens across all segments.
    pub fn word_count(&self) -> usize {
        self.segments.iter().map(Segment::word_count).sum()
    }

    pub fn segment_by_id(&self, id: &str) -> Option<&Segment> {
        self.segments.iter().find(|s| s.id == id)
    }

    /// All segments concatenated into one segment, in document order.
    pub fn concat_segment(&self) -> Segment {
        let parts: Vec<&Segment> = self.segments.iter().collect();
        Segment::concat(format!("{}/all", self.doc_id), &parts)
    }
}

/// Splits `text` into tokens. With `pretokenized` the text is split on
/// single spaces and every piece kept verbatim; otherwise the fallback rule
/// splits on whitespace and detaches leading/trailing punctuation
/// characters as their own tokens. `stopwords` fills each token's
/// `is_stopword` flag.
pub fn tokenize(text: &str, pretokenized: bool, stopwords: &BTreeSet<String>) -> Result<Vec<Token>> {
    if text.trim().is_empty() {
        return Err(Error::EmptyText);
    }
    let mut surfaces: Vec<&str> = Vec::new();
    if pretokenized {
        surfaces.extend(text.split(' ').filter(|p| !p.is_empty()));
    } else {
        for piece in text.split_whitespace() {
            let mut core = piece;
            let mut leading: Vec<&str> = Vec::new();
            while let Some(c) = core.chars().next() {
                if c.is_alphanumeric() {
                    break;
                }
                let (head, rest) = core.split_at(c.len_utf8());
                leading.push(head);
                core = rest;
            }
            let mut trailing: Vec<&str> = Vec::new();
            while let Some(c) = core.chars().next_back() {
                if c.is_alphanumeric() {
                    break;
                }
                let (rest, tail) = core.split_at(core.len() - c.len_utf8());
                trailing.push(tail);
                core = rest;
            }
            surfaces.extend(leading);
            if !core.is_empty() {
                surfaces.push(core);
            }
            surfaces.extend(trailing.into_iter().rev());
        }
    }
    Ok(surfaces
        .into_iter()
        .enumerate()
        .map(|(i, s)| Token::new(s, i, stopwords))
        .collect())
}

/// Contiguous n-gram multiset over the chosen token key (stem or norm).
/// Tokens shorter than `n` yield an empty multiset.
pub fn ngrams(tokens: &[Token], n: usize, use_stems: bool) -> Result<BTreeMap<Vec<&str>, usize>> {
    if n < 1 {
        return Err(Error::invalid("n-gram order must be at least 1"));
    }
    let keys: Vec<&str> = tokens
        .iter()
        .map(|t| if use_stems { t.stem.as_str() } else { t.norm.as_str() })
        .collect();
    Ok(ngram_counts(&keys, n))
}

/// N-gram multiset over an already-projected key sequence.
pub fn ngram_counts<'a>(keys: &[&'a str], n: usize) -> BTreeMap<Vec<&'a str>, usize> {
    let mut out: BTreeMap<Vec<&'a str>, usize> = BTreeMap::new();
    if n >= 1 && keys.len() >= n {
        for window in keys.windows(n) {
            *out.entry(window.to_vec()).or_insert(0) += 1;
        }
    }
    out
}

/// One maximum-length common subsequence of `a` and `b`. Ties between
/// equal-length witnesses are broken toward matching the earliest possible
/// positions of `a`.
pub fn lcs<'a>(a: &[&'a str], b: &[&'a str]) -> Vec<&'a str> {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return Vec::new();
    }
    // dp[i][j] = LCS length of the suffixes a[i..], b[j..]
    let mut dp = vec![vec![0u32; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[i][j] = if a[i] == b[j] {
                dp[i + 1][j + 1] + 1
            } else {
                dp[i + 1][j].max(dp[i][j + 1])
            };
        }
    }
    let mut out = Vec::with_capacity(dp[0][0] as usize);
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if a[i] == b[j] {
            out.push(a[i]);
            i += 1;
            j += 1;
        } else if dp[i][j + 1] >= dp[i + 1][j] {
            j += 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Parses stop words from text: one word per line, lowercased and
/// deduplicated; blank lines and lines starting with `#` are skipped.
pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// Loads a stop-word file (see [`parse_stopwords`] for the format).
pub fn load_stopwords(path: &Path) -> Result<BTreeSet<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stopwords(&text))
}

/// The bundled default stop-word set.
pub fn default_stopwords() -> BTreeSet<String> {
    parse_stopwords(DEFAULT_STOPWORDS)
}
