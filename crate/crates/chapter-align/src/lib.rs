//! Alignment of abstractive reference summaries to book chapters.
//!
//! The library turns a chapter and its reference summaries into training
//! and evaluation artifacts for extractive summarization:
//!
//! - [`textcore`] — tokenization, Porter stemming, n-grams, longest
//!   common subsequence, and the document/segment model.
//! - [`weighting`] — smooth-inverse-frequency word weights estimated per
//!   chapter.
//! - [`simmetrics`] — ROUGE-1/2/L (plain and weight-carrying), a
//!   unigram-alignment METEOR, cosine over precomputed segment vectors,
//!   and composite metrics over them.
//! - [`aligner`] — greedy and stable one-to-one matching of summary
//!   sentences to chapter segments, plus summary-level greedy selection,
//!   yielding binary saliency labels.
//! - [`segmenter`] — clause-like constituent spans extracted from
//!   bracketed parse trees.
//! - [`budgeter`] — compression-ratio quantile tables, word budgets, and
//!   oracle extract assembly.
//! - [`corpus`] — pair filtering, book-level splits, vocabulary overlap,
//!   and corpus statistics.
//! - [`io`] / [`pipeline`] — the file formats and the subcommand
//!   implementations behind the `chapter-align` binary.
//!
//! Everything is deterministic: ordered maps in all scoring paths, a
//! seeded RNG for splits, and input-ordered output regardless of the
//! worker-thread count.

pub mod aligner;
pub mod budgeter;
pub mod corpus;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod segmenter;
pub mod simmetrics;
pub mod textcore;
pub mod weighting;

pub use error::{Error, Result};
