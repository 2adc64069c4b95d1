//! File formats: JSONL documents, vectors, alignments, spans, and corpus
//! manifests, plus TSV score tables. All writes go through a temp file in
//! the target directory and an atomic rename, so readers never observe a
//! half-written file.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::aligner::AlignmentResult;
use crate::corpus::{CorpusPair, Split};
use crate::error::{Error, Result};
use crate::segmenter::tree::{parse_bracketed, ParseTree};
use crate::simmetrics::{MultiRefRow, SegmentVectors};
use crate::textcore::{tokenize, Document, Role, Segment};

/// Writes `content` to `path` via a sibling temp file and a rename.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut file = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    file.write_all(content.as_bytes()).map_err(|e| Error::io(path, e))?;
    file.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Reads JSONL records, skipping blank lines; parse failures carry the
/// 1-based line number.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: T = serde_json::from_str(line)
            .map_err(|e| Error::format(path, lineno + 1, e.to_string()))?;
        out.push(record);
    }
    Ok(out)
}

/// Writes records as JSONL, one per line, atomically.
pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut out = String::new();
    for record in records {
        let line = serde_json::to_string(record)
            .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
        out.push_str(&line);
        out.push('\n');
    }
    write_atomic(path, &out)
}

/// One document on disk.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DocRecord {
    pub doc_id: String,
    pub role: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub sentences: Vec<String>,
}

fn document_from_record(
    record: DocRecord,
    pretokenized: bool,
    stopwords: &BTreeSet<String>,
    path: &Path,
    lineno: usize,
) -> Result<Document> {
    let role = Role::parse(&record.role)
        .map_err(|_| Error::format(path, lineno, format!("unknown role '{}'", record.role)))?;
    let mut segments = Vec::with_capacity(record.sentences.len());
    for (i, sentence) in record.sentences.iter().enumerate() {
        let tokens = tokenize(sentence, pretokenized, stopwords).map_err(|e| {
            Error::format(
                path,
                lineno,
                format!("document '{}' sentence {i}: {e}", record.doc_id),
            )
        })?;
        segments.push(Segment::sentence(format!("{}/s{i}", record.doc_id), tokens));
    }
    Ok(Document {
        doc_id: record.doc_id,
        role,
        segments,
        source_label: record.source,
    })
}

/// Reads a documents file (one JSON object per line with `doc_id`,
/// `role`, optional `source`, and `sentences`). Sentence `i` of document
/// `d` becomes segment `d/s<i>`.
pub fn read_documents(
    path: &Path,
    pretokenized: bool,
    stopwords: &BTreeSet<String>,
) -> Result<Vec<Document>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: DocRecord = serde_json::from_str(line)
            .map_err(|e| Error::format(path, lineno + 1, e.to_string()))?;
        out.push(document_from_record(
            record,
            pretokenized,
            stopwords,
            path,
            lineno + 1,
        )?);
    }
    Ok(out)
}

/// Writes documents in the same JSONL shape `read_documents` accepts,
/// with each segment rendered back to space-joined text.
pub fn write_documents(path: &Path, docs: &[Document]) -> Result<()> {
    let records: Vec<DocRecord> = docs
        .iter()
        .map(|doc| DocRecord {
            doc_id: doc.doc_id.clone(),
            role: doc.role.as_str().to_string(),
            source: doc.source_label.clone(),
            sentences: doc.segments.iter().map(Segment::text).collect(),
        })
        .collect();
    write_jsonl(path, &records)
}

/// Reads a tree file: one bracketed tree per line, `#` comments and blank
/// lines skipped. Trees map to sentences by order.
pub fn read_trees(path: &Path) -> Result<Vec<ParseTree>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tree = parse_bracketed(trimmed)
            .map_err(|e| Error::format(path, lineno + 1, e.to_string()))?;
        out.push(tree);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct VectorRecord {
    segment_id: String,
    vector: Vec<f64>,
}

/// Reads segment vectors from JSONL `{"segment_id", "vector"}` records.
/// Ids must be unique and all vectors the same dimension.
pub fn read_vectors(path: &Path) -> Result<SegmentVectors> {
    let records: Vec<VectorRecord> = read_jsonl(path)?;
    let mut map = BTreeMap::new();
    for record in records {
        if map.insert(record.segment_id.clone(), record.vector).is_some() {
            return Err(Error::invalid(format!(
                "{}: duplicate vector for segment '{}'",
                path.display(),
                record.segment_id
            )));
        }
    }
    SegmentVectors::new(map)
}

/// One alignment pair on disk: summary segment, chapter segment, score.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlignmentPairRecord {
    pub s: String,
    pub c: String,
    pub score: f64,
}

/// One chapter/summary alignment on disk.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlignmentRecord {
    pub chapter_id: String,
    pub summary_id: String,
    pub method: String,
    pub metric: String,
    pub pairs: Vec<AlignmentPairRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub selected: Vec<String>,
    pub unmatched: Vec<String>,
    pub labels: Vec<u8>,
}

impl AlignmentRecord {
    /// Flattens an in-memory alignment plus its chapter-order labels.
    pub fn from_result(result: &AlignmentResult, labels: Vec<u8>) -> AlignmentRecord {
        AlignmentRecord {
            chapter_id: result.chapter_id.clone(),
            summary_id: result.summary_id.clone(),
            method: result.method.as_str().to_string(),
            metric: result.metric_id.as_str().to_string(),
            pairs: result
                .pairs
                .iter()
                .map(|p| AlignmentPairRecord {
                    s: p.summary_segment_id.clone(),
                    c: p.chapter_segment_id.clone(),
                    score: p.score,
                })
                .collect(),
            selected: result.selected_ids.clone(),
            unmatched: result.unmatched_summary_ids.clone(),
            labels,
        }
    }
}

pub fn write_alignments(path: &Path, records: &[AlignmentRecord]) -> Result<()> {
    write_jsonl(path, records)
}

pub fn read_alignments(path: &Path) -> Result<Vec<AlignmentRecord>> {
    read_jsonl(path)
}

/// One constituent span on disk; `start`/`end` are a half-open token
/// range within the sentence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpanEntry {
    pub start: usize,
    pub end: usize,
    pub text: String,
}

/// All constituent spans of one sentence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpanRecord {
    pub sentence_id: String,
    pub spans: Vec<SpanEntry>,
}

pub fn write_spans(path: &Path, records: &[SpanRecord]) -> Result<()> {
    write_jsonl(path, records)
}

/// Renders multi-reference score rows as TSV.
pub fn scores_tsv(rows: &[MultiRefRow]) -> String {
    let mut out = String::from("metric\treference_id\tprecision\trecall\tf1\n");
    for row in rows {
        out.push_str(&format!(
            "{}\t{}\t{:.6}\t{:.6}\t{:.6}\n",
            row.metric, row.reference_id, row.triple.precision, row.triple.recall, row.triple.f1
        ));
    }
    out
}

/// One corpus pair in a manifest: where its chapter and summary files
/// live (relative paths resolve against the manifest's directory).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub book_id: String,
    pub chapter_file: String,
    pub summary_file: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<String>,
}

/// A manifest record together with the loaded pair.
#[derive(Clone, Debug)]
pub struct LoadedPair {
    pub record: ManifestRecord,
    pub pair: CorpusPair,
}

fn resolve(base: &Path, file: &str) -> PathBuf {
    let p = Path::new(file);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn single_role(docs: Vec<Document>, role: Role, path: &Path) -> Result<Document> {
    docs.into_iter().find(|d| d.role == role).ok_or_else(|| {
        Error::invalid(format!(
            "{}: no document with role '{}'",
            path.display(),
            role.as_str()
        ))
    })
}

/// Loads every pair a manifest names. A summary without its own `source`
/// field inherits the manifest record's.
pub fn load_corpus(
    manifest_path: &Path,
    pretokenized: bool,
    stopwords: &BTreeSet<String>,
) -> Result<Vec<LoadedPair>> {
    let records: Vec<ManifestRecord> = read_jsonl(manifest_path)?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mut out = Vec::with_capacity(records.len());
    for record in records {
        let chapter_path = resolve(base, &record.chapter_file);
        let summary_path = resolve(base, &record.summary_file);
        let chapter = single_role(
            read_documents(&chapter_path, pretokenized, stopwords)?,
            Role::Chapter,
            &chapter_path,
        )?;
        let mut summary = single_role(
            read_documents(&summary_path, pretokenized, stopwords)?,
            Role::ReferenceSummary,
            &summary_path,
        )?;
        if summary.source_label.is_none() {
            summary.source_label = record.source.clone();
        }
        let split = match &record.split {
            Some(s) => Split::parse(s)?,
            None => Split::Unassigned,
        };
        let pair = CorpusPair {
            book_id: record.book_id.clone(),
            chapter,
            summary,
            split,
        };
        out.push(LoadedPair { record, pair });
    }
    Ok(out)
}

pub fn write_manifest(path: &Path, records: &[ManifestRecord]) -> Result<()> {
    write_jsonl(path, records)
}
