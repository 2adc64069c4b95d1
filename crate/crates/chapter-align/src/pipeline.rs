//! Command implementations behind the binary. Each `cmd_*` function takes
//! parsed options, runs the corresponding library operations, and writes
//! its outputs atomically. Errors split into usage (bad flags or inputs,
//! exit 2) and processing (failures during the work, exit 1); per-pair
//! failures are logged to stderr and surface as a final processing error
//! so partial output still lands.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::aligner::{self, extract_labels, Method};
use crate::budgeter::{
    assemble_extract, default_quantiles, fit_quantiles, load_quantiles, oracle_extract,
    quantile_tsv, target_length, QuantileModel,
};
use crate::corpus::{assign_splits, corpus_stats, filter_pairs, stats_tsv, CorpusPair};
use crate::error::{Error, Result};
use crate::io::{
    load_corpus, read_documents, read_trees, read_vectors, scores_tsv, write_alignments,
    write_atomic, write_documents, write_manifest, write_spans, AlignmentRecord, SpanEntry,
    SpanRecord,
};
use crate::segmenter::{constituent_segments, segment_document, tree::ParseTree};
use crate::simmetrics::{
    score_multi_reference, MetricConfig, MetricId, MultiRefRow, Scorer, SegmentVectors,
    SynonymLexicon,
};
use crate::textcore::{default_stopwords, load_stopwords, Document, Role};
use crate::weighting::{
    chapter_weight_table, key_counts, weight_dump_tsv, KeyMode, WeightTable, DEFAULT_ALPHA,
};

/// Metrics every pipeline extract is scored with against all references.
const REPORT_METRICS: [MetricId; 4] =
    [MetricId::R1, MetricId::R2, MetricId::RL, MetricId::Meteor];

/// A command failure tagged with which exit code it maps to.
#[derive(Debug)]
pub enum CmdError {
    /// Bad flags or unreadable/invalid inputs; exit code 2.
    Usage(Error),
    /// Failure while doing or writing the work; exit code 1.
    Processing(Error),
}

impl CmdError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CmdError::Usage(_) => 2,
            CmdError::Processing(_) => 1,
        }
    }
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Usage(e) => write!(f, "{e}"),
            CmdError::Processing(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CmdError {}

pub type CmdResult<T> = std::result::Result<T, CmdError>;

fn usage(e: Error) -> CmdError {
    CmdError::Usage(e)
}

fn processing(e: Error) -> CmdError {
    CmdError::Processing(e)
}

/// Options shared by every subcommand.
#[derive(Clone, Debug)]
pub struct CommonOpts {
    pub stopwords: Option<PathBuf>,
    pub synonyms: Option<PathBuf>,
    pub vectors: Option<PathBuf>,
    pub alpha: f64,
    /// Worker threads; 0 means one per core.
    pub jobs: usize,
    /// When set, sentences are split on single spaces instead of running
    /// the fallback tokenizer.
    pub pretokenized: bool,
}

impl Default for CommonOpts {
    fn default() -> CommonOpts {
        CommonOpts {
            stopwords: None,
            synonyms: None,
            vectors: None,
            alpha: DEFAULT_ALPHA,
            jobs: 1,
            pretokenized: true,
        }
    }
}

struct Resources {
    stopwords: BTreeSet<String>,
    synonyms: Option<SynonymLexicon>,
    vectors: Option<SegmentVectors>,
}

fn load_resources(opts: &CommonOpts) -> CmdResult<Resources> {
    let stopwords = match &opts.stopwords {
        Some(path) => load_stopwords(path).map_err(usage)?,
        None => default_stopwords(),
    };
    let synonyms = match &opts.synonyms {
        Some(path) => Some(SynonymLexicon::load(path).map_err(usage)?),
        None => None,
    };
    let vectors = match &opts.vectors {
        Some(path) => Some(read_vectors(path).map_err(usage)?),
        None => None,
    };
    Ok(Resources {
        stopwords,
        synonyms,
        vectors,
    })
}

fn build_scorer<'a>(cfg: &'a MetricConfig, res: &'a Resources) -> Scorer<'a> {
    let mut scorer = Scorer::new(cfg);
    if let Some(syn) = res.synonyms.as_ref() {
        scorer = scorer.with_synonyms(syn);
    }
    if let Some(vecs) = res.vectors.as_ref() {
        scorer = scorer.with_vectors(vecs);
    }
    scorer
}

fn metric_config(
    metric: MetricId,
    table: Option<&WeightTable>,
    stopwords: &BTreeSet<String>,
) -> Result<MetricConfig> {
    let mut cfg = MetricConfig::new(metric);
    if metric.is_weighted() {
        let table = table.ok_or_else(|| {
            Error::invalid(format!("metric '{metric}' needs a chapter weight table"))
        })?;
        cfg = cfg.with_table(table.clone());
    }
    if metric == MetricId::R1StopStem {
        cfg = cfg.with_stopwords(stopwords.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn with_pool<T: Send>(jobs: usize, work: impl FnOnce() -> T + Send) -> CmdResult<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if jobs > 0 {
        builder = builder.num_threads(jobs);
    }
    let pool = builder
        .build()
        .map_err(|e| processing(Error::invalid(format!("thread pool: {e}"))))?;
    Ok(pool.install(work))
}

fn emit(out: Option<&Path>, content: &str) -> CmdResult<()> {
    match out {
        Some(path) => write_atomic(path, content).map_err(processing),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Pairs each reference summary with the chapter whose doc_id is the
/// longest prefix of the summary's; a lone chapter adopts everything.
/// Returns `(summary_index, chapter_index)` in summary input order.
fn pair_documents(docs: &[Document]) -> Result<Vec<(usize, usize)>> {
    let mut seen = BTreeSet::new();
    for doc in docs {
        if !seen.insert(doc.doc_id.as_str()) {
            return Err(Error::invalid(format!("duplicate doc_id '{}'", doc.doc_id)));
        }
    }
    let chapters: Vec<usize> = docs
        .iter()
        .enumerate()
        .filter(|(_, d)| d.role == Role::Chapter)
        .map(|(i, _)| i)
        .collect();
    let summaries: Vec<usize> = docs
        .iter()
        .enumerate()
        .filter(|(_, d)| d.role == Role::ReferenceSummary)
        .map(|(i, _)| i)
        .collect();
    if chapters.is_empty() {
        return Err(Error::invalid("no chapter documents in input"));
    }
    if summaries.is_empty() {
        return Err(Error::invalid("no reference summaries in input"));
    }
    let mut out = Vec::with_capacity(summaries.len());
    for &si in &summaries {
        let sid = &docs[si].doc_id;
        let matched = chapters
            .iter()
            .copied()
            .filter(|&ci| sid.starts_with(&docs[ci].doc_id))
            .max_by_key(|&ci| docs[ci].doc_id.len());
        let ci = match matched {
            Some(ci) => ci,
            None if chapters.len() == 1 => chapters[0],
            None => {
                return Err(Error::invalid(format!(
                    "cannot pair summary '{sid}': no chapter doc_id prefixes it"
                )))
            }
        };
        out.push((si, ci));
    }
    Ok(out)
}

/// Groups summary/chapter pairs by chapter, in chapter input order.
fn group_by_chapter(pairs: &[(usize, usize)]) -> Vec<(usize, Vec<usize>)> {
    let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(si, ci) in pairs {
        map.entry(ci).or_default().push(si);
    }
    map.into_iter().collect()
}

fn weight_tables_for(
    docs: &[Document],
    chapter_indices: &BTreeSet<usize>,
    metric: MetricId,
    alpha: f64,
) -> Result<BTreeMap<usize, WeightTable>> {
    let mut tables = BTreeMap::new();
    if metric.is_weighted() {
        for &ci in chapter_indices {
            tables.insert(ci, chapter_weight_table(&docs[ci], alpha)?);
        }
    }
    Ok(tables)
}

#[derive(Clone, Debug)]
pub struct AlignOpts {
    pub docs: PathBuf,
    pub out: PathBuf,
    /// Optional TSV of per-pair alignment summaries.
    pub report: Option<PathBuf>,
    pub metric: MetricId,
    pub method: Method,
    pub common: CommonOpts,
}

fn align_report_tsv(records: &[AlignmentRecord]) -> String {
    let mut out =
        String::from("summary_id\tchapter_id\tmethod\tmetric\tpairs\tselected\tunmatched\tmean_score\n");
    for r in records {
        let mean = if r.pairs.is_empty() {
            0.0
        } else {
            r.pairs.iter().map(|p| p.score).sum::<f64>() / r.pairs.len() as f64
        };
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\n",
            r.summary_id,
            r.chapter_id,
            r.method,
            r.metric,
            r.pairs.len(),
            r.selected.len(),
            r.unmatched.len(),
            mean
        ));
    }
    out
}

/// Aligns every reference summary to its chapter and writes one JSONL
/// record per pair, in input order.
pub fn cmd_align(opts: &AlignOpts) -> CmdResult<()> {
    let res = load_resources(&opts.common)?;
    if opts.metric.needs_vectors() && res.vectors.is_none() {
        return Err(usage(Error::invalid(format!(
            "metric '{}' requires --vectors",
            opts.metric
        ))));
    }
    if opts.method.is_summary_level() && opts.metric == MetricId::Cosine {
        return Err(usage(Error::invalid(
            "cosine cannot drive summary-level alignment",
        )));
    }
    let docs =
        read_documents(&opts.docs, opts.common.pretokenized, &res.stopwords).map_err(usage)?;
    let pairs = pair_documents(&docs).map_err(usage)?;
    let chapter_indices: BTreeSet<usize> = pairs.iter().map(|&(_, ci)| ci).collect();
    let tables = weight_tables_for(&docs, &chapter_indices, opts.metric, opts.common.alpha)
        .map_err(usage)?;

    let outcomes: Vec<Result<AlignmentRecord>> = with_pool(opts.common.jobs, || {
        pairs
            .par_iter()
            .map(|&(si, ci)| {
                let cfg = metric_config(opts.metric, tables.get(&ci), &res.stopwords)?;
                let scorer = build_scorer(&cfg, &res);
                let result = aligner::align(&docs[si], &docs[ci], scorer, opts.method, None)?;
                let labels = extract_labels(&result, &docs[ci])?;
                Ok(AlignmentRecord::from_result(&result, labels))
            })
            .collect()
    })?;

    let mut records = Vec::new();
    let mut failed = 0usize;
    for (&(si, ci), outcome) in pairs.iter().zip(outcomes) {
        match outcome {
            Ok(record) => {
                eprintln!(
                    "aligned {} -> {}: {} pairs, {} selected, {} unmatched",
                    docs[si].doc_id,
                    docs[ci].doc_id,
                    record.pairs.len(),
                    record.selected.len(),
                    record.unmatched.len()
                );
                records.push(record);
            }
            Err(e) => {
                eprintln!("error aligning {} -> {}: {e}", docs[si].doc_id, docs[ci].doc_id);
                failed += 1;
            }
        }
    }
    write_alignments(&opts.out, &records).map_err(processing)?;
    if let Some(report) = &opts.report {
        write_atomic(report, &align_report_tsv(&records)).map_err(processing)?;
    }
    if failed > 0 {
        return Err(processing(Error::invalid(format!(
            "{failed} of {} pairs failed",
            pairs.len()
        ))));
    }
    Ok(())
}

/// Which segmentation the pipeline runs on chapters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentMode {
    Sentence,
    Constituent,
}

impl SegmentMode {
    pub fn parse(s: &str) -> Result<SegmentMode> {
        match s {
            "sentence" => Ok(SegmentMode::Sentence),
            "constituent" => Ok(SegmentMode::Constituent),
            other => Err(Error::invalid(format!(
                "unknown segment mode '{other}' (expected sentence or constituent)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOpts {
    pub docs: PathBuf,
    pub out_dir: PathBuf,
    pub metric: MetricId,
    pub method: Method,
    pub segments: SegmentMode,
    pub trees: Option<PathBuf>,
    pub min_const_len: usize,
    pub quantiles: Option<PathBuf>,
    /// doc_id or source label of the summary used for alignment labels;
    /// default is each chapter's first summary.
    pub label_ref: Option<String>,
    pub common: CommonOpts,
}

struct ChapterOutput {
    record: AlignmentRecord,
    extract: Document,
    rows: Vec<MultiRefRow>,
    chapter_id: String,
    label_id: String,
    chapter_wc: usize,
    bin_index: usize,
    target_words: u64,
    extract_wc: usize,
    selected_count: usize,
}

fn label_index(summaries: &[&Document], wanted: Option<&str>) -> Result<usize> {
    match wanted {
        None => Ok(0),
        Some(w) => summaries
            .iter()
            .position(|d| d.doc_id == w || d.source_label.as_deref() == Some(w))
            .ok_or_else(|| {
                Error::invalid(format!("no reference summary matches label '{w}'"))
            }),
    }
}

fn empty_extract(chapter: &Document, label: &Document) -> Document {
    Document {
        doc_id: format!("{}/extract", chapter.doc_id),
        role: Role::Chapter,
        segments: Vec::new(),
        source_label: Some(label.doc_id.clone()),
    }
}

fn run_chapter(
    chapter: &Document,
    summaries: &[&Document],
    label_idx: usize,
    trees: Option<&BTreeMap<String, ParseTree>>,
    opts: &PipelineOpts,
    res: &Resources,
    model: &QuantileModel,
) -> Result<ChapterOutput> {
    let working = match trees {
        Some(map) => segment_document(chapter, map, opts.min_const_len)?,
        None => chapter.clone(),
    };
    let table = if opts.metric.is_weighted() {
        Some(chapter_weight_table(&working, opts.common.alpha)?)
    } else {
        None
    };
    let cfg = metric_config(opts.metric, table.as_ref(), &res.stopwords)?;
    let scorer = build_scorer(&cfg, res);
    let label_summary = summaries[label_idx];

    let alignment = aligner::align(label_summary, &working, scorer, opts.method, None)?;
    let labels = extract_labels(&alignment, &working)?;
    let budget = target_length(working.word_count() as u64, model);

    let extract = if opts.method.is_summary_level() {
        if alignment.selected_ids.is_empty() {
            empty_extract(&working, label_summary)
        } else {
            let mut doc = assemble_extract(&working, &alignment.selected_ids, &budget)?;
            doc.source_label = Some(label_summary.doc_id.clone());
            doc
        }
    } else {
        oracle_extract(&working, label_summary, &alignment, &budget)?
    };

    let references: Vec<Document> = summaries.iter().map(|d| (*d).clone()).collect();
    let rows = score_multi_reference(
        &extract,
        &references,
        &REPORT_METRICS,
        None,
        res.synonyms.as_ref(),
        None,
    )?;

    Ok(ChapterOutput {
        record: AlignmentRecord::from_result(&alignment, labels),
        chapter_id: working.doc_id.clone(),
        label_id: label_summary.doc_id.clone(),
        chapter_wc: working.word_count(),
        bin_index: budget.bin_index,
        target_words: budget.target_words,
        extract_wc: extract.word_count(),
        selected_count: extract.segments.len(),
        extract,
        rows,
    })
}

/// Full pipeline per chapter: segment, align the label summary, budget,
/// assemble the extract, and score it against every reference. Writes
/// `alignment.jsonl`, `extract.jsonl`, `scores.tsv`, and `pipeline.tsv`
/// into the output directory.
pub fn cmd_pipeline(opts: &PipelineOpts) -> CmdResult<()> {
    let res = load_resources(&opts.common)?;
    if opts.segments == SegmentMode::Constituent && opts.trees.is_none() {
        return Err(usage(Error::invalid(
            "constituent segmentation requires --trees",
        )));
    }
    if opts.metric.needs_vectors() && res.vectors.is_none() {
        return Err(usage(Error::invalid(format!(
            "metric '{}' requires --vectors",
            opts.metric
        ))));
    }
    if opts.method.is_summary_level() && opts.metric == MetricId::Cosine {
        return Err(usage(Error::invalid(
            "cosine cannot drive summary-level alignment",
        )));
    }
    let model = match &opts.quantiles {
        Some(path) => load_quantiles(path).map_err(usage)?,
        None => default_quantiles(),
    };
    let docs =
        read_documents(&opts.docs, opts.common.pretokenized, &res.stopwords).map_err(usage)?;
    let pairs = pair_documents(&docs).map_err(usage)?;
    let grouped = group_by_chapter(&pairs);
    let chapter_count = docs.iter().filter(|d| d.role == Role::Chapter).count();
    if grouped.len() != chapter_count {
        let orphan = docs
            .iter()
            .enumerate()
            .find(|(i, d)| d.role == Role::Chapter && !grouped.iter().any(|(ci, _)| ci == i))
            .map(|(_, d)| d.doc_id.clone())
            .unwrap_or_default();
        return Err(usage(Error::invalid(format!(
            "chapter '{orphan}' has no reference summary"
        ))));
    }

    let mut tree_maps: BTreeMap<usize, BTreeMap<String, ParseTree>> = BTreeMap::new();
    if opts.segments == SegmentMode::Constituent {
        let trees = read_trees(opts.trees.as_ref().expect("checked above")).map_err(usage)?;
        let total: usize = grouped.iter().map(|&(ci, _)| docs[ci].segments.len()).sum();
        if trees.len() != total {
            return Err(usage(Error::invalid(format!(
                "trees file has {} trees but the chapters have {total} sentences",
                trees.len()
            ))));
        }
        let mut iter = trees.into_iter();
        for &(ci, _) in &grouped {
            let map: BTreeMap<String, ParseTree> = docs[ci]
                .segments
                .iter()
                .map(|seg| (seg.id.clone(), iter.next().expect("count checked")))
                .collect();
            tree_maps.insert(ci, map);
        }
    }

    let tasks: Vec<(usize, Vec<&Document>, usize)> = grouped
        .iter()
        .map(|(ci, sis)| {
            let summaries: Vec<&Document> = sis.iter().map(|&si| &docs[si]).collect();
            let label = label_index(&summaries, opts.label_ref.as_deref()).map_err(usage)?;
            Ok((*ci, summaries, label))
        })
        .collect::<CmdResult<_>>()?;

    let outcomes: Vec<Result<ChapterOutput>> = with_pool(opts.common.jobs, || {
        tasks
            .par_iter()
            .map(|(ci, summaries, label)| {
                run_chapter(
                    &docs[*ci],
                    summaries,
                    *label,
                    tree_maps.get(ci),
                    opts,
                    &res,
                    &model,
                )
            })
            .collect()
    })?;

    let mut records = Vec::new();
    let mut extracts = Vec::new();
    let mut scores = String::from("chapter_id\tmetric\treference_id\tprecision\trecall\tf1\n");
    let mut report = String::from(
        "chapter_id\tlabel_summary\tchapter_wc\tbin_index\ttarget_words\textract_wc\tselected_count\n",
    );
    let mut failed = 0usize;
    for ((ci, _, _), outcome) in tasks.iter().zip(outcomes) {
        match outcome {
            Ok(output) => {
                eprintln!(
                    "pipeline {}: {} words -> target {} -> extract {} words / {} segments",
                    output.chapter_id,
                    output.chapter_wc,
                    output.target_words,
                    output.extract_wc,
                    output.selected_count
                );
                for row in &output.rows {
                    scores.push_str(&format!(
                        "{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\n",
                        output.chapter_id,
                        row.metric,
                        row.reference_id,
                        row.triple.precision,
                        row.triple.recall,
                        row.triple.f1
                    ));
                }
                report.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                    output.chapter_id,
                    output.label_id,
                    output.chapter_wc,
                    output.bin_index,
                    output.target_words,
                    output.extract_wc,
                    output.selected_count
                ));
                records.push(output.record);
                extracts.push(output.extract);
            }
            Err(e) => {
                eprintln!("error in pipeline for {}: {e}", docs[*ci].doc_id);
                failed += 1;
            }
        }
    }

    std::fs::create_dir_all(&opts.out_dir)
        .map_err(|e| processing(Error::io(&opts.out_dir, e)))?;
    write_alignments(&opts.out_dir.join("alignment.jsonl"), &records).map_err(processing)?;
    write_documents(&opts.out_dir.join("extract.jsonl"), &extracts).map_err(processing)?;
    write_atomic(&opts.out_dir.join("scores.tsv"), &scores).map_err(processing)?;
    write_atomic(&opts.out_dir.join("pipeline.tsv"), &report).map_err(processing)?;
    if failed > 0 {
        return Err(processing(Error::invalid(format!(
            "{failed} of {} chapters failed",
            tasks.len()
        ))));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SegmentOpts {
    pub docs: PathBuf,
    pub trees: PathBuf,
    /// Span JSONL output.
    pub out: PathBuf,
    /// Optional segmented-documents output.
    pub docs_out: Option<PathBuf>,
    pub min_const_len: usize,
    pub common: CommonOpts,
}

/// Splits every chapter sentence into constituent spans and writes one
/// span record per sentence; optionally also the re-segmented documents.
pub fn cmd_segment(opts: &SegmentOpts) -> CmdResult<()> {
    let res = load_resources(&opts.common)?;
    let docs =
        read_documents(&opts.docs, opts.common.pretokenized, &res.stopwords).map_err(usage)?;
    let chapters: Vec<&Document> = docs.iter().filter(|d| d.role == Role::Chapter).collect();
    if chapters.is_empty() {
        return Err(usage(Error::invalid("no chapter documents in input")));
    }
    let trees = read_trees(&opts.trees).map_err(usage)?;
    let total: usize = chapters.iter().map(|c| c.segments.len()).sum();
    if trees.len() != total {
        return Err(usage(Error::invalid(format!(
            "trees file has {} trees but the chapters have {total} sentences",
            trees.len()
        ))));
    }

    let mut iter = trees.into_iter();
    let mut span_records = Vec::new();
    let mut segmented = Vec::new();
    let mut span_count = 0usize;
    for chapter in &chapters {
        let map: BTreeMap<String, ParseTree> = chapter
            .segments
            .iter()
            .map(|seg| (seg.id.clone(), iter.next().expect("count checked")))
            .collect();
        segmented.push(segment_document(chapter, &map, opts.min_const_len).map_err(usage)?);
        for seg in &chapter.segments {
            let spans = constituent_segments(&map[&seg.id], opts.min_const_len);
            span_count += spans.len();
            span_records.push(SpanRecord {
                sentence_id: seg.id.clone(),
                spans: spans
                    .iter()
                    .map(|s| SpanEntry {
                        start: s.indices.first().copied().unwrap_or(0),
                        end: s.indices.last().map(|&i| i + 1).unwrap_or(0),
                        text: s.text.clone(),
                    })
                    .collect(),
            });
        }
    }
    write_spans(&opts.out, &span_records).map_err(processing)?;
    if let Some(docs_out) = &opts.docs_out {
        write_documents(docs_out, &segmented).map_err(processing)?;
    }
    eprintln!("segmented {total} sentences into {span_count} spans");
    Ok(())
}

#[derive(Clone, Debug)]
pub struct WeightOpts {
    pub docs: PathBuf,
    pub out: Option<PathBuf>,
    /// Chapter to weight; default is the first chapter document.
    pub doc_id: Option<String>,
    pub common: CommonOpts,
}

/// Builds the per-chapter word-weight table and dumps it as TSV.
pub fn cmd_weight(opts: &WeightOpts) -> CmdResult<()> {
    let res = load_resources(&opts.common)?;
    let docs =
        read_documents(&opts.docs, opts.common.pretokenized, &res.stopwords).map_err(usage)?;
    let doc = match &opts.doc_id {
        Some(id) => docs
            .iter()
            .find(|d| &d.doc_id == id)
            .ok_or_else(|| usage(Error::invalid(format!("no document with doc_id '{id}'"))))?,
        None => docs
            .iter()
            .find(|d| d.role == Role::Chapter)
            .ok_or_else(|| usage(Error::invalid("no chapter documents in input")))?,
    };
    let table = chapter_weight_table(doc, opts.common.alpha).map_err(usage)?;
    let (counts, _) = key_counts(doc, KeyMode::Stem, true).map_err(usage)?;
    emit(opts.out.as_deref(), &weight_dump_tsv(&table, &counts))
}

#[derive(Clone, Debug)]
pub struct ScoreOpts {
    pub generated: PathBuf,
    pub references: PathBuf,
    /// Chapter documents used to build the weight table for weighted
    /// metrics.
    pub chapter: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub metrics: Vec<MetricId>,
    pub common: CommonOpts,
}

/// Scores the first generated document against every reference summary
/// under the requested metrics and emits the per-reference TSV.
pub fn cmd_score(opts: &ScoreOpts) -> CmdResult<()> {
    let res = load_resources(&opts.common)?;
    if opts.metrics.is_empty() {
        return Err(usage(Error::invalid("no metrics requested")));
    }
    if opts.metrics.contains(&MetricId::Cosine) {
        return Err(usage(Error::invalid(
            "cosine scores segments, not whole documents; pick a lexical metric",
        )));
    }
    let gen_docs =
        read_documents(&opts.generated, opts.common.pretokenized, &res.stopwords).map_err(usage)?;
    let generated = gen_docs
        .first()
        .ok_or_else(|| usage(Error::invalid("generated file has no documents")))?;
    let ref_docs = read_documents(&opts.references, opts.common.pretokenized, &res.stopwords)
        .map_err(usage)?;
    let references: Vec<Document> = ref_docs
        .into_iter()
        .filter(|d| d.role == Role::ReferenceSummary)
        .collect();
    if references.is_empty() {
        return Err(usage(Error::invalid(
            "no reference summaries in references file",
        )));
    }
    let table = if opts.metrics.iter().any(|m| m.is_weighted()) {
        let chapter_path = opts.chapter.as_ref().ok_or_else(|| {
            usage(Error::invalid(
                "weighted metrics require --chapter to build the weight table",
            ))
        })?;
        let chapter_docs = read_documents(chapter_path, opts.common.pretokenized, &res.stopwords)
            .map_err(usage)?;
        let chapter = chapter_docs
            .iter()
            .find(|d| d.role == Role::Chapter)
            .ok_or_else(|| usage(Error::invalid("no chapter document in --chapter file")))?;
        Some(chapter_weight_table(chapter, opts.common.alpha).map_err(usage)?)
    } else {
        None
    };
    let rows = score_multi_reference(
        generated,
        &references,
        &opts.metrics,
        table.as_ref(),
        res.synonyms.as_ref(),
        Some(&res.stopwords),
    )
    .map_err(processing)?;
    emit(opts.out.as_deref(), &scores_tsv(&rows))
}

#[derive(Clone, Debug)]
pub struct StatsOpts {
    pub manifest: PathBuf,
    pub out: Option<PathBuf>,
    pub common: CommonOpts,
}

/// Corpus-level statistics over every pair a manifest names.
pub fn cmd_stats(opts: &StatsOpts) -> CmdResult<()> {
    let res = load_resources(&opts.common)?;
    let loaded =
        load_corpus(&opts.manifest, opts.common.pretokenized, &res.stopwords).map_err(usage)?;
    let pairs: Vec<CorpusPair> = loaded.into_iter().map(|l| l.pair).collect();
    let stats = corpus_stats(&pairs).map_err(processing)?;
    emit(opts.out.as_deref(), &stats_tsv(&stats))
}

#[derive(Clone, Debug)]
pub struct FilterOpts {
    pub manifest: PathBuf,
    /// Manifest of kept pairs.
    pub out: PathBuf,
    /// Optional TSV of removed pairs and which rule removed them.
    pub removed_out: Option<PathBuf>,
    pub common: CommonOpts,
}

/// Applies the corpus quality rules and writes the surviving manifest.
pub fn cmd_filter(opts: &FilterOpts) -> CmdResult<()> {
    let res = load_resources(&opts.common)?;
    let loaded =
        load_corpus(&opts.manifest, opts.common.pretokenized, &res.stopwords).map_err(usage)?;
    let mut kept_records = Vec::new();
    let mut removed = String::from("book_id\tchapter_id\trule\n");
    let mut removed_count = 0usize;
    for lp in loaded {
        let chapter_id = lp.pair.chapter.doc_id.clone();
        let (kept, dropped) = filter_pairs(vec![lp.pair]);
        if kept.is_empty() {
            let (_, rule) = &dropped[0];
            removed.push_str(&format!("{}\t{}\t{}\n", lp.record.book_id, chapter_id, rule));
            removed_count += 1;
        } else {
            kept_records.push(lp.record);
        }
    }
    write_manifest(&opts.out, &kept_records).map_err(processing)?;
    if let Some(path) = &opts.removed_out {
        write_atomic(path, &removed).map_err(processing)?;
    }
    eprintln!("kept {} pairs, removed {removed_count}", kept_records.len());
    Ok(())
}

#[derive(Clone, Debug)]
pub struct FitQuantilesOpts {
    /// Manifest to draw (chapter_wc, summary_wc) pairs from.
    pub manifest: Option<PathBuf>,
    /// Or a bare TSV of `chapter_wc<TAB>summary_wc` rows.
    pub pairs: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub common: CommonOpts,
}

fn read_wc_pairs(path: &Path) -> Result<Vec<(u64, u64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::format(
                path,
                lineno + 1,
                format!("expected 2 fields, found {}", fields.len()),
            ));
        }
        let cw: u64 = fields[0]
            .parse()
            .map_err(|e| Error::format(path, lineno + 1, format!("chapter_wc: {e}")))?;
        let sw: u64 = fields[1]
            .parse()
            .map_err(|e| Error::format(path, lineno + 1, format!("summary_wc: {e}")))?;
        out.push((cw, sw));
    }
    Ok(out)
}

/// Fits an equal-frequency quantile model from corpus word counts.
pub fn cmd_fit_quantiles(opts: &FitQuantilesOpts) -> CmdResult<()> {
    let res = load_resources(&opts.common)?;
    let (pairs, origin) = match (&opts.manifest, &opts.pairs) {
        (Some(m), None) => {
            let loaded =
                load_corpus(m, opts.common.pretokenized, &res.stopwords).map_err(usage)?;
            let pairs: Vec<(u64, u64)> = loaded
                .iter()
                .map(|l| {
                    (
                        l.pair.chapter.word_count() as u64,
                        l.pair.summary.word_count() as u64,
                    )
                })
                .collect();
            (pairs, m.display().to_string())
        }
        (None, Some(p)) => (read_wc_pairs(p).map_err(usage)?, p.display().to_string()),
        _ => {
            return Err(usage(Error::invalid(
                "provide exactly one of --manifest or --pairs",
            )))
        }
    };
    let model = fit_quantiles(&pairs, &origin).map_err(usage)?;
    emit(opts.out.as_deref(), &quantile_tsv(&model))
}

#[derive(Clone, Debug)]
pub struct SplitOpts {
    pub manifest: PathBuf,
    pub out: PathBuf,
    /// train/dev/test fractions; must sum to 1.
    pub ratios: (f64, f64, f64),
    pub seed: u64,
    pub common: CommonOpts,
}

/// Assigns every book to train/dev/test and writes the annotated manifest.
pub fn cmd_split(opts: &SplitOpts) -> CmdResult<()> {
    let res = load_resources(&opts.common)?;
    let loaded =
        load_corpus(&opts.manifest, opts.common.pretokenized, &res.stopwords).map_err(usage)?;
    let (mut records, mut pairs): (Vec<_>, Vec<_>) =
        loaded.into_iter().map(|l| (l.record, l.pair)).unzip();
    assign_splits(&mut pairs, opts.ratios, opts.seed).map_err(usage)?;
    for (record, pair) in records.iter_mut().zip(&pairs) {
        record.split = Some(pair.split.as_str().to_string());
    }
    write_manifest(&opts.out, &records).map_err(processing)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, role: Role, texts: &[&str]) -> Document {
        let stop = BTreeSet::new();
        Document {
            doc_id: id.to_string(),
            role,
            segments: texts
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    crate::textcore::Segment::sentence(
                        format!("{id}/s{i}"),
                        crate::textcore::tokenize(t, true, &stop).unwrap(),
                    )
                })
                .collect(),
            source_label: None,
        }
    }

    #[test]
    fn pairing_uses_doc_id_prefixes() {
        let docs = vec![
            doc("bookA_ch1", Role::Chapter, &["one two"]),
            doc("bookA_ch1_site1", Role::ReferenceSummary, &["one"]),
            doc("bookA_ch2", Role::Chapter, &["three four"]),
            doc("bookA_ch2_site1", Role::ReferenceSummary, &["three"]),
            doc("bookA_ch1_site2", Role::ReferenceSummary, &["two"]),
        ];
        let pairs = pair_documents(&docs).unwrap();
        assert_eq!(pairs, vec![(1, 0), (3, 2), (4, 0)]);
        let grouped = group_by_chapter(&pairs);
        assert_eq!(grouped, vec![(0, vec![1, 4]), (2, vec![3])]);
    }

    #[test]
    fn lone_chapter_adopts_unprefixed_summaries() {
        let docs = vec![
            doc("chapter", Role::Chapter, &["one two"]),
            doc("other_name", Role::ReferenceSummary, &["one"]),
        ];
        let pairs = pair_documents(&docs).unwrap();
        assert_eq!(pairs, vec![(1, 0)]);
    }

    #[test]
    fn unpairable_and_duplicate_inputs_are_rejected() {
        let docs = vec![
            doc("a_ch1", Role::Chapter, &["one"]),
            doc("b_ch1", Role::Chapter, &["two"]),
            doc("c_ch1_sum", Role::ReferenceSummary, &["three"]),
        ];
        assert!(pair_documents(&docs).is_err());

        let docs = vec![
            doc("a", Role::Chapter, &["one"]),
            doc("a", Role::ReferenceSummary, &["one"]),
        ];
        assert!(pair_documents(&docs).is_err());

        let docs = vec![doc("a", Role::Chapter, &["one"])];
        assert!(pair_documents(&docs).is_err());
    }

    #[test]
    fn label_selection_matches_id_or_source() {
        let mut s1 = doc("ch_s1", Role::ReferenceSummary, &["one"]);
        s1.source_label = Some("siteA".to_string());
        let s2 = doc("ch_s2", Role::ReferenceSummary, &["two"]);
        let summaries = vec![&s1, &s2];
        assert_eq!(label_index(&summaries, None).unwrap(), 0);
        assert_eq!(label_index(&summaries, Some("ch_s2")).unwrap(), 1);
        assert_eq!(label_index(&summaries, Some("siteA")).unwrap(), 0);
        assert!(label_index(&summaries, Some("nope")).is_err());
    }

    #[test]
    fn usage_errors_carry_exit_code_two() {
        let err = usage(Error::invalid("x"));
        assert_eq!(err.exit_code(), 2);
        let err = processing(Error::invalid("x"));
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn weight_tables_only_built_for_weighted_metrics() {
        let docs = vec![doc("ch", Role::Chapter, &["one two three"])];
        let indices: BTreeSet<usize> = [0].into();
        let tables = weight_tables_for(&docs, &indices, MetricId::R1, 1e-3).unwrap();
        assert!(tables.is_empty());
        let tables = weight_tables_for(&docs, &indices, MetricId::RWtd, 1e-3).unwrap();
        assert_eq!(tables.len(), 1);
    }
}
