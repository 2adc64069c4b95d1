use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chapter_align::aligner::Method;
use chapter_align::pipeline::{
    cmd_align, cmd_filter, cmd_fit_quantiles, cmd_pipeline, cmd_score, cmd_segment, cmd_split,
    cmd_stats, cmd_weight, AlignOpts, CmdResult, CommonOpts, FilterOpts, FitQuantilesOpts,
    PipelineOpts, ScoreOpts, SegmentMode, SegmentOpts, SplitOpts, StatsOpts, WeightOpts,
};
use chapter_align::segmenter::DEFAULT_MIN_CONST_LEN;
use chapter_align::simmetrics::MetricId;
use chapter_align::weighting::DEFAULT_ALPHA;

fn parse_metric(s: &str) -> Result<MetricId, String> {
    MetricId::parse(s).map_err(|e| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    Method::parse(s).map_err(|e| e.to_string())
}

fn parse_segments(s: &str) -> Result<SegmentMode, String> {
    SegmentMode::parse(s).map_err(|e| e.to_string())
}

fn parse_ratios(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected train,dev,test fractions, found '{s}'"));
    }
    let mut vals = [0.0f64; 3];
    for (v, part) in vals.iter_mut().zip(&parts) {
        *v = part
            .trim()
            .parse()
            .map_err(|e| format!("bad fraction '{part}': {e}"))?;
    }
    Ok((vals[0], vals[1], vals[2]))
}

#[derive(Args, Clone, Debug)]
struct CommonArgs {
    /// Stop-word list, one word per line (bundled English list by default)
    #[arg(long, value_name = "FILE")]
    stopwords: Option<PathBuf>,

    /// Synonym lexicon TSV for the METEOR synonym matching stage
    #[arg(long, value_name = "FILE")]
    synonyms: Option<PathBuf>,

    /// Segment vectors JSONL, required by the cosine metric
    #[arg(long, value_name = "FILE")]
    vectors: Option<PathBuf>,

    /// Smoothing constant in the word-weight formula a/(a+p)
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,

    /// Worker threads; 0 means one per core
    #[arg(long, default_value_t = 1)]
    jobs: usize,

    /// Treat input sentences as raw text instead of space-separated tokens
    #[arg(long)]
    raw_text: bool,
}

impl CommonArgs {
    fn to_opts(&self) -> CommonOpts {
        CommonOpts {
            stopwords: self.stopwords.clone(),
            synonyms: self.synonyms.clone(),
            vectors: self.vectors.clone(),
            alpha: self.alpha,
            jobs: self.jobs,
            pretokenized: !self.raw_text,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "chapter-align",
    version,
    about = "Align reference summaries to book chapters: segment, weight, align, budget, extract, score"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Align each reference summary to its chapter and emit saliency labels
    Align(AlignArgs),
    /// Per chapter: segment, align, budget, assemble the extract, score it
    Pipeline(PipelineArgs),
    /// Split chapter sentences into constituent spans from parse trees
    Segment(SegmentArgs),
    /// Dump a chapter's word-weight table
    Weight(WeightArgs),
    /// Score a generated summary against all reference summaries
    Score(ScoreArgs),
    /// Corpus statistics from a manifest
    Stats(StatsArgs),
    /// Drop over-long or under-compressed pairs from a manifest
    Filter(FilterArgs),
    /// Fit a compression-ratio quantile table from word counts
    FitQuantiles(FitQuantilesArgs),
    /// Assign books to train/dev/test splits
    Split(SplitArgs),
}

#[derive(Args)]
struct AlignArgs {
    /// Documents JSONL holding chapters and reference summaries
    #[arg(long, value_name = "FILE")]
    docs: PathBuf,

    /// Alignment JSONL output
    #[arg(long, value_name = "FILE")]
    out: PathBuf,

    /// Optional per-pair report TSV
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,

    #[arg(long, value_parser = parse_metric, default_value = "r-wtd")]
    metric: MetricId,

    /// greedy, stable, wl, or ws
    #[arg(long, value_parser = parse_method, default_value = "stable")]
    method: Method,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct PipelineArgs {
    /// Documents JSONL holding chapters and reference summaries
    #[arg(long, value_name = "FILE")]
    docs: PathBuf,

    /// Directory for alignment.jsonl, extract.jsonl, scores.tsv, pipeline.tsv
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,

    #[arg(long, value_parser = parse_metric, default_value = "r-wtd")]
    metric: MetricId,

    /// greedy, stable, wl, or ws
    #[arg(long, value_parser = parse_method, default_value = "stable")]
    method: Method,

    /// sentence or constituent
    #[arg(long, value_parser = parse_segments, default_value = "sentence")]
    segments: SegmentMode,

    /// Bracketed parse trees, one per chapter sentence in order
    #[arg(long, value_name = "FILE")]
    trees: Option<PathBuf>,

    /// Merge constituent spans shorter than this many words
    #[arg(long, default_value_t = DEFAULT_MIN_CONST_LEN)]
    min_const_len: usize,

    /// Quantile table TSV; bundled table by default
    #[arg(long, value_name = "FILE")]
    quantiles: Option<PathBuf>,

    /// doc_id or source label of the summary that drives alignment labels
    #[arg(long, value_name = "ID")]
    label_ref: Option<String>,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SegmentArgs {
    /// Documents JSONL holding the chapters to segment
    #[arg(long, value_name = "FILE")]
    docs: PathBuf,

    /// Bracketed parse trees, one per chapter sentence in order
    #[arg(long, value_name = "FILE")]
    trees: PathBuf,

    /// Span JSONL output
    #[arg(long, value_name = "FILE")]
    out: PathBuf,

    /// Optional segmented-documents JSONL output
    #[arg(long, value_name = "FILE")]
    docs_out: Option<PathBuf>,

    /// Merge constituent spans shorter than this many words
    #[arg(long, default_value_t = DEFAULT_MIN_CONST_LEN)]
    min_const_len: usize,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct WeightArgs {
    /// Documents JSONL holding the chapter to weight
    #[arg(long, value_name = "FILE")]
    docs: PathBuf,

    /// Weight table TSV output; stdout when omitted
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Which document to weight; default is the first chapter
    #[arg(long, value_name = "ID")]
    doc_id: Option<String>,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ScoreArgs {
    /// Documents JSONL whose first document is the generated summary
    #[arg(long, value_name = "FILE")]
    generated: PathBuf,

    /// Documents JSONL holding the reference summaries
    #[arg(long, value_name = "FILE")]
    references: PathBuf,

    /// Chapter documents JSONL; required by weighted metrics
    #[arg(long, value_name = "FILE")]
    chapter: Option<PathBuf>,

    /// Score TSV output; stdout when omitted
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Comma-separated metric names
    #[arg(
        long,
        value_parser = parse_metric,
        value_delimiter = ',',
        default_value = "r1,r2,rl,meteor"
    )]
    metrics: Vec<MetricId>,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct StatsArgs {
    /// Corpus manifest JSONL
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,

    /// Stats TSV output; stdout when omitted
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct FilterArgs {
    /// Corpus manifest JSONL
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,

    /// Manifest of kept pairs
    #[arg(long, value_name = "FILE")]
    out: PathBuf,

    /// Optional TSV of removed pairs and the rule that removed them
    #[arg(long, value_name = "FILE")]
    removed_out: Option<PathBuf>,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct FitQuantilesArgs {
    /// Corpus manifest JSONL to draw word counts from
    #[arg(long, value_name = "FILE")]
    manifest: Option<PathBuf>,

    /// Or a TSV of chapter_wc<TAB>summary_wc rows
    #[arg(long, value_name = "FILE")]
    pairs: Option<PathBuf>,

    /// Quantile TSV output; stdout when omitted
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SplitArgs {
    /// Corpus manifest JSONL
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,

    /// Annotated manifest output
    #[arg(long, value_name = "FILE")]
    out: PathBuf,

    /// train,dev,test fractions summing to 1
    #[arg(long, value_parser = parse_ratios, default_value = "0.8,0.1,0.1")]
    ratios: (f64, f64, f64),

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[command(flatten)]
    common: CommonArgs,
}

fn run(cli: Cli) -> CmdResult<()> {
    match cli.command {
        Command::Align(args) => cmd_align(&AlignOpts {
            docs: args.docs,
            out: args.out,
            report: args.report,
            metric: args.metric,
            method: args.method,
            common: args.common.to_opts(),
        }),
        Command::Pipeline(args) => cmd_pipeline(&PipelineOpts {
            docs: args.docs,
            out_dir: args.out_dir,
            metric: args.metric,
            method: args.method,
            segments: args.segments,
            trees: args.trees,
            min_const_len: args.min_const_len,
            quantiles: args.quantiles,
            label_ref: args.label_ref,
            common: args.common.to_opts(),
        }),
        Command::Segment(args) => cmd_segment(&SegmentOpts {
            docs: args.docs,
            trees: args.trees,
            out: args.out,
            docs_out: args.docs_out,
            min_const_len: args.min_const_len,
            common: args.common.to_opts(),
        }),
        Command::Weight(args) => cmd_weight(&WeightOpts {
            docs: args.docs,
            out: args.out,
            doc_id: args.doc_id,
            common: args.common.to_opts(),
        }),
        Command::Score(args) => cmd_score(&ScoreOpts {
            generated: args.generated,
            references: args.references,
            chapter: args.chapter,
            out: args.out,
            metrics: args.metrics,
            common: args.common.to_opts(),
        }),
        Command::Stats(args) => cmd_stats(&StatsOpts {
            manifest: args.manifest,
            out: args.out,
            common: args.common.to_opts(),
        }),
        Command::Filter(args) => cmd_filter(&FilterOpts {
            manifest: args.manifest,
            out: args.out,
            removed_out: args.removed_out,
            common: args.common.to_opts(),
        }),
        Command::FitQuantiles(args) => cmd_fit_quantiles(&FitQuantilesOpts {
            manifest: args.manifest,
            pairs: args.pairs,
            out: args.out,
            common: args.common.to_opts(),
        }),
        Command::Split(args) => cmd_split(&SplitOpts {
            manifest: args.manifest,
            out: args.out,
            ratios: args.ratios,
            seed: args.seed,
            common: args.common.to_opts(),
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
