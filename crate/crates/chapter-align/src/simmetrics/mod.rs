//! Segment-pair similarity metrics: plain and weighted n-gram/LCS overlap,
//! a unigram-alignment score with fragmentation penalty, composites of
//! those, and cosine similarity over externally computed segment vectors.

pub mod meteor;
mod rouge;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::textcore::{Document, Segment};
use crate::weighting::WeightTable;

pub use meteor::{meteor, MatcherStage, MeteorOutcome, SynonymLexicon, DEFAULT_STAGES, SYNONYM_STAGES};
pub(crate) use rouge::eligible_keys;
use rouge::{rouge_l_keys, rouge_n_keys};

/// Precision, recall, and their harmonic mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreTriple {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl ScoreTriple {
    pub const ZERO: ScoreTriple = ScoreTriple {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };

    pub fn from_pr(precision: f64, recall: f64) -> ScoreTriple {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        ScoreTriple {
            precision,
            recall,
            f1,
        }
    }

    /// All three components equal to one scalar (used for metrics that are
    /// not precision/recall shaped).
    pub fn uniform(value: f64) -> ScoreTriple {
        ScoreTriple {
            precision: value,
            recall: value,
            f1: value,
        }
    }

    pub fn component(&self, component: Component) -> f64 {
        match component {
            Component::Precision => self.precision,
            Component::Recall => self.recall,
            Component::F1 => self.f1,
        }
    }

    fn mean(triples: &[ScoreTriple]) -> ScoreTriple {
        let n = triples.len() as f64;
        ScoreTriple {
            precision: triples.iter().map(|t| t.precision).sum::<f64>() / n,
            recall: triples.iter().map(|t| t.recall).sum::<f64>() / n,
            f1: triples.iter().map(|t| t.f1).sum::<f64>() / n,
        }
    }
}

/// Which component of a [`ScoreTriple`] serves as the scalar score.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    Precision,
    Recall,
    F1,
}

/// Every scoring configuration the toolkit knows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MetricId {
    /// Unigram overlap.
    R1,
    /// Bigram overlap.
    R2,
    /// Longest-common-subsequence overlap.
    RL,
    /// Unigram overlap with stop-word removal and stemming.
    R1StopStem,
    /// Mean of word-weighted R1/R2/RL.
    RWtd,
    /// Mean of R1, R2, RL, and the unigram-alignment score.
    Rm,
    /// As `Rm` with word-weighted overlap components.
    RmWtd,
    /// Unigram-alignment score with fragmentation penalty.
    Meteor,
    /// Cosine over supplied segment vectors.
    Cosine,
}

impl MetricId {
    pub const ALL: [MetricId; 9] = [
        MetricId::R1,
        MetricId::R2,
        MetricId::RL,
        MetricId::R1StopStem,
        MetricId::RWtd,
        MetricId::Rm,
        MetricId::RmWtd,
        MetricId::Meteor,
        MetricId::Cosine,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricId::R1 => "r1",
            MetricId::R2 => "r2",
            MetricId::RL => "rl",
            MetricId::R1StopStem => "r1-stopstem",
            MetricId::RWtd => "r-wtd",
            MetricId::Rm => "rm",
            MetricId::RmWtd => "rm-wtd",
            MetricId::Meteor => "meteor",
            MetricId::Cosine => "cosine",
        }
    }

    pub fn parse(s: &str) -> Result<MetricId> {
        MetricId::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = MetricId::ALL.iter().map(|m| m.as_str()).collect();
                Error::invalid(format!("unknown metric '{s}' (expected one of {})", names.join(", ")))
            })
    }

    /// True for metrics whose overlap counts are word-weight scaled.
    pub fn is_weighted(self) -> bool {
        matches!(self, MetricId::RWtd | MetricId::RmWtd)
    }

    pub fn needs_vectors(self) -> bool {
        self == MetricId::Cosine
    }

    /// Whether token keys default to stems for this metric.
    pub fn default_use_stems(self) -> bool {
        !matches!(self, MetricId::R1 | MetricId::R2 | MetricId::RL | MetricId::Cosine)
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A metric plus everything needed to evaluate it on a segment pair.
#[derive(Clone, Debug)]
pub struct MetricConfig {
    pub metric_id: MetricId,
    /// Consulted only by weighted metrics.
    pub weight_table: Option<WeightTable>,
    /// When present, these words are removed before overlap computation.
    pub stopwords: Option<BTreeSet<String>>,
    pub use_stems: bool,
    /// Which triple component acts as the scalar score.
    pub component: Component,
}

impl MetricConfig {
    /// Sensible defaults for a metric: F1 scalar, stemming per the metric's
    /// convention, no weight table or stop words attached yet.
    pub fn new(metric_id: MetricId) -> MetricConfig {
        MetricConfig {
            metric_id,
            weight_table: None,
            stopwords: None,
            use_stems: metric_id.default_use_stems(),
            component: Component::F1,
        }
    }

    pub fn with_table(mut self, table: WeightTable) -> MetricConfig {
        self.weight_table = Some(table);
        self
    }

    pub fn with_stopwords(mut self, stopwords: BTreeSet<String>) -> MetricConfig {
        self.stopwords = Some(stopwords);
        self
    }

    /// The table weighted metrics will apply; unweighted metrics ignore any
    /// attached table.
    pub fn effective_table(&self) -> Option<&WeightTable> {
        if self.metric_id.is_weighted() {
            self.weight_table.as_ref()
        } else {
            None
        }
    }

    /// Checks cross-field requirements (weighted metrics need a table,
    /// stop-word removal needs a list).
    pub fn validate(&self) -> Result<()> {
        if self.metric_id.is_weighted() && self.weight_table.is_none() {
            return Err(Error::invalid(format!(
                "metric {} requires a weight table",
                self.metric_id
            )));
        }
        if self.metric_id == MetricId::R1StopStem && self.stopwords.is_none() {
            return Err(Error::invalid(
                "metric r1-stopstem requires a stop-word list",
            ));
        }
        Ok(())
    }
}

/// Segment vectors supplied from outside (e.g. averaged token embeddings).
#[derive(Clone, Debug)]
pub struct SegmentVectors {
    map: BTreeMap<String, Vec<f64>>,
    dim: usize,
}

impl SegmentVectors {
    /// Validates that all vectors share one dimension and contain only
    /// finite components.
    pub fn new(map: BTreeMap<String, Vec<f64>>) -> Result<SegmentVectors> {
        let mut dim = 0;
        for (id, vector) in &map {
            if vector.is_empty() {
                return Err(Error::invalid(format!("vector for '{id}' is empty")));
            }
            if dim == 0 {
                dim = vector.len();
            } else if vector.len() != dim {
                return Err(Error::invalid(format!(
                    "vector for '{id}' has dimension {}, expected {dim}",
                    vector.len()
                )));
            }
            if vector.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(format!("vector for '{id}' has a non-finite component")));
            }
        }
        Ok(SegmentVectors { map, dim })
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.map.get(id).map(Vec::as_slice)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Cosine similarity between two stored segment vectors.
pub fn cosine(a: &str, b: &str, vecs: &SegmentVectors) -> Result<f64> {
    let va = vecs.get(a).ok_or_else(|| Error::MissingVector(a.to_string()))?;
    let vb = vecs.get(b).ok_or_else(|| Error::MissingVector(b.to_string()))?;
    let dot: f64 = va.iter().zip(vb).map(|(x, y)| x * y).sum();
    let na: f64 = va.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = vb.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 {
        return Err(Error::ZeroVector(a.to_string()));
    }
    if nb == 0.0 {
        return Err(Error::ZeroVector(b.to_string()));
    }
    Ok(dot / (na * nb))
}

/// N-gram overlap triple for a segment pair under `cfg`. Stop words are
/// removed when `cfg.stopwords` is present; counts are weight-scaled when
/// `cfg` names a weighted metric.
pub fn rouge_n(cand: &Segment, refr: &Segment, n: usize, cfg: &MetricConfig) -> Result<ScoreTriple> {
    if !(1..=2).contains(&n) {
        return Err(Error::invalid(format!("n must be 1 or 2, got {n}")));
    }
    let ck = eligible_keys(cand, cfg.use_stems, cfg.stopwords.as_ref());
    let rk = eligible_keys(refr, cfg.use_stems, cfg.stopwords.as_ref());
    Ok(rouge_n_keys(&ck, &rk, n, cfg.effective_table()))
}

/// LCS overlap triple for a segment pair under `cfg`.
pub fn rouge_l(cand: &Segment, refr: &Segment, cfg: &MetricConfig) -> Result<ScoreTriple> {
    let ck = eligible_keys(cand, cfg.use_stems, cfg.stopwords.as_ref());
    let rk = eligible_keys(refr, cfg.use_stems, cfg.stopwords.as_ref());
    Ok(rouge_l_keys(&ck, &rk, cfg.effective_table()))
}

fn rouge_triples(
    cand: &Segment,
    refr: &Segment,
    use_stems: bool,
    stopwords: Option<&BTreeSet<String>>,
    table: Option<&WeightTable>,
) -> [ScoreTriple; 3] {
    let ck = eligible_keys(cand, use_stems, stopwords);
    let rk = eligible_keys(refr, use_stems, stopwords);
    [
        rouge_n_keys(&ck, &rk, 1, table),
        rouge_n_keys(&ck, &rk, 2, table),
        rouge_l_keys(&ck, &rk, table),
    ]
}

/// Mean of the word-weighted R1/R2/RL F1 components, with stemming.
pub fn r_wtd(cand: &Segment, refr: &Segment, table: &WeightTable) -> Result<f64> {
    let triples = rouge_triples(cand, refr, true, None, Some(table));
    Ok(triples.iter().map(|t| t.f1).sum::<f64>() / 3.0)
}

/// Mean of R1, R2, RL, and the unigram-alignment score, all as scalars.
/// With a table the overlap components are word-weighted; the alignment
/// score never is.
pub fn rm(
    cand: &Segment,
    refr: &Segment,
    table: Option<&WeightTable>,
    synonyms: Option<&SynonymLexicon>,
) -> Result<f64> {
    let triples = rouge_triples(cand, refr, true, None, table);
    let stages = if synonyms.is_some() { SYNONYM_STAGES } else { DEFAULT_STAGES };
    let alignment = meteor(cand, refr, stages, synonyms)?;
    Ok((triples.iter().map(|t| t.f1).sum::<f64>() + alignment.score) / 4.0)
}

/// Evaluates any configured metric on segment pairs. Borrow-only: build a
/// `MetricConfig` once per chapter and share it across all pair scorings.
#[derive(Clone, Copy)]
pub struct Scorer<'a> {
    pub cfg: &'a MetricConfig,
    pub synonyms: Option<&'a SynonymLexicon>,
    pub vectors: Option<&'a SegmentVectors>,
}

impl<'a> Scorer<'a> {
    pub fn new(cfg: &'a MetricConfig) -> Scorer<'a> {
        Scorer {
            cfg,
            synonyms: None,
            vectors: None,
        }
    }

    pub fn with_synonyms(mut self, synonyms: &'a SynonymLexicon) -> Scorer<'a> {
        self.synonyms = Some(synonyms);
        self
    }

    pub fn with_vectors(mut self, vectors: &'a SegmentVectors) -> Scorer<'a> {
        self.vectors = Some(vectors);
        self
    }

    fn stages(&self) -> &'static [MatcherStage] {
        if self.synonyms.is_some() {
            SYNONYM_STAGES
        } else {
            DEFAULT_STAGES
        }
    }

    /// Full triple for the pair under the configured metric. Metrics that
    /// are not precision/recall shaped (cosine, the alignment score, and
    /// composites) return structured values: composites average their
    /// members componentwise; cosine and the alignment score fill all
    /// components with the scalar.
    pub fn triple(&self, cand: &Segment, refr: &Segment) -> Result<ScoreTriple> {
        let cfg = self.cfg;
        match cfg.metric_id {
            MetricId::R1 | MetricId::R1StopStem => rouge_n(cand, refr, 1, cfg),
            MetricId::R2 => rouge_n(cand, refr, 2, cfg),
            MetricId::RL => rouge_l(cand, refr, cfg),
            MetricId::RWtd => {
                let table = cfg.weight_table.as_ref().ok_or_else(|| {
                    Error::invalid("metric r-wtd requires a weight table")
                })?;
                let triples =
                    rouge_triples(cand, refr, cfg.use_stems, cfg.stopwords.as_ref(), Some(table));
                Ok(ScoreTriple::mean(&triples))
            }
            MetricId::Rm | MetricId::RmWtd => {
                let table = match cfg.metric_id {
                    MetricId::RmWtd => Some(cfg.weight_table.as_ref().ok_or_else(|| {
                        Error::invalid("metric rm-wtd requires a weight table")
                    })?),
                    _ => None,
                };
                let rouge =
                    rouge_triples(cand, refr, cfg.use_stems, cfg.stopwords.as_ref(), table);
                let alignment = meteor(cand, refr, self.stages(), self.synonyms)?;
                let mut triples = rouge.to_vec();
                triples.push(ScoreTriple::uniform(alignment.score));
                Ok(ScoreTriple::mean(&triples))
            }
            MetricId::Meteor => {
                let outcome = meteor(cand, refr, self.stages(), self.synonyms)?;
                Ok(ScoreTriple::uniform(outcome.score))
            }
            MetricId::Cosine => {
                let vectors = self.vectors.ok_or_else(|| {
                    Error::invalid("metric cosine requires segment vectors")
                })?;
                Ok(ScoreTriple::uniform(cosine(&cand.id, &refr.id, vectors)?))
            }
        }
    }

    /// The configured scalar component of [`Scorer::triple`].
    pub fn scalar(&self, cand: &Segment, refr: &Segment) -> Result<f64> {
        Ok(self.triple(cand, refr)?.component(self.cfg.component))
    }
}

/// One row of a multi-reference score report.
#[derive(Clone, Debug)]
pub struct MultiRefRow {
    pub metric: MetricId,
    /// A reference document id, or the aggregate tags `mean` / `best`.
    pub reference_id: String,
    pub triple: ScoreTriple,
}

/// Scores a generated summary against every reference (whole documents,
/// segments concatenated) and appends two aggregate rows per metric: the
/// componentwise `mean` over references (the headline number) and the
/// triple of the `best` reference by F1.
pub fn score_multi_reference(
    generated: &Document,
    references: &[Document],
    metrics: &[MetricId],
    table: Option<&WeightTable>,
    synonyms: Option<&SynonymLexicon>,
    stopwords: Option<&BTreeSet<String>>,
) -> Result<Vec<MultiRefRow>> {
    if references.is_empty() {
        return Err(Error::invalid("need at least one reference summary"));
    }
    let cand = generated.concat_segment();
    let mut rows = Vec::new();
    for &metric in metrics {
        let mut cfg = MetricConfig::new(metric);
        if metric.is_weighted() {
            let table = table.ok_or_else(|| {
                Error::invalid(format!("metric {metric} requires a chapter weight table"))
            })?;
            cfg = cfg.with_table(table.clone());
        }
        if metric == MetricId::R1StopStem {
            let stopwords = stopwords.ok_or_else(|| {
                Error::invalid("metric r1-stopstem requires a stop-word list")
            })?;
            cfg = cfg.with_stopwords(stopwords.clone());
        }
        if metric == MetricId::Cosine {
            return Err(Error::invalid(
                "cosine cannot score whole-summary concatenations; no vector exists for them",
            ));
        }
        let mut scorer = Scorer::new(&cfg);
        if let Some(synonyms) = synonyms {
            scorer = scorer.with_synonyms(synonyms);
        }
        let mut triples = Vec::new();
        for reference in references {
            let refr = reference.concat_segment();
            let triple = scorer.triple(&cand, &refr)?;
            rows.push(MultiRefRow {
                metric,
                reference_id: reference.doc_id.clone(),
                triple,
            });
            triples.push(triple);
        }
        let mean = ScoreTriple::mean(&triples);
        let best = triples
            .iter()
            .copied()
            .max_by(|a, b| a.f1.partial_cmp(&b.f1).unwrap())
            .unwrap();
        rows.push(MultiRefRow {
            metric,
            reference_id: "mean".to_string(),
            triple: mean,
        });
        rows.push(MultiRefRow {
            metric,
            reference_id: "best".to_string(),
            triple: best,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textcore::{tokenize, Role};
    use crate::weighting::{chapter_weight_table, KeyMode};

    fn seg(text: &str) -> Segment {
        Segment::sentence("t/s0", tokenize(text, true, &BTreeSet::new()).unwrap())
    }

    fn doc(id: &str, role: Role, sentences: &[&str]) -> Document {
        let stops = BTreeSet::new();
        Document {
            doc_id: id.to_string(),
            role,
            segments: sentences
                .iter()
                .enumerate()
                .map(|(i, s)| Segment::sentence(format!("{id}/s{i}"), tokenize(s, true, &stops).unwrap()))
                .collect(),
            source_label: None,
        }
    }

    #[test]
    fn metric_names_round_trip() {
        for metric in MetricId::ALL {
            assert_eq!(MetricId::parse(metric.as_str()).unwrap(), metric);
        }
        assert!(MetricId::parse("bleu").is_err());
    }

    #[test]
    fn identical_segments_score_one_on_overlap_metrics() {
        let cfg = MetricConfig::new(MetricId::R1);
        let a = seg("the cat sat on the mat");
        let t = rouge_n(&a, &a, 1, &cfg).unwrap();
        assert_eq!(t.f1, 1.0);
        let t = rouge_l(&a, &a, &MetricConfig::new(MetricId::RL)).unwrap();
        assert_eq!(t.f1, 1.0);
    }

    #[test]
    fn punctuation_excluded_from_overlap() {
        let cfg = MetricConfig::new(MetricId::R1);
        let t = rouge_n(&seg("cat ."), &seg("cat ,"), 1, &cfg).unwrap();
        assert_eq!(t.f1, 1.0);
    }

    #[test]
    fn stopword_removal_changes_r1() {
        let mut stops = BTreeSet::new();
        stops.insert("the".to_string());
        let plain = MetricConfig::new(MetricId::R1);
        let removed = MetricConfig::new(MetricId::R1StopStem).with_stopwords(stops);
        let cand = seg("the cat");
        let refr = seg("the dog");
        let with = rouge_n(&cand, &refr, 1, &plain).unwrap();
        let without = rouge_n(&cand, &refr, 1, &removed).unwrap();
        assert!(with.f1 > 0.0);
        assert_eq!(without.f1, 0.0);
    }

    #[test]
    fn unweighted_metrics_ignore_an_attached_table() {
        let table = WeightTable::constant(0.01, KeyMode::Norm);
        let cfg = MetricConfig::new(MetricId::R1).with_table(table);
        let t = rouge_n(&seg("a b"), &seg("a c"), 1, &cfg).unwrap();
        assert!((t.precision - 0.5).abs() < 1e-12);
    }

    #[test]
    fn weighted_composite_mean_matches_components() {
        let chapter = doc("ch", Role::Chapter, &["the cat sat on the mat", "the dog ran"]);
        let table = chapter_weight_table(&chapter, 1e-3).unwrap();
        let cand = seg("the cat sat");
        let refr = seg("the cat ran on the mat");
        let composite = r_wtd(&cand, &refr, &table).unwrap();
        let cfg = MetricConfig::new(MetricId::RWtd).with_table(table.clone());
        let by_parts = (rouge_n(&cand, &refr, 1, &cfg).unwrap().f1
            + rouge_n(&cand, &refr, 2, &cfg).unwrap().f1
            + rouge_l(&cand, &refr, &cfg).unwrap().f1)
            / 3.0;
        assert!((composite - by_parts).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&composite));
    }

    #[test]
    fn rm_mixes_four_components() {
        let cand = seg("the cat sat");
        let identical = rm(&cand, &cand, None, None).unwrap();
        // overlap components are all 1; the alignment score of a 3-token
        // identical pair is 1 - 0.5/27
        let expect = (3.0 + (1.0 - 0.5 / 27.0)) / 4.0;
        assert!((identical - expect).abs() < 1e-12);
        let disjoint = rm(&seg("aa bb"), &seg("cc dd"), None, None).unwrap();
        assert_eq!(disjoint, 0.0);
    }

    #[test]
    fn cosine_hand_values() {
        let mut map = BTreeMap::new();
        map.insert("a".to_string(), vec![1.0, 0.0]);
        map.insert("b".to_string(), vec![0.0, 1.0]);
        map.insert("c".to_string(), vec![3.0, 0.0]);
        map.insert("z".to_string(), vec![0.0, 0.0]);
        let vecs = SegmentVectors::new(map).unwrap();
        assert_eq!(cosine("a", "a", &vecs).unwrap(), 1.0);
        assert_eq!(cosine("a", "b", &vecs).unwrap(), 0.0);
        assert_eq!(cosine("a", "c", &vecs).unwrap(), 1.0);
        assert!(matches!(cosine("a", "missing", &vecs), Err(Error::MissingVector(_))));
        assert!(matches!(cosine("a", "z", &vecs), Err(Error::ZeroVector(_))));
    }

    #[test]
    fn vector_dimension_mismatch_rejected() {
        let mut map = BTreeMap::new();
        map.insert("a".to_string(), vec![1.0]);
        map.insert("b".to_string(), vec![1.0, 2.0]);
        assert!(SegmentVectors::new(map).is_err());
    }

    #[test]
    fn scorer_uses_configured_component() {
        let mut cfg = MetricConfig::new(MetricId::R1);
        cfg.component = Component::Recall;
        let scorer = Scorer::new(&cfg);
        // candidate covers the whole reference: recall 1, precision 1/2
        let scalar = scorer.scalar(&seg("cat dog"), &seg("cat")).unwrap();
        assert_eq!(scalar, 1.0);
    }

    #[test]
    fn multi_reference_mean_is_componentwise() {
        let generated = doc("gen", Role::Chapter, &["the cat sat"]);
        let refs = [
            doc("ref1", Role::ReferenceSummary, &["the cat sat"]),
            doc("ref2", Role::ReferenceSummary, &["entirely different words"]),
        ];
        let rows =
            score_multi_reference(&generated, &refs, &[MetricId::R1], None, None, None).unwrap();
        assert_eq!(rows.len(), 4);
        let mean = rows.iter().find(|r| r.reference_id == "mean").unwrap();
        assert!((mean.triple.f1 - 0.5).abs() < 1e-12);
        let best = rows.iter().find(|r| r.reference_id == "best").unwrap();
        assert_eq!(best.triple.f1, 1.0);
    }

    #[test]
    fn multi_reference_requires_references() {
        let generated = doc("gen", Role::Chapter, &["a"]);
        assert!(score_multi_reference(&generated, &[], &[MetricId::R1], None, None, None).is_err());
    }

    #[test]
    fn config_validation_catches_missing_resources() {
        assert!(MetricConfig::new(MetricId::RWtd).validate().is_err());
        assert!(MetricConfig::new(MetricId::R1StopStem).validate().is_err());
        assert!(MetricConfig::new(MetricId::R1).validate().is_ok());
    }
}
