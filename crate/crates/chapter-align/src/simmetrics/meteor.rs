//! Unigram-alignment similarity with a fragmentation penalty. Tokens are
//! matched in stages (exact surface match first, then stems, then an
//! optional synonym lexicon); each stage adds a maximum one-to-one matching
//! over the still-unmatched tokens, choosing among maximum matchings the
//! one that keeps the running alignment least fragmented.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::textcore::{Segment, Token};

/// How tokens may be judged equivalent, tried in order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatcherStage {
    Exact,
    Stem,
    Synonym,
}

/// The default matcher cascade: exact surface matches, then stem matches.
pub const DEFAULT_STAGES: &[MatcherStage] = &[MatcherStage::Exact, MatcherStage::Stem];

/// The cascade used when a synonym lexicon is available.
pub const SYNONYM_STAGES: &[MatcherStage] = &[
    MatcherStage::Exact,
    MatcherStage::Stem,
    MatcherStage::Synonym,
];

/// Above this many total matched tokens the chunk-minimizing search falls
/// back to a greedy matching.
const EXACT_SEARCH_LIMIT: usize = 12;

/// Recursion budget for the chunk-minimizing search.
const SEARCH_NODE_CAP: usize = 200_000;

/// Symmetric word-to-word synonym lookup, loaded from TSV.
#[derive(Clone, Debug, Default)]
pub struct SynonymLexicon {
    map: BTreeMap<String, BTreeSet<String>>,
}

impl SynonymLexicon {
    /// Parses `word<TAB>synonym` lines; `#` comments and blanks are
    /// skipped; the symmetric closure is applied.
    pub fn parse(text: &str) -> Result<SynonymLexicon> {
        let mut map: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            let (a, b) = match (parts.next(), parts.next()) {
                (Some(a), Some(b)) if !a.is_empty() && !b.is_empty() => (a, b),
                _ => {
                    return Err(Error::invalid(format!(
                        "synonym line {} is not word<TAB>synonym",
                        lineno + 1
                    )))
                }
            };
            let a = a.to_lowercase();
            let b = b.to_lowercase();
            map.entry(a.clone()).or_default().insert(b.clone());
            map.entry(b).or_default().insert(a);
        }
        Ok(SynonymLexicon { map })
    }

    pub fn load(path: &Path) -> Result<SynonymLexicon> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SynonymLexicon::parse(&text)
    }

    /// True when `a` and `b` (lowercased words) are listed as synonyms.
    pub fn are_synonyms(&self, a: &str, b: &str) -> bool {
        self.map.get(a).is_some_and(|set| set.contains(b))
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Everything the score is made of, for callers that want more than the
/// final number.
#[derive(Clone, Copy, Debug)]
pub struct MeteorOutcome {
    pub score: f64,
    pub precision: f64,
    pub recall: f64,
    /// Matched token count m.
    pub matches: usize,
    /// Number of maximal runs of adjacent matches.
    pub chunks: usize,
    /// False when any stage fell back to the greedy matcher instead of the
    /// exhaustive chunk-minimizing search.
    pub exact_chunk_search: bool,
}

impl MeteorOutcome {
    fn zero() -> MeteorOutcome {
        MeteorOutcome {
            score: 0.0,
            precision: 0.0,
            recall: 0.0,
            matches: 0,
            chunks: 0,
            exact_chunk_search: true,
        }
    }
}

fn stage_equal(stage: MatcherStage, a: &Token, b: &Token, syn: Option<&SynonymLexicon>) -> bool {
    match stage {
        MatcherStage::Exact => a.norm == b.norm,
        MatcherStage::Stem => a.stem == b.stem,
        MatcherStage::Synonym => syn.is_some_and(|lex| lex.are_synonyms(&a.norm, &b.norm)),
    }
}

/// Number of chunks in a set of (candidate, reference) position pairs: runs
/// where both positions advance by exactly one stay in the same chunk.
fn chunk_count(pairs: &[(usize, usize)]) -> usize {
    let mut sorted: Vec<(usize, usize)> = pairs.to_vec();
    sorted.sort_unstable();
    let mut chunks = 0;
    let mut prev: Option<(usize, usize)> = None;
    for &(c, r) in &sorted {
        if prev != Some((c.wrapping_sub(1), r.wrapping_sub(1))) {
            chunks += 1;
        }
        prev = Some((c, r));
    }
    chunks
}

/// Maximum bipartite matching size over `options` (per free candidate, the
/// list of compatible free reference positions), via augmenting paths.
/// Returns for each candidate slot the chosen reference, if any.
fn kuhn_matching(options: &[Vec<usize>], ref_slots: usize) -> Vec<Option<usize>> {
    let mut ref_owner: Vec<Option<usize>> = vec![None; ref_slots];

    fn try_augment(
        slot: usize,
        options: &[Vec<usize>],
        ref_owner: &mut Vec<Option<usize>>,
        visited: &mut Vec<bool>,
    ) -> bool {
        for &r in &options[slot] {
            if visited[r] {
                continue;
            }
            visited[r] = true;
            if ref_owner[r].is_none()
                || try_augment(ref_owner[r].unwrap(), options, ref_owner, visited)
            {
                ref_owner[r] = Some(slot);
                return true;
            }
        }
        false
    }

    for slot in 0..options.len() {
        let mut visited = vec![false; ref_slots];
        try_augment(slot, options, &mut ref_owner, &mut visited);
    }
    let mut chosen = vec![None; options.len()];
    for (r, owner) in ref_owner.iter().enumerate() {
        if let Some(slot) = *owner {
            chosen[slot] = Some(r);
        }
    }
    chosen
}

struct ChunkSearch<'a> {
    slots: &'a [(usize, Vec<usize>)],
    fixed: &'a [(usize, usize)],
    target: usize,
    nodes: usize,
    aborted: bool,
    best_chunks: usize,
    best: Option<Vec<(usize, usize)>>,
}

impl ChunkSearch<'_> {
    /// Depth-first over free candidate slots in ascending position order,
    /// carrying the running chunk count; appending a pair never decreases
    /// it, so the count prunes.
    fn run(&mut self) {
        let mut used: BTreeSet<usize> = BTreeSet::new();
        let mut chosen: Vec<(usize, usize)> = Vec::new();
        self.descend(0, 0, &mut used, &mut chosen);
    }

    fn descend(
        &mut self,
        slot: usize,
        matched: usize,
        used: &mut BTreeSet<usize>,
        chosen: &mut Vec<(usize, usize)>,
    ) {
        self.nodes += 1;
        if self.nodes > SEARCH_NODE_CAP {
            self.aborted = true;
            return;
        }
        if matched + (self.slots.len() - slot) < self.target {
            return;
        }
        if slot == self.slots.len() {
            if matched == self.target {
                let mut all: Vec<(usize, usize)> = self.fixed.to_vec();
                all.extend_from_slice(chosen);
                let chunks = chunk_count(&all);
                if chunks < self.best_chunks {
                    self.best_chunks = chunks;
                    self.best = Some(chosen.clone());
                }
            }
            return;
        }
        let cand_pos = self.slots[slot].0;
        let options: Vec<usize> = self.slots[slot]
            .1
            .iter()
            .copied()
            .filter(|r| !used.contains(r))
            .collect();
        for r in options {
            chosen.push((cand_pos, r));
            used.insert(r);
            self.descend(slot + 1, matched + 1, used, chosen);
            used.remove(&r);
            chosen.pop();
            if self.aborted {
                return;
            }
        }
        self.descend(slot + 1, matched, used, chosen);
    }
}

/// Computes the score of `cand` against `refr` through the given matcher
/// cascade. Punctuation tokens are ignored on both sides.
pub fn meteor(
    cand: &Segment,
    refr: &Segment,
    stages: &[MatcherStage],
    synonyms: Option<&SynonymLexicon>,
) -> Result<MeteorOutcome> {
    let cand_tokens: Vec<&Token> = cand.tokens.iter().filter(|t| !t.is_punct).collect();
    let ref_tokens: Vec<&Token> = refr.tokens.iter().filter(|t| !t.is_punct).collect();
    if cand_tokens.is_empty() || ref_tokens.is_empty() {
        return Ok(MeteorOutcome::zero());
    }

    let mut matched_pairs: Vec<(usize, usize)> = Vec::new();
    let mut cand_free: Vec<bool> = vec![true; cand_tokens.len()];
    let mut ref_free: Vec<bool> = vec![true; ref_tokens.len()];
    let mut exact_search = true;

    for &stage in stages {
        if stage == MatcherStage::Synonym && synonyms.is_none() {
            continue;
        }
        let slots: Vec<(usize, Vec<usize>)> = (0..cand_tokens.len())
            .filter(|&c| cand_free[c])
            .map(|c| {
                let options: Vec<usize> = (0..ref_tokens.len())
                    .filter(|&r| {
                        ref_free[r] && stage_equal(stage, cand_tokens[c], ref_tokens[r], synonyms)
                    })
                    .collect();
                (c, options)
            })
            .filter(|(_, options)| !options.is_empty())
            .collect();
        if slots.is_empty() {
            continue;
        }
        let option_lists: Vec<Vec<usize>> = slots.iter().map(|(_, o)| o.clone()).collect();
        let kuhn = kuhn_matching(&option_lists, ref_tokens.len());
        let target: usize = kuhn.iter().flatten().count();
        if target == 0 {
            continue;
        }

        let stage_pairs: Vec<(usize, usize)> = if matched_pairs.len() + target <= EXACT_SEARCH_LIMIT
        {
            let mut search = ChunkSearch {
                slots: &slots,
                fixed: &matched_pairs,
                target,
                nodes: 0,
                aborted: false,
                best_chunks: usize::MAX,
                best: None,
            };
            search.run();
            match (search.aborted, search.best) {
                (false, Some(best)) => best,
                _ => {
                    exact_search = false;
                    kuhn_pairs(&slots, &kuhn)
                }
            }
        } else {
            exact_search = false;
            kuhn_pairs(&slots, &kuhn)
        };

        for &(c, r) in &stage_pairs {
            cand_free[c] = false;
            ref_free[r] = false;
        }
        matched_pairs.extend(stage_pairs);
    }

    let m = matched_pairs.len();
    if m == 0 {
        return Ok(MeteorOutcome::zero());
    }
    let chunks = chunk_count(&matched_pairs);
    let precision = m as f64 / cand_tokens.len() as f64;
    let recall = m as f64 / ref_tokens.len() as f64;
    let f_mean = 10.0 * precision * recall / (recall + 9.0 * precision);
    let penalty = 0.5 * (chunks as f64 / m as f64).powi(3);
    Ok(MeteorOutcome {
        score: f_mean * (1.0 - penalty),
        precision,
        recall,
        matches: m,
        chunks,
        exact_chunk_search: exact_search,
    })
}

fn kuhn_pairs(slots: &[(usize, Vec<usize>)], kuhn: &[Option<usize>]) -> Vec<(usize, usize)> {
    slots
        .iter()
        .zip(kuhn.iter())
        .filter_map(|((c, _), r)| r.map(|r| (*c, r)))
        .collect()
}
