//! Corpus-frequency information content: `-ln P(c)` with
//! `P(c) = freq(c) / N`, where `freq(c)` sums the counts of every word whose
//! concept lies at or below `c`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::graph_store::{for_each_row, KnowledgeBase, PageId, StoreError};

use super::hypo::sorted_intersection;
use super::{CondensedTaxonomy, RelatednessScore, SkipReason, SupernodeId, TaxonomyError};

/// Word occurrence counts, `count(n)` per word and their total `N`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusCounts {
    counts: BTreeMap<String, u64>,
    total: u64,
}

/// word -> categories the word denotes.
pub type WordConcepts = BTreeMap<String, BTreeSet<PageId>>;

impl CorpusCounts {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds to a word's count.
    pub fn add(&mut self, word: impl Into<String>, count: u64) {
        *self.counts.entry(word.into()).or_default() += count;
        self.total += count;
    }

    pub fn count(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.counts.iter().map(|(w, &c)| (w.as_str(), c))
    }

    /// Reads `word<TAB>count` rows.
    pub fn load(path: &Path) -> Result<CorpusCounts, TaxonomyError> {
        let mut out = CorpusCounts::new();
        for_each_row(path, 2, |line, cols| {
            let count = cols[1]
                .trim()
                .parse::<u64>()
                .map_err(|_| (line, format!("invalid count {:?}", cols[1])))?;
            out.add(cols[0], count);
            Ok(())
        })
        .map_err(store_to_taxonomy)?;
        Ok(out)
    }
}

impl<S: Into<String>> FromIterator<(S, u64)> for CorpusCounts {
    fn from_iter<I: IntoIterator<Item = (S, u64)>>(iter: I) -> Self {
        let mut out = CorpusCounts::new();
        for (w, c) in iter {
            out.add(w, c);
        }
        out
    }
}

/// Reads `word<TAB>category_title` rows, resolving titles against `kb`.
pub fn load_word_concepts(path: &Path, kb: &KnowledgeBase) -> Result<WordConcepts, TaxonomyError> {
    let mut out = WordConcepts::new();
    for_each_row(path, 2, |line, cols| {
        let cat = kb
            .category_by_title(cols[1])
            .ok_or_else(|| (line, format!("unknown category {:?}", cols[1])))?;
        out.entry(cols[0].to_string()).or_default().insert(cat);
        Ok(())
    })
    .map_err(store_to_taxonomy)?;
    Ok(out)
}

fn store_to_taxonomy(e: StoreError) -> TaxonomyError {
    match e {
        StoreError::Io { path, source } => TaxonomyError::Io { path, source },
        StoreError::Parse {
            path,
            line,
            message,
        } => TaxonomyError::Parse {
            path,
            line,
            message,
        },
        other => TaxonomyError::Parse {
            path: Default::default(),
            line: 0,
            message: other.to_string(),
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreqTable {
    freq: Vec<u64>,
    total: u64,
}

impl FreqTable {
    pub fn freq(&self, s: SupernodeId) -> u64 {
        self.freq[s]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn probability(&self, s: SupernodeId) -> f64 {
        self.freq[s] as f64 / self.total as f64
    }
}

/// Propagates word counts upward. Each word adds its count once to every
/// supernode at or above any of its concepts, so a word reachable along two
/// paths is not counted twice.
pub fn compute_freq_table(
    ct: &CondensedTaxonomy,
    counts: &CorpusCounts,
    word_concepts: &WordConcepts,
) -> Result<FreqTable, TaxonomyError> {
    if counts.total() == 0 {
        return Err(TaxonomyError::EmptyCorpus);
    }
    let mut freq = vec![0u64; ct.len()];
    for (word, cats) in word_concepts {
        let mut reached = BTreeSet::new();
        for &cat in cats {
            let s = ct
                .supernode_of(cat)
                .ok_or(TaxonomyError::UnknownCategory(cat))?;
            reached.extend(ct.ancestors(s));
        }
        let n = counts.count(word);
        for s in reached {
            freq[s] += n;
        }
    }
    Ok(FreqTable {
        freq,
        total: counts.total(),
    })
}

/// Resnik relatedness: the largest `-ln P(c)` over common subsumers `c` of
/// any category pair of the two terms. Subsumers never observed in the
/// corpus (`P = 0`) are ignored.
pub fn res_resnik(
    kb: &KnowledgeBase,
    ft: &FreqTable,
    ct: &CondensedTaxonomy,
    term1: &str,
    term2: &str,
) -> RelatednessScore {
    let (Some(p1), Some(p2)) = (kb.resolve_title(term1), kb.resolve_title(term2)) else {
        return RelatednessScore::Skipped(SkipReason::TermNotFound);
    };
    let anc = |p| -> Vec<Vec<SupernodeId>> {
        ct.concepts_of(kb, p)
            .into_iter()
            .map(|s| ct.ancestors(s))
            .collect()
    };
    let (a1, a2) = (anc(p1), anc(p2));
    let mut best: Option<f64> = None;
    for x in &a1 {
        for y in &a2 {
            for s in sorted_intersection(x, y) {
                if ft.freq(s) == 0 {
                    continue;
                }
                let v = -ft.probability(s).ln();
                best = Some(best.map_or(v, |b| b.max(v)));
            }
        }
    }
    match best {
        // -ln(1) is -0.0
        Some(v) => RelatednessScore::Value(v.max(0.0)),
        None => RelatednessScore::Skipped(SkipReason::NoCommonConcept),
    }
}
