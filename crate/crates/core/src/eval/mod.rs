//! Evaluation against human word-pair judgments.
//!
//! Each gold pair is scored by a relatedness method, skipped pairs are
//! counted by reason, and the remaining scores are correlated with the
//! judgments. Per-pair work runs on a dedicated thread pool; results are
//! collected in gold-file order, so reports do not depend on the number of
//! threads.

mod gold;
mod rank;

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ahits::{related_terms, AhitsError, AhitsParams, RankedList};
use crate::graph_store::KnowledgeBase;
use crate::taxonomy::{
    res_hypo_relatedness, res_resnik, CondensedTaxonomy, FreqTable, HypoTable, RelatednessScore,
    SkipReason, TaxonomyError,
};

pub use gold::{load_gold, GoldPair, GoldSet, MAX_GOLD_SCORE};
pub use rank::{
    average_ranks, correlate, footrule, footrule_max, footrule_normalized, overlap, Correlation,
};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("gold file line {line}: {message}")]
    GoldParse { line: usize, message: String },
    #[error("gold file line {line}: score {score} outside 0..=10")]
    ScoreOutOfRange { line: usize, score: f64 },
    #[error("duplicate list element {0}")]
    DuplicateElement(String),
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("degenerate series: {0}")]
    Degenerate(String),
    #[error("no pair could be scored")]
    NoScoredPairs,
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error(transparent)]
    Ahits(#[from] AhitsError),
}

impl EvalError {
    /// True for failures of the statistics rather than of the data.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, EvalError::Degenerate(_) | EvalError::NoScoredPairs)
    }
}

/// How a pair of ranked lists is turned into a relatedness value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparator {
    /// Negated footrule distance, so closer lists score higher.
    Footrule,
    Overlap,
}

/// Taxonomy-based relatedness method and the artifacts it needs.
#[derive(Debug, Clone, Copy)]
pub enum RelatednessMethod<'a> {
    ResHypo {
        ct: &'a CondensedTaxonomy,
        ht: &'a HypoTable,
    },
    ResResnik {
        ct: &'a CondensedTaxonomy,
        ft: &'a FreqTable,
    },
}

impl RelatednessMethod<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            RelatednessMethod::ResHypo { .. } => "res_hypo",
            RelatednessMethod::ResResnik { .. } => "res_resnik",
        }
    }

    pub fn score(
        &self,
        kb: &KnowledgeBase,
        t1: &str,
        t2: &str,
    ) -> Result<RelatednessScore, TaxonomyError> {
        match *self {
            RelatednessMethod::ResHypo { ct, ht } => res_hypo_relatedness(kb, ct, ht, t1, t2),
            RelatednessMethod::ResResnik { ct, ft } => Ok(res_resnik(kb, ft, ct, t1, t2)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    /// Worker threads; at least 1.
    pub jobs: usize,
    /// Time already spent preparing artifacts, reported as offline time.
    pub offline: Duration,
    /// Free-form parameters copied into the report.
    pub params: serde_json::Value,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            jobs: 1,
            offline: Duration::ZERO,
            params: serde_json::Value::Object(Default::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRecord {
    pub word1: String,
    pub word2: String,
    pub gold: f64,
    /// Value used in the correlation; null when skipped.
    pub value: Option<f64>,
    pub skipped: Option<SkipReason>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub footrule: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub footrule_normalized: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub method: String,
    pub params: serde_json::Value,
    pub pearson: f64,
    pub spearman: f64,
    pub n_pairs: usize,
    pub n_scored: usize,
    pub n_skipped: usize,
    pub n_skipped_not_found: usize,
    pub n_skipped_no_common: usize,
    pub offline_ms: Option<f64>,
    pub online_ms: Option<f64>,
    pub per_pair: Vec<PairRecord>,
}

impl EvalReport {
    fn assemble(
        method: String,
        params: serde_json::Value,
        per_pair: Vec<PairRecord>,
        offline: Duration,
        online: Duration,
    ) -> Result<EvalReport, EvalError> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = per_pair
            .iter()
            .filter_map(|p| p.value.map(|v| (v, p.gold)))
            .unzip();
        let count = |r| per_pair.iter().filter(|p| p.skipped == Some(r)).count();
        let n_skipped_not_found = count(SkipReason::TermNotFound);
        let n_skipped_no_common = count(SkipReason::NoCommonConcept);
        let n_skipped = n_skipped_not_found + n_skipped_no_common;
        assert_eq!(n_skipped + xs.len(), per_pair.len(), "pair bookkeeping");
        if xs.is_empty() {
            return Err(EvalError::NoScoredPairs);
        }
        let c = correlate(&xs, &ys)?;
        Ok(EvalReport {
            method,
            params,
            pearson: c.pearson,
            spearman: c.spearman,
            n_pairs: per_pair.len(),
            n_scored: xs.len(),
            n_skipped,
            n_skipped_not_found,
            n_skipped_no_common,
            offline_ms: Some(offline.as_secs_f64() * 1e3),
            online_ms: Some(online.as_secs_f64() * 1e3),
            per_pair,
        })
    }

    /// Drops wall-clock fields so that reports from identical runs compare equal.
    pub fn without_timings(mut self) -> Self {
        self.offline_ms = None;
        self.online_ms = None;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub const CSV_HEADER: &'static str =
        "method,pearson,spearman,n_pairs,n_scored,n_skipped_not_found,n_skipped_no_common,offline_ms,online_ms";

    /// One summary row matching [`EvalReport::CSV_HEADER`].
    pub fn csv_row(&self) -> String {
        let ms = |v: Option<f64>| v.map(|x| format!("{x:.3}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.method,
            self.pearson,
            self.spearman,
            self.n_pairs,
            self.n_scored,
            self.n_skipped_not_found,
            self.n_skipped_no_common,
            ms(self.offline_ms),
            ms(self.online_ms)
        )
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, EvalError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| EvalError::ThreadPool(e.to_string()))
}

fn record(pair: &GoldPair, value: Option<f64>, skipped: Option<SkipReason>) -> PairRecord {
    PairRecord {
        word1: pair.word1.clone(),
        word2: pair.word2.clone(),
        gold: pair.score,
        value,
        skipped,
        footrule: None,
        footrule_normalized: None,
        overlap: None,
    }
}

/// Scores every gold pair with a taxonomy method and correlates with the
/// judgments. Online time covers the pair scoring only.
pub fn evaluate_relatedness(
    kb: &KnowledgeBase,
    gold: &[GoldPair],
    method: RelatednessMethod<'_>,
    opts: &EvalOptions,
) -> Result<EvalReport, EvalError> {
    let start = Instant::now();
    let scored: Vec<Result<RelatednessScore, TaxonomyError>> = pool(opts.jobs)?.install(|| {
        gold.par_iter()
            .map(|p| method.score(kb, &p.word1, &p.word2))
            .collect()
    });
    let mut per_pair = Vec::with_capacity(gold.len());
    for (pair, s) in gold.iter().zip(scored) {
        per_pair.push(match s? {
            RelatednessScore::Value(v) => record(pair, Some(v), None),
            RelatednessScore::Skipped(r) => record(pair, None, Some(r)),
        });
    }
    EvalReport::assemble(
        method.name().to_string(),
        opts.params.clone(),
        per_pair,
        opts.offline,
        start.elapsed(),
    )
}

/// Runs the related-page search for both words of every pair and compares
/// the two lists.
///
/// A pair is skipped as term-not-found when either word has no article, and
/// as no-common-concept when both lists come back empty.
pub fn evaluate_ahits(
    kb: &KnowledgeBase,
    gold: &[GoldPair],
    params: &AhitsParams,
    comparator: Comparator,
    opts: &EvalOptions,
) -> Result<EvalReport, EvalError> {
    params.validate()?;
    let start = Instant::now();
    let mut words: Vec<&str> = Vec::new();
    let mut seen = HashMap::new();
    for p in gold {
        for w in [p.word1.as_str(), p.word2.as_str()] {
            if seen.insert(w, ()).is_none() {
                words.push(w);
            }
        }
    }
    let lists: Vec<Option<RankedList>> = pool(opts.jobs)?.install(|| {
        words
            .par_iter()
            .map(|w| match related_terms(kb, w, params) {
                Ok(list) => Ok(Some(list)),
                Err(AhitsError::SeedNotFound(_) | AhitsError::SeedNotArticle(_)) => Ok(None),
                Err(e) => Err(e),
            })
            .collect::<Result<_, AhitsError>>()
    })?;
    let by_word: HashMap<&str, Option<RankedList>> = words.into_iter().zip(lists).collect();

    let mut per_pair = Vec::with_capacity(gold.len());
    for pair in gold {
        let (Some(l1), Some(l2)) = (&by_word[pair.word1.as_str()], &by_word[pair.word2.as_str()])
        else {
            per_pair.push(record(pair, None, Some(SkipReason::TermNotFound)));
            continue;
        };
        if l1.is_empty() && l2.is_empty() {
            per_pair.push(record(pair, None, Some(SkipReason::NoCommonConcept)));
            continue;
        }
        let (t1, t2) = (l1.titles(), l2.titles());
        let f = footrule(&t1, &t2)?;
        let o = overlap(&t1, &t2);
        let value = match comparator {
            Comparator::Footrule => -(f as f64),
            Comparator::Overlap => o as f64,
        };
        let mut r = record(pair, Some(value), None);
        r.footrule = Some(f);
        r.footrule_normalized = Some(footrule_normalized(&t1, &t2)?);
        r.overlap = Some(o);
        per_pair.push(r);
    }
    let method = match comparator {
        Comparator::Footrule => "ahits_footrule",
        Comparator::Overlap => "ahits_overlap",
    };
    EvalReport::assemble(
        method.to_string(),
        opts.params.clone(),
        per_pair,
        opts.offline,
        start.elapsed(),
    )
}
