//! Category taxonomy: cycle condensation, hyponym counts and
//! information-content relatedness.
//!
//! The category graph of an encyclopedia is not a tree and not even acyclic.
//! [`condense`] collapses every strongly connected component into a
//! supernode, giving a DAG on which [`compute_hypo_table`] counts distinct
//! descendants and [`res_hypo_relatedness`] scores term pairs.

mod cycles;
mod hypo;
mod resnik;

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::path::PathBuf;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::graph_store::{KnowledgeBase, PageId, PageKind};
use crate::scc;

pub use cycles::{detect_cycles, CycleReport, DEFAULT_MAX_ELEMENTARY};
pub use hypo::{
    category_ic, compute_hypo_table, information_content, lcs, res_hypo_relatedness, HypoTable,
    LcsResult,
};
pub use resnik::{
    compute_freq_table, load_word_concepts, res_resnik, CorpusCounts, FreqTable, WordConcepts,
};

/// Index of a supernode inside a [`CondensedTaxonomy`].
pub type SupernodeId = usize;

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("no taxonomy: the category graph is empty")]
    NoTaxonomy,
    #[error("degenerate taxonomy: {total} concept(s), need at least 2")]
    DegenerateTaxonomy { total: u64 },
    #[error("hyponym count {hypo} exceeds the number of other concepts ({total} total)")]
    HypoExceedsTotal { hypo: u64, total: u64 },
    #[error("hyponym count of supernode {parent} does not exceed that of its child {child}")]
    NotMonotone {
        child: SupernodeId,
        parent: SupernodeId,
    },
    #[error("condensed category graph is not acyclic")]
    NotAcyclic,
    #[error("unknown category {0}")]
    UnknownCategory(PageId),
    #[error("unknown category {0:?}")]
    UnknownCategoryTitle(String),
    #[error("empty corpus: total word count is zero")]
    EmptyCorpus,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

/// Why a pair received no score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SkipReason {
    /// One of the terms does not resolve to a page.
    TermNotFound,
    /// Both terms resolve, but share no concept.
    NoCommonConcept,
}

impl SkipReason {
    pub fn as_str(self) -> &'static str {
        match self {
            SkipReason::TermNotFound => "term-not-found",
            SkipReason::NoCommonConcept => "no-common-concept",
        }
    }
}

impl Serialize for SkipReason {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelatednessScore {
    Value(f64),
    Skipped(SkipReason),
}

impl RelatednessScore {
    pub fn value(self) -> Option<f64> {
        match self {
            RelatednessScore::Value(v) => Some(v),
            RelatednessScore::Skipped(_) => None,
        }
    }
}

/// The category graph with cycles collapsed.
///
/// Supernodes are numbered by their smallest member id, so numbering does
/// not depend on traversal order. Edges point from child to parent.
#[derive(Debug, Clone)]
pub struct CondensedTaxonomy {
    supernodes: Vec<Vec<PageId>>,
    supernode_of: HashMap<PageId, SupernodeId>,
    parents: Vec<Vec<SupernodeId>>,
    children: Vec<Vec<SupernodeId>>,
    article_attach: Vec<Vec<PageId>>,
    /// Attached articles, ascending; position is the article's dense index.
    articles: Vec<PageId>,
    /// Children before parents.
    bottom_up: Vec<SupernodeId>,
    n_categories: usize,
    root: Option<SupernodeId>,
}

/// Collapses category cycles into supernodes and attaches articles.
///
/// The root supernode is the one holding the knowledge base's root
/// category when it has been restricted; otherwise it is the unique
/// parentless supernode if there is exactly one.
pub fn condense(kb: &KnowledgeBase) -> Result<CondensedTaxonomy, TaxonomyError> {
    let categories: Vec<PageId> = kb.categories().collect();
    if categories.is_empty() {
        return Err(TaxonomyError::NoTaxonomy);
    }
    let dense: HashMap<PageId, usize> = categories
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i))
        .collect();
    let mut adj = vec![Vec::new(); categories.len()];
    for &(child, parent) in kb.cat_edges() {
        if let (Some(&c), Some(&p)) = (dense.get(&child), dense.get(&parent)) {
            adj[c].push(p);
        }
    }
    let (comp, n_comp) = scc::tarjan(&adj);

    // Renumber components by smallest member. `categories` is sorted, so the
    // first time a component is seen is at its smallest member.
    let mut renumber = vec![usize::MAX; n_comp];
    let mut supernodes: Vec<Vec<PageId>> = Vec::with_capacity(n_comp);
    for (i, &cat) in categories.iter().enumerate() {
        let c = comp[i];
        if renumber[c] == usize::MAX {
            renumber[c] = supernodes.len();
            supernodes.push(Vec::new());
        }
        supernodes[renumber[c]].push(cat);
    }
    let node_of = |i: usize| renumber[comp[i]];
    let supernode_of: HashMap<PageId, SupernodeId> = categories
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, node_of(i)))
        .collect();

    let mut parent_sets = vec![BTreeSet::new(); n_comp];
    for (c, ps) in adj.iter().enumerate() {
        for &p in ps {
            let (a, b) = (node_of(c), node_of(p));
            if a != b {
                parent_sets[a].insert(b);
            }
        }
    }
    let parents: Vec<Vec<SupernodeId>> = parent_sets
        .into_iter()
        .map(|s| s.into_iter().collect())
        .collect();
    let mut children = vec![Vec::new(); n_comp];
    for (c, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(c);
        }
    }

    let mut attach = vec![BTreeSet::new(); n_comp];
    let mut articles = BTreeSet::new();
    for &(child, parent) in kb.cat_edges() {
        if kb.kind(child) == Some(PageKind::Article) {
            if let Some(&s) = supernode_of.get(&parent) {
                attach[s].insert(child);
                articles.insert(child);
            }
        }
    }

    let bottom_up = topological_bottom_up(&parents, &children)?;
    let root = match kb.root_category() {
        Some(r) => supernode_of.get(&r).copied(),
        None => {
            let mut tops = (0..n_comp).filter(|&s| parents[s].is_empty());
            match (tops.next(), tops.next()) {
                (Some(top), None) => Some(top),
                _ => None,
            }
        }
    };

    Ok(CondensedTaxonomy {
        supernodes,
        supernode_of,
        parents,
        children,
        article_attach: attach
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect(),
        articles: articles.into_iter().collect(),
        bottom_up,
        n_categories: categories.len(),
        root,
    })
}

/// Kahn's algorithm from the leaves up; fails if any supernode is left over.
fn topological_bottom_up(
    parents: &[Vec<SupernodeId>],
    children: &[Vec<SupernodeId>],
) -> Result<Vec<SupernodeId>, TaxonomyError> {
    let mut pending: Vec<usize> = children.iter().map(Vec::len).collect();
    let mut ready: BinaryHeap<Reverse<SupernodeId>> = (0..pending.len())
        .filter(|&s| pending[s] == 0)
        .map(Reverse)
        .collect();
    let mut order = Vec::with_capacity(pending.len());
    while let Some(Reverse(s)) = ready.pop() {
        order.push(s);
        for &p in &parents[s] {
            pending[p] -= 1;
            if pending[p] == 0 {
                ready.push(Reverse(p));
            }
        }
    }
    if order.len() != pending.len() {
        return Err(TaxonomyError::NotAcyclic);
    }
    Ok(order)
}

impl CondensedTaxonomy {
    pub fn len(&self) -> usize {
        self.supernodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supernodes.is_empty()
    }

    /// Categories in the supernode, ascending.
    pub fn members(&self, s: SupernodeId) -> &[PageId] {
        &self.supernodes[s]
    }

    pub fn supernodes(&self) -> &[Vec<PageId>] {
        &self.supernodes
    }

    pub fn supernode_of(&self, category: PageId) -> Option<SupernodeId> {
        self.supernode_of.get(&category).copied()
    }

    pub fn parents(&self, s: SupernodeId) -> &[SupernodeId] {
        &self.parents[s]
    }

    pub fn children(&self, s: SupernodeId) -> &[SupernodeId] {
        &self.children[s]
    }

    /// Articles whose parent category lies in `s`.
    pub fn articles_at(&self, s: SupernodeId) -> &[PageId] {
        &self.article_attach[s]
    }

    pub(crate) fn article_index(&self, article: PageId) -> Option<usize> {
        self.articles.binary_search(&article).ok()
    }

    /// DAG edges as (child, parent) pairs.
    pub fn dag_edges(&self) -> impl Iterator<Item = (SupernodeId, SupernodeId)> + '_ {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| (c, p)))
    }

    /// Every supernode appears after all of its children.
    pub fn bottom_up(&self) -> &[SupernodeId] {
        &self.bottom_up
    }

    pub fn n_categories(&self) -> usize {
        self.n_categories
    }

    pub fn n_articles(&self) -> usize {
        self.articles.len()
    }

    /// C: categories plus attached articles.
    pub fn total_concepts(&self) -> u64 {
        (self.n_categories + self.articles.len()) as u64
    }

    pub fn root(&self) -> Option<SupernodeId> {
        self.root
    }

    /// `s` and all supernodes above it, ascending.
    pub fn ancestors(&self, s: SupernodeId) -> Vec<SupernodeId> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(x) = stack.pop() {
            for &p in &self.parents[x] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen.iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    /// Supernodes standing for a page: its own supernode for a category,
    /// the supernodes of its categories for an article.
    pub fn concepts_of(&self, kb: &KnowledgeBase, page: PageId) -> Vec<SupernodeId> {
        if let Some(s) = self.supernode_of(page) {
            return vec![s];
        }
        let mut out: Vec<_> = kb
            .parents(page)
            .iter()
            .filter_map(|&c| self.supernode_of(c))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}
