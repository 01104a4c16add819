//! Related-page search with hub/authority scores (adapted HITS).
//!
//! For a seed article the search collects a small link neighborhood, runs
//! the HITS power iteration on it and ranks the other pages by authority.
//!
//! ```text
//! auth(v) = Σ_{u→v} hub(u)
//! hub(u)  = Σ_{u→v} auth(v)
//! ```
//!
//! Both vectors are rescaled to unit Euclidean length after every update.
//! The authority vector converges to the principal eigenvector of `AᵀA`.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::graph_store::{KnowledgeBase, PageId, PageKind};

#[derive(Debug, Error)]
pub enum AhitsError {
    #[error("seed {0:?} not found")]
    SeedNotFound(String),
    #[error("seed page {0} is not an article")]
    SeedNotArticle(PageId),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AhitsParams {
    /// Root set size, seed included.
    pub root_set_size: usize,
    /// In-link neighbors added per root-set node.
    pub increment: usize,
    /// Length of the returned list.
    pub n_sought: usize,
    /// Maximum cluster weight. Accepted and stored; the ranking does not use it.
    pub c_max: Option<f64>,
    pub epsilon: f64,
    pub max_iter: usize,
    /// Candidates must belong to at least one of these categories.
    pub category_whitelist: Option<BTreeSet<String>>,
    /// Candidates in any of these categories are dropped.
    pub category_blacklist: Option<BTreeSet<String>>,
}

impl Default for AhitsParams {
    fn default() -> Self {
        Self::high_load()
    }
}

impl AhitsParams {
    fn with_sizes(root_set_size: usize, increment: usize, n_sought: usize) -> Self {
        AhitsParams {
            root_set_size,
            increment,
            n_sought,
            c_max: None,
            epsilon: 1e-8,
            max_iter: 200,
            category_whitelist: None,
            category_blacklist: None,
        }
    }

    /// Root set 3, increment 1, 10 results.
    pub fn low_load() -> Self {
        Self::with_sizes(3, 1, 10)
    }

    /// Root set 200, increment 17, 1000 results.
    pub fn high_load() -> Self {
        Self::with_sizes(200, 17, 1000)
    }

    pub fn validate(&self) -> Result<(), AhitsError> {
        let bad = |m: &str| Err(AhitsError::InvalidParams(m.to_string()));
        if self.root_set_size == 0 {
            return bad("root set size must be positive");
        }
        if self.n_sought == 0 {
            return bad("n_sought must be positive");
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return bad("epsilon must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        if matches!(self.c_max, Some(c) if c.is_nan() || c <= 0.0) {
            return bad("c_max must be positive");
        }
        Ok(())
    }
}

/// Induced link subgraph. Node 0 is the seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    nodes: Vec<PageId>,
    /// (source, destination) as node indices, sorted, no self-loops.
    edges: Vec<(usize, usize)>,
}

impl Subgraph {
    /// Builds an induced subgraph over `nodes`; self-loops are dropped.
    pub fn induced(kb: &KnowledgeBase, nodes: Vec<PageId>) -> Self {
        let index: HashMap<PageId, usize> =
            nodes.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut edges = Vec::new();
        for (i, &p) in nodes.iter().enumerate() {
            for q in kb.out_links(p) {
                if let Some(&j) = index.get(q) {
                    if i != j {
                        edges.push((i, j));
                    }
                }
            }
        }
        edges.sort_unstable();
        Subgraph { nodes, edges }
    }

    /// A subgraph on `n` anonymous nodes, for running HITS on arbitrary graphs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut edges: Vec<_> = edges
            .iter()
            .copied()
            .filter(|&(a, b)| a != b && a < n && b < n)
            .collect();
        edges.sort_unstable();
        edges.dedup();
        Subgraph {
            nodes: (1..=n as u32).map(PageId).collect(),
            edges,
        }
    }

    pub fn nodes(&self) -> &[PageId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

struct CategoryFilter {
    allow: Option<HashSet<PageId>>,
    deny: HashSet<PageId>,
}

impl CategoryFilter {
    fn new(kb: &KnowledgeBase, params: &AhitsParams) -> Self {
        let resolve = |titles: &BTreeSet<String>| -> HashSet<PageId> {
            titles
                .iter()
                .filter_map(|t| kb.category_by_title(t))
                .collect()
        };
        CategoryFilter {
            allow: params.category_whitelist.as_ref().map(resolve),
            deny: params
                .category_blacklist
                .as_ref()
                .map(resolve)
                .unwrap_or_default(),
        }
    }

    fn accepts(&self, kb: &KnowledgeBase, page: PageId) -> bool {
        let cats = kb.parents(page);
        if cats.iter().any(|c| self.deny.contains(c)) {
            return false;
        }
        match &self.allow {
            Some(allow) => cats.iter().any(|c| allow.contains(c)),
            None => true,
        }
    }
}

/// Collects the seed's link neighborhood.
///
/// The root set is the seed plus up to `root_set_size - 1` neighbors: out-link
/// targets first, then in-link sources, each in ascending page id. The base
/// set then adds, for every root-set node in order, up to `increment` of its
/// in-link sources not already present. Category filters apply to every
/// candidate but never to the seed.
pub fn build_neighborhood(
    kb: &KnowledgeBase,
    seed: PageId,
    params: &AhitsParams,
) -> Result<Subgraph, AhitsError> {
    match kb.kind(seed) {
        Some(PageKind::Article) => {}
        Some(_) => return Err(AhitsError::SeedNotArticle(seed)),
        None => return Err(AhitsError::SeedNotFound(seed.to_string())),
    }
    let filter = CategoryFilter::new(kb, params);
    let mut nodes = vec![seed];
    let mut present: HashSet<PageId> = HashSet::from([seed]);

    let candidates = kb.out_links(seed).iter().chain(kb.in_links(seed));
    for &p in candidates {
        if nodes.len() >= params.root_set_size {
            break;
        }
        if !present.contains(&p) && filter.accepts(kb, p) {
            present.insert(p);
            nodes.push(p);
        }
    }

    let root_len = nodes.len();
    for i in 0..root_len {
        let mut added = 0;
        for &p in kb.in_links(nodes[i]) {
            if added == params.increment {
                break;
            }
            if !present.contains(&p) && filter.accepts(kb, p) {
                present.insert(p);
                nodes.push(p);
                added += 1;
            }
        }
    }
    Ok(Subgraph::induced(kb, nodes))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HubAuthScores {
    /// Indexed like the subgraph's nodes.
    pub hub: Vec<f64>,
    pub authority: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
    /// The graph has no edges, so both vectors are zero.
    pub degenerate: bool,
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// HITS power iteration from all-ones vectors.
///
/// Stops once no component of either vector moves by `epsilon` or more, or
/// after `max_iter` rounds.
pub fn run_hits(g: &Subgraph, epsilon: f64, max_iter: usize) -> HubAuthScores {
    let n = g.len();
    if g.edges.is_empty() {
        return HubAuthScores {
            hub: vec![0.0; n],
            authority: vec![0.0; n],
            iterations_used: 0,
            converged: false,
            degenerate: true,
        };
    }
    let mut hub = vec![1.0; n];
    let mut auth = vec![1.0; n];
    let mut next_auth = vec![0.0; n];
    let mut next_hub = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        next_auth.iter_mut().for_each(|x| *x = 0.0);
        for &(u, v) in &g.edges {
            next_auth[v] += hub[u];
        }
        normalize(&mut next_auth);
        next_hub.iter_mut().for_each(|x| *x = 0.0);
        for &(u, v) in &g.edges {
            next_hub[u] += next_auth[v];
        }
        normalize(&mut next_hub);

        let delta = auth
            .iter()
            .zip(&next_auth)
            .chain(hub.iter().zip(&next_hub))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut auth, &mut next_auth);
        std::mem::swap(&mut hub, &mut next_hub);
        if delta < epsilon {
            converged = true;
            break;
        }
    }
    HubAuthScores {
        hub,
        authority: auth,
        iterations_used: iterations,
        converged,
        degenerate: false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedEntry {
    pub page: PageId,
    pub title: String,
    pub score: f64,
}

/// Pages related to a seed, best first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedList {
    pub seed: PageId,
    pub entries: Vec<RankedEntry>,
}

impl RankedList {
    pub fn titles(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.title.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Neighborhood, HITS, then every non-seed node by descending authority
/// (ties by title), cut to `n_sought`.
pub fn related_terms(
    kb: &KnowledgeBase,
    seed_term: &str,
    params: &AhitsParams,
) -> Result<RankedList, AhitsError> {
    params.validate()?;
    let seed = kb
        .resolve_title(seed_term)
        .ok_or_else(|| AhitsError::SeedNotFound(seed_term.to_string()))?;
    let g = build_neighborhood(kb, seed, params)?;
    let scores = run_hits(&g, params.epsilon, params.max_iter);
    if !scores.converged && !scores.degenerate {
        log::debug!(
            "HITS for {seed_term:?} stopped after {} iterations without converging",
            scores.iterations_used
        );
    }
    let mut entries: Vec<RankedEntry> = g
        .nodes()
        .iter()
        .zip(&scores.authority)
        .skip(1)
        .map(|(&page, &score)| RankedEntry {
            page,
            title: kb.title(page).unwrap_or_default().to_string(),
            score,
        })
        .collect();
    entries.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.title.cmp(&b.title))
    });
    entries.truncate(params.n_sought);
    Ok(RankedList { seed, entries })
}
