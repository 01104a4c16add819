//! Test-only generators and brute-force oracles. Nothing here calls into
//! the algorithms being checked except to read the knowledge base.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use wikirel::{KnowledgeBase, Page, PageId, PageKind};

pub const ARTICLE_BASE: u32 = 100_000;

/// Random category graph on ids `1..=n_cats`. Every category except 1 gets a
/// parent with a smaller id, so category 1 is the single top. With
/// `plant_cycles`, one to five extra edges each close a cycle. Articles get
/// ids from `ARTICLE_BASE + 1` and one to three categories each.
pub fn random_taxonomy(
    rng: &mut impl Rng,
    n_cats: u32,
    n_articles: u32,
    max_cat_edges: usize,
    plant_cycles: bool,
) -> KnowledgeBase {
    let mut pages: Vec<Page> = (1..=n_cats)
        .map(|i| Page::new(i, PageKind::Category, format!("Cat{i}")))
        .collect();
    let mut cat_edges = BTreeSet::new();
    let mut tree_parent = vec![0; n_cats as usize + 1];
    for child in 2..=n_cats {
        let parent = rng.gen_range(1..child);
        tree_parent[child as usize] = parent;
        cat_edges.insert((child, parent));
    }
    if n_cats > 2 {
        let target = rng.gen_range(cat_edges.len()..=max_cat_edges.max(cat_edges.len()));
        for _ in 0..3 * target {
            if cat_edges.len() >= target {
                break;
            }
            let child = rng.gen_range(3..=n_cats);
            cat_edges.insert((child, rng.gen_range(1..child)));
        }
    }
    if plant_cycles {
        // Make an ancestor of `low` (found by climbing tree parents) a child
        // of `low`, which closes a cycle; zero steps gives a self-loop.
        for _ in 0..rng.gen_range(1..=5) {
            let low = rng.gen_range(1..=n_cats);
            let mut top = low;
            for _ in 0..rng.gen_range(0..=3) {
                if tree_parent[top as usize] != 0 {
                    top = tree_parent[top as usize];
                }
            }
            cat_edges.insert((top, low));
        }
    }
    let mut edges: Vec<(PageId, PageId)> = cat_edges
        .into_iter()
        .map(|(c, p)| (PageId(c), PageId(p)))
        .collect();
    for a in 1..=n_articles {
        let id = ARTICLE_BASE + a;
        pages.push(Page::new(id, PageKind::Article, format!("art{a}")));
        for _ in 0..rng.gen_range(1..=3) {
            edges.push((PageId(id), PageId(rng.gen_range(1..=n_cats))));
        }
    }
    KnowledgeBase::from_parts(pages, vec![], edges, vec![]).unwrap()
}

/// A tree of `n` categories with `k` extra back-edges forming 2-cycles and
/// `m` self-loops on distinct categories.
pub fn planted_cycles(n: u32, k: u32, m: u32) -> KnowledgeBase {
    let pages = (1..=n)
        .map(|i| Page::new(i, PageKind::Category, format!("C{i}")))
        .collect();
    let mut edges: Vec<(PageId, PageId)> = (2..=n).map(|i| (PageId(i), PageId(i / 2))).collect();
    // Child 4j+2 has odd parent 2j+1; reversing that edge closes a 2-cycle
    // whose members are shared with no other planted cycle.
    for j in 0..k {
        let child = 4 * j + 2;
        edges.push((PageId(child / 2), PageId(child)));
    }
    for j in 0..m {
        let c = n - j;
        edges.push((PageId(c), PageId(c)));
    }
    KnowledgeBase::from_parts(pages, vec![], edges, vec![]).unwrap()
}

fn walk(start: PageId, next: impl Fn(PageId) -> Vec<PageId>) -> HashSet<PageId> {
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for y in next(x) {
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen
}

/// Categories and articles reachable downward from `cat`, itself excluded.
pub fn brute_hypo(kb: &KnowledgeBase, cat: PageId) -> u64 {
    let below = walk(cat, |x| kb.children(x).to_vec());
    below.len() as u64 - 1
}

/// `cat` and every category above it.
pub fn brute_ancestors(kb: &KnowledgeBase, cat: PageId) -> HashSet<PageId> {
    walk(cat, |x| kb.parents(x).to_vec())
}

/// Categories plus articles that belong to some category.
pub fn brute_total(kb: &KnowledgeBase) -> u64 {
    let cats = kb.categories().count();
    let arts = kb.articles().filter(|&a| !kb.parents(a).is_empty()).count();
    (cats + arts) as u64
}

pub fn brute_ic(hypo: u64, total: u64) -> f64 {
    1.0 - ((hypo + 1) as f64).log10() / (total as f64).log10()
}

/// Relatedness by enumerating every (c1, c2, common subsumer) triple.
/// `root` is the top category; subsumers in its cycle count as the root.
/// Returns None when the pair would be skipped.
pub fn brute_res_hypo(kb: &KnowledgeBase, root: PageId, t1: &str, t2: &str) -> Option<f64> {
    let p1 = kb.resolve_title(t1)?;
    let p2 = kb.resolve_title(t2)?;
    let total = brute_total(kb);
    let root_group: HashSet<PageId> = brute_ancestors(kb, root)
        .into_iter()
        .filter(|&c| brute_ancestors(kb, c).contains(&root))
        .collect();
    let cats = |p: PageId| -> Vec<PageId> {
        if kb.kind(p) == Some(PageKind::Category) {
            vec![p]
        } else {
            kb.parents(p).to_vec()
        }
    };
    let mut best: Option<f64> = None;
    let mut root_only = false;
    for c1 in cats(p1) {
        for c2 in cats(p2) {
            let a1 = brute_ancestors(kb, c1);
            let a2 = brute_ancestors(kb, c2);
            let common: Vec<PageId> = a1.intersection(&a2).copied().collect();
            if common.is_empty() {
                continue;
            }
            if common.iter().all(|c| root_group.contains(c)) {
                root_only = true;
                continue;
            }
            for s in common {
                let v = brute_ic(brute_hypo(kb, s), total);
                best = Some(best.map_or(v, |b: f64| b.max(v)));
            }
        }
    }
    best.or(root_only.then_some(0.0))
}

/// Random simple digraph on `n` nodes, each ordered pair an edge with
/// probability `p`.
pub fn random_digraph(rng: &mut impl Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// Expected HITS authority vector from a dense eigendecomposition of AᵀA:
/// the first authority update Aᵀ·1 projected onto the top eigenspace.
pub fn authority_oracle(n: usize, edges: &[(usize, usize)]) -> Option<DVector<f64>> {
    let mut a = DMatrix::<f64>::zeros(n, n);
    for &(u, v) in edges {
        a[(u, v)] = 1.0;
    }
    let m = a.transpose() * &a;
    let eig = m.symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    if top <= 0.0 {
        return None;
    }
    let start = a.transpose() * DVector::from_element(n, 1.0);
    let mut proj = DVector::<f64>::zeros(n);
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda >= top * (1.0 - 1e-9) {
            let v = eig.eigenvectors.column(i);
            proj += v * v.dot(&start);
        }
    }
    let norm = proj.norm();
    (norm > 0.0).then(|| proj / norm)
}

/// Ratio of the second-largest to largest eigenvalue of AᵀA (distinct).
pub fn eigen_gap_ratio(n: usize, edges: &[(usize, usize)]) -> f64 {
    let mut a = DMatrix::<f64>::zeros(n, n);
    for &(u, v) in edges {
        a[(u, v)] = 1.0;
    }
    let mut vals: Vec<f64> = (a.transpose() * &a)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .collect();
    vals.sort_by(|x, y| y.total_cmp(x));
    let top = vals[0];
    vals.iter()
        .find(|&&v| v < top * (1.0 - 1e-9))
        .map_or(0.0, |&v| v / top)
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Footrule straight from its definition: pad, then linear position search.
pub fn brute_footrule(a: &[u32], b: &[u32]) -> u64 {
    let mut padded = b.to_vec();
    for x in a {
        if !b.contains(x) {
            padded.push(*x);
        }
    }
    let mut sum = 0i64;
    for (i, x) in a.iter().enumerate() {
        let j = padded.iter().position(|y| y == x).unwrap();
        sum += (i as i64 - j as i64).abs();
    }
    sum as u64
}

pub fn random_permutation(rng: &mut impl Rng, n: u32) -> Vec<u32> {
    let mut v: Vec<u32> = (0..n).collect();
    v.shuffle(rng);
    v
}

/// Pearson from raw sums.
pub fn textbook_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let syy: f64 = y.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}

/// Rank of each value counted directly: 1 + #smaller + (#equal - 1) / 2.
pub fn textbook_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let less = x.iter().filter(|&&w| w < v).count() as f64;
            let equal = x.iter().filter(|&&w| w == v).count() as f64;
            1.0 + less + (equal - 1.0) / 2.0
        })
        .collect()
}

pub fn textbook_spearman(x: &[f64], y: &[f64]) -> f64 {
    textbook_pearson(&textbook_ranks(x), &textbook_ranks(y))
}
