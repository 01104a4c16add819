use crate::bitset::BitSet;
use crate::graph_store::{KnowledgeBase, PageId};

use super::{CondensedTaxonomy, RelatednessScore, SkipReason, SupernodeId, TaxonomyError};

/// Distinct hyponym counts per supernode.
///
/// `hypo(s)` counts every category and article at or below `s`, except the
/// queried category itself. Other members of the same cycle count as
/// hyponyms. A node reachable along several paths is counted once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypoTable {
    hypo: Vec<u64>,
    total_concepts: u64,
}

/// Counts descendants by unioning bit sets bottom-up.
///
/// A supernode's set is released as soon as its last parent has consumed
/// it, so peak memory tracks the width of the DAG rather than its size.
pub fn compute_hypo_table(ct: &CondensedTaxonomy) -> HypoTable {
    let n_bits = ct.n_categories() + ct.n_articles();
    let mut member_offset = Vec::with_capacity(ct.len());
    let mut next = 0;
    for s in 0..ct.len() {
        member_offset.push(next);
        next += ct.members(s).len();
    }

    let mut unconsumed: Vec<usize> = (0..ct.len()).map(|s| ct.parents(s).len()).collect();
    let mut sets: Vec<Option<BitSet>> = vec![None; ct.len()];
    let mut hypo = vec![0; ct.len()];
    for &s in ct.bottom_up() {
        let mut set = BitSet::new(n_bits);
        set.insert_range(member_offset[s]..member_offset[s] + ct.members(s).len());
        for &a in ct.articles_at(s) {
            let idx = ct.article_index(a).expect("attached article is indexed");
            set.insert(ct.n_categories() + idx);
        }
        for &c in ct.children(s) {
            set.union_with(sets[c].as_ref().expect("child processed before parent"));
            unconsumed[c] -= 1;
            if unconsumed[c] == 0 {
                sets[c] = None;
            }
        }
        hypo[s] = set.count() - 1;
        if unconsumed[s] > 0 {
            sets[s] = Some(set);
        }
    }
    HypoTable {
        hypo,
        total_concepts: ct.total_concepts(),
    }
}

/// `1 - log(hypo + 1) / log(total)`; the log base cancels out.
pub fn information_content(hypo: u64, total: u64) -> Result<f64, TaxonomyError> {
    if total < 2 {
        return Err(TaxonomyError::DegenerateTaxonomy { total });
    }
    if hypo >= total {
        return Err(TaxonomyError::HypoExceedsTotal { hypo, total });
    }
    Ok(1.0 - ((hypo + 1) as f64).ln() / (total as f64).ln())
}

impl HypoTable {
    pub fn hypo(&self, s: SupernodeId) -> u64 {
        self.hypo[s]
    }

    pub fn total_concepts(&self) -> u64 {
        self.total_concepts
    }

    pub fn len(&self) -> usize {
        self.hypo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypo.is_empty()
    }

    pub fn ic(&self, s: SupernodeId) -> Result<f64, TaxonomyError> {
        information_content(self.hypo[s], self.total_concepts)
    }

    /// Table-wide sanity checks: no count reaches C, and counts never
    /// decrease from child to parent.
    pub fn check_invariants(&self, ct: &CondensedTaxonomy) -> Result<(), TaxonomyError> {
        for (s, &h) in self.hypo.iter().enumerate() {
            if h >= self.total_concepts {
                return Err(TaxonomyError::HypoExceedsTotal {
                    hypo: h,
                    total: self.total_concepts,
                });
            }
            for &p in ct.parents(s) {
                if self.hypo[p] <= h {
                    return Err(TaxonomyError::NotMonotone {
                        child: s,
                        parent: p,
                    });
                }
            }
        }
        Ok(())
    }
}

pub fn category_ic(
    ct: &CondensedTaxonomy,
    ht: &HypoTable,
    category: PageId,
) -> Result<f64, TaxonomyError> {
    let s = ct
        .supernode_of(category)
        .ok_or(TaxonomyError::UnknownCategory(category))?;
    ht.ic(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcsResult {
    pub lcs: SupernodeId,
    pub hypo: u64,
    pub ic: f64,
    /// The root is the only common subsumer.
    pub root_only: bool,
}

/// Most informative common subsumer of two categories.
pub fn lcs(
    ct: &CondensedTaxonomy,
    ht: &HypoTable,
    c1: PageId,
    c2: PageId,
) -> Result<Option<LcsResult>, TaxonomyError> {
    let s1 = ct
        .supernode_of(c1)
        .ok_or(TaxonomyError::UnknownCategory(c1))?;
    let s2 = ct
        .supernode_of(c2)
        .ok_or(TaxonomyError::UnknownCategory(c2))?;
    lcs_of(ct, ht, &ct.ancestors(s1), &ct.ancestors(s2))
}

/// Picks the common ancestor with the smallest hyponym count, then the
/// smallest supernode id. Both inputs must be sorted.
fn lcs_of(
    ct: &CondensedTaxonomy,
    ht: &HypoTable,
    anc1: &[SupernodeId],
    anc2: &[SupernodeId],
) -> Result<Option<LcsResult>, TaxonomyError> {
    let common = sorted_intersection(anc1, anc2);
    let Some(&best) = common.iter().min_by_key(|&&s| (ht.hypo(s), s)) else {
        return Ok(None);
    };
    let root_only = common.len() == 1 && Some(best) == ct.root();
    Ok(Some(LcsResult {
        lcs: best,
        hypo: ht.hypo(best),
        ic: ht.ic(best)?,
        root_only,
    }))
}

pub(crate) fn sorted_intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Relatedness of two terms from the hyponym-based information content of
/// their least common subsumer, maximised over both pages' categories.
///
/// A pair whose only shared ancestor is the root scores 0. Unresolvable
/// terms and pairs with no shared ancestor are skipped.
pub fn res_hypo_relatedness(
    kb: &KnowledgeBase,
    ct: &CondensedTaxonomy,
    ht: &HypoTable,
    term1: &str,
    term2: &str,
) -> Result<RelatednessScore, TaxonomyError> {
    let (Some(p1), Some(p2)) = (kb.resolve_title(term1), kb.resolve_title(term2)) else {
        return Ok(RelatednessScore::Skipped(SkipReason::TermNotFound));
    };
    let anc = |p| -> Vec<Vec<SupernodeId>> {
        ct.concepts_of(kb, p)
            .into_iter()
            .map(|s| ct.ancestors(s))
            .collect()
    };
    let (a1, a2) = (anc(p1), anc(p2));

    let mut best: Option<f64> = None;
    let mut root_hit = false;
    for x in &a1 {
        for y in &a2 {
            match lcs_of(ct, ht, x, y)? {
                None => {}
                Some(r) if r.root_only => root_hit = true,
                Some(r) => best = Some(best.map_or(r.ic, |b: f64| b.max(r.ic))),
            }
        }
    }
    Ok(match (best, root_hit) {
        (Some(v), _) => RelatednessScore::Value(v),
        (None, true) => RelatednessScore::Value(0.0),
        (None, false) => RelatednessScore::Skipped(SkipReason::NoCommonConcept),
    })
}
