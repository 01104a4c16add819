use std::collections::HashMap;
use std::mem;

use serde::Serialize;

use crate::graph_store::{KnowledgeBase, PageId};
use crate::scc;

pub const DEFAULT_MAX_ELEMENTARY: usize = 10_000;

/// Census of cycles in the category graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CycleReport {
    /// Strongly connected components with more than one category, each
    /// sorted, ordered by smallest member.
    pub components: Vec<Vec<PageId>>,
    /// Categories listed as their own parent.
    pub self_loops: Vec<PageId>,
    /// Simple cycles of length >= 2, each starting at its smallest id.
    /// Self-loops are not repeated here.
    pub elementary_cycles: Vec<Vec<PageId>>,
    /// More elementary cycles exist than were enumerated.
    pub truncated: bool,
}

impl CycleReport {
    pub fn is_acyclic(&self) -> bool {
        self.components.is_empty() && self.self_loops.is_empty()
    }
}

/// Finds every multi-category SCC and self-loop, and enumerates simple
/// cycles (Johnson's algorithm) inside the SCCs until `max_elementary`
/// have been listed.
pub fn detect_cycles(kb: &KnowledgeBase, max_elementary: usize) -> CycleReport {
    let categories: Vec<PageId> = kb.categories().collect();
    let dense: HashMap<PageId, usize> = categories
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i))
        .collect();
    let mut adj = vec![Vec::new(); categories.len()];
    let mut self_loops = Vec::new();
    for &(child, parent) in kb.cat_edges() {
        if let (Some(&c), Some(&p)) = (dense.get(&child), dense.get(&parent)) {
            if c == p {
                self_loops.push(child);
            } else {
                adj[c].push(p);
            }
        }
    }
    let (comp, n_comp) = scc::tarjan(&adj);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_comp];
    for (i, &c) in comp.iter().enumerate() {
        members[c].push(i);
    }
    let mut groups: Vec<Vec<usize>> = members.into_iter().filter(|m| m.len() > 1).collect();
    groups.sort_by_key(|m| m[0]);

    let mut report = CycleReport {
        components: groups
            .iter()
            .map(|m| m.iter().map(|&i| categories[i]).collect())
            .collect(),
        self_loops,
        ..Default::default()
    };
    for group in &groups {
        let local: HashMap<usize, usize> = group.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        let local_adj: Vec<Vec<usize>> = group
            .iter()
            .map(|&g| {
                adj[g]
                    .iter()
                    .filter_map(|w| local.get(w).copied())
                    .collect()
            })
            .collect();
        let ids: Vec<PageId> = group.iter().map(|&g| categories[g]).collect();
        let remaining = max_elementary - report.elementary_cycles.len();
        let done = johnson(&local_adj, remaining, &mut |cycle| {
            report
                .elementary_cycles
                .push(cycle.iter().map(|&l| ids[l]).collect());
        });
        if !done {
            report.truncated = true;
            break;
        }
    }
    report
}

struct Frame {
    v: usize,
    next: usize,
    found: bool,
}

/// Enumerates simple cycles of a strongly connected graph, each rooted at
/// its smallest vertex. Returns false if more than `limit` cycles exist.
fn johnson(adj: &[Vec<usize>], limit: usize, emit: &mut dyn FnMut(&[usize])) -> bool {
    let n = adj.len();
    let mut emitted = 0usize;
    let mut blocked = vec![false; n];
    let mut blocked_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut path = Vec::new();
    let mut frames: Vec<Frame> = Vec::new();

    for s in 0..n {
        for v in s..n {
            blocked[v] = false;
            blocked_by[v].clear();
        }
        blocked[s] = true;
        path.push(s);
        frames.push(Frame {
            v: s,
            next: 0,
            found: false,
        });

        while let Some(top) = frames.last_mut() {
            let v = top.v;
            if let Some(&w) = adj[v].get(top.next) {
                top.next += 1;
                if w < s {
                    continue;
                }
                if w == s {
                    top.found = true;
                    if emitted == limit {
                        return false;
                    }
                    emitted += 1;
                    emit(&path);
                } else if !blocked[w] {
                    blocked[w] = true;
                    path.push(w);
                    frames.push(Frame {
                        v: w,
                        next: 0,
                        found: false,
                    });
                }
                continue;
            }
            let frame = frames.pop().expect("frame");
            if frame.found {
                unblock(v, &mut blocked, &mut blocked_by);
            } else {
                for &w in &adj[v] {
                    if w >= s && !blocked_by[w].contains(&v) {
                        blocked_by[w].push(v);
                    }
                }
            }
            path.pop();
            if let Some(parent) = frames.last_mut() {
                parent.found |= frame.found;
            }
        }
    }
    true
}

fn unblock(u: usize, blocked: &mut [bool], blocked_by: &mut [Vec<usize>]) {
    blocked[u] = false;
    let mut work = vec![u];
    while let Some(x) = work.pop() {
        for w in mem::take(&mut blocked_by[x]) {
            if blocked[w] {
                blocked[w] = false;
                work.push(w);
            }
        }
    }
}
