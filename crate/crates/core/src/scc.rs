//! Tarjan's strongly connected components, iterative.

/// Returns the component index of every node, plus the component count.
///
/// Components are numbered in the order Tarjan closes them, which is a
/// reverse topological order of the condensation: if there is an edge from
/// component `a` to component `b` (a != b) then `b < a`.
pub fn tarjan(adj: &[Vec<usize>]) -> (Vec<usize>, usize) {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNSEEN; n];
    let mut next_index = 0;
    let mut n_comp = 0;
    let mut frames: Vec<(usize, usize)> = Vec::new();

    for start in 0..n {
        if index[start] != UNSEEN {
            continue;
        }
        index[start] = next_index;
        low[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;
        frames.push((start, 0));

        while let Some(top) = frames.last_mut() {
            let (v, pos) = *top;
            if let Some(&w) = adj[v].get(pos) {
                top.1 += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(u, _)) = frames.last() {
                low[u] = low[u].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp[w] = n_comp;
                    if w == v {
                        break;
                    }
                }
                n_comp += 1;
            }
        }
    }
    (comp, n_comp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycle_plus_tail() {
        // 0 <-> 1, 2 -> 1
        let adj = vec![vec![1], vec![0], vec![1]];
        let (comp, n) = tarjan(&adj);
        assert_eq!(n, 2);
        assert_eq!(comp[0], comp[1]);
        assert!(comp[2] > comp[1]);
    }

    #[test]
    fn long_chain_does_not_overflow() {
        let n = 200_000;
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|i| if i + 1 < n { vec![i + 1] } else { vec![0] })
            .collect();
        let (_, count) = tarjan(&adj);
        assert_eq!(count, 1);
    }
}
