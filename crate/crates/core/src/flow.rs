//! Unit-capacity max flow on small digraphs.
//!
//! One shared augmenting-path routine serves every flow question in the crate:
//! callers encode link-disjointness or node-disjointness themselves (by
//! building a line digraph or splitting nodes) and hand over plain arcs.
//! Deterministic: adjacency is scanned in arc insertion order and augmenting
//! paths are shortest-first.

use std::collections::VecDeque;

/// Max flow value plus per-arc saturation flags for the final flow.
pub(crate) fn max_flow_unit(
    num_nodes: usize,
    arcs: &[(usize, usize)],
    source: usize,
    sink: usize,
) -> (usize, Vec<bool>) {
    let mut used = vec![false; arcs.len()];
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); num_nodes];
    for (i, &(u, v)) in arcs.iter().enumerate() {
        adj[u].push((i, true));
        adj[v].push((i, false));
    }
    let mut value = 0usize;
    loop {
        let mut pred: Vec<Option<(usize, bool)>> = vec![None; num_nodes];
        let mut seen = vec![false; num_nodes];
        seen[source] = true;
        let mut queue = VecDeque::new();
        queue.push_back(source);
        'bfs: while let Some(u) = queue.pop_front() {
            for &(ai, fwd) in &adj[u] {
                let (from, to) = arcs[ai];
                let next = if fwd { to } else { from };
                let usable = if fwd { !used[ai] } else { used[ai] };
                // Residual arc: forward if unsaturated, backward if saturated.
                if usable && !seen[next] {
                    seen[next] = true;
                    pred[next] = Some((ai, fwd));
                    if next == sink {
                        break 'bfs;
                    }
                    queue.push_back(next);
                }
            }
        }
        if !seen[sink] {
            break;
        }
        let mut cur = sink;
        while cur != source {
            let (ai, fwd) = pred[cur].expect("path reaches source");
            used[ai] = fwd;
            cur = if fwd { arcs[ai].0 } else { arcs[ai].1 };
        }
        value += 1;
    }
    (value, used)
}
