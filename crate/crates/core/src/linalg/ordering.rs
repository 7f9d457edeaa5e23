//! Level-set nested dissection on the symmetric sparsity graph.

use std::collections::VecDeque;

const LEAF_SIZE: usize = 48;

/// Returns `perm` with `perm[new] = old`. The adjacency is given in CSR form
/// and must be symmetric; self loops are ignored.
pub fn nested_dissection(n: usize, indptr: &[usize], indices: &[usize]) -> Vec<usize> {
    let mut region = vec![0u32; n];
    let mut next_region = 1u32;
    let mut perm = Vec::with_capacity(n);
    let mut level = vec![usize::MAX; n];
    let all: Vec<usize> = (0..n).collect();
    dissect(all, indptr, indices, &mut region, &mut next_region, &mut level, &mut perm);
    debug_assert_eq!(perm.len(), n);
    perm
}

fn bfs(
    start: usize,
    id: u32,
    indptr: &[usize],
    indices: &[usize],
    region: &[u32],
    level: &mut [usize],
    order: &mut Vec<usize>,
) -> usize {
    order.clear();
    let mut q = VecDeque::new();
    level[start] = 0;
    q.push_back(start);
    let mut depth = 0;
    while let Some(v) = q.pop_front() {
        order.push(v);
        depth = depth.max(level[v]);
        for &w in &indices[indptr[v]..indptr[v + 1]] {
            if region[w] == id && level[w] == usize::MAX {
                level[w] = level[v] + 1;
                q.push_back(w);
            }
        }
    }
    depth
}

fn dissect(
    nodes: Vec<usize>,
    indptr: &[usize],
    indices: &[usize],
    region: &mut [u32],
    next_region: &mut u32,
    level: &mut [usize],
    perm: &mut Vec<usize>,
) {
    if nodes.len() <= LEAF_SIZE {
        perm.extend(nodes);
        return;
    }
    let id = *next_region;
    *next_region += 1;
    for &v in &nodes {
        region[v] = id;
        level[v] = usize::MAX;
    }

    // pseudo-peripheral start: two sweeps
    let mut order = Vec::with_capacity(nodes.len());
    bfs(nodes[0], id, indptr, indices, region, level, &mut order);
    let far = *order.last().unwrap();
    for &v in &order {
        level[v] = usize::MAX;
    }
    let depth = bfs(far, id, indptr, indices, region, level, &mut order);

    let reached = order.len();
    let (mut part_a, mut part_b, mut sep) = (Vec::new(), Vec::new(), Vec::new());
    if depth < 2 {
        // dense or tiny component: no useful separator
        let mut rest: Vec<usize> = nodes.iter().copied().filter(|&v| level[v] == usize::MAX).collect();
        for &v in &order {
            level[v] = usize::MAX;
        }
        if rest.is_empty() {
            perm.extend(order);
            return;
        }
        // component fully handled, recurse on the remainder
        perm.extend(order);
        rest.sort_unstable();
        dissect(rest, indptr, indices, region, next_region, level, perm);
        return;
    }
    let mut counts = vec![0usize; depth + 1];
    for &v in &order {
        counts[level[v]] += 1;
    }
    let half = reached / 2;
    let mut acc = 0;
    let mut cut = 1;
    for (l, &c) in counts.iter().enumerate() {
        acc += c;
        if acc >= half {
            cut = l.clamp(1, depth - 1);
            break;
        }
    }
    for &v in &nodes {
        let l = level[v];
        if l == usize::MAX {
            part_b.push(v);
        } else if l < cut {
            part_a.push(v);
        } else if l == cut {
            sep.push(v);
        } else {
            part_b.push(v);
        }
    }
    for &v in &nodes {
        level[v] = usize::MAX;
    }
    dissect(part_a, indptr, indices, region, next_region, level, perm);
    dissect(part_b, indptr, indices, region, next_region, level, perm);
    perm.extend(sep);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_graph(nx: usize, ny: usize) -> (Vec<usize>, Vec<usize>) {
        let id = |i: usize, j: usize| i * ny + j;
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        for i in 0..nx {
            for j in 0..ny {
                if i > 0 {
                    indices.push(id(i - 1, j));
                }
                if j > 0 {
                    indices.push(id(i, j - 1));
                }
                if j + 1 < ny {
                    indices.push(id(i, j + 1));
                }
                if i + 1 < nx {
                    indices.push(id(i + 1, j));
                }
                indptr.push(indices.len());
            }
        }
        (indptr, indices)
    }

    #[test]
    fn permutation_is_complete() {
        let (p, i) = grid_graph(37, 23);
        let perm = nested_dissection(37 * 23, &p, &i);
        let mut seen = vec![false; perm.len()];
        for &v in &perm {
            assert!(!seen[v]);
            seen[v] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn disconnected_graph_is_handled() {
        // two disjoint paths of 60 nodes each
        let n = 120;
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        for v in 0..n {
            let comp_start = if v < 60 { 0 } else { 60 };
            if v > comp_start {
                indices.push(v - 1);
            }
            if v + 1 < comp_start + 60 {
                indices.push(v + 1);
            }
            indptr.push(indices.len());
        }
        let perm = nested_dissection(n, &indptr, &indices);
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..n).collect::<Vec<_>>());
    }
}
