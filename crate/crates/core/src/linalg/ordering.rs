use std::collections::VecDeque;

use super::CsrMatrix;

/// Reverse Cuthill-McKee ordering of the (symmetrized) sparsity graph.
///
/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, _) in a.iter() {
        if i != j {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));

    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(seed, &adj, &degree);
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Repeated BFS towards the deepest, lowest-degree vertex of the component.
fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>], degree: &[usize]) -> usize {
    let mut root = seed;
    let mut depth = 0;
    for _ in 0..8 {
        let levels = bfs_levels(root, adj);
        let max_level = *levels.iter().filter_map(|l| l.as_ref()).max().unwrap();
        let candidate = levels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == Some(max_level))
            .map(|(i, _)| i)
            .min_by_key(|&i| (degree[i], i))
            .unwrap();
        if max_level <= depth {
            break;
        }
        depth = max_level;
        root = candidate;
    }
    root
}

fn bfs_levels(root: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let mut levels = vec![None; adj.len()];
    levels[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let l = levels[v].unwrap();
        for &w in &adj[v] {
            if levels[w].is_none() {
                levels[w] = Some(l + 1);
                queue.push_back(w);
            }
        }
    }
    levels
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::TripletBuilder;

    #[test]
    fn is_a_permutation_and_reduces_bandwidth() {
        // path graph numbered badly: 0-5-1-4-2-3
        let chain = [0, 5, 1, 4, 2, 3];
        let mut t = TripletBuilder::new(6, 6);
        for i in 0..6 {
            t.push(i, i, 2.0);
        }
        for w in chain.windows(2) {
            t.push(w[0], w[1], -1.0);
            t.push(w[1], w[0], -1.0);
        }
        let a = t.build();
        let perm = reverse_cuthill_mckee(&a);
        let mut sorted = perm.clone();
        sorted.sort();
        assert_eq!(sorted, (0..6).collect::<Vec<_>>());
        let mut inv = [0; 6];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let bw = a.iter().map(|(i, j, _)| inv[i].abs_diff(inv[j])).max().unwrap();
        assert_eq!(bw, 1);
    }
}
