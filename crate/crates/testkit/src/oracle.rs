//! Slow, direct computations used as ground truth.
//!
//! Graphs are given as `n` nodes labelled `0..n` and a list of directed
//! weighted arcs; "undirected" means an arc in either direction.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};

pub type Arc = (usize, usize, f64);

/// Symmetric 0/1 adjacency ignoring direction and weight.
pub fn adjacency(n: usize, arcs: &[Arc]) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b, _) in arcs {
        if a != b {
            adj[a][b] = true;
            adj[b][a] = true;
        }
    }
    adj
}

/// Symmetric weights: `A_ij = w(i,j) + w(j,i)`.
pub fn symmetric_weights(n: usize, arcs: &[Arc]) -> Vec<Vec<f64>> {
    let mut w = vec![vec![0.0; n]; n];
    for &(a, b, x) in arcs {
        w[a][b] += x;
        w[b][a] += x;
    }
    w
}

/// All `k`-subsets of `0..n`, in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Every `k`-clique found by testing all `k`-subsets.
pub fn k_cliques(n: usize, arcs: &[Arc], k: usize) -> Vec<Vec<usize>> {
    let adj = adjacency(n, arcs);
    subsets(n, k)
        .into_iter()
        .filter(|s| s.iter().enumerate().all(|(i, &a)| s[i + 1..].iter().all(|&b| adj[a][b])))
        .collect()
}

/// Clique percolation communities: `k`-cliques are adjacent when they share
/// exactly `k − 1` nodes; each connected component's node union is one community.
pub fn cpm(n: usize, arcs: &[Arc], k: usize) -> BTreeSet<BTreeSet<usize>> {
    let cliques = k_cliques(n, arcs, k);
    let sets: Vec<BTreeSet<usize>> = cliques.iter().map(|c| c.iter().copied().collect()).collect();
    let mut component = vec![usize::MAX; sets.len()];
    let mut next = 0;
    for start in 0..sets.len() {
        if component[start] != usize::MAX {
            continue;
        }
        component[start] = next;
        let mut stack = vec![start];
        while let Some(c) = stack.pop() {
            for other in 0..sets.len() {
                if component[other] == usize::MAX && sets[c].intersection(&sets[other]).count() == k - 1 {
                    component[other] = next;
                    stack.push(other);
                }
            }
        }
        next += 1;
    }
    let mut groups: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (i, set) in sets.iter().enumerate() {
        groups.entry(component[i]).or_default().extend(set);
    }
    groups.into_values().collect()
}

/// Newman modularity `Q = 1/2m Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j)`.
///
/// Nodes missing from `partition` are treated as singletons.
pub fn modularity(n: usize, arcs: &[Arc], partition: &[BTreeSet<usize>]) -> f64 {
    let a = symmetric_weights(n, arcs);
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut label: Vec<usize> = (0..n).map(|i| partition.len() + i).collect();
    for (c, set) in partition.iter().enumerate() {
        for &v in set {
            label[v] = c;
        }
    }
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if label[i] == label[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// All set partitions of `items` (restricted growth strings).
pub fn set_partitions(items: &[usize]) -> Vec<Vec<BTreeSet<usize>>> {
    fn go(i: usize, items: &[usize], blocks: &mut Vec<BTreeSet<usize>>, out: &mut Vec<Vec<BTreeSet<usize>>>) {
        if i == items.len() {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].insert(items[i]);
            go(i + 1, items, blocks, out);
            blocks[b].remove(&items[i]);
        }
        blocks.push(BTreeSet::from([items[i]]));
        go(i + 1, items, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    go(0, items, &mut Vec::new(), &mut out);
    out
}

/// Largest modularity over every partition of `0..n`.
pub fn best_modularity(n: usize, arcs: &[Arc]) -> f64 {
    let items: Vec<usize> = (0..n).collect();
    set_partitions(&items).iter().map(|p| modularity(n, arcs, p)).fold(f64::NEG_INFINITY, f64::max)
}

/// Hop distances by Floyd–Warshall on the undirected graph; `None` when unreachable.
pub fn hop_distances(n: usize, arcs: &[Arc]) -> Vec<Vec<Option<usize>>> {
    let adj = adjacency(n, arcs);
    let mut d = vec![vec![None; n]; n];
    for i in 0..n {
        d[i][i] = Some(0);
        for j in 0..n {
            if adj[i][j] {
                d[i][j] = Some(1);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// `d(x) / (n − 1)` with `d(x)` the number of undirected neighbours.
pub fn degree_centrality(n: usize, arcs: &[Arc]) -> Vec<f64> {
    let adj = adjacency(n, arcs);
    adj.iter().map(|row| row.iter().filter(|&&x| x).count() as f64 / (n - 1) as f64).collect()
}

/// `(n − 1) / Σ_y dist(x, y)` with unreachable nodes at distance `n`.
pub fn closeness_centrality(n: usize, arcs: &[Arc]) -> Vec<f64> {
    let d = hop_distances(n, arcs);
    (0..n)
        .map(|x| {
            let total: usize = (0..n).filter(|&y| y != x).map(|y| d[x][y].unwrap_or(n)).sum();
            (n - 1) as f64 / total as f64
        })
        .collect()
}

/// Every shortest path from `s` to `t`, as node sequences.
pub fn shortest_paths(n: usize, arcs: &[Arc], s: usize, t: usize) -> Vec<Vec<usize>> {
    let adj = adjacency(n, arcs);
    let d = hop_distances(n, arcs);
    let Some(target) = d[s][t] else { return Vec::new() };
    let mut out = Vec::new();
    let mut path = vec![s];
    fn go(
        adj: &[Vec<bool>],
        d: &[Vec<Option<usize>>],
        t: usize,
        target: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let v = *path.last().unwrap();
        if v == t {
            out.push(path.clone());
            return;
        }
        for w in 0..adj.len() {
            // stay on a geodesic: each step must get one hop closer to t
            if adj[v][w] && d[w][t].is_some_and(|x| x + path.len() == target) {
                path.push(w);
                go(adj, d, t, target, path, out);
                path.pop();
            }
        }
    }
    go(&adj, &d, t, target, &mut path, &mut out);
    out
}

/// Betweenness from explicit path enumeration over ordered pairs, divided by `n − 1`.
pub fn betweenness_centrality(n: usize, arcs: &[Arc]) -> Vec<f64> {
    let mut cb = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t {
                continue;
            }
            let paths = shortest_paths(n, arcs, s, t);
            if paths.is_empty() {
                continue;
            }
            for (z, score) in cb.iter_mut().enumerate() {
                if z == s || z == t {
                    continue;
                }
                let through = paths.iter().filter(|p| p.contains(&z)).count();
                *score += through as f64 / paths.len() as f64;
            }
        }
    }
    cb.iter().map(|x| x / (n - 1) as f64).collect()
}

/// Social position as the solution of `(I − ε Cᵀ) SP = (1 − ε)·1`, where
/// `C` is the out-weight row normalisation of the arcs.
pub fn social_position(n: usize, arcs: &[Arc], epsilon: f64) -> Vec<f64> {
    let mut w = DMatrix::<f64>::zeros(n, n);
    for &(a, b, x) in arcs {
        w[(a, b)] += x;
    }
    let mut c = DMatrix::<f64>::zeros(n, n);
    for y in 0..n {
        let total: f64 = w.row(y).sum();
        if total > 0.0 {
            for x in 0..n {
                c[(y, x)] = w[(y, x)] / total;
            }
        }
    }
    let system = DMatrix::<f64>::identity(n, n) - c.transpose() * epsilon;
    let rhs = DVector::<f64>::from_element(n, 1.0 - epsilon);
    let sol = system.lu().solve(&rhs).expect("I - εCᵀ is nonsingular for ε < 1");
    sol.iter().copied().collect()
}
