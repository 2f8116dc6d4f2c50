//! Per-frame community extraction.
//!
//! Two extractors are provided: k-clique percolation, which yields
//! overlapping groups, and Louvain modularity optimisation, which yields a
//! hierarchy of disjoint partitions. Both read the frame as undirected; CPM
//! also ignores weights.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::tsn::{FrameGraph, Group, GroupId, NodeId, UndirectedView};

/// All k-cliques of a frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueSet {
    pub k: usize,
    /// Each clique holds exactly `k` nodes; the list is sorted.
    pub cliques: Vec<BTreeSet<NodeId>>,
}

fn check_k(k: usize) -> Result<()> {
    if k < 3 {
        return Err(Error::Parameter(format!("clique size k must be at least 3, got {k}")));
    }
    Ok(())
}

/// Lists every node subset of size `k` that is complete in the undirected view.
pub fn enumerate_k_cliques(frame: &FrameGraph, k: usize) -> Result<CliqueSet> {
    check_k(k)?;
    let view = frame.undirected();
    // forward[i]: neighbours with a larger index, so each clique is built once in index order
    let forward: Vec<Vec<usize>> =
        (0..view.len()).map(|i| view.neighbors(i).iter().map(|&(j, _)| j).filter(|&j| j > i).collect()).collect();

    let mut cliques = Vec::new();
    let mut stack = Vec::with_capacity(k);
    for (v, later) in forward.iter().enumerate() {
        stack.push(v);
        extend_clique(&view, &mut stack, later, k, &mut cliques);
        stack.pop();
    }
    Ok(CliqueSet { k, cliques })
}

fn extend_clique(
    view: &UndirectedView,
    stack: &mut Vec<usize>,
    candidates: &[usize],
    k: usize,
    out: &mut Vec<BTreeSet<NodeId>>,
) {
    if stack.len() == k {
        out.push(stack.iter().map(|&i| view.ids()[i]).collect());
        return;
    }
    if stack.len() + candidates.len() < k {
        return;
    }
    for (pos, &c) in candidates.iter().enumerate() {
        let next: Vec<usize> = candidates[pos + 1..].iter().copied().filter(|&d| view.has_edge(c, d)).collect();
        stack.push(c);
        extend_clique(view, stack, &next, k, out);
        stack.pop();
    }
}

/// Maximal cliques (Bron–Kerbosch with Tomita pivoting), as sorted index lists.
fn maximal_cliques(view: &UndirectedView) -> Vec<Vec<usize>> {
    let neigh: Vec<BTreeSet<usize>> =
        (0..view.len()).map(|i| view.neighbors(i).iter().map(|&(j, _)| j).collect()).collect();
    let mut out = Vec::new();
    let mut r = Vec::new();
    let p: BTreeSet<usize> = (0..view.len()).collect();
    bron_kerbosch(&neigh, &mut r, p, BTreeSet::new(), &mut out);
    out
}

fn bron_kerbosch(
    neigh: &[BTreeSet<usize>],
    r: &mut Vec<usize>,
    mut p: BTreeSet<usize>,
    mut x: BTreeSet<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() {
        if x.is_empty() {
            let mut clique = r.clone();
            clique.sort_unstable();
            out.push(clique);
        }
        return;
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| (p.intersection(&neigh[u]).count(), std::cmp::Reverse(u)))
        .expect("p is nonempty");
    let branch: Vec<usize> = p.difference(&neigh[pivot]).copied().collect();
    for v in branch {
        r.push(v);
        let np = p.intersection(&neigh[v]).copied().collect();
        let nx = x.intersection(&neigh[v]).copied().collect();
        bron_kerbosch(neigh, r, np, nx, out);
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Numbers member sets as groups 1, 2, ... in order of their sorted member lists.
fn number_groups(frame: u32, mut sets: Vec<BTreeSet<NodeId>>) -> Vec<Group> {
    sets.sort();
    sets.dedup();
    sets.into_iter()
        .enumerate()
        .map(|(i, members)| Group::new(i as GroupId + 1, frame, members).expect("extracted groups are nonempty"))
        .collect()
}

/// k-clique percolation communities.
///
/// Two k-cliques are adjacent when they share k−1 nodes and a community is
/// the node union of a connected set of adjacent k-cliques. The search runs
/// over maximal cliques of size at least k, which chain through an overlap of
/// at least k−1 exactly when their k-cliques do. Nodes outside every k-clique
/// belong to no group.
pub fn cpm_extract(frame: &FrameGraph, k: usize) -> Result<Vec<Group>> {
    check_k(k)?;
    let view = frame.undirected();
    let cliques: Vec<Vec<usize>> = maximal_cliques(&view).into_iter().filter(|c| c.len() >= k).collect();

    let mut by_node: HashMap<usize, Vec<usize>> = HashMap::new();
    for (ci, clique) in cliques.iter().enumerate() {
        for &v in clique {
            by_node.entry(v).or_default().push(ci);
        }
    }

    let mut sets = DisjointSets::new(cliques.len());
    let mut shared: HashMap<usize, usize> = HashMap::new();
    for (ci, clique) in cliques.iter().enumerate() {
        shared.clear();
        for v in clique {
            for &other in &by_node[v] {
                if other > ci {
                    *shared.entry(other).or_insert(0) += 1;
                }
            }
        }
        for (&other, &count) in &shared {
            if count + 1 >= k {
                sets.union(ci, other);
            }
        }
    }

    let mut components: BTreeMap<usize, BTreeSet<NodeId>> = BTreeMap::new();
    for (ci, clique) in cliques.iter().enumerate() {
        let root = sets.find(ci);
        components.entry(root).or_default().extend(clique.iter().map(|&i| view.ids()[i]));
    }
    Ok(number_groups(frame.frame_index(), components.into_values().collect()))
}

fn check_partition(view: &UndirectedView, partition: &[BTreeSet<NodeId>]) -> Result<Vec<usize>> {
    let mut assignment = vec![usize::MAX; view.len()];
    for (c, members) in partition.iter().enumerate() {
        if members.is_empty() {
            return Err(Error::NotAPartition(format!("community {c} is empty")));
        }
        for &node in members {
            let i = view.index_of(node).ok_or(Error::UnknownNode(node))?;
            if assignment[i] != usize::MAX {
                return Err(Error::NotAPartition(format!("node {node} appears twice")));
            }
            assignment[i] = c;
        }
    }
    if let Some(i) = assignment.iter().position(|&c| c == usize::MAX) {
        return Err(Error::NotAPartition(format!("node {} is not covered", view.ids()[i])));
    }
    Ok(assignment)
}

/// Newman modularity `Q = Σ_c [Σ_in/2m − (Σ_tot/2m)²]` of a disjoint partition.
///
/// The frame is read as undirected with `w(x,y) = w(x→y) + w(y→x)`; `Σ_in`
/// counts every internal link from both endpoints.
pub fn modularity(frame: &FrameGraph, partition: &[BTreeSet<NodeId>]) -> Result<f64> {
    let view = frame.undirected();
    let assignment = check_partition(&view, partition)?;
    let two_m: f64 = (0..view.len()).flat_map(|i| view.neighbors(i).iter().map(|&(_, w)| w)).sum();
    if two_m <= 0.0 {
        return Err(Error::NoEdgeWeight);
    }
    let mut sigma_in = vec![0.0; partition.len()];
    let mut sigma_tot = vec![0.0; partition.len()];
    for i in 0..view.len() {
        let c = assignment[i];
        for &(j, w) in view.neighbors(i) {
            sigma_tot[c] += w;
            if assignment[j] == c {
                sigma_in[c] += w;
            }
        }
    }
    Ok(sigma_in.iter().zip(&sigma_tot).map(|(sin, stot)| sin / two_m - (stot / two_m).powi(2)).sum())
}

/// Bookkeeping for the Louvain local-moving phase.
///
/// Nodes are dense indices over a symmetric weighted adjacency that may carry
/// self-loops (collapsed communities). For a community `C`: `Σ_in` sums
/// `A_ij` over ordered pairs inside `C` (self-loops once), `Σ_tot` sums the
/// degrees `k_i` of its nodes, and `Σ_tot` over all communities equals `2m`.
#[derive(Debug, Clone)]
pub struct ModularityState {
    ids: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    adj: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
    degree: Vec<f64>,
    two_m: f64,
    community: Vec<Option<usize>>,
    sigma_in: Vec<f64>,
    sigma_tot: Vec<f64>,
}

impl ModularityState {
    /// Every node of `frame` in its own community; community `c` starts as node `c`.
    pub fn singletons(frame: &FrameGraph) -> Result<Self> {
        let view = frame.undirected();
        let adj = (0..view.len()).map(|i| view.neighbors(i).to_vec()).collect();
        Self::from_adjacency(view.ids().to_vec(), adj, vec![0.0; view.len()])
    }

    /// State for an arbitrary disjoint partition; community `c` is `partition[c]`.
    pub fn from_partition(frame: &FrameGraph, partition: &[BTreeSet<NodeId>]) -> Result<Self> {
        let view = frame.undirected();
        let assignment = check_partition(&view, partition)?;
        let mut state = Self::singletons(frame)?;
        for i in 0..state.len() {
            state.isolate_index(i);
        }
        // slots 0..partition.len() are reused as the partition's communities
        for (i, &c) in assignment.iter().enumerate() {
            state.insert_index(i, c);
        }
        Ok(state)
    }

    fn from_adjacency(ids: Vec<NodeId>, adj: Vec<Vec<(usize, f64)>>, self_loop: Vec<f64>) -> Result<Self> {
        let degree: Vec<f64> =
            adj.iter().zip(&self_loop).map(|(row, s)| row.iter().map(|&(_, w)| w).sum::<f64>() + s).collect();
        let two_m: f64 = degree.iter().sum();
        if two_m <= 0.0 {
            return Err(Error::NoEdgeWeight);
        }
        let index = ids.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        Ok(ModularityState {
            community: (0..ids.len()).map(Some).collect(),
            sigma_in: self_loop.clone(),
            sigma_tot: degree.clone(),
            ids,
            index,
            adj,
            self_loop,
            degree,
            two_m,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Number of community slots; valid community ids are `0..community_slots()`.
    pub fn community_slots(&self) -> usize {
        self.sigma_in.len()
    }

    /// `m`, the total link weight.
    pub fn total_weight(&self) -> f64 {
        self.two_m / 2.0
    }

    pub fn sigma_in(&self, community: usize) -> f64 {
        self.sigma_in[community]
    }

    pub fn sigma_tot(&self, community: usize) -> f64 {
        self.sigma_tot[community]
    }

    fn idx(&self, node: NodeId) -> Result<usize> {
        self.index.get(&node).copied().ok_or(Error::UnknownNode(node))
    }

    /// `k_i`, the weight incident to `node`.
    pub fn degree(&self, node: NodeId) -> Result<f64> {
        Ok(self.degree[self.idx(node)?])
    }

    pub fn community_of(&self, node: NodeId) -> Result<Option<usize>> {
        Ok(self.community[self.idx(node)?])
    }

    /// Weight of links between node `i` and the other members of `community`.
    fn links_to(&self, i: usize, community: usize) -> f64 {
        self.adj[i].iter().filter(|&&(j, _)| self.community[j] == Some(community)).map(|&(_, w)| w).sum()
    }

    fn isolate_index(&mut self, i: usize) -> Option<usize> {
        let c = self.community[i].take()?;
        self.sigma_in[c] -= 2.0 * self.links_to(i, c) + self.self_loop[i];
        self.sigma_tot[c] -= self.degree[i];
        Some(c)
    }

    fn insert_index(&mut self, i: usize, c: usize) {
        debug_assert!(self.community[i].is_none());
        self.sigma_in[c] += 2.0 * self.links_to(i, c) + self.self_loop[i];
        self.sigma_tot[c] += self.degree[i];
        self.community[i] = Some(c);
    }

    /// Removes `node` from its community; returns the community it left.
    pub fn isolate(&mut self, node: NodeId) -> Result<Option<usize>> {
        let i = self.idx(node)?;
        Ok(self.isolate_index(i))
    }

    /// Adds an isolated `node` to `community`.
    pub fn insert(&mut self, node: NodeId, community: usize) -> Result<()> {
        let i = self.idx(node)?;
        if community >= self.community_slots() {
            return Err(Error::UnknownCommunity(community));
        }
        if self.community[i].is_some() {
            return Err(Error::Parameter(format!("node {node} is not isolated")));
        }
        self.insert_index(i, community);
        Ok(())
    }

    fn gain_index(&self, i: usize, c: usize) -> f64 {
        let two_m = self.two_m;
        let (sin, stot, ki) = (self.sigma_in[c], self.sigma_tot[c], self.degree[i]);
        // k_i,in: links between i and C, read from both ends of the symmetric adjacency
        let ki_in = 2.0 * self.links_to(i, c);
        ((sin + ki_in) / two_m - ((stot + ki) / two_m).powi(2))
            - (sin / two_m - (stot / two_m).powi(2) - (ki / two_m).powi(2))
    }

    /// ΔQ of moving the isolated `node` into `community`.
    pub fn gain(&self, node: NodeId, community: usize) -> Result<f64> {
        let i = self.idx(node)?;
        if community >= self.community_slots() {
            return Err(Error::UnknownCommunity(community));
        }
        if self.community[i].is_some() {
            return Err(Error::Parameter(format!("node {node} must be isolated before computing its gain")));
        }
        Ok(self.gain_index(i, community))
    }

    /// Modularity of the current assignment; an isolated node counts as its own community.
    pub fn modularity(&self) -> f64 {
        let two_m = self.two_m;
        let communities: f64 =
            self.sigma_in.iter().zip(&self.sigma_tot).map(|(sin, stot)| sin / two_m - (stot / two_m).powi(2)).sum();
        let isolated: f64 = (0..self.len())
            .filter(|&i| self.community[i].is_none())
            .map(|i| self.self_loop[i] / two_m - (self.degree[i] / two_m).powi(2))
            .sum();
        communities + isolated
    }

    /// Nonempty communities as node sets; isolated nodes appear as singletons.
    pub fn partition(&self) -> Vec<BTreeSet<NodeId>> {
        let mut by_community: BTreeMap<usize, BTreeSet<NodeId>> = BTreeMap::new();
        let mut isolated = Vec::new();
        for (i, c) in self.community.iter().enumerate() {
            match c {
                Some(c) => {
                    by_community.entry(*c).or_default().insert(self.ids[i]);
                }
                None => isolated.push(BTreeSet::from([self.ids[i]])),
            }
        }
        by_community.into_values().chain(isolated).collect()
    }

    /// One local-moving phase; returns whether any node changed community.
    fn local_moving(&mut self) -> bool {
        const EPS: f64 = 1e-12;
        let mut moved_any = false;
        loop {
            let mut moved = false;
            for i in 0..self.len() {
                let Some(original) = self.isolate_index(i) else { continue };
                let mut targets: Vec<usize> = self.adj[i].iter().filter_map(|&(j, _)| self.community[j]).collect();
                targets.sort_unstable();
                targets.dedup();

                let mut best = original;
                let mut best_gain = self.gain_index(i, original);
                for c in targets.into_iter().filter(|&c| c != original) {
                    let g = self.gain_index(i, c);
                    if g > 0.0 && g > best_gain + EPS {
                        best = c;
                        best_gain = g;
                    }
                }
                self.insert_index(i, best);
                if best != original {
                    moved = true;
                }
            }
            if !moved {
                return moved_any;
            }
            moved_any = true;
        }
    }

    /// Collapses communities into super-nodes, numbered by their order in `self`.
    fn aggregate(&self) -> (Self, Vec<Vec<usize>>) {
        let mut renumber: BTreeMap<usize, usize> = BTreeMap::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        for i in 0..self.len() {
            let c = self.community[i].expect("no node is isolated between phases");
            let next = renumber.len();
            let slot = *renumber.entry(c).or_insert(next);
            if slot == members.len() {
                members.push(Vec::new());
            }
            members[slot].push(i);
        }
        let n = members.len();
        let mut weights: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        let mut self_loop = vec![0.0; n];
        for i in 0..self.len() {
            let ci = renumber[&self.community[i].unwrap()];
            self_loop[ci] += self.self_loop[i];
            for &(j, w) in &self.adj[i] {
                let cj = renumber[&self.community[j].unwrap()];
                if ci == cj {
                    self_loop[ci] += w;
                } else {
                    *weights[ci].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        let adj = weights.into_iter().map(|m| m.into_iter().collect()).collect();
        let ids = (0..n as u64).map(NodeId).collect();
        let next = Self::from_adjacency(ids, adj, self_loop).expect("aggregation preserves total weight");
        (next, members)
    }
}

/// ΔQ of moving the isolated `node` into community `target`.
pub fn modularity_gain(state: &ModularityState, node: NodeId, target: usize) -> Result<f64> {
    state.gain(node, target)
}

/// Louvain levels, finest first. Each level partitions all frame nodes and
/// every coarser group is a union of groups of the level below.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HierarchicalPartition {
    pub levels: Vec<Vec<Group>>,
}

impl HierarchicalPartition {
    /// The coarsest level.
    pub fn top(&self) -> Option<&[Group]> {
        self.levels.last().map(Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// Louvain (fast modularity) community hierarchy.
///
/// Nodes are visited in ascending id order; a node moves to the neighbouring
/// community with the largest positive ΔQ, lowest community id on ties, and
/// stays put unless that beats returning to its own community.
pub fn louvain_extract(frame: &FrameGraph) -> Result<HierarchicalPartition> {
    if frame.is_empty() {
        return Ok(HierarchicalPartition::default());
    }
    let original = frame.undirected();
    let mut state = ModularityState::singletons(frame)?;
    // members[s]: original node indices inside super-node s
    let mut members: Vec<Vec<usize>> = (0..state.len()).map(|i| vec![i]).collect();
    let mut levels = Vec::new();

    loop {
        let moved = state.local_moving();
        if !moved && !levels.is_empty() {
            break;
        }
        let (next, grouped) = state.aggregate();
        let flattened: Vec<Vec<usize>> =
            grouped.iter().map(|supers| supers.iter().flat_map(|&s| members[s].iter().copied()).collect()).collect();
        let sets = flattened.iter().map(|idx| idx.iter().map(|&i| original.ids()[i]).collect()).collect();
        levels.push(number_groups(frame.frame_index(), sets));
        if !moved || next.len() == 1 {
            break;
        }
        members = flattened;
        state = next;
    }
    Ok(HierarchicalPartition { levels })
}
