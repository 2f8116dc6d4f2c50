//! Member importance measures.
//!
//! Social position is an iterative, commitment-weighted score on the directed
//! graph. Degree, closeness and betweenness centrality use the undirected,
//! unweighted view. Every measure can be scoped to a group by running it on
//! the group's induced subgraph.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tsn::{FrameGraph, Group, GroupRef, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    SocialPosition,
    Degree,
    Closeness,
    Betweenness,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::SocialPosition, Measure::Degree, Measure::Closeness, Measure::Betweenness];

    pub fn tag(self) -> &'static str {
        match self {
            Measure::SocialPosition => "SP",
            Measure::Degree => "CD",
            Measure::Closeness => "CC",
            Measure::Betweenness => "CB",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sp" => Ok(Measure::SocialPosition),
            "cd" => Ok(Measure::Degree),
            "cc" => Ok(Measure::Closeness),
            "cb" => Ok(Measure::Betweenness),
            other => Err(Error::Parameter(format!("unknown importance measure '{other}'"))),
        }
    }
}

/// What a score vector was computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Frame(u32),
    Group(GroupRef),
}

/// Scores for every node in scope plus a dense ranking (1 = highest score).
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceVector {
    pub measure: Measure,
    pub scope: Scope,
    scores: BTreeMap<NodeId, f64>,
    ranks: BTreeMap<NodeId, u32>,
    /// Always true for the closed-form centralities.
    pub converged: bool,
    pub iterations: usize,
}

impl ImportanceVector {
    pub fn from_scores(measure: Measure, scope: Scope, scores: BTreeMap<NodeId, f64>) -> Self {
        let ranks = dense_ranks(&scores);
        ImportanceVector { measure, scope, scores, ranks, converged: true, iterations: 0 }
    }

    pub fn score(&self, node: NodeId) -> Option<f64> {
        self.scores.get(&node).copied()
    }

    pub fn rank(&self, node: NodeId) -> Option<u32> {
        self.ranks.get(&node).copied()
    }

    pub fn scores(&self) -> &BTreeMap<NodeId, f64> {
        &self.scores
    }

    pub fn ranks(&self) -> &BTreeMap<NodeId, u32> {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.scores.values().sum()
    }

    /// Nodes ordered by rank, then id.
    pub fn ranked(&self) -> Vec<(NodeId, f64, u32)> {
        let mut rows: Vec<_> = self.scores.iter().map(|(&n, &s)| (n, s, self.ranks[&n])).collect();
        rows.sort_by_key(|&(n, _, r)| (r, n));
        rows
    }
}

/// Dense ranking by descending score. Scores within a relative 1e-9 of the
/// first score of a rank share that rank, so floating-point noise between
/// structurally equivalent members does not split them.
fn dense_ranks(scores: &BTreeMap<NodeId, f64>) -> BTreeMap<NodeId, u32> {
    let mut order: Vec<(NodeId, f64)> = scores.iter().map(|(&n, &s)| (n, s)).collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut ranks = BTreeMap::new();
    let mut rank = 0u32;
    let mut anchor = f64::NAN;
    for (node, score) in order {
        // the first score always opens a rank: NaN anchor compares false
        if anchor.is_nan() || (anchor - score).abs() > 1e-9 * anchor.abs().max(1.0) {
            rank += 1;
            anchor = score;
        }
        ranks.insert(node, rank);
    }
    ranks
}

/// `C(y→x)`: how strongly `y` is committed to `x`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CommitmentMatrix {
    rows: BTreeMap<NodeId, BTreeMap<NodeId, f64>>,
}

impl CommitmentMatrix {
    pub fn get(&self, from: NodeId, to: NodeId) -> f64 {
        self.rows.get(&from).and_then(|r| r.get(&to)).copied().unwrap_or(0.0)
    }

    /// Nonzero entries of the row of `from`.
    pub fn row(&self, from: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.rows.get(&from).into_iter().flatten().map(|(&n, &c)| (n, c))
    }

    pub fn row_sum(&self, from: NodeId) -> f64 {
        self.row(from).map(|(_, c)| c).sum()
    }

    pub fn set(&mut self, from: NodeId, to: NodeId, value: f64) {
        self.rows.entry(from).or_default().insert(to, value);
    }
}

/// Out-weight row normalisation: `C(y→x) = w(y,x) / Σ_z w(y,z)`.
/// Nodes without (positive) out-weight get an all-zero row.
pub fn commitment_from_weights(frame: &FrameGraph) -> CommitmentMatrix {
    let mut totals: BTreeMap<NodeId, f64> = BTreeMap::new();
    for e in frame.edges() {
        *totals.entry(e.from).or_insert(0.0) += e.weight;
    }
    let mut matrix = CommitmentMatrix::default();
    for e in frame.edges() {
        let total = totals[&e.from];
        if total > 0.0 && e.weight > 0.0 {
            matrix.set(e.from, e.to, e.weight / total);
        }
    }
    matrix
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpConfig {
    /// Damping coefficient in (0, 1).
    pub epsilon: f64,
    /// Stop once no score moves by more than this between iterations.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SpConfig {
    fn default() -> Self {
        SpConfig { epsilon: 0.5, tolerance: 1e-6, max_iterations: 1000 }
    }
}

impl SpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Parameter(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::Parameter(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }
}

/// Social position: iterate `SP(x) ← (1−ε) + ε·Σ_y SP(y)·C(y→x)` from `SP ≡ 1`.
///
/// If `max_iterations` runs out first the last iterate is returned with
/// `converged == false`.
pub fn social_position(frame: &FrameGraph, commitment: &CommitmentMatrix, cfg: &SpConfig) -> Result<ImportanceVector> {
    cfg.validate()?;
    let view = frame.undirected();
    let ids = view.ids();
    // incoming[x]: (y, C(y→x)) for y in the frame
    let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); ids.len()];
    for (y, &from) in ids.iter().enumerate() {
        for (to, c) in commitment.row(from) {
            if let Some(x) = view.index_of(to) {
                if x != y && c != 0.0 {
                    incoming[x].push((y, c));
                }
            }
        }
    }

    let eps = cfg.epsilon;
    let mut sp = vec![1.0; ids.len()];
    let mut next = vec![0.0; ids.len()];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let mut delta: f64 = 0.0;
        for x in 0..ids.len() {
            let acc: f64 = incoming[x].iter().map(|&(y, c)| sp[y] * c).sum();
            next[x] = (1.0 - eps) + eps * acc;
            delta = delta.max((next[x] - sp[x]).abs());
        }
        std::mem::swap(&mut sp, &mut next);
        if delta <= cfg.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("social position did not converge within {} iterations", cfg.max_iterations);
    }

    let scores = ids.iter().copied().zip(sp).collect();
    let mut v = ImportanceVector::from_scores(Measure::SocialPosition, Scope::Frame(frame.frame_index()), scores);
    v.converged = converged;
    v.iterations = iterations;
    Ok(v)
}

fn require_nodes(measure: &'static str, frame: &FrameGraph, required: usize) -> Result<()> {
    if frame.node_count() < required {
        return Err(Error::TooFewNodes { measure, required, actual: frame.node_count() });
    }
    Ok(())
}

/// `CD(x) = d(x)/(m−1)` with `d(x)` the number of distinct undirected neighbours.
pub fn degree_centrality(frame: &FrameGraph) -> Result<ImportanceVector> {
    require_nodes("degree centrality", frame, 2)?;
    let view = frame.undirected();
    let denom = (view.len() - 1) as f64;
    let scores = (0..view.len()).map(|i| (view.ids()[i], view.degree(i) as f64 / denom)).collect();
    Ok(ImportanceVector::from_scores(Measure::Degree, Scope::Frame(frame.frame_index()), scores))
}

fn bfs_distances(view: &crate::tsn::UndirectedView, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; view.len()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        for &(w, _) in view.neighbors(v) {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// `CC(x) = (m−1)/Σ_{y≠x} c(x,y)` over hop distances; an unreachable `y` counts as distance `m`.
pub fn closeness_centrality(frame: &FrameGraph) -> Result<ImportanceVector> {
    require_nodes("closeness centrality", frame, 2)?;
    let view = frame.undirected();
    let m = view.len();
    let scores = (0..m)
        .map(|x| {
            let dist = bfs_distances(&view, x);
            let total: usize = (0..m).filter(|&y| y != x).map(|y| dist[y].unwrap_or(m)).sum();
            (view.ids()[x], (m - 1) as f64 / total as f64)
        })
        .collect();
    Ok(ImportanceVector::from_scores(Measure::Closeness, Scope::Frame(frame.frame_index()), scores))
}

/// `CB(z) = Σ_{x≠y; x,y≠z} b_xy(z)/b_xy / (m−1)` over ordered pairs (Brandes accumulation).
///
/// Unreachable pairs contribute nothing.
pub fn betweenness_centrality(frame: &FrameGraph) -> Result<ImportanceVector> {
    require_nodes("betweenness centrality", frame, 3)?;
    let view = frame.undirected();
    let n = view.len();
    let mut centrality = vec![0.0; n];

    let mut order = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    for s in 0..n {
        order.clear();
        preds.iter_mut().for_each(Vec::clear);
        sigma.fill(0.0);
        dist.fill(usize::MAX);
        delta.fill(0.0);
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(w, _) in view.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        for &w in order.iter().rev() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }
    let denom = (n - 1) as f64;
    let scores = (0..n).map(|i| (view.ids()[i], centrality[i] / denom)).collect();
    Ok(ImportanceVector::from_scores(Measure::Betweenness, Scope::Frame(frame.frame_index()), scores))
}

/// Any measure on a whole frame. Social position uses [`commitment_from_weights`].
pub fn frame_importance(frame: &FrameGraph, measure: Measure, cfg: &SpConfig) -> Result<ImportanceVector> {
    match measure {
        Measure::SocialPosition => social_position(frame, &commitment_from_weights(frame), cfg),
        Measure::Degree => degree_centrality(frame),
        Measure::Closeness => closeness_centrality(frame),
        Measure::Betweenness => betweenness_centrality(frame),
    }
}

/// Importance of a group's members within the group itself.
///
/// The measure runs on the group's induced subgraph; for social position the
/// commitment is re-normalised on that subgraph.
pub fn group_importance(
    frame: &FrameGraph,
    group: &Group,
    measure: Measure,
    cfg: &SpConfig,
) -> Result<ImportanceVector> {
    let sub = frame.induced_subgraph(group.members())?;
    let mut v = frame_importance(&sub, measure, cfg)?;
    v.scope = Scope::Group(group.key());
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsn::WeightedEdge;

    fn n(i: u64) -> NodeId {
        NodeId(i)
    }

    fn graph(edges: &[(u64, u64, f64)]) -> FrameGraph {
        FrameGraph::from_edges(edges.iter().map(|&(a, b, w)| WeightedEdge::new(a, b, w)), 1).unwrap()
    }

    fn path() -> FrameGraph {
        graph(&[(1, 2, 1.0), (2, 3, 1.0)])
    }

    fn complete(k: u64) -> FrameGraph {
        let edges: Vec<_> = (1..=k).flat_map(|a| (a + 1..=k).map(move |b| (a, b, 1.0))).collect();
        graph(&edges)
    }

    #[test]
    fn commitment_rows() {
        let single = commitment_from_weights(&graph(&[(1, 2, 5.0)]));
        assert_eq!(single.get(n(1), n(2)), 1.0);
        assert_eq!(single.row_sum(n(2)), 0.0);
        let split = commitment_from_weights(&graph(&[(1, 2, 1.0), (1, 3, 3.0)]));
        assert_eq!(split.get(n(1), n(2)), 0.25);
        assert_eq!(split.get(n(1), n(3)), 0.75);
    }

    #[test]
    fn two_node_cycle_is_a_fixed_point() {
        let g = graph(&[(1, 2, 1.0), (2, 1, 1.0)]);
        let sp = social_position(&g, &commitment_from_weights(&g), &SpConfig::default()).unwrap();
        assert!(sp.converged);
        assert_eq!(sp.score(n(1)), Some(1.0));
        assert_eq!(sp.score(n(2)), Some(1.0));
        assert_eq!(sp.rank(n(1)), Some(1));
        assert_eq!(sp.rank(n(2)), Some(1));
    }

    #[test]
    fn sp_config_validation() {
        let g = graph(&[(1, 2, 1.0)]);
        let c = commitment_from_weights(&g);
        for bad in [
            SpConfig { epsilon: 0.0, ..SpConfig::default() },
            SpConfig { epsilon: 1.0, ..SpConfig::default() },
            SpConfig { tolerance: 0.0, ..SpConfig::default() },
        ] {
            assert!(social_position(&g, &c, &bad).is_err());
        }
    }

    #[test]
    fn non_convergence_is_flagged() {
        let g = graph(&[(1, 2, 1.0), (2, 3, 1.0), (3, 1, 1.0), (3, 2, 1.0)]);
        let cfg = SpConfig { max_iterations: 2, tolerance: 1e-12, ..SpConfig::default() };
        let sp = social_position(&g, &commitment_from_weights(&g), &cfg).unwrap();
        assert!(!sp.converged);
        assert_eq!(sp.iterations, 2);
        assert_eq!(sp.len(), 3);
    }

    #[test]
    fn most_committed_member_ranks_first() {
        // four members all commit fully to C; C spreads its commitment
        let g = graph(&[
            (1, 3, 1.0),
            (2, 3, 1.0),
            (4, 3, 1.0),
            (5, 3, 1.0),
            (3, 4, 2.0),
            (3, 5, 1.0),
            (3, 1, 0.5),
            (3, 2, 0.5),
        ]);
        let sp = social_position(&g, &commitment_from_weights(&g), &SpConfig::default()).unwrap();
        assert_eq!(sp.rank(n(3)), Some(1));
        assert_eq!(sp.rank(n(4)), Some(2));
        assert!((sp.total() - 5.0).abs() < 1e-5);
    }

    #[test]
    fn degree_cases() {
        let k4 = degree_centrality(&complete(4)).unwrap();
        assert!(k4.scores().values().all(|&s| s == 1.0));
        let p = degree_centrality(&path()).unwrap();
        assert_eq!(p.score(n(2)), Some(1.0));
        assert_eq!(p.score(n(1)), Some(0.5));
        let isolated = FrameGraph::with_nodes([n(9)], [WeightedEdge::new(1u64, 2u64, 1.0)], 1).unwrap();
        assert_eq!(degree_centrality(&isolated).unwrap().score(n(9)), Some(0.0));
        let one = FrameGraph::with_nodes([n(1)], [], 1).unwrap();
        assert!(matches!(degree_centrality(&one), Err(Error::TooFewNodes { .. })));
    }

    #[test]
    fn closeness_cases() {
        assert!(closeness_centrality(&complete(5)).unwrap().scores().values().all(|&s| s == 1.0));
        let p = closeness_centrality(&path()).unwrap();
        assert_eq!(p.score(n(2)), Some(1.0));
        assert_eq!(p.score(n(1)), Some(2.0 / 3.0));
        let apart = FrameGraph::with_nodes([n(1), n(2)], [], 1).unwrap();
        assert_eq!(closeness_centrality(&apart).unwrap().score(n(1)), Some(0.5));
    }

    #[test]
    fn betweenness_cases() {
        assert!(betweenness_centrality(&complete(5)).unwrap().scores().values().all(|&s| s == 0.0));
        let p = betweenness_centrality(&path()).unwrap();
        assert_eq!(p.score(n(2)), Some(1.0));
        assert_eq!(p.score(n(1)), Some(0.0));
        let star = graph(&[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]);
        assert_eq!(betweenness_centrality(&star).unwrap().score(n(0)), Some(2.0));
        assert!(betweenness_centrality(&graph(&[(1, 2, 1.0)])).is_err());
    }

    #[test]
    fn dense_ranking_shares_ranks() {
        let scores = BTreeMap::from([(n(1), 3.0), (n(2), 5.0), (n(3), 3.0), (n(4), 1.0)]);
        let v = ImportanceVector::from_scores(Measure::Degree, Scope::Frame(1), scores);
        assert_eq!(v.rank(n(2)), Some(1));
        assert_eq!(v.rank(n(1)), Some(2));
        assert_eq!(v.rank(n(3)), Some(2));
        assert_eq!(v.rank(n(4)), Some(3));
    }

    #[test]
    fn singleton_group_social_position_is_one_minus_epsilon() {
        let g = complete(3);
        let group = Group::from_ids(1, 1, [2]).unwrap();
        let cfg = SpConfig::default();
        let v = group_importance(&g, &group, Measure::SocialPosition, &cfg).unwrap();
        assert_eq!(v.score(n(2)), Some(1.0 - cfg.epsilon));
        assert_eq!(v.scope, Scope::Group(GroupRef::new(1, 1)));
    }

    #[test]
    fn whole_frame_group_matches_frame_measure() {
        let g = graph(&[(1, 2, 1.0), (2, 3, 2.0), (3, 1, 1.0), (3, 4, 1.0)]);
        let group = Group::new(1, 1, g.nodes().iter().copied()).unwrap();
        for m in Measure::ALL {
            let a = group_importance(&g, &group, m, &SpConfig::default()).unwrap();
            let b = frame_importance(&g, m, &SpConfig::default()).unwrap();
            assert_eq!(a.scores(), b.scores());
        }
    }

    #[test]
    fn measure_tags_parse() {
        for m in Measure::ALL {
            assert_eq!(m.tag().parse::<Measure>().unwrap(), m);
        }
        assert!("none".parse::<Measure>().is_err());
    }
}
