//! Temporal network data model.
//!
//! A [`TemporalNetwork`] is an ordered list of [`FrameGraph`]s, one directed
//! weighted snapshot per timeframe. Groups extracted from the frames are kept
//! in a [`Grouping`], indexed by frame.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// Opaque member identifier, stable across timeframes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u64);

impl From<u64> for NodeId {
    fn from(v: u64) -> Self {
        NodeId(v)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub type GroupId = u32;

/// A group identified by its frame and its id within that frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupRef {
    pub frame: u32,
    pub id: GroupId,
}

impl GroupRef {
    pub fn new(frame: u32, id: GroupId) -> Self {
        GroupRef { frame, id }
    }
}

impl fmt::Display for GroupRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{}@T{}", self.id, self.frame)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEdge {
    pub from: NodeId,
    pub to: NodeId,
    pub weight: f64,
}

impl WeightedEdge {
    pub fn new(from: impl Into<NodeId>, to: impl Into<NodeId>, weight: f64) -> Self {
        WeightedEdge { from: from.into(), to: to.into(), weight }
    }
}

/// A timestamped directed interaction, the raw material for windowing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interaction {
    pub from: NodeId,
    pub to: NodeId,
    pub weight: f64,
    /// Integer time units, e.g. days.
    pub timestamp: i64,
}

impl Interaction {
    pub fn new(from: impl Into<NodeId>, to: impl Into<NodeId>, weight: f64, timestamp: i64) -> Self {
        Interaction { from: from.into(), to: to.into(), weight, timestamp }
    }
}

/// One timeframe: a node set plus directed weighted edges without self-loops.
///
/// Duplicate `(from, to)` pairs are merged by summing their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameGraph {
    frame_index: u32,
    nodes: BTreeSet<NodeId>,
    edges: BTreeMap<(NodeId, NodeId), f64>,
}

impl FrameGraph {
    pub fn empty(frame_index: u32) -> Self {
        FrameGraph { frame_index, nodes: BTreeSet::new(), edges: BTreeMap::new() }
    }

    /// Builds a frame whose node set is the union of the edge endpoints.
    pub fn from_edges(edges: impl IntoIterator<Item = WeightedEdge>, frame_index: u32) -> Result<Self> {
        Self::with_nodes(std::iter::empty(), edges, frame_index)
    }

    /// Like [`FrameGraph::from_edges`] but also keeps the given (possibly isolated) nodes.
    pub fn with_nodes(
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = WeightedEdge>,
        frame_index: u32,
    ) -> Result<Self> {
        let mut graph = FrameGraph::empty(frame_index);
        graph.nodes.extend(nodes);
        for edge in edges {
            graph.add_edge(edge)?;
        }
        Ok(graph)
    }

    fn add_edge(&mut self, edge: WeightedEdge) -> Result<()> {
        if edge.from == edge.to {
            return Err(Error::SelfLoop(edge.from));
        }
        if !edge.weight.is_finite() || edge.weight < 0.0 {
            return Err(Error::InvalidWeight { from: edge.from, to: edge.to, weight: edge.weight });
        }
        self.nodes.insert(edge.from);
        self.nodes.insert(edge.to);
        *self.edges.entry((edge.from, edge.to)).or_insert(0.0) += edge.weight;
        Ok(())
    }

    pub fn frame_index(&self) -> u32 {
        self.frame_index
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.nodes.contains(&node)
    }

    /// Edges in `(from, to)` order.
    pub fn edges(&self) -> impl Iterator<Item = WeightedEdge> + '_ {
        self.edges.iter().map(|(&(from, to), &weight)| WeightedEdge { from, to, weight })
    }

    pub fn weight(&self, from: NodeId, to: NodeId) -> Option<f64> {
        self.edges.get(&(from, to)).copied()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.values().sum()
    }

    /// Restricts the frame to `members` and the edges between them.
    pub fn induced_subgraph(&self, members: &BTreeSet<NodeId>) -> Result<Self> {
        if let Some(&missing) = members.iter().find(|n| !self.nodes.contains(n)) {
            return Err(Error::UnknownNode(missing));
        }
        let edges = self
            .edges
            .iter()
            .filter(|((from, to), _)| members.contains(from) && members.contains(to))
            .map(|(&k, &w)| (k, w))
            .collect();
        Ok(FrameGraph { frame_index: self.frame_index, nodes: members.clone(), edges })
    }

    /// Joins this frame with an adjacent one into a single graph.
    ///
    /// The result carries the smaller index of the pair, so argument order
    /// does not matter; weights of edges present in both frames are summed.
    pub fn join(&self, other: &FrameGraph) -> Result<Self> {
        if self.frame_index.abs_diff(other.frame_index) != 1 {
            return Err(Error::NonConsecutiveFrames { first: self.frame_index, second: other.frame_index });
        }
        let mut joined = self.clone();
        joined.frame_index = self.frame_index.min(other.frame_index);
        joined.nodes.extend(other.nodes.iter().copied());
        for (&key, &w) in &other.edges {
            *joined.edges.entry(key).or_insert(0.0) += w;
        }
        Ok(joined)
    }

    /// Undirected view with dense node indices; `(x, y)` weight is the sum of both directions.
    pub fn undirected(&self) -> UndirectedView {
        UndirectedView::new(self)
    }
}

pub fn build_frame_graph(edges: &[WeightedEdge], frame_index: u32) -> Result<FrameGraph> {
    FrameGraph::from_edges(edges.iter().copied(), frame_index)
}

pub fn induced_subgraph(frame: &FrameGraph, members: &BTreeSet<NodeId>) -> Result<FrameGraph> {
    frame.induced_subgraph(members)
}

pub fn join_frames(first: &FrameGraph, second: &FrameGraph) -> Result<FrameGraph> {
    first.join(second)
}

/// Dense-index undirected adjacency of a frame.
///
/// Node `i` corresponds to `ids()[i]`, and ids are in ascending order.
#[derive(Debug, Clone)]
pub struct UndirectedView {
    ids: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl UndirectedView {
    fn new(frame: &FrameGraph) -> Self {
        let ids: Vec<NodeId> = frame.nodes.iter().copied().collect();
        let index: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut maps: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); ids.len()];
        for (&(from, to), &w) in &frame.edges {
            let (a, b) = (index[&from], index[&to]);
            *maps[a].entry(b).or_insert(0.0) += w;
            *maps[b].entry(a).or_insert(0.0) += w;
        }
        let neighbors = maps.into_iter().map(|m| m.into_iter().collect()).collect();
        UndirectedView { ids, index, neighbors }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn index_of(&self, node: NodeId) -> Option<usize> {
        self.index.get(&node).copied()
    }

    /// Neighbours of `i` with symmetric weights, sorted by index.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search_by_key(&b, |&(n, _)| n).is_ok()
    }
}

/// Ordered sequence of timeframes indexed 1, 2, 3, ...
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TemporalNetwork {
    frames: Vec<FrameGraph>,
}

impl TemporalNetwork {
    pub fn new(frames: Vec<FrameGraph>) -> Result<Self> {
        for (position, frame) in frames.iter().enumerate() {
            if frame.frame_index as usize != position + 1 {
                return Err(Error::FrameOrder { position, found: frame.frame_index });
            }
        }
        Ok(TemporalNetwork { frames })
    }

    pub fn frames(&self) -> &[FrameGraph] {
        &self.frames
    }

    pub fn frame(&self, index: u32) -> Option<&FrameGraph> {
        index.checked_sub(1).and_then(|i| self.frames.get(i as usize))
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Joint graphs of every consecutive pair, each indexed by its first frame.
    pub fn joined_pairs(&self) -> Result<Vec<FrameGraph>> {
        self.frames.windows(2).map(|w| w[0].join(&w[1])).collect()
    }
}

/// Slices interactions into fixed-length, possibly overlapping windows.
///
/// Windows are half-open `[start, start + window_len)`; the first starts at the
/// earliest timestamp and later ones every `step` units while the start does not
/// exceed the latest timestamp.
pub fn window_interactions(interactions: &[Interaction], window_len: i64, step: i64) -> Result<TemporalNetwork> {
    if window_len <= 0 {
        return Err(Error::Parameter(format!("window length must be positive, got {window_len}")));
    }
    if step <= 0 || step > window_len {
        return Err(Error::Parameter(format!("step must be in (0, {window_len}], got {step}")));
    }
    let (Some(first), Some(last)) =
        (interactions.iter().map(|i| i.timestamp).min(), interactions.iter().map(|i| i.timestamp).max())
    else {
        return Ok(TemporalNetwork::default());
    };

    let mut frames = Vec::new();
    let mut start = first;
    while start <= last {
        let end = start + window_len;
        let edges = interactions.iter().filter(|i| i.timestamp >= start && i.timestamp < end).map(|i| WeightedEdge {
            from: i.from,
            to: i.to,
            weight: i.weight,
        });
        frames.push(FrameGraph::from_edges(edges, frames.len() as u32 + 1)?);
        start += step;
    }
    TemporalNetwork::new(frames)
}

/// A community: a nonempty member set within one timeframe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub id: GroupId,
    pub frame: u32,
    members: BTreeSet<NodeId>,
}

impl Group {
    pub fn new(id: GroupId, frame: u32, members: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let members: BTreeSet<NodeId> = members.into_iter().collect();
        if members.is_empty() {
            return Err(Error::EmptyGroup(GroupRef::new(frame, id)));
        }
        Ok(Group { id, frame, members })
    }

    /// Convenience constructor from raw integer ids.
    pub fn from_ids(id: GroupId, frame: u32, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        Self::new(id, frame, members.into_iter().map(NodeId))
    }

    pub fn members(&self) -> &BTreeSet<NodeId> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.members.contains(&node)
    }

    pub fn key(&self) -> GroupRef {
        GroupRef::new(self.frame, self.id)
    }

    pub fn shared_with(&self, other: &Group) -> usize {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.members.iter().filter(|n| large.members.contains(n)).count()
    }
}

/// Groups per frame. Groups within one frame may overlap.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Grouping {
    frames: BTreeMap<u32, Vec<Group>>,
}

impl Grouping {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assembles groups from `(group_id, node, frame)` membership rows.
    pub fn from_memberships(rows: impl IntoIterator<Item = (GroupId, NodeId, u32)>) -> Self {
        let mut acc: BTreeMap<u32, BTreeMap<GroupId, BTreeSet<NodeId>>> = BTreeMap::new();
        for (group, node, frame) in rows {
            acc.entry(frame).or_default().entry(group).or_default().insert(node);
        }
        let frames = acc
            .into_iter()
            .map(|(frame, groups)| {
                let groups = groups.into_iter().map(|(id, members)| Group { id, frame, members }).collect();
                (frame, groups)
            })
            .collect();
        Grouping { frames }
    }

    pub fn insert(&mut self, group: Group) -> Result<()> {
        let groups = self.frames.entry(group.frame).or_default();
        if groups.iter().any(|g| g.id == group.id) {
            return Err(Error::DuplicateGroup(group.key()));
        }
        let pos = groups.partition_point(|g| g.id < group.id);
        groups.insert(pos, group);
        Ok(())
    }

    /// Registers a frame that may end up holding no groups.
    pub fn ensure_frame(&mut self, frame: u32) {
        self.frames.entry(frame).or_default();
    }

    /// Groups of `frame`, sorted by id; empty when the frame is unknown.
    pub fn groups(&self, frame: u32) -> &[Group] {
        self.frames.get(&frame).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn get(&self, key: GroupRef) -> Option<&Group> {
        self.groups(key.frame).iter().find(|g| g.id == key.id)
    }

    pub fn frame_indices(&self) -> impl Iterator<Item = u32> + '_ {
        self.frames.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Group> {
        self.frames.values().flatten()
    }

    /// Number of groups across all frames.
    pub fn len(&self) -> usize {
        self.frames.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks every referenced frame exists in `tsn` and members are frame nodes.
    pub fn validate_against(&self, tsn: &TemporalNetwork) -> Result<()> {
        for (&frame, groups) in &self.frames {
            let graph = tsn.frame(frame).ok_or(Error::MissingFrame(frame))?;
            for group in groups {
                if let Some(&node) = group.members.iter().find(|n| !graph.contains(**n)) {
                    return Err(Error::MemberOutsideFrame { group: group.key(), node });
                }
            }
        }
        Ok(())
    }
}
