//! Hand-built scenarios with known answers.

use ged_core::ged::{EventRecord, EventType, Thresholds};
use ged_core::{FrameGraph, Group, GroupRef, Grouping, NodeId, TemporalNetwork, WeightedEdge};

fn grouping(groups: impl IntoIterator<Item = Group>) -> Grouping {
    let mut out = Grouping::new();
    for g in groups {
        out.insert(g).expect("scenario groups are unique");
    }
    out
}

fn clique_edges(members: &[u64]) -> Vec<WeightedEdge> {
    let mut edges = Vec::new();
    for &a in members {
        for &b in members {
            if a != b {
                edges.push(WeightedEdge::new(a, b, 1.0));
            }
        }
    }
    edges
}

/// Nodes `1..=5` of [`inclusion_group`] form the core.
pub const CORE: [u64; 5] = [1, 2, 3, 4, 5];

/// A 19-member group whose social position (ε = 0.5) is 1.4 on each of the
/// five core nodes and 6/7 on each of the fourteen others, so the core holds
/// 7 of the group's total 19 and any seven non-core nodes hold 6.
///
/// Core nodes send 4/7 of their commitment to the periphery, and periphery
/// nodes send half of theirs to the core, spread evenly within each side.
pub fn inclusion_group() -> (FrameGraph, Group) {
    let members: Vec<u64> = (1..=19).collect();
    let mut edges = Vec::new();
    for &a in &members {
        for &b in &members {
            if a == b {
                continue;
            }
            let w = match (CORE.contains(&a), CORE.contains(&b)) {
                (true, true) => 21.0,
                (true, false) => 8.0,
                (false, true) => 13.0,
                (false, false) => 5.0,
            };
            edges.push(WeightedEdge::new(a, b, w));
        }
    }
    let frame = FrameGraph::from_edges(edges, 1).expect("valid edges");
    (frame, Group::from_ids(1, 1, members).expect("non-empty"))
}

/// Two frames with red `{1..7}` and yellow `{4..10}` overlapping, then red
/// unchanged and yellow shrunk to `{7..10}`.
pub fn overlapping_shrink() -> (TemporalNetwork, Grouping) {
    let red: Vec<u64> = (1..=7).collect();
    let yellow: Vec<u64> = (4..=10).collect();
    let yellow_next: Vec<u64> = (7..=10).collect();
    let f1 = FrameGraph::from_edges(clique_edges(&red).into_iter().chain(clique_edges(&yellow)), 1).unwrap();
    let f2 = FrameGraph::from_edges(clique_edges(&red).into_iter().chain(clique_edges(&yellow_next)), 2).unwrap();
    let groups = grouping([
        Group::from_ids(1, 1, red.clone()).unwrap(),
        Group::from_ids(2, 1, yellow).unwrap(),
        Group::from_ids(1, 2, red).unwrap(),
        Group::from_ids(2, 2, yellow_next).unwrap(),
    ]);
    (TemporalNetwork::new(vec![f1, f2]).unwrap(), groups)
}

/// Membership of the six groups inside one joint group: each entry is a list
/// of group ids and how many nodes belong to exactly those groups.
const PALLA_REGIONS: [(&[u32], usize); 8] = [
    (&[68, 83, 102], 26),
    (&[68, 83, 26], 5),
    (&[83, 102, 26], 38),
    (&[83, 23, 26], 6),
    (&[68, 49], 25),
    (&[68, 23, 49], 10),
    (&[68, 83, 26, 49], 5),
    (&[83, 102, 26, 49], 4),
];

/// Earlier-frame ids in the joint-group scenario.
pub const PALLA_EARLIER: [u32; 3] = [68, 83, 102];
/// Later-frame ids in the joint-group scenario.
pub const PALLA_LATER: [u32; 3] = [23, 26, 49];

/// Groups 68, 83, 102 in frame 8 and 23, 26, 49 in frame 9, all inside joint
/// group 19 of the frame 8–9 joint graph, with rounded relative overlaps
///
/// ```text
///        23   26   49
///   68   13    8   53
///   83    6   69    8
///  102    0   50    4
/// ```
///
/// Returns `(single-frame grouping, joint grouping)`.
pub fn palla_grid() -> (Grouping, Grouping) {
    let mut members: std::collections::BTreeMap<u32, Vec<u64>> = Default::default();
    let mut next = 1u64;
    for (ids, count) in PALLA_REGIONS {
        for _ in 0..count {
            for &id in ids {
                members.entry(id).or_default().push(next);
            }
            next += 1;
        }
    }
    let single = grouping(members.iter().map(|(&id, m)| {
        let frame = if PALLA_EARLIER.contains(&id) { 8 } else { 9 };
        Group::from_ids(id, frame, m.iter().copied()).unwrap()
    }));
    let joint = grouping([Group::from_ids(19, 8, 1..next).unwrap()]);
    (single, joint)
}

fn record(event: EventType, g1: Option<(u32, u32)>, g2: Option<(u32, u32)>) -> EventRecord {
    EventRecord {
        event,
        group1: g1.map(|(frame, id)| GroupRef::new(frame, id)),
        group2: g2.map(|(frame, id)| GroupRef::new(frame, id)),
        i12: 0.0,
        i21: 0.0,
        thresholds: Thresholds::new(50.0, 50.0).unwrap(),
    }
}

/// The eight-frame story of one community: forms, grows, splits into two,
/// one part shrinks, both continue while a third forms, all three merge,
/// and the merged group dissolves. Group `(frame, id)` pairs are given
/// explicitly.
pub fn single_community_story() -> Vec<EventRecord> {
    use EventType::*;
    vec![
        record(Forming, None, Some((2, 1))),
        record(Growing, Some((2, 1)), Some((3, 1))),
        record(Splitting, Some((3, 1)), Some((4, 2))),
        record(Splitting, Some((3, 1)), Some((4, 3))),
        record(Shrinking, Some((4, 2)), Some((5, 2))),
        record(Continuing, Some((4, 3)), Some((5, 3))),
        record(Continuing, Some((5, 2)), Some((6, 2))),
        record(Continuing, Some((5, 3)), Some((6, 3))),
        record(Forming, None, Some((6, 4))),
        record(Merging, Some((6, 2)), Some((7, 5))),
        record(Merging, Some((6, 3)), Some((7, 5))),
        record(Merging, Some((6, 4)), Some((7, 5))),
        record(Dissolving, Some((7, 5)), None),
    ]
}

/// A network realising [`single_community_story`]'s membership, with every
/// group a clique. Frames 1 and 8 have no groups.
pub fn single_community_network() -> (TemporalNetwork, Grouping) {
    let g1: Vec<u64> = (1..=8).collect();
    let g1_grown: Vec<u64> = (1..=12).collect();
    let g2: Vec<u64> = (1..=6).collect();
    let g3: Vec<u64> = (7..=12).collect();
    let g2_shrunk: Vec<u64> = (1..=5).collect();
    let g4: Vec<u64> = (20..=25).collect();
    let g5: Vec<u64> = (1..=5).chain(7..=12).chain(20..=25).collect();
    let layout: Vec<Vec<(u32, &Vec<u64>)>> = vec![
        vec![],
        vec![(1, &g1)],
        vec![(1, &g1_grown)],
        vec![(2, &g2), (3, &g3)],
        vec![(2, &g2_shrunk), (3, &g3)],
        vec![(2, &g2_shrunk), (3, &g3), (4, &g4)],
        vec![(5, &g5)],
        vec![],
    ];
    let mut frames = Vec::new();
    let mut groups = Grouping::new();
    for (i, content) in layout.iter().enumerate() {
        let f = i as u32 + 1;
        let edges = content.iter().flat_map(|(_, m)| clique_edges(m));
        frames.push(FrameGraph::from_edges(edges, f).unwrap());
        groups.ensure_frame(f);
        for (id, members) in content {
            groups.insert(Group::from_ids(*id, f, members.iter().copied()).unwrap()).unwrap();
        }
    }
    (TemporalNetwork::new(frames).unwrap(), groups)
}

/// Node ids of a slice, for building groups in tests.
pub fn nodes(ids: &[u64]) -> Vec<NodeId> {
    ids.iter().map(|&i| NodeId(i)).collect()
}
