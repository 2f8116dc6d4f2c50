//! Seeded random graphs and synthetic temporal networks.

use std::collections::BTreeSet;

use ged_core::{FrameGraph, Group, Grouping, NodeId, TemporalNetwork, WeightedEdge};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracle::Arc;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Directed arcs on `0..n`, each present with probability `p`.
/// Weights are 1 when `weighted` is false, otherwise integers in `1..=5`.
pub fn random_arcs(rng: &mut impl Rng, n: usize, p: f64, weighted: bool) -> Vec<Arc> {
    let mut arcs = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.gen_bool(p) {
                let w = if weighted { rng.gen_range(1..=5) as f64 } else { 1.0 };
                arcs.push((a, b, w));
            }
        }
    }
    arcs
}

/// Arcs where every node has at least one out-arc.
pub fn random_arcs_with_out_edges(rng: &mut impl Rng, n: usize, p: f64) -> Vec<Arc> {
    let mut arcs = random_arcs(rng, n, p, true);
    for a in 0..n {
        if !arcs.iter().any(|&(x, _, _)| x == a) {
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            arcs.push((a, b, rng.gen_range(1..=5) as f64));
        }
    }
    arcs
}

/// Frame graph over nodes `1..=n`; oracle node `i` becomes `NodeId(i + 1)`.
pub fn frame_from_arcs(n: usize, arcs: &[Arc], frame: u32) -> FrameGraph {
    let nodes = (1..=n as u64).map(NodeId);
    let edges = arcs.iter().map(|&(a, b, w)| WeightedEdge::new(a as u64 + 1, b as u64 + 1, w));
    FrameGraph::with_nodes(nodes, edges, frame).expect("generated arcs are valid")
}

/// Shape of an evolving planted-community network.
#[derive(Debug, Clone)]
pub struct EvolvingConfig {
    pub frames: usize,
    pub initial_groups: usize,
    pub max_groups: usize,
    pub min_size: usize,
    pub max_size: usize,
    /// Probability of an arc between two members of the same community.
    pub p_in: f64,
    /// Random arcs between arbitrary nodes of a frame, per frame.
    pub noise_arcs: usize,
    /// Probability that a community also takes in a few members of another.
    pub overlap: f64,
}

impl Default for EvolvingConfig {
    fn default() -> Self {
        EvolvingConfig {
            frames: 6,
            initial_groups: 8,
            max_groups: 30,
            min_size: 3,
            max_size: 12,
            p_in: 0.6,
            noise_arcs: 10,
            overlap: 0.0,
        }
    }
}

/// A temporal network with the planted communities as its grouping.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub tsn: TemporalNetwork,
    pub grouping: Grouping,
}

/// Communities that drift, grow, shrink, split, merge, dissolve and form
/// from frame to frame. Each frame's graph is dense inside communities
/// plus a little noise.
pub fn evolving(rng: &mut impl Rng, cfg: &EvolvingConfig) -> Synthetic {
    let mut next_node = 1u64;
    let mut fresh = |count: usize| -> Vec<u64> {
        let out = (next_node..next_node + count as u64).collect();
        next_node += count as u64;
        out
    };

    let mut communities: Vec<Vec<u64>> =
        (0..cfg.initial_groups).map(|_| fresh(rng.gen_range(cfg.min_size..=cfg.max_size))).collect();
    let mut frames = Vec::new();
    let mut grouping = Grouping::new();

    for f in 1..=cfg.frames as u32 {
        if f > 1 {
            communities = evolve(rng, communities, cfg, &mut fresh);
        }
        let mut groups: Vec<Vec<u64>> = communities.clone();
        if cfg.overlap > 0.0 && groups.len() > 1 {
            for i in 0..groups.len() {
                if rng.gen_bool(cfg.overlap) {
                    let j = (i + rng.gen_range(1..groups.len())) % groups.len();
                    let borrowed: Vec<u64> =
                        communities[j].choose_multiple(rng, 2.min(communities[j].len())).copied().collect();
                    groups[i].extend(borrowed);
                    groups[i].sort_unstable();
                    groups[i].dedup();
                }
            }
        }

        let mut edges = Vec::new();
        for members in &groups {
            // a directed ring keeps every community connected
            for (i, &a) in members.iter().enumerate() {
                let b = members[(i + 1) % members.len()];
                if a != b {
                    edges.push(WeightedEdge::new(a, b, rng.gen_range(1..=5) as f64));
                }
            }
            for &a in members {
                for &b in members {
                    if a != b && rng.gen_bool(cfg.p_in) {
                        edges.push(WeightedEdge::new(a, b, rng.gen_range(1..=5) as f64));
                    }
                }
            }
        }
        let all: Vec<u64> = groups.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
        if all.len() > 1 {
            for _ in 0..cfg.noise_arcs {
                let a = *all.choose(rng).unwrap();
                let b = *all.choose(rng).unwrap();
                if a != b {
                    edges.push(WeightedEdge::new(a, b, 1.0));
                }
            }
        }
        frames
            .push(FrameGraph::with_nodes(all.iter().map(|&n| NodeId(n)), edges, f).expect("generated edges are valid"));
        grouping.ensure_frame(f);
        for (i, members) in groups.into_iter().enumerate() {
            grouping.insert(Group::from_ids(i as u32 + 1, f, members).expect("communities are non-empty")).unwrap();
        }
    }
    Synthetic { tsn: TemporalNetwork::new(frames).expect("frames are numbered 1..m"), grouping }
}

fn evolve(
    rng: &mut impl Rng,
    communities: Vec<Vec<u64>>,
    cfg: &EvolvingConfig,
    fresh: &mut impl FnMut(usize) -> Vec<u64>,
) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = Vec::new();
    let mut pending_merge: Option<Vec<u64>> = None;
    for mut c in communities {
        match rng.gen_range(0..100) {
            // continue with light churn
            0..=39 => {
                if c.len() > cfg.min_size && rng.gen_bool(0.5) {
                    let drop = rng.gen_range(0..c.len());
                    c.remove(drop);
                    c.extend(fresh(1));
                }
                out.push(c);
            }
            // grow
            40..=54 => {
                let room = cfg.max_size.saturating_sub(c.len()).max(1);
                c.extend(fresh(rng.gen_range(1..=room.min(4))));
                out.push(c);
            }
            // shrink
            55..=69 => {
                let removable = c.len().saturating_sub(cfg.min_size);
                if removable > 0 {
                    c.shuffle(rng);
                    c.truncate(c.len() - rng.gen_range(1..=removable.min(4)));
                    c.sort_unstable();
                }
                out.push(c);
            }
            // split
            70..=79 if c.len() >= 2 * cfg.min_size => {
                c.shuffle(rng);
                let at = rng.gen_range(cfg.min_size..=c.len() - cfg.min_size);
                let mut rest = c.split_off(at);
                c.sort_unstable();
                rest.sort_unstable();
                out.push(c);
                out.push(rest);
            }
            // merge with the next community that also chooses to merge
            80..=89 => match pending_merge.take() {
                Some(mut other) => {
                    other.extend(c);
                    other.sort_unstable();
                    out.push(other);
                }
                None => pending_merge = Some(c),
            },
            // dissolve
            90..=94 => {}
            _ => out.push(c),
        }
    }
    out.extend(pending_merge);
    while out.len() < cfg.max_groups && rng.gen_bool(0.3) {
        out.push(fresh(rng.gen_range(cfg.min_size..=cfg.max_size)));
    }
    if out.is_empty() {
        out.push(fresh(cfg.min_size));
    }
    out.truncate(cfg.max_groups);
    out
}

/// Random configuration for property runs: up to 8 frames and 30 groups per frame.
pub fn random_config(rng: &mut impl Rng) -> EvolvingConfig {
    EvolvingConfig {
        frames: rng.gen_range(2..=8),
        initial_groups: rng.gen_range(2..=12),
        max_groups: 30,
        min_size: 3,
        max_size: rng.gen_range(5..=14),
        p_in: rng.gen_range(0.3..0.9),
        noise_arcs: rng.gen_range(0..20),
        overlap: 0.0,
    }
}
