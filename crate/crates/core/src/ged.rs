//! Group Evolution Discovery (GED).
//!
//! Groups in consecutive timeframes are compared with the inclusion measure,
//! which weighs the shared fraction of a group by the share of its members'
//! importance that is retained. Both directions are computed for every pair;
//! a pair is a *match* when either inclusion reaches its threshold, and the
//! event for a match is decided from the two inclusions, the group sizes and
//! how many matches each side has.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::importance::{group_importance, ImportanceVector, Measure, Scope, SpConfig};
use crate::tsn::{Group, GroupRef, Grouping, TemporalNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventType {
    Forming,
    Dissolving,
    Shrinking,
    Growing,
    Continuing,
    Splitting,
    Merging,
}

impl EventType {
    pub const ALL: [EventType; 7] = [
        EventType::Forming,
        EventType::Dissolving,
        EventType::Shrinking,
        EventType::Growing,
        EventType::Continuing,
        EventType::Splitting,
        EventType::Merging,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EventType::Forming => "forming",
            EventType::Dissolving => "dissolving",
            EventType::Shrinking => "shrinking",
            EventType::Growing => "growing",
            EventType::Continuing => "continuing",
            EventType::Splitting => "splitting",
            EventType::Merging => "merging",
        }
    }
}

impl fmt::Display for EventType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EventType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EventType::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown event type '{s}'")))
    }
}

/// Inclusion thresholds, all in percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// For `I(G1, G2)`.
    pub alpha: f64,
    /// For `I(G2, G1)`.
    pub beta: f64,
    /// Both inclusions below this against every group means forming/dissolving.
    pub form_dissolve: f64,
}

impl Thresholds {
    pub const DEFAULT_FORM_DISSOLVE: f64 = 10.0;

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Self::with_form_dissolve(alpha, beta, Self::DEFAULT_FORM_DISSOLVE)
    }

    pub fn with_form_dissolve(alpha: f64, beta: f64, form_dissolve: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("form_dissolve", form_dissolve)] {
            if !(0.0..=100.0).contains(&v) {
                return Err(Error::Parameter(format!("{name} must be a percentage in [0, 100], got {v}")));
            }
        }
        if alpha < 50.0 || beta < 50.0 {
            log::warn!("thresholds below 50% (alpha={alpha}, beta={beta}) match groups that share less than half");
        }
        Ok(Thresholds { alpha, beta, form_dissolve })
    }

    /// `alpha/beta/form_dissolve`, e.g. `50/50/10`.
    pub fn label(&self) -> String {
        format!("{}/{}/{}", self.alpha, self.beta, self.form_dissolve)
    }
}

fn check_nonempty(g: &Group) -> Result<()> {
    if g.is_empty() {
        return Err(Error::EmptyGroup(g.key()));
    }
    Ok(())
}

/// Shared members relative to the larger group, in percent.
pub fn overlap(g1: &Group, g2: &Group) -> Result<f64> {
    check_nonempty(g1)?;
    check_nonempty(g2)?;
    Ok(g1.shared_with(g2) as f64 / g1.len().max(g2.len()) as f64 * 100.0)
}

/// Inclusion of `g1` in `g2`, in percent:
/// `|G1∩G2|/|G1| · Σ_{x∈G1∩G2} imp(x) / Σ_{x∈G1} imp(x) · 100`.
///
/// `importance_in_g1` must score every member of `g1`, computed within `g1`.
pub fn inclusion(g1: &Group, g2: &Group, importance_in_g1: &ImportanceVector) -> Result<f64> {
    check_nonempty(g1)?;
    let mut total = 0.0;
    let mut kept = 0.0;
    let mut shared = 0usize;
    for &node in g1.members() {
        let s = importance_in_g1.score(node).ok_or(Error::MissingScore(node))?;
        total += s;
        if g2.contains(node) {
            kept += s;
            shared += 1;
        }
    }
    if total.is_nan() || total <= 0.0 {
        return Err(Error::ZeroImportance(g1.key()));
    }
    Ok(shared as f64 / g1.len() as f64 * (kept / total) * 100.0)
}

/// Inclusion without a member importance measure: `|G1∩G2|/|G1| · 100`.
pub fn inclusion_quantity_only(g1: &Group, g2: &Group) -> f64 {
    g1.shared_with(g2) as f64 / g1.len() as f64 * 100.0
}

/// Both inclusions of a group pair from consecutive frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InclusionPair {
    pub g1: GroupRef,
    pub g2: GroupRef,
    /// `I(G1, G2)` in percent.
    pub i12: f64,
    /// `I(G2, G1)` in percent.
    pub i21: f64,
    pub shared: usize,
    pub size1: usize,
    pub size2: usize,
}

impl InclusionPair {
    /// A match: at least one inclusion reaches its threshold.
    pub fn is_match(&self, th: &Thresholds) -> bool {
        self.i12 >= th.alpha || self.i21 >= th.beta
    }
}

/// Event for a pair given the number of matches of `g1` with the next frame
/// and of `g2` with the previous frame.
///
/// The rules are tried in the order continuing, shrinking, growing,
/// splitting, merging and the first that holds wins.
pub fn classify_pair(
    pair: &InclusionPair,
    matches_g1_next: usize,
    matches_g2_prev: usize,
    th: &Thresholds,
) -> Option<EventType> {
    let a = pair.i12 >= th.alpha;
    let b = pair.i21 >= th.beta;
    let (s1, s2) = (pair.size1, pair.size2);

    if a && b {
        return Some(match s1.cmp(&s2) {
            std::cmp::Ordering::Equal => EventType::Continuing,
            std::cmp::Ordering::Greater => EventType::Shrinking,
            std::cmp::Ordering::Less => EventType::Growing,
        });
    }
    if !a && !b {
        return None;
    }
    if !a && b && s1 >= s2 && matches_g2_prev == 1 {
        return Some(EventType::Shrinking);
    }
    if a && !b && s1 <= s2 && matches_g1_next == 1 {
        return Some(EventType::Growing);
    }
    if s1 >= s2 && matches_g2_prev > 1 {
        return Some(EventType::Splitting);
    }
    if s1 <= s2 && matches_g1_next > 1 {
        return Some(EventType::Merging);
    }
    None
}

/// One assigned event. Forming has no `group1`, dissolving has no `group2`;
/// for those two the inclusions are the largest seen against the other frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub event: EventType,
    pub group1: Option<GroupRef>,
    pub group2: Option<GroupRef>,
    pub i12: f64,
    pub i21: f64,
    pub thresholds: Thresholds,
}

/// Per-group importance vectors keyed by group.
pub type GroupScores = HashMap<GroupRef, ImportanceVector>;

/// Computes `measure` for every group within its own induced subgraph.
///
/// Where the measure is undefined for a group (too few members) or gives the
/// group zero total importance, every member gets the same score, so the
/// quality factor of the inclusion reduces to the shared fraction.
pub fn group_scores(
    tsn: &TemporalNetwork,
    grouping: &Grouping,
    measure: Measure,
    cfg: &SpConfig,
) -> Result<GroupScores> {
    grouping.validate_against(tsn)?;
    let mut scores = GroupScores::new();
    for group in grouping.iter() {
        let frame = tsn.frame(group.frame).ok_or(Error::MissingFrame(group.frame))?;
        let vector = match group_importance(frame, group, measure, cfg) {
            Ok(v) if v.total() > 0.0 => v,
            Ok(_) | Err(Error::TooFewNodes { .. }) => {
                log::debug!("{measure} is degenerate on {}; using uniform importance", group.key());
                let uniform = group.members().iter().map(|&n| (n, 1.0)).collect();
                ImportanceVector::from_scores(measure, Scope::Group(group.key()), uniform)
            }
            Err(e) => return Err(e),
        };
        scores.insert(group.key(), vector);
    }
    Ok(scores)
}

/// Pre-computed inclusions for every consecutive frame pair.
///
/// Building the tracker does the expensive part once, so the same pairs can
/// be classified under many threshold settings.
#[derive(Debug, Clone)]
pub struct GedTracker {
    /// frame i -> (groups of i, groups of i+1, all cross pairs)
    steps: BTreeMap<u32, FrameStep>,
}

#[derive(Debug, Clone)]
struct FrameStep {
    earlier: Vec<GroupRef>,
    later: Vec<GroupRef>,
    pairs: Vec<InclusionPair>,
}

impl GedTracker {
    /// Tracker over every frame of `tsn`; `measure = None` uses quantity-only inclusion.
    pub fn new(tsn: &TemporalNetwork, grouping: &Grouping, measure: Option<Measure>, cfg: &SpConfig) -> Result<Self> {
        grouping.validate_against(tsn)?;
        let scores = measure.map(|m| group_scores(tsn, grouping, m, cfg)).transpose()?;
        Self::from_scores(tsn.len() as u32, grouping, scores.as_ref())
    }

    /// Tracker over frames `1..=frame_count` with precomputed group scores.
    pub fn from_scores(frame_count: u32, grouping: &Grouping, scores: Option<&GroupScores>) -> Result<Self> {
        if let Some(frame) = grouping.frame_indices().find(|&f| f == 0 || f > frame_count) {
            return Err(Error::MissingFrame(frame));
        }
        let inclusion_of = |g1: &Group, g2: &Group| -> Result<f64> {
            match scores {
                None => Ok(inclusion_quantity_only(g1, g2)),
                Some(scores) => {
                    let v = scores.get(&g1.key()).ok_or(Error::ZeroImportance(g1.key()))?;
                    inclusion(g1, g2, v)
                }
            }
        };
        let mut steps = BTreeMap::new();
        for frame in 1..frame_count {
            let earlier = grouping.groups(frame);
            let later = grouping.groups(frame + 1);
            let mut pairs = Vec::with_capacity(earlier.len() * later.len());
            for g1 in earlier {
                for g2 in later {
                    pairs.push(InclusionPair {
                        g1: g1.key(),
                        g2: g2.key(),
                        i12: inclusion_of(g1, g2)?,
                        i21: inclusion_of(g2, g1)?,
                        shared: g1.shared_with(g2),
                        size1: g1.len(),
                        size2: g2.len(),
                    });
                }
            }
            steps.insert(
                frame,
                FrameStep {
                    earlier: earlier.iter().map(Group::key).collect(),
                    later: later.iter().map(Group::key).collect(),
                    pairs,
                },
            );
        }
        Ok(GedTracker { steps })
    }

    pub fn pairs(&self) -> impl Iterator<Item = &InclusionPair> {
        self.steps.values().flat_map(|s| s.pairs.iter())
    }

    pub fn pair(&self, g1: GroupRef, g2: GroupRef) -> Option<&InclusionPair> {
        self.steps.get(&g1.frame)?.pairs.iter().find(|p| p.g1 == g1 && p.g2 == g2)
    }

    /// Assigns events under `th`.
    ///
    /// Per frame pair the output lists pair events ordered by `(group1, group2)`,
    /// then dissolving, then forming.
    pub fn track(&self, th: &Thresholds) -> Vec<EventRecord> {
        let mut events = Vec::new();
        for step in self.steps.values() {
            // pass 1: matches per group on each side
            let mut next_matches: HashMap<GroupRef, usize> = HashMap::new();
            let mut prev_matches: HashMap<GroupRef, usize> = HashMap::new();
            for p in step.pairs.iter().filter(|p| p.is_match(th)) {
                *next_matches.entry(p.g1).or_default() += 1;
                *prev_matches.entry(p.g2).or_default() += 1;
            }
            // pass 2: classify matched pairs
            for p in step.pairs.iter().filter(|p| p.is_match(th)) {
                if let Some(event) = classify_pair(p, next_matches[&p.g1], prev_matches[&p.g2], th) {
                    events.push(EventRecord {
                        event,
                        group1: Some(p.g1),
                        group2: Some(p.g2),
                        i12: p.i12,
                        i21: p.i21,
                        thresholds: *th,
                    });
                }
            }

            let low = |p: &&InclusionPair| p.i12 < th.form_dissolve && p.i21 < th.form_dissolve;
            let max_of = |it: &mut dyn Iterator<Item = &InclusionPair>| {
                it.fold((0.0f64, 0.0f64), |(a, b), p| (a.max(p.i12), b.max(p.i21)))
            };
            for &g1 in &step.earlier {
                let mut with = step.pairs.iter().filter(|p| p.g1 == g1);
                if with.clone().all(|p| low(&p)) {
                    let (i12, i21) = max_of(&mut with);
                    events.push(EventRecord {
                        event: EventType::Dissolving,
                        group1: Some(g1),
                        group2: None,
                        i12,
                        i21,
                        thresholds: *th,
                    });
                }
            }
            for &g2 in &step.later {
                let mut with = step.pairs.iter().filter(|p| p.g2 == g2);
                if with.clone().all(|p| low(&p)) {
                    let (i12, i21) = max_of(&mut with);
                    events.push(EventRecord {
                        event: EventType::Forming,
                        group1: None,
                        group2: Some(g2),
                        i12,
                        i21,
                        thresholds: *th,
                    });
                }
            }
        }
        events
    }
}

/// Runs GED over `tsn` with `grouping`; `measure = None` uses quantity-only inclusion.
pub fn ged_track(
    tsn: &TemporalNetwork,
    grouping: &Grouping,
    measure: Option<Measure>,
    th: &Thresholds,
    cfg: &SpConfig,
) -> Result<Vec<EventRecord>> {
    Ok(GedTracker::new(tsn, grouping, measure, cfg)?.track(th))
}

/// Event counts per type.
pub fn count_events(events: &[EventRecord]) -> BTreeMap<EventType, usize> {
    let mut counts: BTreeMap<EventType, usize> = EventType::ALL.iter().map(|&e| (e, 0)).collect();
    for e in events {
        *counts.get_mut(&e.event).unwrap() += 1;
    }
    counts
}

/// A lineage path: consecutive records share a group (`group2` of one is `group1` of the next).
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionChain {
    pub events: Vec<EventRecord>,
}

impl EvolutionChain {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Groups along the chain in frame order.
    pub fn groups(&self) -> Vec<GroupRef> {
        let mut out: Vec<GroupRef> = Vec::new();
        for e in &self.events {
            for g in [e.group1, e.group2].into_iter().flatten() {
                if out.last() != Some(&g) {
                    out.push(g);
                }
            }
        }
        out
    }
}

/// All maximal forward lineage paths through `events`.
///
/// A path starts at a record whose `group1` is absent or is nobody's
/// `group2`; splits fan out into several chains sharing a prefix, and merges
/// into several chains sharing a suffix.
pub fn build_evolution_chains(events: &[EventRecord]) -> Vec<EvolutionChain> {
    build_evolution_chains_limited(events, usize::MAX).0
}

/// Like [`build_evolution_chains`] but stops after `limit` chains; the flag
/// tells whether the output was cut short.
pub fn build_evolution_chains_limited(events: &[EventRecord], limit: usize) -> (Vec<EvolutionChain>, bool) {
    let mut by_start: HashMap<GroupRef, Vec<usize>> = HashMap::new();
    let mut targets = std::collections::HashSet::new();
    for (i, e) in events.iter().enumerate() {
        if let Some(g) = e.group1 {
            by_start.entry(g).or_default().push(i);
        }
        if let Some(g) = e.group2 {
            targets.insert(g);
        }
    }
    let roots: Vec<usize> =
        (0..events.len()).filter(|&i| events[i].group1.is_none_or(|g| !targets.contains(&g))).collect();

    let mut chains = Vec::new();
    let mut path = Vec::new();
    for root in roots {
        if !walk(events, &by_start, root, &mut path, &mut chains, limit) {
            return (chains, true);
        }
    }
    (chains, false)
}

fn walk(
    events: &[EventRecord],
    by_start: &HashMap<GroupRef, Vec<usize>>,
    at: usize,
    path: &mut Vec<usize>,
    chains: &mut Vec<EvolutionChain>,
    limit: usize,
) -> bool {
    path.push(at);
    let next = events[at].group2.and_then(|g| by_start.get(&g));
    let mut keep_going = true;
    match next {
        Some(next) if !next.is_empty() => {
            for &n in next {
                if !walk(events, by_start, n, path, chains, limit) {
                    keep_going = false;
                    break;
                }
            }
        }
        _ => {
            if chains.len() >= limit {
                keep_going = false;
            } else {
                chains.push(EvolutionChain { events: path.iter().map(|&i| events[i]).collect() });
            }
        }
    }
    path.pop();
    keep_going
}
