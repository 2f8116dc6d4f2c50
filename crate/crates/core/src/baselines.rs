//! Baseline trackers for comparison with GED.
//!
//! [`asur_events`] applies Asur's set rules (continue, form, dissolve,
//! merge, split) to every group pair. Palla's method is split in two:
//! [`palla_containment`] finds which single-frame groups sit inside a
//! community of the joined two-frame graph, and [`palla_match`] pairs them
//! greedily by relative overlap.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::ged::overlap;
use crate::tsn::{Group, GroupRef, Grouping};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AsurEventType {
    Continue,
    Merge,
    Split,
    Dissolve,
    Form,
}

impl AsurEventType {
    pub fn name(self) -> &'static str {
        match self {
            AsurEventType::Continue => "continue",
            AsurEventType::Merge => "merge",
            AsurEventType::Split => "split",
            AsurEventType::Dissolve => "dissolve",
            AsurEventType::Form => "form",
        }
    }
}

impl fmt::Display for AsurEventType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One Asur event on a group pair.
///
/// A merge of `k` and `l` into `j` is reported as the two records `k -> j`
/// and `l -> j`; a split of `j` into `k` and `l` as `j -> k` and `j -> l`.
/// `overlap` is the pairwise overlap of `group1` and `group2` in percent and
/// is absent for form and dissolve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsurEvent {
    pub event: AsurEventType,
    pub group1: Option<GroupRef>,
    pub group2: Option<GroupRef>,
    pub overlap: Option<f64>,
}

/// Asur events between every pair of consecutive frames present in `grouping`.
///
/// `kappa` is the merge/split overlap threshold in percent.
pub fn asur_events(grouping: &Grouping, kappa: f64) -> Result<Vec<AsurEvent>> {
    if !(kappa > 0.0 && kappa <= 100.0) {
        return Err(Error::Parameter(format!("kappa must be in (0, 100], got {kappa}")));
    }
    let Some(last) = grouping.frame_indices().max() else {
        return Ok(Vec::new());
    };
    let first = grouping.frame_indices().min().unwrap_or(last);
    let mut out = Vec::new();
    for frame in first..last {
        out.extend(asur_step(grouping.groups(frame), grouping.groups(frame + 1), kappa)?);
    }
    Ok(out)
}

fn asur_step(earlier: &[Group], later: &[Group], kappa: f64) -> Result<Vec<AsurEvent>> {
    let mut pair_events: BTreeSet<(GroupRef, GroupRef, AsurEventType)> = BTreeSet::new();

    for g1 in earlier {
        for g2 in later {
            if g1.members() == g2.members() {
                pair_events.insert((g1.key(), g2.key(), AsurEventType::Continue));
            }
        }
    }
    for j in later {
        for (k, l) in majority_pairs(earlier, j, kappa) {
            pair_events.insert((k, j.key(), AsurEventType::Merge));
            pair_events.insert((l, j.key(), AsurEventType::Merge));
        }
    }
    for j in earlier {
        for (k, l) in majority_pairs(later, j, kappa) {
            pair_events.insert((j.key(), k, AsurEventType::Split));
            pair_events.insert((j.key(), l, AsurEventType::Split));
        }
    }

    let find = |groups: &[Group], key: GroupRef| groups.iter().find(|g| g.key() == key).cloned();
    let mut out = Vec::with_capacity(pair_events.len());
    for (a, b, event) in pair_events {
        let (ga, gb) = (find(earlier, a).unwrap(), find(later, b).unwrap());
        out.push(AsurEvent { event, group1: Some(a), group2: Some(b), overlap: Some(overlap(&ga, &gb)?) });
    }

    for g1 in earlier {
        if later.iter().all(|g2| g1.shared_with(g2) <= 1) {
            out.push(AsurEvent { event: AsurEventType::Dissolve, group1: Some(g1.key()), group2: None, overlap: None });
        }
    }
    for g2 in later {
        if earlier.iter().all(|g1| g2.shared_with(g1) <= 1) {
            out.push(AsurEvent { event: AsurEventType::Form, group1: None, group2: Some(g2.key()), overlap: None });
        }
    }
    Ok(out)
}

/// Pairs `(k, l)` from `side` that together cover `target` by more than
/// `kappa` percent while each has most of its members inside `target`.
fn majority_pairs(side: &[Group], target: &Group, kappa: f64) -> Vec<(GroupRef, GroupRef)> {
    let majority: Vec<&Group> = side.iter().filter(|g| 2 * g.shared_with(target) > g.len()).collect();
    let mut out = Vec::new();
    for (x, k) in majority.iter().enumerate() {
        for l in &majority[x + 1..] {
            let union: BTreeSet<_> = k.members().union(l.members()).copied().collect();
            let shared = union.iter().filter(|n| target.contains(**n)).count();
            let ratio = shared as f64 / union.len().max(target.len()) as f64 * 100.0;
            if ratio > kappa {
                out.push((k.key(), l.key()));
            }
        }
    }
    out
}

/// A single-frame group lying inside a joint-graph group.
///
/// Joint groups are indexed by the first frame of the pair they cover, so
/// `joint_group.frame == i` for groups from frames `i` and `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Containment {
    pub group: GroupRef,
    pub joint_group: GroupRef,
}

/// Every `(group, joint group)` pair where the group's members are a subset
/// of the joint group's members.
pub fn palla_containment(grouping: &Grouping, joint_grouping: &Grouping) -> Vec<Containment> {
    let mut out = Vec::new();
    for frame in joint_grouping.frame_indices() {
        for joint in joint_grouping.groups(frame) {
            for g in grouping.groups(frame).iter().chain(grouping.groups(frame + 1)) {
                if g.members().is_subset(joint.members()) {
                    out.push(Containment { group: g.key(), joint_group: joint.key() });
                }
            }
        }
    }
    out.sort();
    out
}

/// A Palla match between consecutive frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PallaMatch {
    pub group1: GroupRef,
    pub group2: GroupRef,
    /// `|A∩B| / |A∪B|` in percent.
    pub overlap: f64,
    pub joint_group: GroupRef,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PallaOutcome {
    /// Per frame pair, in the order the greedy pass accepted them.
    pub matches: Vec<PallaMatch>,
    /// Contained next-frame groups that no earlier group was matched to.
    pub unmatched: Vec<GroupRef>,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    g1: GroupRef,
    g2: GroupRef,
    shared: usize,
    union: usize,
    joint: GroupRef,
}

impl Candidate {
    fn cmp_overlap(&self, other: &Self) -> Ordering {
        // exact rational comparison of shared/union
        (self.shared * other.union).cmp(&(other.shared * self.union))
    }
}

/// Greedy matching by descending overlap within each joint group.
///
/// A pair is accepted while its earlier group is still unmatched; later
/// groups may receive several matches. Ties go to the smaller earlier group
/// id, then the smaller later group id. Zero-overlap pairs are never matched.
pub fn palla_match(containment: &[Containment], grouping: &Grouping) -> Result<PallaOutcome> {
    // joint group -> members from its first and second frame
    let mut by_joint: BTreeMap<GroupRef, (Vec<GroupRef>, Vec<GroupRef>)> = BTreeMap::new();
    for c in containment {
        let entry = by_joint.entry(c.joint_group).or_default();
        if c.group.frame == c.joint_group.frame {
            entry.0.push(c.group);
        } else if c.group.frame == c.joint_group.frame + 1 {
            entry.1.push(c.group);
        } else {
            return Err(Error::Parameter(format!("{} cannot be contained in joint group {}", c.group, c.joint_group)));
        }
    }

    // per frame pair, the best joint group for each cross pair
    let mut per_frame: BTreeMap<u32, BTreeMap<(GroupRef, GroupRef), Candidate>> = BTreeMap::new();
    let mut contained_later: BTreeMap<u32, BTreeSet<GroupRef>> = BTreeMap::new();
    for (&joint, (firsts, seconds)) in &by_joint {
        contained_later.entry(joint.frame).or_default().extend(seconds.iter().copied());
        for &a in firsts {
            let ga = grouping.get(a).ok_or(Error::UnknownCommunity(a.id as usize))?;
            for &b in seconds {
                let gb = grouping.get(b).ok_or(Error::UnknownCommunity(b.id as usize))?;
                let shared = ga.shared_with(gb);
                let union = ga.len() + gb.len() - shared;
                per_frame.entry(joint.frame).or_default().entry((a, b)).or_insert(Candidate {
                    g1: a,
                    g2: b,
                    shared,
                    union,
                    joint,
                });
            }
        }
    }

    let mut outcome = PallaOutcome::default();
    for (frame, pairs) in per_frame.iter().map(|(f, p)| (*f, p)) {
        let mut candidates: Vec<Candidate> = pairs.values().copied().filter(|c| c.shared > 0).collect();
        candidates.sort_by(|x, y| y.cmp_overlap(x).then(x.g1.id.cmp(&y.g1.id)).then(x.g2.id.cmp(&y.g2.id)));
        let mut taken = BTreeSet::new();
        let mut reached = BTreeSet::new();
        for c in candidates {
            if taken.insert(c.g1) {
                reached.insert(c.g2);
                outcome.matches.push(PallaMatch {
                    group1: c.g1,
                    group2: c.g2,
                    overlap: c.shared as f64 / c.union as f64 * 100.0,
                    joint_group: c.joint,
                });
            }
        }
        if let Some(later) = contained_later.get(&frame) {
            outcome.unmatched.extend(later.iter().filter(|g| !reached.contains(g)));
        }
    }
    for (frame, later) in &contained_later {
        if !per_frame.contains_key(frame) {
            outcome.unmatched.extend(later.iter().copied());
        }
    }
    outcome.unmatched.sort();
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(id: u32, frame: u32, members: impl IntoIterator<Item = u64>) -> Group {
        Group::from_ids(id, frame, members).unwrap()
    }

    fn grouping(groups: Vec<Group>) -> Grouping {
        let mut out = Grouping::new();
        for group in groups {
            out.insert(group).unwrap();
        }
        out
    }

    fn kinds(events: &[AsurEvent]) -> Vec<AsurEventType> {
        events.iter().map(|e| e.event).collect()
    }

    #[test]
    fn identical_group_continues() {
        let events = asur_events(&grouping(vec![g(1, 1, 1..=5), g(4, 2, 1..=5)]), 50.0).unwrap();
        assert_eq!(kinds(&events), vec![AsurEventType::Continue]);
        assert_eq!(events[0].overlap, Some(100.0));
    }

    #[test]
    fn one_shared_node_still_dissolves() {
        let events = asur_events(&grouping(vec![g(1, 1, 1..=5), g(1, 2, 5..=9)]), 50.0).unwrap();
        assert_eq!(kinds(&events), vec![AsurEventType::Dissolve, AsurEventType::Form]);
    }

    #[test]
    fn merge_and_split_records() {
        // two groups merge into one, then split back
        let events = asur_events(
            &grouping(vec![g(1, 1, 1..=4), g(2, 1, 5..=8), g(1, 2, 1..=8), g(1, 3, 1..=4), g(2, 3, 5..=8)]),
            50.0,
        )
        .unwrap();
        let merge: Vec<_> = events.iter().filter(|e| e.event == AsurEventType::Merge).collect();
        let split: Vec<_> = events.iter().filter(|e| e.event == AsurEventType::Split).collect();
        assert_eq!(merge.len(), 2);
        assert_eq!(split.len(), 2);
        assert!(merge.iter().all(|e| e.group2 == Some(GroupRef::new(2, 1)) && e.overlap == Some(50.0)));
        assert!(split.iter().all(|e| e.group1 == Some(GroupRef::new(2, 1))));
    }

    #[test]
    fn overlapping_groups_produce_anomaly() {
        let events =
            asur_events(&grouping(vec![g(1, 1, 1..=7), g(2, 1, 4..=10), g(1, 2, 1..=7), g(2, 2, 7..=10)]), 50.0)
                .unwrap();
        let on = |a: u32, b: u32| -> Vec<AsurEventType> {
            events
                .iter()
                .filter(|e| e.group1 == Some(GroupRef::new(1, a)) && e.group2 == Some(GroupRef::new(2, b)))
                .map(|e| e.event)
                .collect()
        };
        assert_eq!(on(1, 1), vec![AsurEventType::Continue, AsurEventType::Merge]);
        assert_eq!(on(2, 1), vec![AsurEventType::Merge, AsurEventType::Split]);
        assert_eq!(on(2, 2), vec![AsurEventType::Split]);
    }

    #[test]
    fn kappa_is_validated() {
        assert!(asur_events(&Grouping::new(), 0.0).is_err());
        assert!(asur_events(&Grouping::new(), 100.5).is_err());
        assert!(asur_events(&Grouping::new(), 100.0).unwrap().is_empty());
    }

    #[test]
    fn containment_of_preserved_group() {
        let single = grouping(vec![g(1, 1, 1..=4), g(1, 2, 1..=4), g(2, 2, 20..=22)]);
        let joint = grouping(vec![g(5, 1, 1..=4)]);
        let records = palla_containment(&single, &joint);
        assert_eq!(records.len(), 2);
        assert!(records.iter().all(|c| c.joint_group == GroupRef::new(1, 5)));
    }

    #[test]
    fn single_pair_matched() {
        let single = grouping(vec![g(1, 1, 1..=4), g(1, 2, 3..=6)]);
        let joint = grouping(vec![g(1, 1, 1..=6)]);
        let outcome = palla_match(&palla_containment(&single, &joint), &single).unwrap();
        assert_eq!(outcome.matches.len(), 1);
        assert!((outcome.matches[0].overlap - 100.0 / 3.0).abs() < 1e-12);
        assert!(outcome.unmatched.is_empty());
    }

    #[test]
    fn zero_overlap_never_matches() {
        let single = grouping(vec![g(1, 1, 1..=3), g(1, 2, 4..=6)]);
        let joint = grouping(vec![g(1, 1, 1..=6)]);
        let outcome = palla_match(&palla_containment(&single, &joint), &single).unwrap();
        assert!(outcome.matches.is_empty());
        assert_eq!(outcome.unmatched, vec![GroupRef::new(2, 1)]);
    }

    #[test]
    fn ties_go_to_smaller_earlier_id() {
        // groups 1 and 2 overlap group 9 equally; both still get matched because
        // only the earlier side is exclusive
        let single = grouping(vec![g(2, 1, [1, 2]), g(1, 1, [3, 4]), g(9, 2, [1, 2, 3, 4])]);
        let joint = grouping(vec![g(1, 1, 1..=4)]);
        let outcome = palla_match(&palla_containment(&single, &joint), &single).unwrap();
        let order: Vec<u32> = outcome.matches.iter().map(|m| m.group1.id).collect();
        assert_eq!(order, vec![1, 2]);
    }
}
