//! Output tables and analysis reports.
//!
//! Percentages are written with two decimals and importance scores with
//! six. Pair files (GED events, Asur events, Palla matches) share the
//! `group1 timeframe1 group2 timeframe2` columns so any two can be compared.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use ged_core::baselines::{AsurEvent, Containment, PallaOutcome};
use ged_core::ged::{EventRecord, EventType, EvolutionChain, GroupScores};
use ged_core::importance::ImportanceVector;
use ged_core::{Error as CoreError, Group, GroupRef, Grouping, NodeId};

use crate::error::{CliError, Result};

fn cell(g: Option<GroupRef>) -> (String, String) {
    match g {
        Some(g) => (g.id.to_string(), g.frame.to_string()),
        None => (String::new(), String::new()),
    }
}

pub const EVENTS_HEADER: &str =
    "id_evolutions\tevent_type\tgroup1\ttimeframe1\tgroup2\ttimeframe2\talpha\tbeta\tthreshold\ti12\ti21";

pub fn write_events(mut out: impl Write, events: &[EventRecord]) -> Result<()> {
    writeln!(out, "{EVENTS_HEADER}")?;
    for (i, e) in events.iter().enumerate() {
        let (g1, t1) = cell(e.group1);
        let (g2, t2) = cell(e.group2);
        writeln!(
            out,
            "{}\t{}\t{g1}\t{t1}\t{g2}\t{t2}\t{}\t{}\t{}\t{:.2}\t{:.2}",
            i + 1,
            e.event,
            e.thresholds.alpha,
            e.thresholds.beta,
            e.thresholds.label(),
            e.i12,
            e.i21
        )?;
    }
    Ok(())
}

pub fn write_asur_events(mut out: impl Write, events: &[AsurEvent]) -> Result<()> {
    writeln!(out, "id_evolutions\tevent_type\tgroup1\ttimeframe1\tgroup2\ttimeframe2\toverlap")?;
    for (i, e) in events.iter().enumerate() {
        let (g1, t1) = cell(e.group1);
        let (g2, t2) = cell(e.group2);
        let overlap = e.overlap.map(|o| format!("{o:.2}")).unwrap_or_default();
        writeln!(out, "{}\t{}\t{g1}\t{t1}\t{g2}\t{t2}\t{overlap}", i + 1, e.event)?;
    }
    Ok(())
}

pub fn write_contained(mut out: impl Write, records: &[Containment]) -> Result<()> {
    writeln!(out, "id_contained\tgroup_id\ttimeframe\tgroup_joint\ttimeframe_joint")?;
    for (i, c) in records.iter().enumerate() {
        writeln!(out, "{}\t{}\t{}\t{}\t{}", i + 1, c.group.id, c.group.frame, c.joint_group.id, c.joint_group.frame)?;
    }
    Ok(())
}

pub fn write_palla_matched(mut out: impl Write, outcome: &PallaOutcome) -> Result<()> {
    writeln!(out, "id_matched\tgroup1\ttimeframe1\tgroup2\ttimeframe2\toverlap\tgroup_joint")?;
    for (i, m) in outcome.matches.iter().enumerate() {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{:.2}\t{}",
            i + 1,
            m.group1.id,
            m.group1.frame,
            m.group2.id,
            m.group2.frame,
            m.overlap,
            m.joint_group.id
        )?;
    }
    Ok(())
}

pub fn write_palla_unmatched(mut out: impl Write, outcome: &PallaOutcome) -> Result<()> {
    writeln!(out, "group_id\ttimeframe")?;
    for g in &outcome.unmatched {
        writeln!(out, "{}\t{}", g.id, g.frame)?;
    }
    Ok(())
}

/// Per-member importance, one row per group membership.
pub fn write_importance(mut out: impl Write, grouping: &Grouping, scores: &GroupScores) -> Result<()> {
    let label = scores.values().next().map_or("score", |v| v.measure.tag());
    writeln!(out, "group_id\tnode_id\t{}\tranking\ttimeframe", label.to_lowercase())?;
    for group in grouping.iter() {
        let Some(v) = scores.get(&group.key()) else { continue };
        for (node, score, rank) in v.ranked() {
            writeln!(out, "{}\t{node}\t{score:.6}\t{rank}\t{}", group.id, group.frame)?;
        }
    }
    Ok(())
}

/// Column order and names of sweep tables.
pub const SWEEP_COLUMNS: [(EventType, &str); 7] = [
    (EventType::Forming, "form"),
    (EventType::Dissolving, "dissolve"),
    (EventType::Shrinking, "shrink"),
    (EventType::Growing, "growth"),
    (EventType::Continuing, "continue"),
    (EventType::Splitting, "split"),
    (EventType::Merging, "merge"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub counts: BTreeMap<EventType, usize>,
}

impl SweepRow {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }
}

/// Event counts over a grid of threshold pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn get(&self, alpha: f64, beta: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.alpha == alpha && r.beta == beta)
    }

    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        let names: Vec<&str> = SWEEP_COLUMNS.iter().map(|(_, n)| *n).collect();
        writeln!(out, "alpha,beta,{},total", names.join(","))?;
        for row in &self.rows {
            let counts: Vec<String> =
                SWEEP_COLUMNS.iter().map(|(e, _)| row.counts.get(e).copied().unwrap_or(0).to_string()).collect();
            writeln!(out, "{},{},{},{}", row.alpha, row.beta, counts.join(","), row.total())?;
        }
        Ok(())
    }
}

pub fn write_chains(mut out: impl Write, chains: &[EvolutionChain]) -> Result<()> {
    writeln!(out, "chain\tstep\tevent_type\tgroup1\ttimeframe1\tgroup2\ttimeframe2")?;
    for (c, chain) in chains.iter().enumerate() {
        for (s, e) in chain.events.iter().enumerate() {
            let (g1, t1) = cell(e.group1);
            let (g2, t2) = cell(e.group2);
            writeln!(out, "{}\t{}\t{}\t{g1}\t{t1}\t{g2}\t{t2}", c + 1, s + 1, e.event)?;
        }
    }
    Ok(())
}

/// Chains laid out by frame: per frame an event column and a group column,
/// plus a final event column. Cells outside a chain hold `-`.
pub fn evolution_grid(chains: &[EvolutionChain]) -> Vec<Vec<String>> {
    let frames = || chains.iter().flat_map(|c| c.events.iter()).flat_map(|e| [e.group1, e.group2]).flatten();
    let (Some(first), Some(last)) = (frames().map(|g| g.frame).min(), frames().map(|g| g.frame).max()) else {
        return Vec::new();
    };
    let width = 2 * (last - first + 1) as usize + 1;
    let mut header = Vec::with_capacity(width);
    for f in first..=last {
        header.push("event".to_string());
        header.push(format!("T{f}"));
    }
    header.push("event".to_string());

    let mut rows = vec![header];
    for chain in chains {
        let mut row = vec!["-".to_string(); width];
        for e in &chain.events {
            match e.group2 {
                Some(g) => {
                    let at = 2 * (g.frame - first) as usize;
                    row[at] = e.event.name().to_string();
                    row[at + 1] = format!("G{}", g.id);
                }
                None => {
                    let at = e.group1.map_or(width - 1, |g| 2 * (g.frame - first) as usize + 2);
                    row[at] = e.event.name().to_string();
                }
            }
        }
        rows.push(row);
    }
    rows
}

/// Group pair with a label, read from any pair file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PairEvent {
    pub group1: GroupRef,
    pub group2: GroupRef,
    pub label: String,
}

/// Reads the pair rows of an events, Asur or Palla matched file. Rows with
/// one side empty (forming, dissolving) are skipped; files without an
/// `event_type` column are labelled `matched`.
pub fn read_pair_events(input: impl Read) -> Result<Vec<PairEvent>> {
    let mut reader = csv::ReaderBuilder::new().delimiter(b'\t').from_reader(input);
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let need = |name: &str| col(name).ok_or_else(|| CliError::Input(format!("pair file has no '{name}' column")));
    let (g1, t1, g2, t2) = (need("group1")?, need("timeframe1")?, need("group2")?, need("timeframe2")?);
    let label = col("event_type");

    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let parse = |i: usize| -> Result<Option<u32>> {
            let raw = row.get(i).unwrap_or("").trim();
            if raw.is_empty() {
                return Ok(None);
            }
            raw.parse().map(Some).map_err(|_| CliError::Input(format!("line {line}: invalid number '{raw}'")))
        };
        if let (Some(a), Some(fa), Some(b), Some(fb)) = (parse(g1)?, parse(t1)?, parse(g2)?, parse(t2)?) {
            out.push(PairEvent {
                group1: GroupRef::new(fa, a),
                group2: GroupRef::new(fb, b),
                label: label.and_then(|i| row.get(i)).unwrap_or("matched").to_string(),
            });
        }
    }
    Ok(out)
}

/// Reads an events file written by [`write_events`].
pub fn read_events(input: impl Read) -> Result<Vec<EventRecord>> {
    let mut reader = csv::ReaderBuilder::new().delimiter(b'\t').from_reader(input);
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Input(format!("events file has no '{name}' column")))
    };
    let cols = [
        col("event_type")?,
        col("group1")?,
        col("timeframe1")?,
        col("group2")?,
        col("timeframe2")?,
        col("alpha")?,
        col("beta")?,
        col("threshold")?,
        col("i12")?,
        col("i21")?,
    ];
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let raw = |i: usize| row.get(cols[i]).unwrap_or("").trim();
        let bad = |i: usize| CliError::Input(format!("line {line}: invalid value '{}'", raw(i)));
        let num = |i: usize| raw(i).parse::<f64>().map_err(|_| bad(i));
        let group = |i: usize, j: usize| -> Result<Option<GroupRef>> {
            if raw(i).is_empty() && raw(j).is_empty() {
                return Ok(None);
            }
            let id = raw(i).parse().map_err(|_| bad(i))?;
            let frame = raw(j).parse().map_err(|_| bad(j))?;
            Ok(Some(GroupRef::new(frame, id)))
        };
        let form_dissolve = raw(7).rsplit('/').next().unwrap_or("").parse::<f64>().map_err(|_| bad(7))?;
        out.push(EventRecord {
            event: raw(0).parse().map_err(|_| bad(0))?,
            group1: group(1, 2)?,
            group2: group(3, 4)?,
            i12: num(8)?,
            i21: num(9)?,
            thresholds: ged_core::ged::Thresholds::with_form_dissolve(num(5)?, num(6)?, form_dissolve)?,
        });
    }
    Ok(out)
}

/// Pairs labelled by both runs, and pairs seen by only one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CompareReport {
    pub both: Vec<(GroupRef, GroupRef, Vec<String>, Vec<String>)>,
    pub only_a: Vec<PairEvent>,
    pub only_b: Vec<PairEvent>,
}

pub fn report_compare(a: &[PairEvent], b: &[PairEvent]) -> CompareReport {
    let group = |events: &[PairEvent]| {
        let mut m: BTreeMap<(GroupRef, GroupRef), Vec<String>> = BTreeMap::new();
        for e in events {
            m.entry((e.group1, e.group2)).or_default().push(e.label.clone());
        }
        m
    };
    let (ma, mb) = (group(a), group(b));
    let frames =
        |m: &BTreeMap<(GroupRef, GroupRef), Vec<String>>| -> BTreeSet<u32> { m.keys().map(|(g, _)| g.frame).collect() };
    if !ma.is_empty() && !mb.is_empty() && frames(&ma) != frames(&mb) {
        log::warn!("compared runs cover different frames; they may come from different groupings");
    }

    let mut report = CompareReport::default();
    for (key, labels) in &ma {
        match mb.get(key) {
            Some(other) => report.both.push((key.0, key.1, labels.clone(), other.clone())),
            None => report.only_a.extend(labels.iter().map(|l| PairEvent {
                group1: key.0,
                group2: key.1,
                label: l.clone(),
            })),
        }
    }
    for (key, labels) in &mb {
        if !ma.contains_key(key) {
            report.only_b.extend(labels.iter().map(|l| PairEvent { group1: key.0, group2: key.1, label: l.clone() }));
        }
    }
    report
}

impl CompareReport {
    pub fn write(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "# both\ngroup1\ttimeframe1\tgroup2\ttimeframe2\tevents_a\tevents_b")?;
        for (g1, g2, a, b) in &self.both {
            writeln!(out, "{}\t{}\t{}\t{}\t{}\t{}", g1.id, g1.frame, g2.id, g2.frame, a.join(","), b.join(","))?;
        }
        for (title, rows) in [("only in a", &self.only_a), ("only in b", &self.only_b)] {
            writeln!(out, "# {title}\ngroup1\ttimeframe1\tgroup2\ttimeframe2\tevent")?;
            for e in rows {
                writeln!(out, "{}\t{}\t{}\t{}\t{}", e.group1.id, e.group1.frame, e.group2.id, e.group2.frame, e.label)?;
            }
        }
        Ok(())
    }
}

/// Both inclusions of a pair with the importance sums behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct InclusionDetail {
    pub group1: GroupRef,
    pub group2: GroupRef,
    pub size1: usize,
    pub size2: usize,
    pub intersection: Vec<NodeId>,
    pub i12: f64,
    pub i21: f64,
    pub total1: f64,
    pub total2: f64,
    /// Importance of the intersection inside each group.
    pub shared1: f64,
    pub shared2: f64,
    pub core_size1: usize,
    pub core_size2: usize,
    /// Importance of the top half of each group by rank.
    pub core1: f64,
    pub core2: f64,
}

/// The first `ceil(n/2)` members in rank order.
pub fn core_members(v: &ImportanceVector) -> Vec<NodeId> {
    let ranked = v.ranked();
    let keep = ranked.len().div_ceil(2);
    ranked.into_iter().take(keep).map(|(n, _, _)| n).collect()
}

pub fn report_inclusion(
    g1: &Group,
    g2: &Group,
    imp1: &ImportanceVector,
    imp2: &ImportanceVector,
) -> Result<InclusionDetail> {
    if g2.frame != g1.frame + 1 {
        return Err(CoreError::NonConsecutiveFrames { first: g1.frame, second: g2.frame }.into());
    }
    let intersection: Vec<NodeId> = g1.members().intersection(g2.members()).copied().collect();
    let sum = |v: &ImportanceVector, nodes: &mut dyn Iterator<Item = &NodeId>| -> f64 {
        nodes.filter_map(|n| v.score(*n)).sum()
    };
    let (core1, core2) = (core_members(imp1), core_members(imp2));
    Ok(InclusionDetail {
        group1: g1.key(),
        group2: g2.key(),
        size1: g1.len(),
        size2: g2.len(),
        i12: ged_core::ged::inclusion(g1, g2, imp1)?,
        i21: ged_core::ged::inclusion(g2, g1, imp2)?,
        total1: imp1.total(),
        total2: imp2.total(),
        shared1: sum(imp1, &mut intersection.iter()),
        shared2: sum(imp2, &mut intersection.iter()),
        core_size1: core1.len(),
        core_size2: core2.len(),
        core1: sum(imp1, &mut core1.iter()),
        core2: sum(imp2, &mut core2.iter()),
        intersection,
    })
}

impl InclusionDetail {
    pub fn write(&self, mut out: impl Write) -> Result<()> {
        let members: Vec<String> = self.intersection.iter().map(NodeId::to_string).collect();
        writeln!(out, "field\tgroup1\tgroup2")?;
        writeln!(out, "group\t{}\t{}", self.group1, self.group2)?;
        writeln!(out, "size\t{}\t{}", self.size1, self.size2)?;
        writeln!(out, "inclusion\t{:.2}\t{:.2}", self.i12, self.i21)?;
        writeln!(out, "total_importance\t{:.6}\t{:.6}", self.total1, self.total2)?;
        writeln!(out, "shared_importance\t{:.6}\t{:.6}", self.shared1, self.shared2)?;
        writeln!(out, "core_size\t{}\t{}", self.core_size1, self.core_size2)?;
        writeln!(out, "core_importance\t{:.6}\t{:.6}", self.core1, self.core2)?;
        writeln!(out, "intersection\t{}\t{}", self.intersection.len(), members.join(","))?;
        Ok(())
    }
}

/// What happened to a group's members in the next frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MigrationRecord {
    pub group: GroupRef,
    pub size: usize,
    pub core_size: usize,
    pub successors: Vec<GroupRef>,
    pub successor_size: usize,
    /// Members absent from every successor.
    pub migrated: Vec<NodeId>,
    /// Average rank of the migrants inside `group`.
    pub avg_rank_before: Option<f64>,
    /// Average rank of the migrants in other next-frame groups they joined.
    pub avg_rank_after: Option<f64>,
    pub note: Option<String>,
}

/// Successors are the `group2` of every GED pair event starting at `group`.
pub fn report_migration(
    group: &Group,
    events: &[EventRecord],
    grouping: &Grouping,
    scores: &GroupScores,
) -> Result<MigrationRecord> {
    let key = group.key();
    let own = scores.get(&key);
    let mut record = MigrationRecord {
        group: key,
        size: group.len(),
        core_size: own.map_or(0, |v| core_members(v).len()),
        successors: Vec::new(),
        successor_size: 0,
        migrated: Vec::new(),
        avg_rank_before: None,
        avg_rank_after: None,
        note: None,
    };
    let mine: Vec<&EventRecord> = events.iter().filter(|e| e.group1 == Some(key)).collect();
    record.successors = mine.iter().filter_map(|e| e.group2).collect();
    record.successors.sort();
    record.successors.dedup();
    let dissolved = mine.iter().any(|e| e.event == EventType::Dissolving);
    if record.successors.is_empty() && !dissolved {
        record.note = Some("no successor".into());
        return Ok(record);
    }

    let mut kept = BTreeSet::new();
    for s in &record.successors {
        let g = grouping.get(*s).ok_or_else(|| CliError::Input(format!("successor {s} is not in the grouping")))?;
        record.successor_size += g.len();
        kept.extend(g.members().iter().copied());
    }
    record.migrated = group.members().iter().copied().filter(|n| !kept.contains(n)).collect();
    if dissolved {
        record.note = Some("dissolved".into());
    }

    let average = |ranks: Vec<u32>| -> Option<f64> {
        (!ranks.is_empty()).then(|| ranks.iter().map(|&r| r as f64).sum::<f64>() / ranks.len() as f64)
    };
    record.avg_rank_before = own.and_then(|v| average(record.migrated.iter().filter_map(|n| v.rank(*n)).collect()));
    let elsewhere: Vec<u32> = record
        .migrated
        .iter()
        .filter_map(|n| {
            grouping
                .groups(key.frame + 1)
                .iter()
                .find(|g| g.contains(*n))
                .and_then(|g| scores.get(&g.key()))
                .and_then(|v| v.rank(*n))
        })
        .collect();
    record.avg_rank_after = average(elsewhere);
    Ok(record)
}

impl MigrationRecord {
    pub fn write(&self, mut out: impl Write) -> Result<()> {
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.2}")).unwrap_or_default();
        let successors: Vec<String> = self.successors.iter().map(GroupRef::to_string).collect();
        writeln!(out, "field\tvalue")?;
        writeln!(out, "group\t{}", self.group)?;
        writeln!(out, "size\t{}", self.size)?;
        writeln!(out, "core_size\t{}", self.core_size)?;
        writeln!(out, "successors\t{}", successors.join(","))?;
        writeln!(out, "successor_size\t{}", self.successor_size)?;
        writeln!(out, "migrated\t{}", self.migrated.len())?;
        writeln!(out, "avg_rank_before\t{}", opt(self.avg_rank_before))?;
        writeln!(out, "avg_rank_after\t{}", opt(self.avg_rank_after))?;
        writeln!(out, "note\t{}", self.note.as_deref().unwrap_or(""))?;
        Ok(())
    }
}

/// Matches of one group with the previous and the next frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroupEvolution {
    pub backward: Vec<PairEvent>,
    pub forward: Vec<PairEvent>,
}

pub fn report_group_evolution(group: GroupRef, events: &[PairEvent]) -> Result<GroupEvolution> {
    let known = events.iter().any(|e| e.group1 == group || e.group2 == group);
    if !known {
        return Err(CliError::Input(format!("group {group} does not appear in the events")));
    }
    Ok(GroupEvolution {
        backward: events.iter().filter(|e| e.group2 == group).cloned().collect(),
        forward: events.iter().filter(|e| e.group1 == group).cloned().collect(),
    })
}
