//! Window, group, score and track, then write every table to the output directory.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use ged_core::baselines::{asur_events, palla_containment, palla_match, AsurEvent, Containment, PallaOutcome};
use ged_core::community::{cpm_extract, louvain_extract};
use ged_core::ged::{build_evolution_chains_limited, count_events, group_scores, EventRecord, GedTracker, GroupScores};
use ged_core::{FrameGraph, Group, Grouping, TemporalNetwork, WeightedEdge};

use crate::config::{Config, GroupingMethod, TrackerKind};
use crate::error::{CliError, Result};
use crate::formats::{parse_edges, parse_groups, parse_interactions, write_groups};
use crate::report::{self, SweepReport, SweepRow};

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())))
}

fn with_file<T>(path: &Path, what: impl FnOnce(BufReader<File>) -> Result<T>) -> Result<T> {
    what(open(path)?).map_err(|e| match e {
        CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Edge files become frames in the order given, unless a row carries its
/// own frame column. Frames nobody mentions are empty.
pub fn load_network(cfg: &Config) -> Result<Option<TemporalNetwork>> {
    if let Some(path) = &cfg.interactions {
        let interactions = with_file(path, parse_interactions)?;
        let window = cfg.window.unwrap_or_default();
        return Ok(Some(ged_core::tsn::window_interactions(&interactions, window, cfg.step.unwrap_or(window))?));
    }
    if cfg.edges.is_empty() {
        return Ok(None);
    }
    let mut by_frame: BTreeMap<u32, Vec<WeightedEdge>> = BTreeMap::new();
    for (i, path) in cfg.edges.iter().enumerate() {
        let rows = with_file(path, |r| parse_edges(r, cfg.edges_dialect.into()))?;
        for row in rows {
            let frame = row.frame.unwrap_or(i as u32 + 1);
            if frame == 0 {
                return Err(CliError::Input(format!("{}: frame indices start at 1", path.display())));
            }
            by_frame.entry(frame).or_default().push(row.edge());
        }
    }
    let last = by_frame.keys().next_back().copied().unwrap_or(cfg.edges.len() as u32).max(cfg.edges.len() as u32);
    let frames = (1..=last)
        .map(|f| FrameGraph::from_edges(by_frame.remove(&f).unwrap_or_default(), f))
        .collect::<ged_core::Result<Vec<_>>>()?;
    Ok(Some(TemporalNetwork::new(frames)?))
}

fn extract(frame: &FrameGraph, method: GroupingMethod, k: usize) -> Result<Vec<Group>> {
    Ok(match method {
        GroupingMethod::Cpm => cpm_extract(frame, k)?,
        GroupingMethod::Louvain if frame.total_weight() > 0.0 => {
            louvain_extract(frame)?.top().map(<[Group]>::to_vec).unwrap_or_default()
        }
        _ => Vec::new(),
    })
}

/// Groups of every frame of `tsn` (or of its joint graphs).
pub fn extract_grouping(frames: &[FrameGraph], method: GroupingMethod, k: usize) -> Result<Grouping> {
    let mut grouping = Grouping::new();
    for frame in frames {
        grouping.ensure_frame(frame.frame_index());
        for group in extract(frame, method, k)? {
            grouping.insert(group)?;
        }
    }
    Ok(grouping)
}

/// Everything a run computes, before it is written out.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub network: Option<TemporalNetwork>,
    pub grouping: Grouping,
    pub scores: Option<GroupScores>,
    pub events: Option<Vec<EventRecord>>,
    pub sweep: Option<SweepReport>,
    pub asur: Option<Vec<AsurEvent>>,
    pub joint_grouping: Option<Grouping>,
    pub containment: Option<Vec<Containment>>,
    pub palla: Option<PallaOutcome>,
}

impl RunOutput {
    pub fn frame_count(&self) -> u32 {
        let grouped = self.grouping.frame_indices().max().unwrap_or(0);
        self.network.as_ref().map_or(grouped, |n| n.len() as u32)
    }
}

pub fn load_grouping(cfg: &Config, network: Option<&TemporalNetwork>) -> Result<Grouping> {
    let method = cfg.grouping_method();
    let grouping = match (method, &cfg.groups) {
        (GroupingMethod::Pregrouped, Some(path)) => with_file(path, parse_groups)?,
        (GroupingMethod::Pregrouped, None) => return Err(CliError::Config("pregrouped needs a groups file".into())),
        (_, _) => {
            let network = network.ok_or_else(|| CliError::Config("grouping needs a network".into()))?;
            extract_grouping(network.frames(), method, cfg.k)?
        }
    };
    if let Some(network) = network {
        grouping.validate_against(network)?;
    }
    if grouping.frame_indices().any(|f| f == 0) {
        return Err(CliError::Input("frame indices start at 1".into()));
    }
    Ok(grouping)
}

/// Runs every selected tracker. Settings are validated before any file is read.
pub fn execute(cfg: &Config) -> Result<RunOutput> {
    cfg.validate()?;
    let thresholds = cfg.thresholds()?;
    let network = load_network(cfg)?;
    let grouping = load_grouping(cfg, network.as_ref())?;
    log::info!("{} groups over {} frames", grouping.len(), grouping.frame_indices().count());

    let mut out = RunOutput { network, grouping, ..RunOutput::default() };
    if let (Some(measure), Some(network)) = (cfg.measure.measure(), &out.network) {
        out.scores = Some(group_scores(network, &out.grouping, measure, &cfg.sp_config())?);
    }

    if cfg.trackers.contains(&TrackerKind::Ged) {
        let tracker = GedTracker::from_scores(out.frame_count(), &out.grouping, out.scores.as_ref())?;
        out.events = Some(tracker.track(&thresholds));
        if let Some(grid) = &cfg.sweep {
            let mut sweep = SweepReport::default();
            for &alpha in &grid.values() {
                for &beta in &grid.values() {
                    let th = ged_core::ged::Thresholds::with_form_dissolve(alpha, beta, cfg.form_dissolve)?;
                    sweep.rows.push(SweepRow { alpha, beta, counts: count_events(&tracker.track(&th)) });
                }
            }
            out.sweep = Some(sweep);
        }
    }
    if cfg.trackers.contains(&TrackerKind::Asur) {
        out.asur = Some(asur_events(&out.grouping, cfg.kappa)?);
    }
    if cfg.trackers.contains(&TrackerKind::Palla) {
        let network = out.network.as_ref().ok_or_else(|| CliError::Config("palla needs a network".into()))?;
        let joint = extract_grouping(&network.joined_pairs()?, GroupingMethod::Cpm, cfg.k)?;
        let containment = palla_containment(&out.grouping, &joint);
        out.palla = Some(palla_match(&containment, &out.grouping)?);
        out.containment = Some(containment);
        out.joint_grouping = Some(joint);
    }
    Ok(out)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn finish(mut w: BufWriter<File>) -> Result<()> {
    w.flush()?;
    Ok(())
}

/// Writes the tables of `run` into `dir`, returning the file names written.
pub fn write_outputs(run: &RunOutput, dir: &Path, max_chains: usize) -> Result<Vec<String>> {
    fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    let mut written = Vec::new();
    let mut emit = |name: &str, body: &dyn Fn(&mut BufWriter<File>) -> Result<()>| -> Result<()> {
        let mut w = create(dir, name)?;
        body(&mut w)?;
        finish(w)?;
        written.push(name.to_string());
        Ok(())
    };

    emit("groups.tsv", &|w| write_groups(w, &run.grouping))?;
    if let Some(scores) = &run.scores {
        emit("importance.tsv", &|w| report::write_importance(w, &run.grouping, scores))?;
    }
    if let Some(events) = &run.events {
        emit("events.tsv", &|w| report::write_events(w, events))?;
        let (chains, truncated) = build_evolution_chains_limited(events, max_chains);
        if truncated {
            log::warn!("evolution chains cut at {max_chains}; raise max_chains for the full listing");
        }
        emit("chains.tsv", &|w| report::write_chains(w, &chains))?;
    }
    if let Some(sweep) = &run.sweep {
        emit("sweep.csv", &|w| sweep.write_csv(w))?;
    }
    if let Some(asur) = &run.asur {
        emit("asur_events.tsv", &|w| report::write_asur_events(w, asur))?;
    }
    if let Some(joint) = &run.joint_grouping {
        emit("joint_groups.tsv", &|w| write_groups(w, joint))?;
    }
    if let Some(containment) = &run.containment {
        emit("contained.tsv", &|w| report::write_contained(w, containment))?;
    }
    if let Some(palla) = &run.palla {
        emit("palla_matched.tsv", &|w| report::write_palla_matched(w, palla))?;
        emit("palla_unmatched.tsv", &|w| report::write_palla_unmatched(w, palla))?;
    }
    Ok(written)
}

pub fn run_pipeline(cfg: &Config) -> Result<RunOutput> {
    let run = execute(cfg)?;
    let written = write_outputs(&run, &cfg.out, cfg.max_chains)?;
    log::info!("wrote {} to {}", written.join(", "), cfg.out.display());
    Ok(run)
}
