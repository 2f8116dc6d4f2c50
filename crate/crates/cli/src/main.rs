use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ged_cli::config::{Config, DialectChoice, GroupingMethod, MeasureChoice, SweepGrid, TrackerKind};
use ged_cli::formats::{parse_edges, write_edges};
use ged_cli::pipeline::{execute, load_grouping, load_network, run_pipeline};
use ged_cli::report::{self, evolution_grid, read_events, read_pair_events};
use ged_cli::{CliError, Result};
use ged_core::ged::{group_scores, EventType, GroupScores};
use ged_core::importance::{ImportanceVector, Measure, Scope};
use ged_core::{GroupRef, Grouping};

#[derive(Parser)]
#[command(name = "ged", version, about = "Track group evolution in temporal social networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Group, score and track; writes tables to the output directory.
    Run(RunArgs),
    /// Rewrite an edge file in the other dialect.
    Convert {
        input: PathBuf,
        #[arg(long, value_enum)]
        from: DialectChoice,
        #[arg(long, value_enum)]
        to: DialectChoice,
        /// Defaults to standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    #[command(subcommand)]
    Report(ReportCommand),
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Both inclusions of a pair of groups with the sums behind them.
    Inclusion {
        #[command(flatten)]
        input: InputArgs,
        /// Earlier group as ID@FRAME.
        #[arg(long, value_parser = parse_group_ref)]
        first: GroupRef,
        /// Later group as ID@FRAME.
        #[arg(long, value_parser = parse_group_ref)]
        second: GroupRef,
    },
    /// Members leaving a group between its frame and the next.
    Migration {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        #[arg(long, value_parser = parse_group_ref)]
        group: GroupRef,
    },
    /// Pairs found by one run and not the other.
    Compare { a: PathBuf, b: PathBuf },
    /// Forward and backward matches of one group, or the chain grid of a whole run.
    Evolution {
        events: PathBuf,
        #[arg(long, value_parser = parse_group_ref)]
        group: Option<GroupRef>,
    },
}

#[derive(Args)]
struct InputArgs {
    /// TOML settings; flags override them.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Edge files, one per frame unless rows carry a frame column.
    #[arg(long, num_args = 1..)]
    edges: Vec<PathBuf>,
    #[arg(long, value_enum)]
    edges_dialect: Option<DialectChoice>,
    /// Timestamped interactions (from, to, weight, time), cut with --window.
    #[arg(long)]
    interactions: Option<PathBuf>,
    #[arg(long)]
    window: Option<i64>,
    #[arg(long)]
    step: Option<i64>,
    #[arg(long)]
    groups: Option<PathBuf>,
    #[arg(long, value_enum)]
    grouping: Option<GroupingMethod>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum)]
    measure: Option<MeasureChoice>,
    /// Social position damping.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    form_dissolve: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    #[arg(long = "tracker", value_enum, num_args = 1..)]
    trackers: Vec<TrackerKind>,
    /// Threshold grid FROM:TO:STEP for both alpha and beta.
    #[arg(long, num_args = 0..=1, default_missing_value = "50:100:10", value_parser = parse_sweep)]
    sweep: Option<SweepGrid>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    max_chains: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_sweep(s: &str) -> std::result::Result<SweepGrid, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

/// `ID@FRAME`, optionally written `G3@T2`.
fn parse_group_ref(s: &str) -> std::result::Result<GroupRef, String> {
    let (id, frame) = s.split_once('@').ok_or_else(|| format!("expected ID@FRAME, got '{s}'"))?;
    let id = id.trim_start_matches(['G', 'g']).parse().map_err(|_| format!("bad group id in '{s}'"))?;
    let frame = frame.trim_start_matches(['T', 't']).parse().map_err(|_| format!("bad frame in '{s}'"))?;
    Ok(GroupRef::new(frame, id))
}

impl InputArgs {
    fn config(&self) -> Result<Config> {
        let mut cfg = match &self.config {
            Some(path) => Config::from_toml_file(path)?,
            None => Config::default(),
        };
        if !self.edges.is_empty() {
            cfg.edges = self.edges.clone();
        }
        macro_rules! set {
            ($($field:ident),*) => { $(if let Some(v) = &self.$field { cfg.$field = v.clone().into(); })* };
        }
        set!(edges_dialect, k, measure, epsilon);
        macro_rules! set_opt {
            ($($field:ident),*) => { $(if self.$field.is_some() { cfg.$field = self.$field.clone(); })* };
        }
        set_opt!(interactions, window, step, groups, grouping);
        Ok(cfg)
    }
}

impl ThresholdArgs {
    fn apply(&self, cfg: &mut Config) {
        cfg.alpha = self.alpha.unwrap_or(cfg.alpha);
        cfg.beta = self.beta.unwrap_or(cfg.beta);
        cfg.form_dissolve = self.form_dissolve.unwrap_or(cfg.form_dissolve);
    }
}

impl RunArgs {
    fn config(&self) -> Result<Config> {
        let mut cfg = self.input.config()?;
        self.thresholds.apply(&mut cfg);
        if !self.trackers.is_empty() {
            cfg.trackers = self.trackers.clone();
        }
        cfg.sweep = self.sweep.or(cfg.sweep);
        cfg.kappa = self.kappa.unwrap_or(cfg.kappa);
        cfg.max_chains = self.max_chains.unwrap_or(cfg.max_chains);
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        Ok(cfg)
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())))
}

/// Scores for the named groups; the uniform fallback applies as in tracking.
fn scores_for(cfg: &Config, keys: &[GroupRef]) -> Result<(Grouping, GroupScores)> {
    let network = load_network(cfg)?;
    let grouping = load_grouping(cfg, network.as_ref())?;
    let mut picked = Grouping::new();
    for key in keys {
        let group = grouping.get(*key).ok_or_else(|| CliError::Input(format!("unknown group {key}")))?;
        picked.insert(group.clone())?;
    }
    let scores = match (cfg.measure.measure(), &network) {
        (Some(measure), Some(network)) => group_scores(network, &picked, measure, &cfg.sp_config())?,
        _ => picked
            .iter()
            .map(|g| {
                let uniform = g.members().iter().map(|&n| (n, 1.0)).collect();
                (g.key(), ImportanceVector::from_scores(Measure::SocialPosition, Scope::Group(g.key()), uniform))
            })
            .collect(),
    };
    Ok((picked, scores))
}

fn report(command: ReportCommand) -> Result<()> {
    let mut out = output(None)?;
    match command {
        ReportCommand::Inclusion { input, first, second } => {
            let mut cfg = input.config()?;
            cfg.trackers = vec![TrackerKind::Ged];
            cfg.validate()?;
            let (picked, scores) = scores_for(&cfg, &[first, second])?;
            let (g1, g2) = (picked.get(first).expect("picked"), picked.get(second).expect("picked"));
            report::report_inclusion(g1, g2, &scores[&first], &scores[&second])?.write(&mut out)?;
        }
        ReportCommand::Migration { input, thresholds, group } => {
            let mut cfg = input.config()?;
            thresholds.apply(&mut cfg);
            cfg.trackers = vec![TrackerKind::Ged];
            let run = execute(&cfg)?;
            let g = run.grouping.get(group).ok_or_else(|| CliError::Input(format!("unknown group {group}")))?;
            let events = run.events.unwrap_or_default();
            let uniform: GroupScores;
            let scores = match &run.scores {
                Some(s) => s,
                None => {
                    uniform = scores_for(&cfg, &run.grouping.iter().map(|g| g.key()).collect::<Vec<_>>())?.1;
                    &uniform
                }
            };
            report::report_migration(g, &events, &run.grouping, scores)?.write(&mut out)?;
        }
        ReportCommand::Compare { a, b } => {
            let a = read_pair_events(open(&a)?)?;
            let b = read_pair_events(open(&b)?)?;
            report::report_compare(&a, &b).write(&mut out)?;
        }
        ReportCommand::Evolution { events, group: Some(group) } => {
            let evolution = report::report_group_evolution(group, &read_pair_events(open(&events)?)?)?;
            writeln!(out, "direction\tgroup1\ttimeframe1\tgroup2\ttimeframe2\tevent")?;
            for (dir, rows) in [("backward", &evolution.backward), ("forward", &evolution.forward)] {
                for e in rows {
                    writeln!(
                        out,
                        "{dir}\t{}\t{}\t{}\t{}\t{}",
                        e.group1.id, e.group1.frame, e.group2.id, e.group2.frame, e.label
                    )?;
                }
            }
        }
        ReportCommand::Evolution { events, group: None } => {
            let events = read_events(open(&events)?)?;
            let chains = ged_core::ged::build_evolution_chains(&events);
            for row in evolution_grid(&chains) {
                writeln!(out, "{}", row.join("\t"))?;
            }
            let counts = ged_core::ged::count_events(&events);
            writeln!(out)?;
            writeln!(out, "{}", EventType::ALL.map(|e| e.name()).join("\t"))?;
            writeln!(out, "{}", EventType::ALL.map(|e| counts[&e].to_string()).join("\t"))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            run_pipeline(&args.config()?)?;
        }
        Command::Convert { input, from, to, output: path } => {
            let rows = parse_edges(open(&input)?, from.into())?;
            let mut out = output(path.as_deref())?;
            write_edges(&mut out, &rows, to.into())?;
            out.flush()?;
        }
        Command::Report(command) => report(command)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ged: {e}");
            e.exit_code()
        }
    }
}
