//! Run configuration: a TOML file, overridden by command-line flags.

use std::path::{Path, PathBuf};

use ged_core::ged::Thresholds;
use ged_core::importance::{Measure, SpConfig};
use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::formats::EdgeDialect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GroupingMethod {
    Cpm,
    Louvain,
    Pregrouped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MeasureChoice {
    Sp,
    Cd,
    Cc,
    Cb,
    None,
}

impl MeasureChoice {
    pub fn measure(self) -> Option<Measure> {
        match self {
            MeasureChoice::Sp => Some(Measure::SocialPosition),
            MeasureChoice::Cd => Some(Measure::Degree),
            MeasureChoice::Cc => Some(Measure::Closeness),
            MeasureChoice::Cb => Some(Measure::Betweenness),
            MeasureChoice::None => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TrackerKind {
    Ged,
    Asur,
    Palla,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DialectChoice {
    Semicolon,
    Tab,
}

impl From<DialectChoice> for EdgeDialect {
    fn from(d: DialectChoice) -> Self {
        match d {
            DialectChoice::Semicolon => EdgeDialect::Semicolon,
            DialectChoice::Tab => EdgeDialect::Tab,
        }
    }
}

/// Threshold grid `from..=to` in steps of `step`, used for both alpha and beta.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid { from: 50.0, to: 100.0, step: 10.0 }
    }
}

impl SweepGrid {
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.to - self.from) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.from + i as f64 * self.step).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.step.is_nan() || self.step <= 0.0 || self.from > self.to || self.from < 0.0 || self.to > 100.0 {
            return Err(CliError::Config(format!(
                "sweep must satisfy 0 <= from <= to <= 100 and step > 0, got {}:{}:{}",
                self.from, self.to, self.step
            )));
        }
        Ok(())
    }
}

impl std::str::FromStr for SweepGrid {
    type Err = CliError;

    /// `from:to:step`, e.g. `50:100:10`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || CliError::Config(format!("sweep must look like from:to:step, got '{s}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| bad());
        Ok(SweepGrid { from: num(parts[0])?, to: num(parts[1])?, step: num(parts[2])? })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// One file per frame in order, or a single file with a frame column.
    pub edges: Vec<PathBuf>,
    pub edges_dialect: DialectChoice,
    /// Timestamped interactions to be cut into windows instead of `edges`.
    pub interactions: Option<PathBuf>,
    pub window: Option<i64>,
    pub step: Option<i64>,
    pub groups: Option<PathBuf>,
    /// Defaults to `pregrouped` when a groups file is given, else `cpm`.
    pub grouping: Option<GroupingMethod>,
    pub k: usize,
    pub measure: MeasureChoice,
    pub trackers: Vec<TrackerKind>,
    pub alpha: f64,
    pub beta: f64,
    pub form_dissolve: f64,
    pub sweep: Option<SweepGrid>,
    pub kappa: f64,
    pub epsilon: f64,
    pub max_chains: usize,
    pub out: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            edges: Vec::new(),
            edges_dialect: DialectChoice::Tab,
            interactions: None,
            window: None,
            step: None,
            groups: None,
            grouping: None,
            k: 6,
            measure: MeasureChoice::Sp,
            trackers: vec![TrackerKind::Ged],
            alpha: 50.0,
            beta: 50.0,
            form_dissolve: Thresholds::DEFAULT_FORM_DISSOLVE,
            sweep: None,
            kappa: 50.0,
            epsilon: SpConfig::default().epsilon,
            max_chains: 100_000,
            out: PathBuf::from("out"),
        }
    }
}

impl Config {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn grouping_method(&self) -> GroupingMethod {
        self.grouping.unwrap_or(if self.groups.is_some() { GroupingMethod::Pregrouped } else { GroupingMethod::Cpm })
    }

    pub fn has_network(&self) -> bool {
        !self.edges.is_empty() || self.interactions.is_some()
    }

    pub fn thresholds(&self) -> Result<Thresholds> {
        Thresholds::with_form_dissolve(self.alpha, self.beta, self.form_dissolve).map_err(CliError::from)
    }

    pub fn sp_config(&self) -> SpConfig {
        SpConfig { epsilon: self.epsilon, ..SpConfig::default() }
    }

    /// Rejects inconsistent settings before anything is read or computed.
    pub fn validate(&self) -> Result<()> {
        let method = self.grouping_method();
        if !self.edges.is_empty() && self.interactions.is_some() {
            return Err(CliError::Config("give either edge files or an interactions file, not both".into()));
        }
        if self.interactions.is_some() != self.window.is_some() {
            return Err(CliError::Config("an interactions file needs --window (and optionally --step)".into()));
        }
        if self.step.is_some() && self.window.is_none() {
            return Err(CliError::Config("--step needs --window".into()));
        }
        match method {
            GroupingMethod::Pregrouped if self.groups.is_none() => {
                return Err(CliError::Config("grouping 'pregrouped' needs a groups file".into()));
            }
            GroupingMethod::Cpm | GroupingMethod::Louvain => {
                if self.groups.is_some() {
                    return Err(CliError::Config(format!(
                        "a groups file was given but grouping is '{method:?}'; use pregrouped or drop the file"
                    )));
                }
                if !self.has_network() {
                    return Err(CliError::Config("community extraction needs edge or interaction input".into()));
                }
            }
            _ => {}
        }
        if method == GroupingMethod::Cpm && self.k < 3 {
            return Err(CliError::Config(format!("k must be at least 3, got {}", self.k)));
        }
        if self.measure != MeasureChoice::None && !self.has_network() {
            return Err(CliError::Config(format!(
                "measure '{:?}' needs edge or interaction input; use --measure none for quantity-only inclusion",
                self.measure
            )));
        }
        if self.trackers.is_empty() {
            return Err(CliError::Config("no tracker selected".into()));
        }
        if self.trackers.contains(&TrackerKind::Palla) {
            if method != GroupingMethod::Cpm {
                return Err(CliError::Config(
                    "the palla tracker needs cpm grouping for both single and joint frames".into(),
                ));
            }
            if !self.has_network() {
                return Err(CliError::Config("the palla tracker needs edge input to build joint graphs".into()));
            }
        }
        if !(self.kappa > 0.0 && self.kappa <= 100.0) {
            return Err(CliError::Config(format!("kappa must be in (0, 100], got {}", self.kappa)));
        }
        self.thresholds()?;
        self.sp_config().validate()?;
        if let Some(sweep) = &self.sweep {
            sweep.validate()?;
        }
        Ok(())
    }
}
