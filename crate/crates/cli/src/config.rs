use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use meterent::model::ModelParams;
use meterent::{Error, Result};
use serde::Deserialize;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha0: f64,
    pub gamma: f64,
    pub theta: f64,
    pub r_list: Vec<f64>,
    pub t_max: f64,
    /// Number of time samples, both ends of `[0, t_max]` included.
    pub n_steps: usize,
    /// `None` writes to standard output.
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    /// Parameters of the figure tables.
    pub fn figure_defaults() -> Self {
        Self {
            alpha0: 100.0,
            gamma: 1.0,
            theta: 0.0,
            r_list: vec![0.0, 2.0, 3.5],
            t_max: 6.0,
            n_steps: 601,
            output_path: None,
            format: Format::Csv,
        }
    }

    /// A coarse grid small enough for the number-basis integrator.
    pub fn verify_defaults() -> Self {
        Self { alpha0: 2.0, r_list: vec![1.0], t_max: 4.0, n_steps: 9, ..Self::figure_defaults() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps < 2 {
            return Err(invalid(format!("steps must be at least 2, got {}", self.n_steps)));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(invalid(format!("t-max must be finite and > 0, got {}", self.t_max)));
        }
        if self.r_list.is_empty() {
            return Err(invalid("at least one squeeze value r is required"));
        }
        let mut seen = BTreeSet::new();
        for &r in &self.r_list {
            if !seen.insert(r.to_bits()) {
                return Err(invalid(format!("squeeze value r = {r} is listed twice")));
            }
            self.params(r)?;
        }
        Ok(())
    }

    pub fn params(&self, r: f64) -> Result<ModelParams> {
        ModelParams::new(self.alpha0, self.gamma, r, self.theta)
    }

    pub fn times(&self) -> Vec<f64> {
        let last = (self.n_steps - 1) as f64;
        (0..self.n_steps)
            .map(|k| if k + 1 == self.n_steps { self.t_max } else { self.t_max * k as f64 / last })
            .collect()
    }
}

/// A squeeze list given either as one number or as an array.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SqueezeList {
    One(f64),
    Many(Vec<f64>),
}

/// One layer of settings. Fields left `None` keep the value of the layer
/// below.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Overrides {
    pub alpha0: Option<f64>,
    pub gamma: Option<f64>,
    pub theta: Option<f64>,
    pub r: Option<SqueezeList>,
    #[serde(alias = "t_max")]
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub cutoff: Option<usize>,
}

impl Overrides {
    /// Parses a flat `key = value` file whose keys are the long flag names.
    pub fn from_text(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| invalid(format!("config file: {}", e.message())))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config file {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    /// `self` wins wherever it is set.
    pub fn over(self, lower: Overrides) -> Overrides {
        Overrides {
            alpha0: self.alpha0.or(lower.alpha0),
            gamma: self.gamma.or(lower.gamma),
            theta: self.theta.or(lower.theta),
            r: self.r.or(lower.r),
            t_max: self.t_max.or(lower.t_max),
            steps: self.steps.or(lower.steps),
            out: self.out.or(lower.out),
            format: self.format.or(lower.format),
            cutoff: self.cutoff.or(lower.cutoff),
        }
    }

    pub fn apply(self, mut base: RunConfig) -> RunConfig {
        if let Some(v) = self.alpha0 {
            base.alpha0 = v;
        }
        if let Some(v) = self.gamma {
            base.gamma = v;
        }
        if let Some(v) = self.theta {
            base.theta = v;
        }
        match self.r {
            Some(SqueezeList::One(r)) => base.r_list = vec![r],
            Some(SqueezeList::Many(rs)) => base.r_list = rs,
            None => {}
        }
        if let Some(v) = self.t_max {
            base.t_max = v;
        }
        if let Some(v) = self.steps {
            base.n_steps = v;
        }
        if self.out.is_some() {
            base.output_path = self.out;
        }
        if let Some(v) = self.format {
            base.format = v;
        }
        base
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}
