//! Option resolution: command-line flags, then the config file, then
//! library defaults.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use sdd_core::pipeline::default_window;
use sdd_core::{CountPolicy, MatchOptions, PipelineParams};
use serde::Deserialize;

pub const DEFAULT_CONFIG: &str = "sdd.toml";
pub const THREADS_ENV: &str = "SDD_THREADS";

/// Tunables shared by every subcommand. Each one can also be set in the
/// config file under the same name with underscores.
#[derive(Debug, Clone, Default, Args, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Knobs {
    /// Radial signature length L
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Low-pass cutoff W in DFT bins
    #[arg(long, global = true)]
    pub cutoff: Option<usize>,
    /// Slope window N [default: round(L / W)]
    #[arg(long, global = true)]
    pub window: Option<usize>,
    /// Relative extremum threshold, as a fraction of max |s|
    #[arg(long, global = true)]
    pub min_mag_ratio: Option<f64>,
    /// Absolute extremum threshold on |s|
    #[arg(long, global = true)]
    pub min_magnitude: Option<f64>,
    /// Boundary moving-average half-width used for arc length
    #[arg(long, global = true)]
    pub arc_smoothing: Option<usize>,
    /// Sub-sample feature placement
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub refine_extrema: Option<bool>,
    /// Gray level above which a pixel is object (0-255)
    #[arg(long, global = true)]
    pub threshold: Option<u8>,
    /// Largest query rotation tried, in degrees
    #[arg(long, global = true)]
    pub theta_range: Option<f64>,
    /// Rotation step in degrees
    #[arg(long, global = true)]
    pub theta_step: Option<f64>,
    /// Also try negative rotations
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub symmetric: Option<bool>,
    /// Refuse to compare feature sets with different counts
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub strict: Option<bool>,
    /// Distance charged per missing feature
    #[arg(long, global = true)]
    pub penalty: Option<f64>,
    /// Worker threads, capped by SDD_THREADS
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

macro_rules! layer {
    ($top:expr, $bottom:expr; $($field:ident),*) => {
        Knobs { $($field: $top.$field.or($bottom.$field)),* }
    };
}

impl Knobs {
    /// `self` wins wherever it sets a value.
    pub fn over(&self, below: &Knobs) -> Knobs {
        layer!(self, below; samples, cutoff, window, min_mag_ratio, min_magnitude, arc_smoothing,
            refine_extrema, threshold, theta_range, theta_step, symmetric, strict, penalty, threads)
    }

    pub fn from_toml(text: &str) -> Result<Knobs> {
        Ok(toml::from_str(text)?)
    }

    /// Reads `path`, or `sdd.toml` in the working directory when present.
    pub fn from_config(path: Option<&Path>) -> Result<Knobs> {
        let (path, required) = match path {
            Some(p) => (p.to_path_buf(), true),
            None => (PathBuf::from(DEFAULT_CONFIG), false),
        };
        if !required && !path.is_file() {
            return Ok(Knobs::default());
        }
        let text = fs::read_to_string(&path).with_context(|| format!("reading config {}", path.display()))?;
        Knobs::from_toml(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn pipeline(&self) -> Result<PipelineParams> {
        let base = match self.samples {
            Some(l) => PipelineParams::with_samples(l),
            None => PipelineParams::default(),
        };
        let p = self.apply(base);
        p.validate()?;
        Ok(p)
    }

    /// Everything but `samples` laid over `p`.
    fn apply(&self, mut p: PipelineParams) -> PipelineParams {
        if let Some(w) = self.cutoff {
            p.cutoff = w;
            p.window = default_window(p.samples, w);
        }
        if let Some(n) = self.window {
            p.window = n;
        }
        if let Some(r) = self.min_mag_ratio {
            p.min_mag_ratio = r;
        }
        if let Some(m) = self.min_magnitude {
            p.min_magnitude = m;
        }
        if let Some(a) = self.arc_smoothing {
            p.arc_smoothing = a;
        }
        if let Some(r) = self.refine_extrema {
            p.refine_extrema = r;
        }
        p
    }

    /// Parameters for querying a registry built with `built`. Explicit
    /// pipeline settings must agree with it.
    pub fn pipeline_for(&self, built: &PipelineParams) -> Result<PipelineParams> {
        let wanted = self.apply(*built);
        if self.samples.is_some_and(|l| l != built.samples) || wanted != *built {
            bail!("pipeline settings differ from the ones the registry was built with ({built:?})");
        }
        Ok(wanted)
    }

    pub fn matching(&self) -> Result<MatchOptions> {
        let mut m = MatchOptions::default();
        if let Some(r) = self.theta_range {
            m.theta_range = r;
        }
        if let Some(s) = self.theta_step {
            m.theta_step = s;
        }
        if let Some(s) = self.symmetric {
            m.symmetric = s;
        }
        if let Some(p) = self.penalty {
            m.penalty = p;
        }
        if self.strict == Some(true) {
            m.count_policy = CountPolicy::Strict;
        }
        m.thetas()?;
        Ok(m)
    }

    pub fn threshold(&self) -> u8 {
        self.threshold.unwrap_or(sdd_core::netpbm::DEFAULT_THRESHOLD)
    }

    /// Requested worker count, limited by the `SDD_THREADS` cap.
    pub fn threads(&self, cap: Option<&str>) -> Result<Option<usize>> {
        let cap = match cap.map(str::trim).filter(|s| !s.is_empty()) {
            None => None,
            Some(s) => match s.parse::<usize>() {
                Ok(n) if n > 0 => Some(n),
                _ => bail!("{THREADS_ENV} must be a positive integer, got {s:?}"),
            },
        };
        if self.threads == Some(0) {
            bail!("--threads must be positive");
        }
        Ok(match (self.threads, cap) {
            (Some(t), Some(c)) => Some(t.min(c)),
            (t, c) => t.or(c),
        })
    }
}
