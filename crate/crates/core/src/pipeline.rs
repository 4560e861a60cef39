//! End-to-end feature extraction: mask → boundary → radial signature →
//! smoothed signature → slope differences → extrema → normalized features.

use serde::{Deserialize, Serialize};

use crate::contour::{radial_contour_smoothed, trace_boundary, BinaryMask, Contour2D, RadialContour, MIN_SAMPLES};
use crate::error::{Error, Result};
use crate::features::{lift_to_2d, normalize_features, FeatureSet};
use crate::scalar::Scalar;
use crate::sdd::{find_extrema, slope_difference, Extremum, SddCurve, MIN_WINDOW};
use crate::spectral::smooth;

pub const DEFAULT_SAMPLES: usize = 256;
pub const DEFAULT_CUTOFF: usize = 10;
pub const DEFAULT_MIN_MAG_RATIO: f64 = 0.15;
pub const DEFAULT_MIN_MAGNITUDE: f64 = 0.003;
pub const DEFAULT_ARC_SMOOTHING: usize = 3;

fn default_arc_smoothing() -> usize {
    DEFAULT_ARC_SMOOTHING
}

fn default_true() -> bool {
    true
}

/// Default window size: one wavelength of the cutoff harmonic,
/// `max(4, round(samples / cutoff))`. The least-squares slope over a full
/// period cancels the ringing that truncating the spectrum leaves at the
/// cutoff frequency.
pub fn default_window(samples: usize, cutoff: usize) -> usize {
    ((samples as f64 / cutoff.max(1) as f64).round() as usize).max(4)
}

/// Every knob of the feature pipeline. Queries must be processed with the
/// parameters their reference models were built with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    /// Radial signature length `L`.
    #[serde(rename = "L")]
    pub samples: usize,
    /// Low-pass cutoff `W`, in DFT bins.
    #[serde(rename = "W")]
    pub cutoff: usize,
    /// Slope window size `N`.
    #[serde(rename = "N")]
    pub window: usize,
    pub min_mag_ratio: f64,
    /// Absolute floor on `|s|`; with the relative ratio alone a featureless
    /// outline would still report its strongest ripple.
    #[serde(default)]
    pub min_magnitude: f64,
    /// Half-width of the moving average applied to the boundary before
    /// measuring arc length; 0 measures the raw pixel chain.
    #[serde(default = "default_arc_smoothing")]
    pub arc_smoothing: usize,
    /// Place features at the sub-sample vertex of each extremum instead of
    /// on the nearest sample.
    #[serde(default = "default_true")]
    pub refine_extrema: bool,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self::with_samples(DEFAULT_SAMPLES)
    }
}

impl PipelineParams {
    /// Defaults for a signature of `samples` points.
    pub fn with_samples(samples: usize) -> Self {
        Self::new(samples, DEFAULT_CUTOFF.min(samples / 2))
    }

    /// Given length and cutoff, with the window following the cutoff.
    pub fn new(samples: usize, cutoff: usize) -> Self {
        Self {
            samples,
            cutoff,
            window: default_window(samples, cutoff),
            min_mag_ratio: DEFAULT_MIN_MAG_RATIO,
            min_magnitude: DEFAULT_MIN_MAGNITUDE,
            arc_smoothing: DEFAULT_ARC_SMOOTHING,
            refine_extrema: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        if self.samples < MIN_SAMPLES {
            return fail(format!("L = {} below minimum {MIN_SAMPLES}", self.samples));
        }
        if self.cutoff < 1 || self.cutoff > self.samples / 2 {
            return Err(Error::CutoffOutOfRange { cutoff: self.cutoff, len: self.samples, max: self.samples / 2 });
        }
        if self.window < MIN_WINDOW || 2 * self.window >= self.samples {
            return fail(format!("N = {} must satisfy {MIN_WINDOW} <= N and 2N < L = {}", self.window, self.samples));
        }
        if !(0.0..1.0).contains(&self.min_mag_ratio) {
            return fail(format!("min_mag_ratio {} outside [0, 1)", self.min_mag_ratio));
        }
        if !(self.min_magnitude.is_finite() && self.min_magnitude >= 0.0) {
            return fail(format!("min_magnitude {} must be finite and >= 0", self.min_magnitude));
        }
        Ok(())
    }
}

/// Intermediate products of one pipeline run, up to the detected extrema.
#[derive(Debug, Clone)]
pub struct Analysis<T = f64> {
    pub contour: Contour2D<T>,
    pub radial: RadialContour<T>,
    pub smoothed: Vec<T>,
    pub curve: SddCurve<T>,
    pub extrema: Vec<Extremum<T>>,
}

pub fn analyze<T: Scalar>(mask: &BinaryMask, params: &PipelineParams) -> Result<Analysis<T>> {
    params.validate()?;
    let contour = trace_boundary::<T>(mask)?;
    let radial = radial_contour_smoothed(&contour, params.samples, params.arc_smoothing)?;
    let smoothed = smooth(&radial.values, params.cutoff)?;
    let curve = slope_difference(&smoothed, params.window)?;
    let extrema = find_extrema(&curve, T::cast(params.min_mag_ratio), T::cast(params.min_magnitude))?;
    Ok(Analysis { contour, radial, smoothed, curve, extrema })
}

impl<T: Scalar> Analysis<T> {
    pub fn features(&self, params: &PipelineParams) -> Result<FeatureSet<T>> {
        let raw = if params.refine_extrema {
            lift_to_2d(&self.extrema, &self.radial.index_map)?
        } else {
            let on_samples: Vec<Extremum<T>> =
                self.extrema.iter().map(|e| Extremum { offset: T::zero(), ..*e }).collect();
            lift_to_2d(&on_samples, &self.radial.index_map)?
        };
        normalize_features(&raw, self.radial.centroid, *params)
    }
}

/// Runs the whole pipeline on a mask.
pub fn extract_features<T: Scalar>(mask: &BinaryMask, params: &PipelineParams) -> Result<FeatureSet<T>> {
    analyze(mask, params)?.features(params)
}
