//! Slope difference distribution (SDD) contour features for shape recognition.
//!
//! The pipeline turns a binary silhouette into a handful of normalized 2D
//! points:
//!
//! 1. [`contour`]: trace the outer boundary and sample the centroid-distance
//!    signature at `L` arc-length-uniform positions.
//! 2. [`spectral`]: low-pass the signature in the DFT domain.
//! 3. [`sdd`]: fit left/right least-squares lines at every sample, take the
//!    slope difference, and find its extrema.
//! 4. [`features`]: lift extrema back onto the boundary and normalize them.
//! 5. [`registry`] / [`matcher`]: store per-class reference feature sets and
//!    classify queries by rotation-searched feature distance.
//! 6. [`harness`]: synthetic shapes, dataset evaluation and reports.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root pick a concrete precision.

pub mod contour;
pub mod error;
pub mod features;
pub mod harness;
pub mod matcher;
pub mod netpbm;
pub mod pipeline;
pub mod registry;
pub mod scalar;
pub mod sdd;
pub mod spectral;

pub use contour::{radial_contour, trace_boundary, BinaryMask, Contour2D, RadialContour};
pub use error::{Error, Result};
pub use features::{lift_to_2d, normalize_features, FeatureSet, RawFeatures};
pub use matcher::{
    feature_distance, match_features, rotate_features, CountPolicy, MatchOptions, MatchResult, ModelScore,
};
pub use pipeline::{analyze, extract_features, Analysis, PipelineParams};
pub use registry::{build_model, ModelRegistry, ReferenceModel};
pub use scalar::{Point, Scalar};
pub use sdd::{find_extrema, fit_window_slopes, slope_difference, Extremum, ExtremumKind, SddCurve, SlopePair};
pub use spectral::{dft_forward, dft_inverse, lowpass, Spectrum};

pub type FeatureSet64 = FeatureSet<f64>;
pub type FeatureSet32 = FeatureSet<f32>;
pub type RadialContour64 = RadialContour<f64>;
pub type RadialContour32 = RadialContour<f32>;
pub type SddCurve64 = SddCurve<f64>;
pub type SddCurve32 = SddCurve<f32>;
pub type ModelRegistry64 = ModelRegistry<f64>;
pub type ModelRegistry32 = ModelRegistry<f32>;
pub type ReferenceModel64 = ReferenceModel<f64>;
pub type ReferenceModel32 = ReferenceModel<f32>;
pub type MatchResult64 = MatchResult<f64>;
pub type MatchResult32 = MatchResult<f32>;
