//! Sparse 2D feature sets: extrema lifted onto the boundary, centred on the
//! centroid and scaled to the unit disk.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::PipelineParams;
use crate::scalar::{Point, Scalar};
use crate::sdd::{Extremum, ExtremumKind};

/// Per-kind companion data (magnitudes or contour indices).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ByKind<V> {
    pub peaks: V,
    pub valleys: V,
}

/// Boundary coordinates of detected extrema, before normalization.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawFeatures<T = f64> {
    pub peaks: Vec<Point<T>>,
    pub valleys: Vec<Point<T>>,
    pub magnitudes: ByKind<Vec<T>>,
    pub indices: ByKind<Vec<usize>>,
}

/// Normalized sparse representation of one shape.
///
/// Peaks and valleys are centroid-relative and each list is divided by its
/// own largest norm, so the farthest peak (and the farthest valley) lies on
/// the unit circle. Both lists keep contour order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FeatureSet<T = f64> {
    pub peaks: Vec<Point<T>>,
    pub valleys: Vec<Point<T>>,
    pub magnitudes: ByKind<Vec<T>>,
    pub indices: ByKind<Vec<usize>>,
    pub params: PipelineParams,
}

impl<T: Scalar> FeatureSet<T> {
    pub fn peak_count(&self) -> usize {
        self.peaks.len()
    }

    pub fn valley_count(&self) -> usize {
        self.valleys.len()
    }

    /// Checks the structural invariants of a set read from outside.
    pub fn validate(&self) -> Result<()> {
        if self.peaks.is_empty() {
            return Err(Error::NoPeaks);
        }
        if self.magnitudes.peaks.len() != self.peaks.len()
            || self.indices.peaks.len() != self.peaks.len()
            || self.magnitudes.valleys.len() != self.valleys.len()
            || self.indices.valleys.len() != self.valleys.len()
        {
            return Err(Error::Schema("magnitude/index lists do not match feature counts".into()));
        }
        let finite = |p: &Point<T>| p.x.is_finite() && p.y.is_finite();
        if !self.peaks.iter().all(finite) || !self.valleys.iter().all(finite) {
            return Err(Error::Schema("non-finite feature coordinate".into()));
        }
        Ok(())
    }
}

/// Maps every extremum to the boundary, interpolating linearly between the
/// samples on either side of its sub-sample position.
pub fn lift_to_2d<T: Scalar>(extrema: &[Extremum<T>], index_map: &[Point<T>]) -> Result<RawFeatures<T>> {
    let mut raw = RawFeatures::default();
    let len = index_map.len();
    for e in extrema {
        if e.index >= len {
            return Err(Error::IndexOutOfRange { index: e.index, len });
        }
        let (from, frac) =
            if e.offset < T::zero() { ((e.index + len - 1) % len, T::one() + e.offset) } else { (e.index, e.offset) };
        let (a, b) = (index_map[from], index_map[(from + 1) % len]);
        let point = Point::new(a.x + frac * (b.x - a.x), a.y + frac * (b.y - a.y));
        match e.kind {
            ExtremumKind::RadialPeak => {
                raw.peaks.push(point);
                raw.magnitudes.peaks.push(e.magnitude);
                raw.indices.peaks.push(e.index);
            }
            ExtremumKind::RadialValley => {
                raw.valleys.push(point);
                raw.magnitudes.valleys.push(e.magnitude);
                raw.indices.valleys.push(e.index);
            }
        }
    }
    Ok(raw)
}

fn centre_and_scale<T: Scalar>(points: &[Point<T>], centroid: Point<T>, kind: &'static str) -> Result<Vec<Point<T>>> {
    let centred: Vec<Point<T>> = points.iter().map(|p| *p - centroid).collect();
    let max = centred.iter().map(|p| p.norm()).fold(T::zero(), T::max);
    if centred.is_empty() {
        return Ok(centred);
    }
    if max <= T::zero() {
        return Err(Error::ZeroNorm { kind });
    }
    Ok(centred.into_iter().map(|p| p.scale(max.recip())).collect())
}

/// Subtracts the centroid and scales peaks and valleys by their own maximum
/// norm. An empty valley list stays empty.
pub fn normalize_features<T: Scalar>(
    raw: &RawFeatures<T>,
    centroid: Point<T>,
    params: PipelineParams,
) -> Result<FeatureSet<T>> {
    if raw.peaks.is_empty() {
        return Err(Error::NoPeaks);
    }
    Ok(FeatureSet {
        peaks: centre_and_scale(&raw.peaks, centroid, "peak")?,
        valleys: centre_and_scale(&raw.valleys, centroid, "valley")?,
        magnitudes: raw.magnitudes.clone(),
        indices: raw.indices.clone(),
        params,
    })
}
