//! Rotation-searched matching of a query feature set against a registry.
//!
//! For each model the query is rotated through a grid of angles; at every
//! angle the mean distance between corresponding peaks and between
//! corresponding valleys are summed, and the model's score is the minimum
//! of that sum over the grid. The query goes to the model with the lowest
//! score.
//!
//! Correspondence respects contour order. Equal-length lists are compared
//! under every cyclic shift; for unequal lengths the shorter list slides over
//! every contiguous cyclic window of the longer one and the count difference
//! is charged `penalty` per missing feature (or rejected under
//! [`CountPolicy::Strict`]). Peaks and valleys pick their shifts
//! independently.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::registry::ModelRegistry;
use crate::scalar::{Point, Scalar};

/// Diameter of the unit disk: the largest distance two normalized features
/// can have.
pub const DEFAULT_PENALTY: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountPolicy {
    /// Unequal counts are matched partially and charged a penalty.
    #[default]
    Penalize,
    /// Unequal counts are an error; such models are skipped by [`match_features`].
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchOptions {
    /// Largest rotation tried, in degrees.
    pub theta_range: f64,
    /// Grid spacing, in degrees.
    pub theta_step: f64,
    /// Also search negative angles down to `-theta_range`.
    pub symmetric: bool,
    pub penalty: f64,
    pub count_policy: CountPolicy,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self {
            theta_range: 45.0,
            theta_step: 1.0,
            symmetric: false,
            penalty: DEFAULT_PENALTY,
            count_policy: CountPolicy::Penalize,
        }
    }
}

impl MatchOptions {
    /// Rotation angles searched: `0, step, 2·step, … ≤ range`, and their
    /// negatives when symmetric.
    pub fn thetas(&self) -> Result<Vec<f64>> {
        if !(self.theta_step.is_finite() && self.theta_step > 0.0) {
            return Err(Error::InvalidSearch(format!("theta step must be positive, got {}", self.theta_step)));
        }
        if !(self.theta_range.is_finite() && self.theta_range >= 0.0) {
            return Err(Error::InvalidSearch(format!("theta range must be non-negative, got {}", self.theta_range)));
        }
        if !(self.penalty.is_finite() && self.penalty >= 0.0) {
            return Err(Error::InvalidSearch(format!("penalty must be non-negative, got {}", self.penalty)));
        }
        let count = (self.theta_range / self.theta_step + 1e-9).floor() as usize;
        let mut out = Vec::with_capacity(2 * count + 1);
        out.push(0.0);
        for k in 1..=count {
            let theta = k as f64 * self.theta_step;
            out.push(theta);
            if self.symmetric {
                out.push(-theta);
            }
        }
        Ok(out)
    }
}

/// Counter-clockwise rotation of every feature about the origin.
pub fn rotate_features<T: Scalar>(features: &FeatureSet<T>, theta_degrees: T) -> FeatureSet<T> {
    let (sin, cos) = theta_degrees.to_radians().sin_cos();
    let rotate = |p: &Point<T>| Point::new(p.x * cos - p.y * sin, p.x * sin + p.y * cos);
    FeatureSet {
        peaks: features.peaks.iter().map(rotate).collect(),
        valleys: features.valleys.iter().map(rotate).collect(),
        ..features.clone()
    }
}

/// Best mean distance over cyclic correspondences of `query` onto `model`,
/// plus the per-feature count penalty.
fn cyclic_distance<T: Scalar>(query: &[Point<T>], model: &[Point<T>], penalty: T) -> T {
    match (query.len(), model.len()) {
        (0, 0) => return T::zero(),
        (0, _) | (_, 0) => return penalty,
        _ => {}
    }
    let query_shorter = query.len() <= model.len();
    let (short, long) = if query_shorter { (query, model) } else { (model, query) };
    let n = T::from_count(short.len());
    let best = (0..long.len())
        .map(|shift| {
            short
                .iter()
                .enumerate()
                .map(|(i, &p)| {
                    let q = long[(shift + i) % long.len()];
                    if query_shorter {
                        p.distance(q)
                    } else {
                        q.distance(p)
                    }
                })
                .sum::<T>()
                / n
        })
        .fold(T::infinity(), T::min);
    best + penalty * T::from_count(long.len() - short.len())
}

/// Mean corresponded peak distance and mean corresponded valley distance.
///
/// When one side has valleys and the other has none, the valley term is the
/// penalty.
pub fn feature_distance<T: Scalar>(
    query: &FeatureSet<T>,
    model: &FeatureSet<T>,
    options: &MatchOptions,
) -> Result<(T, T)> {
    if query.peaks.is_empty() {
        return Err(Error::NoPeaks);
    }
    if options.count_policy == CountPolicy::Strict {
        for (q, m) in [(query.peak_count(), model.peak_count()), (query.valley_count(), model.valley_count())] {
            if q != m {
                return Err(Error::CountMismatchPolicyViolation { query: q, model: m });
            }
        }
    }
    let penalty = T::cast(options.penalty);
    Ok((cyclic_distance(&query.peaks, &model.peaks, penalty), cyclic_distance(&query.valleys, &model.valleys, penalty)))
}

/// Score of one registry model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ModelScore<T = f64> {
    pub model_index: usize,
    pub label: String,
    pub distance: T,
    /// Rotation (degrees) applied to the query at the minimum.
    pub theta: T,
}

/// Classification of one query. `ranking` is sorted by distance, ties by
/// registry index; the best entry is repeated at the top level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MatchResult<T = f64> {
    pub label: String,
    pub distance: T,
    pub theta: T,
    pub model_index: usize,
    pub ranking: Vec<ModelScore<T>>,
}

/// Scores every model and returns the closest one.
///
/// Under [`CountPolicy::Strict`] models whose feature counts differ from the
/// query's are left out of the ranking.
pub fn match_features<T: Scalar>(
    query: &FeatureSet<T>,
    registry: &ModelRegistry<T>,
    options: &MatchOptions,
) -> Result<MatchResult<T>> {
    if registry.is_empty() {
        return Err(Error::EmptyRegistry);
    }
    if query.peaks.is_empty() {
        return Err(Error::NoPeaks);
    }
    let thetas = options.thetas()?;
    let rotated: Vec<(T, FeatureSet<T>)> = thetas
        .iter()
        .map(|&t| {
            let t = T::cast(t);
            (t, rotate_features(query, t))
        })
        .collect();

    let mut ranking = Vec::with_capacity(registry.len());
    for (index, model) in registry.models().iter().enumerate() {
        let mut best: Option<(T, T)> = None;
        for (theta, q) in &rotated {
            let (dp, dv) = match feature_distance(q, &model.features, options) {
                Ok(d) => d,
                Err(Error::CountMismatchPolicyViolation { .. }) => break,
                Err(e) => return Err(e),
            };
            let d = dp + dv;
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, *theta));
            }
        }
        if let Some((distance, theta)) = best {
            ranking.push(ModelScore { model_index: index, label: model.label.clone(), distance, theta });
        }
    }

    ranking.sort_by(|a, b| {
        a.distance.partial_cmp(&b.distance).unwrap_or(std::cmp::Ordering::Equal).then(a.model_index.cmp(&b.model_index))
    });
    let top = ranking.first().ok_or(Error::NoCompatibleModel)?;
    Ok(MatchResult {
        label: top.label.clone(),
        distance: top.distance,
        theta: top.theta,
        model_index: top.model_index,
        ranking,
    })
}
