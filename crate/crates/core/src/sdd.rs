//! Slope difference distribution of a closed 1D signal and its extrema.
//!
//! At every sample `j` a line is fitted by least squares to the `N` samples
//! ending at `j` (left window) and to the `N` samples starting at `j` (right
//! window); both windows include `j`. The slope difference is
//! `s_j = a_right - a_left`. Indices wrap modulo the signal length, so every
//! sample of a closed contour gets a value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Smallest accepted window size.
pub const MIN_WINDOW: usize = 3;

/// Left and right least-squares lines at one sample.
///
/// Intercepts refer to the unwrapped sample index used as abscissa
/// (`j-N+1..=j` on the left, `j..=j+N-1` on the right).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopePair<T = f64> {
    pub a_left: T,
    pub b_left: T,
    pub a_right: T,
    pub b_right: T,
}

/// Circular slope difference values and the window that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SddCurve<T = f64> {
    pub s: Vec<T>,
    pub window: usize,
}

impl<T: Scalar> SddCurve<T> {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn max_abs(&self) -> T {
        self.s.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// Geometric meaning of an SDD extremum on the radial signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtremumKind {
    /// Negative SDD minimum: the radius stops rising and starts falling
    /// (a convexity such as a fingertip or star tip).
    RadialPeak,
    /// Positive SDD maximum: a concavity between two lobes.
    RadialValley,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum<T = f64> {
    pub index: usize,
    /// Sub-sample position relative to `index`, in `[-0.5, 0.5]`: the vertex
    /// of the parabola through the neighbouring values, or the exact centre
    /// of a plateau.
    pub offset: T,
    /// `|s_index|`
    pub magnitude: T,
    pub kind: ExtremumKind,
}

fn check_window(len: usize, window: usize) -> Result<()> {
    if window < MIN_WINDOW {
        return Err(Error::InvalidParams(format!("window {window} below minimum {MIN_WINDOW}")));
    }
    if len <= 2 * window {
        return Err(Error::SignalTooShort { len, min: 2 * window + 1 });
    }
    Ok(())
}

/// Solves the 2x2 normal equations `(BᵀB)[a, b]ᵀ = BᵀY` for the line through
/// `(first + i, values[i])`. Abscissae are shifted by `pivot` before
/// accumulating so the sums stay small; the intercept is shifted back.
fn fit_line<T: Scalar>(values: impl Iterator<Item = T>, first: i64, pivot: i64) -> Result<(T, T)> {
    let (mut n, mut sx, mut sxx, mut sy, mut sxy) = (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
    for (i, y) in values.enumerate() {
        let x = T::from_signed(first + i as i64 - pivot);
        n = n + T::one();
        sx = sx + x;
        sxx = sxx + x * x;
        sy = sy + y;
        sxy = sxy + x * y;
    }
    let det = n * sxx - sx * sx;
    if det == T::zero() {
        return Err(Error::SingularNormalMatrix);
    }
    let a = (n * sxy - sx * sy) / det;
    let b_shifted = (sxx * sy - sx * sxy) / det;
    Ok((a, b_shifted - a * T::from_signed(pivot)))
}

/// Least-squares slopes of the left window `j-N+1..=j` and the right window
/// `j..=j+N-1` (indices modulo the signal length).
pub fn fit_window_slopes<T: Scalar>(signal: &[T], j: usize, window: usize) -> Result<SlopePair<T>> {
    let len = signal.len();
    check_window(len, window)?;
    if j >= len {
        return Err(Error::IndexOutOfRange { index: j, len });
    }
    fit_pair(signal, j, window)
}

fn fit_pair<T: Scalar>(signal: &[T], j: usize, window: usize) -> Result<SlopePair<T>> {
    let len = signal.len();
    let at = |i: i64| signal[i.rem_euclid(len as i64) as usize];
    let (jj, n) = (j as i64, window as i64);
    let left_first = jj - n + 1;
    let (a_left, b_left) = fit_line((left_first..=jj).map(at), left_first, jj)?;
    let (a_right, b_right) = fit_line((jj..jj + n).map(at), jj, jj)?;
    Ok(SlopePair { a_left, b_left, a_right, b_right })
}

/// `s_j = a_right - a_left` for every sample of the closed signal.
pub fn slope_difference<T: Scalar>(signal: &[T], window: usize) -> Result<SddCurve<T>> {
    check_window(signal.len(), window)?;
    let s = (0..signal.len())
        .map(|j| fit_pair(signal, j, window).map(|p| p.a_right - p.a_left))
        .collect::<Result<Vec<T>>>()?;
    Ok(SddCurve { s, window })
}

/// Vertex of the parabola through `(-1, a)`, `(0, b)`, `(1, c)`, clamped to
/// half a sample.
fn parabola_offset<T: Scalar>(a: T, b: T, c: T) -> T {
    let curvature = a - b - b + c;
    if curvature == T::zero() {
        return T::zero();
    }
    let half = T::cast(0.5);
    (half * (a - c) / curvature).max(-half).min(half)
}

/// Circular strict local extrema of `s`, sorted by index.
///
/// Positive maxima are radial valleys and negative minima radial peaks. A run
/// of equal values counts as one extremum located at the run's centre (the
/// lower-middle sample for even runs). Extrema are dropped when
/// `|s| < min_magnitude_ratio * max|s|` or `|s| < min_magnitude`. A flat curve yields no
/// extrema.
pub fn find_extrema<T: Scalar>(
    curve: &SddCurve<T>,
    min_magnitude_ratio: T,
    min_magnitude: T,
) -> Result<Vec<Extremum<T>>> {
    if !(min_magnitude_ratio >= T::zero() && min_magnitude_ratio < T::one()) {
        return Err(Error::InvalidParams(format!("min magnitude ratio {min_magnitude_ratio} outside [0, 1)")));
    }
    if min_magnitude.is_nan() || min_magnitude < T::zero() {
        return Err(Error::InvalidParams(format!("min magnitude {min_magnitude} is negative")));
    }
    let s = &curve.s;
    let len = s.len();
    let max_abs = curve.max_abs();
    if len < 3 || max_abs == T::zero() {
        return Ok(Vec::new());
    }
    let threshold = (min_magnitude_ratio * max_abs).max(min_magnitude);

    // Start on a run boundary so no run wraps past the scan start.
    let Some(start) = (0..len).find(|&i| s[i] != s[(i + len - 1) % len]) else {
        return Ok(Vec::new());
    };

    let mut out = Vec::new();
    let mut offset = 0;
    while offset < len {
        let first = (start + offset) % len;
        let value = s[first];
        let mut run = 1;
        while run < len && s[(first + run) % len] == value {
            run += 1;
        }
        let prev = s[(first + len - 1) % len];
        let next = s[(first + run) % len];
        let kind = if value > T::zero() && value > prev && value > next {
            Some(ExtremumKind::RadialValley)
        } else if value < T::zero() && value < prev && value < next {
            Some(ExtremumKind::RadialPeak)
        } else {
            None
        };
        if let Some(kind) = kind {
            let magnitude = value.abs();
            if magnitude >= threshold {
                let offset = if run > 1 {
                    if run % 2 == 0 {
                        T::cast(0.5)
                    } else {
                        T::zero()
                    }
                } else {
                    parabola_offset(prev, value, next)
                };
                out.push(Extremum { index: (first + (run - 1) / 2) % len, offset, magnitude, kind });
            }
        }
        offset += run;
    }
    out.sort_by_key(|e| e.index);
    Ok(out)
}
