//! Binary masks, outer-boundary tracing and the centroid-distance signature.
//!
//! Tracing works in a local frame anchored at the top-left corner of the
//! traced component's bounding box. Every downstream coordinate (centroid,
//! resampled boundary points, features) stays in that frame, so an integer
//! translation of the input mask reproduces the same floating-point values
//! exactly. [`Contour2D::origin`] converts back to image coordinates.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::scalar::{Point, Scalar};

/// Fewest boundary points accepted from [`trace_boundary`].
pub const MIN_BOUNDARY_POINTS: usize = 8;

/// Smallest sample count accepted by [`radial_contour`].
pub const MIN_SAMPLES: usize = 16;

/// Rectangular grid of object (`true`) / background (`false`) flags, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidMask(format!("dimensions must be positive, got {width}x{height}")));
        }
        if data.len() != width * height {
            return Err(Error::InvalidMask(format!("data length {} does not match {width}x{height}", data.len())));
        }
        Ok(Self { width, height, data })
    }

    /// All-background mask.
    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![false; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    /// Object flag at `(x, y)`; out-of-bounds reads as background.
    pub fn get(&self, x: isize, y: isize) -> bool {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            return false;
        }
        self.data[y as usize * self.width + x as usize]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        assert!(x < self.width && y < self.height, "pixel ({x}, {y}) out of bounds");
        self.data[y * self.width + x] = value;
    }

    pub fn object_pixels(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    /// Copy placed at offset `(dx, dy)` inside a canvas grown to fit.
    pub fn translated(&self, dx: usize, dy: usize) -> Self {
        let (w, h) = (self.width + dx, self.height + dy);
        Self::from_fn(w, h, |x, y| x >= dx && y >= dy && self.data[(y - dy) * self.width + (x - dx)])
            .expect("translated dimensions are positive")
    }

    /// Nearest-neighbour upscale: every pixel becomes a `factor`×`factor` block.
    pub fn upscaled(&self, factor: usize) -> Self {
        assert!(factor >= 1, "scale factor must be at least 1");
        Self::from_fn(self.width * factor, self.height * factor, |x, y| {
            self.data[(y / factor) * self.width + x / factor]
        })
        .expect("upscaled dimensions are positive")
    }
}

/// Ordered closed outer boundary of one object component.
///
/// `points` and `centroid` are relative to `origin` (the component's
/// bounding-box corner in image coordinates).
#[derive(Debug, Clone, PartialEq)]
pub struct Contour2D<T = f64> {
    pub origin: (usize, usize),
    pub points: Vec<(usize, usize)>,
    pub centroid: Point<T>,
    /// Pixel count of the traced component.
    pub area: usize,
}

impl<T: Scalar> Contour2D<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Boundary points in image coordinates.
    pub fn image_points(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.points.iter().map(move |&(x, y)| (x + self.origin.0, y + self.origin.1))
    }

    /// Centroid in image coordinates.
    pub fn image_centroid(&self) -> Point<T> {
        Point::new(self.centroid.x + T::from_count(self.origin.0), self.centroid.y + T::from_count(self.origin.1))
    }
}

/// Moore-neighbourhood offsets in clockwise screen order (y grows downward),
/// starting from the west neighbour.
const MOORE: [(isize, isize); 8] = [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)];

fn moore_index(dx: isize, dy: isize) -> usize {
    MOORE.iter().position(|&d| d == (dx, dy)).expect("offset is a Moore neighbour")
}

/// Traces the outer boundary of the largest 4-connected object component.
///
/// Moore-neighbour tracing runs clockwise from the topmost-leftmost pixel of
/// the component, entering it from the west. The trace stops when the start
/// pixel is about to be left towards the same successor as on the first step
/// (Jacob's criterion expressed on the start/successor pair, which also
/// terminates when the start is re-entered from a different side).
pub fn trace_boundary<T: Scalar>(mask: &BinaryMask) -> Result<Contour2D<T>> {
    let component = largest_component(mask).ok_or(Error::EmptyMask)?;

    let (min_x, min_y, max_x, max_y) = component
        .iter()
        .fold((usize::MAX, usize::MAX, 0, 0), |(a, b, c, d), &(x, y)| (a.min(x), b.min(y), c.max(x), d.max(y)));
    let (w, h) = (max_x - min_x + 1, max_y - min_y + 1);
    let mut local = BinaryMask::empty(w, h)?;
    let (mut sum_x, mut sum_y) = (0usize, 0usize);
    for &(x, y) in &component {
        local.set(x - min_x, y - min_y, true);
        sum_x += x - min_x;
        sum_y += y - min_y;
    }
    let n = T::from_count(component.len());
    let centroid = Point::new(T::from_count(sum_x) / n, T::from_count(sum_y) / n);

    let start_index = local.data.iter().position(|&v| v).ok_or(Error::EmptyMask)?;
    let start = ((start_index % w) as isize, (start_index / w) as isize);
    let points = moore_trace(&local, start, 4 * component.len() + 16);

    if points.len() < MIN_BOUNDARY_POINTS {
        return Err(Error::DegenerateObject { points: points.len(), min: MIN_BOUNDARY_POINTS });
    }

    Ok(Contour2D {
        origin: (min_x, min_y),
        points: points.into_iter().map(|(x, y)| (x as usize, y as usize)).collect(),
        centroid,
        area: component.len(),
    })
}

fn moore_trace(mask: &BinaryMask, start: (isize, isize), max_steps: usize) -> Vec<(isize, isize)> {
    let mut points = vec![start];
    let mut current = start;
    // Direction from `current` to its background backtrack cell.
    let mut back = 0usize;
    let mut first_successor = None;

    for _ in 0..max_steps {
        let step = (1..=8).find_map(|i| {
            let d = (back + i) % 8;
            let next = (current.0 + MOORE[d].0, current.1 + MOORE[d].1);
            mask.get(next.0, next.1).then_some((next, (back + i - 1) % 8))
        });
        let Some((next, prev_dir)) = step else {
            // isolated pixel
            break;
        };

        if current == start {
            match first_successor {
                None => first_successor = Some(next),
                Some(first) if first == next => {
                    points.pop();
                    break;
                }
                Some(_) => {}
            }
        }

        let backtrack = (current.0 + MOORE[prev_dir].0, current.1 + MOORE[prev_dir].1);
        back = moore_index(backtrack.0 - next.0, backtrack.1 - next.1);
        current = next;
        points.push(current);
    }
    points
}

/// Pixels of the largest 4-connected component; ties go to the component
/// reached first in raster order.
fn largest_component(mask: &BinaryMask) -> Option<Vec<(usize, usize)>> {
    let (w, h) = (mask.width, mask.height);
    let mut seen = vec![false; w * h];
    let mut best: Option<Vec<(usize, usize)>> = None;
    let mut queue = VecDeque::new();

    for seed in 0..w * h {
        if !mask.data[seed] || seen[seed] {
            continue;
        }
        seen[seed] = true;
        queue.push_back(seed);
        let mut pixels = Vec::new();
        while let Some(i) = queue.pop_front() {
            let (x, y) = (i % w, i / w);
            pixels.push((x, y));
            let mut visit = |j: usize| {
                if mask.data[j] && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        if best.as_ref().is_none_or(|b| pixels.len() > b.len()) {
            best = Some(pixels);
        }
    }
    best
}

/// Normalized centroid-distance signature sampled at `len` arc-length-uniform
/// positions along the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialContour<T = f64> {
    /// Distances divided by their maximum; `max(values) == 1`.
    pub values: Vec<T>,
    /// Interpolated boundary coordinate of each sample, in the contour frame.
    pub index_map: Vec<Point<T>>,
    /// Centroid in the contour frame.
    pub centroid: Point<T>,
    /// Largest raw distance in pixels (the normalization denominator).
    pub max_radius: T,
}

impl<T: Scalar> RadialContour<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Samples the centroid-to-boundary distance at `len` positions spaced
/// uniformly in arc length (sample 0 sits on the first traced point), then
/// scales the samples so the largest equals one.
pub fn radial_contour<T: Scalar>(contour: &Contour2D<T>, len: usize) -> Result<RadialContour<T>> {
    radial_contour_smoothed(contour, len, 0)
}

/// Like [`radial_contour`], but arc length is measured along a circular
/// moving average of `2 * radius + 1` boundary points.
///
/// A pixel chain overstates length by an amount that depends on edge
/// direction and on the size of its stairs, so an integer-upscaled mask is
/// parametrized differently from the original. Averaging out the stairs
/// before measuring removes most of that difference. Distances and sample
/// coordinates are still interpolated on the raw boundary.
pub fn radial_contour_smoothed<T: Scalar>(
    contour: &Contour2D<T>,
    len: usize,
    radius: usize,
) -> Result<RadialContour<T>> {
    if len < MIN_SAMPLES {
        return Err(Error::InvalidParams(format!("sample count {len} below minimum {MIN_SAMPLES}")));
    }
    if contour.points.len() < 2 {
        return Err(Error::DegenerateObject { points: contour.points.len(), min: MIN_BOUNDARY_POINTS });
    }

    let c = contour.centroid;
    let pts: Vec<Point<T>> =
        contour.points.iter().map(|&(x, y)| Point::new(T::from_count(x), T::from_count(y))).collect();
    let dist: Vec<T> = pts.iter().map(|p| p.distance(c)).collect();

    let n = pts.len();
    let path = moving_average(&pts, radius.min((n - 1) / 2));
    let mut cumulative = Vec::with_capacity(n + 1);
    cumulative.push(T::zero());
    for i in 0..n {
        let seg = path[i].distance(path[(i + 1) % n]);
        cumulative.push(cumulative[i] + seg);
    }
    let perimeter = cumulative[n];

    let mut values = Vec::with_capacity(len);
    let mut index_map = Vec::with_capacity(len);
    let mut seg = 0usize;
    for k in 0..len {
        let t = T::from_count(k) * perimeter / T::from_count(len);
        while seg + 1 < n && cumulative[seg + 1] <= t {
            seg += 1;
        }
        let seg_len = cumulative[seg + 1] - cumulative[seg];
        let frac = if seg_len > T::zero() { (t - cumulative[seg]) / seg_len } else { T::zero() };
        let next = (seg + 1) % n;
        values.push(dist[seg] + frac * (dist[next] - dist[seg]));
        index_map.push(Point::new(
            pts[seg].x + frac * (pts[next].x - pts[seg].x),
            pts[seg].y + frac * (pts[next].y - pts[seg].y),
        ));
    }

    let max_radius = values.iter().copied().fold(T::zero(), T::max);
    if max_radius <= T::zero() {
        return Err(Error::ZeroRadius);
    }
    for v in &mut values {
        *v = *v / max_radius;
    }

    Ok(RadialContour { values, index_map, centroid: c, max_radius })
}

fn moving_average<T: Scalar>(pts: &[Point<T>], radius: usize) -> Vec<Point<T>> {
    if radius == 0 {
        return pts.to_vec();
    }
    let n = pts.len();
    let width = T::from_count(2 * radius + 1);
    (0..n)
        .map(|i| {
            let (sx, sy) = (0..=2 * radius)
                .map(|d| pts[(i + n + d - radius) % n])
                .fold((T::zero(), T::zero()), |(sx, sy), p| (sx + p.x, sy + p.y));
            Point::new(sx / width, sy / width)
        })
        .collect()
}
