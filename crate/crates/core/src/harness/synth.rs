//! Rasterized test shapes with analytic ground truth.
//!
//! Angles follow the on-screen counter-clockwise convention: a vertex at
//! angle `φ` sits at `(cx + r cos φ, cy - r sin φ)` in image coordinates
//! (y grows downward). At zero rotation the first vertex points straight up.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::contour::BinaryMask;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeKind {
    Circle { radius: f64 },
    RegularPolygon { sides: usize, radius: f64 },
    Star { points: usize, outer: f64, inner: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub shape: ShapeKind,
    /// Counter-clockwise rotation in degrees.
    pub rotation: f64,
    pub scale: f64,
    /// Background pixels kept around the shape on every side.
    pub margin: usize,
}

impl SynthSpec {
    pub fn new(shape: ShapeKind) -> Self {
        Self { shape, rotation: 0.0, scale: 1.0, margin: 4 }
    }

    pub fn rotated(mut self, degrees: f64) -> Self {
        self.rotation = degrees;
        self
    }

    pub fn scaled(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidGeometry(msg.to_string()));
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return bad("scale must be positive");
        }
        if !self.rotation.is_finite() {
            return bad("rotation must be finite");
        }
        match self.shape {
            ShapeKind::Circle { radius } if !(radius > 0.0 && radius.is_finite()) => bad("radius must be positive"),
            ShapeKind::RegularPolygon { sides, .. } if sides < 3 => bad("a polygon needs at least 3 sides"),
            ShapeKind::RegularPolygon { radius, .. } if !(radius > 0.0 && radius.is_finite()) => {
                bad("radius must be positive")
            }
            ShapeKind::Star { points, .. } if points < 3 => bad("a star needs at least 3 points"),
            ShapeKind::Star { outer, inner, .. } if !(outer > inner && inner > 0.0 && outer.is_finite()) => {
                bad("star radii must satisfy outer > inner > 0")
            }
            _ => Ok(()),
        }
    }

    fn outer_radius(&self) -> f64 {
        self.scale
            * match self.shape {
                ShapeKind::Circle { radius } | ShapeKind::RegularPolygon { radius, .. } => radius,
                ShapeKind::Star { outer, .. } => outer,
            }
    }

    /// Canvas side length and the shape centre (pixel coordinates).
    pub fn canvas(&self) -> (usize, f64) {
        let size = (2.0 * self.outer_radius()).ceil() as usize + 2 * self.margin + 1;
        (size, (size - 1) as f64 / 2.0)
    }

    /// Polar angles (degrees, on-screen counter-clockwise) of the convex
    /// vertices: star tips or polygon corners. Empty for a circle.
    pub fn tip_angles(&self) -> Vec<f64> {
        let count = match self.shape {
            ShapeKind::Circle { .. } => return Vec::new(),
            ShapeKind::RegularPolygon { sides, .. } => sides,
            ShapeKind::Star { points, .. } => points,
        };
        (0..count).map(|i| self.rotation + 90.0 + 360.0 * i as f64 / count as f64).collect()
    }

    /// Polar angles of the concave vertices of a star, or of the edge
    /// midpoints of a polygon.
    pub fn valley_angles(&self) -> Vec<f64> {
        let tips = self.tip_angles();
        let step = if tips.is_empty() { 0.0 } else { 180.0 / tips.len() as f64 };
        tips.into_iter().map(|a| a + step).collect()
    }

    /// Outline vertices in image coordinates.
    pub fn vertices(&self) -> Vec<(f64, f64)> {
        let (_, c) = self.canvas();
        let at = |deg: f64, r: f64| {
            let rad = deg.to_radians();
            (c + r * rad.cos(), c - r * rad.sin())
        };
        match self.shape {
            ShapeKind::Circle { .. } => Vec::new(),
            ShapeKind::RegularPolygon { radius, .. } => {
                self.tip_angles().into_iter().map(|a| at(a, radius * self.scale)).collect()
            }
            ShapeKind::Star { outer, inner, .. } => self
                .tip_angles()
                .into_iter()
                .zip(self.valley_angles())
                .flat_map(|(t, v)| [at(t, outer * self.scale), at(v, inner * self.scale)])
                .collect(),
        }
    }
}

fn inside_polygon(vertices: &[(f64, f64)], x: f64, y: f64) -> bool {
    let mut inside = false;
    let n = vertices.len();
    for i in 0..n {
        let (xi, yi) = vertices[i];
        let (xj, yj) = vertices[(i + n - 1) % n];
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
    }
    inside
}

/// Rasterizes the shape: a pixel is object when its centre lies inside.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<BinaryMask> {
    spec.validate()?;
    let (size, c) = spec.canvas();
    match spec.shape {
        ShapeKind::Circle { radius } => {
            let r = radius * spec.scale;
            BinaryMask::from_fn(size, size, |x, y| (x as f64 - c).hypot(y as f64 - c) <= r)
        }
        _ => {
            let vertices = spec.vertices();
            BinaryMask::from_fn(size, size, |x, y| inside_polygon(&vertices, x as f64, y as f64))
        }
    }
}

/// One-pixel boundary noise: every object pixel with a background
/// 4-neighbour is cleared, and every background pixel with an object
/// 4-neighbour is set, each independently with `probability`.
pub fn perturb_boundary<R: Rng + ?Sized>(mask: &BinaryMask, probability: f64, rng: &mut R) -> BinaryMask {
    let (w, h) = (mask.width() as isize, mask.height() as isize);
    let mut out = mask.clone();
    for y in 0..h {
        for x in 0..w {
            let v = mask.get(x, y);
            let edge = [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().any(|&(dx, dy)| mask.get(x + dx, y + dy) != v);
            if edge && rng.gen_bool(probability) {
                out.set(x as usize, y as usize, !v);
            }
        }
    }
    out
}
