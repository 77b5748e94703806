//! Points, clouds and rigid motions in the plane.

use std::collections::HashMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// Polar angle in `(-pi, pi]`.
    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    #[inline]
    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;

    #[inline]
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;

    #[inline]
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

/// Counter-clockwise rotation of `p` about the origin by `theta` radians.
#[inline]
pub fn rotate(p: Point2, theta: f64) -> Point2 {
    let (s, c) = theta.sin_cos();
    Point2::new(p.x * c - p.y * s, p.x * s + p.y * c)
}

/// Reduces an angle to `[0, 2pi)`.
#[inline]
pub fn normalize_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid of a tiny negative value rounds up to exactly 2pi
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// An ordered set of pairwise distinct, finite points.
///
/// Indices are stable: every transform in this crate keeps point `i` at
/// position `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    points: Vec<Point2>,
    label: Option<String>,
}

impl PointCloud {
    pub fn new(points: Vec<Point2>, label: Option<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if let Some((index, first)) = first_duplicate(&points) {
            return Err(Error::DuplicatePoint { index, first });
        }
        Ok(Self { points, label })
    }

    pub fn from_xy(coords: &[(f64, f64)]) -> Result<Self> {
        Self::new(coords.iter().map(|&(x, y)| Point2::new(x, y)).collect(), None)
    }

    /// Skips the distinctness check. Used for images of valid clouds under
    /// transforms, where rounding can in rare cases merge coordinates.
    pub(crate) fn from_points_unchecked(points: Vec<Point2>, label: Option<String>) -> Self {
        debug_assert!(!points.is_empty());
        Self { points, label }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    #[inline]
    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Result<Point2> {
        self.points.get(i).copied().ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.points.len(),
        })
    }

    pub fn into_points(self) -> Vec<Point2> {
        self.points
    }
}

/// Returns `(index, first)` for the first point equal to an earlier one.
pub fn first_duplicate(points: &[Point2]) -> Option<(usize, usize)> {
    let mut seen: HashMap<(u64, u64), usize> = HashMap::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        // adding +0.0 folds -0.0 onto +0.0 so equal values share a key
        let key = ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits());
        if let Some(&first) = seen.get(&key) {
            return Some((i, first));
        }
        seen.insert(key, i);
    }
    None
}

/// A rotation by `theta` after moving `pivot_from` (in X) and `pivot_to`
/// (in Y) to the origin. Maps `y` to `x[pivot_from] + R(theta) (y - y[pivot_to])`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidMotion {
    pub theta: f64,
    pub pivot_from: usize,
    pub pivot_to: usize,
}

impl RigidMotion {
    pub fn new(theta: f64, pivot_from: usize, pivot_to: usize) -> Self {
        Self {
            theta: normalize_angle(theta),
            pivot_from,
            pivot_to,
        }
    }

    /// Images of all points of `y` in the frame of `x`.
    pub fn apply(&self, x: &PointCloud, y: &PointCloud) -> Result<Vec<Point2>> {
        let anchor = x.get(self.pivot_from)?;
        let origin = y.get(self.pivot_to)?;
        Ok(y
            .points()
            .iter()
            .map(|&p| anchor + rotate(p - origin, self.theta))
            .collect())
    }
}

/// A correspondence between `x[i]` and `y[j]` at the given post-transform distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchPair {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
}

/// Moves point `p` to the origin, keeping order.
pub fn translate_to_pivot(cloud: &PointCloud, p: usize) -> Result<PointCloud> {
    let pivot = cloud.get(p)?;
    let points = cloud.points().iter().map(|&q| q - pivot).collect();
    Ok(PointCloud::from_points_unchecked(
        points,
        cloud.label.clone(),
    ))
}

/// Smallest distance between two distinct points of the cloud.
pub fn min_pairwise_distance(cloud: &PointCloud) -> Result<f64> {
    let pts = cloud.points();
    if pts.len() < 2 {
        return Err(Error::DegenerateCloud(pts.len()));
    }
    let mut best = f64::INFINITY;
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i + 1..] {
            best = best.min(a.distance(b));
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    /// `min(spacing(X), spacing(Y))`.
    pub spacing: f64,
    /// Whether `delta < spacing / 2`, which makes every match one-to-one.
    pub ok: bool,
}

pub fn validate_delta(x: &PointCloud, y: &PointCloud, delta: f64) -> Result<DeltaReport> {
    check_delta(delta)?;
    let spacing = min_pairwise_distance(x)?.min(min_pairwise_distance(y)?);
    Ok(DeltaReport {
        spacing,
        ok: delta < spacing / 2.0,
    })
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDelta(delta))
    }
}
