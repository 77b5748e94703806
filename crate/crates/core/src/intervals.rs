//! Rotation feasibility arcs and the endpoint sweep.
//!
//! With both pivots at the origin, `||x - R(theta) y|| <= delta` holds exactly
//! for `theta` in an arc centred at `angle(x) - angle(y)` whose half-width
//! follows from the law of cosines. The sweep finds the angle covered by the
//! most arcs.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_delta, normalize_angle, Point2};

/// Cosines within this distance beyond `[-1, 1]` are snapped onto the boundary.
pub const COSINE_CLAMP: f64 = 1e-12;

/// Set of rotation angles that bring `y` within `delta` of `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AngleIntervalCase {
    /// No rotation works: the norms differ by more than `delta`.
    Empty,
    /// Every rotation works: both points lie within `delta` of the origin jointly.
    Full,
    /// `[center - half_width, center + half_width]` modulo `2pi`, with
    /// `half_width` in `[0, pi]`.
    Arc { center: f64, half_width: f64 },
}

/// Closed angle range inside `[0, 2pi]` with `start <= end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleRange {
    pub start: f64,
    pub end: f64,
}

impl AngleRange {
    pub const FULL: AngleRange = AngleRange { start: 0.0, end: TAU };

    #[inline]
    pub fn new(start: f64, end: f64) -> Self {
        debug_assert!(start <= end, "{start} > {end}");
        Self { start, end }
    }

    #[inline]
    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    #[inline]
    pub fn contains(&self, theta: f64) -> bool {
        self.start <= theta && theta <= self.end
    }
}

/// An arc reduced modulo `2pi`: either one range or a pair touching `0` and `2pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArcPieces {
    One(AngleRange),
    Two(AngleRange, AngleRange),
}

impl ArcPieces {
    pub fn iter(&self) -> impl Iterator<Item = AngleRange> {
        let (a, b) = match *self {
            ArcPieces::One(a) => (a, None),
            ArcPieces::Two(a, b) => (a, Some(b)),
        };
        std::iter::once(a).chain(b)
    }

    pub fn total_len(&self) -> f64 {
        self.iter().map(|r| r.len()).sum()
    }

    pub fn contains(&self, theta: f64) -> bool {
        let t = normalize_angle(theta);
        // 0 and 2pi are the same rotation
        self.iter()
            .any(|r| r.contains(t) || (t == 0.0 && r.contains(TAU)))
    }
}

/// Feasibility set for a point pair, both already translated by their pivots.
pub fn match_interval(x: Point2, y: Point2, delta: f64) -> Result<AngleIntervalCase> {
    check_delta(delta)?;
    let (nx, ny) = (x.norm(), y.norm());
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::PivotLeak);
    }
    Ok(arc_from_polar(nx, x.angle(), ny, y.angle(), delta))
}

/// [`match_interval`] on precomputed norms and polar angles.
///
/// The half-width is `acos(c)` with `c = (nx^2 + ny^2 - delta^2) / (2 nx ny)`,
/// evaluated as `2 atan2(sqrt(1 - c), sqrt(1 + c))` where both radicands are
/// formed as products of differences. This keeps full relative accuracy when
/// `delta` is much smaller than the norms.
#[inline]
pub(crate) fn arc_from_polar(nx: f64, ax: f64, ny: f64, ay: f64, delta: f64) -> AngleIntervalCase {
    let denom = 2.0 * nx * ny;
    let gap = nx - ny;
    let sum = nx + ny;
    // 1 - c and 1 + c
    let mut one_minus = (delta - gap) * (delta + gap) / denom;
    let mut one_plus = (sum - delta) * (sum + delta) / denom;
    if one_minus < 0.0 {
        if one_minus < -COSINE_CLAMP {
            return AngleIntervalCase::Empty;
        }
        one_minus = 0.0;
    }
    if one_plus < 0.0 {
        if one_plus < -COSINE_CLAMP {
            return AngleIntervalCase::Full;
        }
        one_plus = 0.0;
    }
    let half_width = (2.0 * one_minus.sqrt().atan2(one_plus.sqrt())).min(PI);
    AngleIntervalCase::Arc {
        center: ax - ay,
        half_width,
    }
}

/// Reduces `[center - half_width, center + half_width]` into `[0, 2pi]`.
pub fn normalize_mod_2pi(center: f64, half_width: f64) -> ArcPieces {
    if 2.0 * half_width >= TAU {
        return ArcPieces::One(AngleRange::FULL);
    }
    let start = normalize_angle(center - half_width);
    let end = normalize_angle(center + half_width);
    if start <= end {
        ArcPieces::One(AngleRange::new(start, end))
    } else {
        ArcPieces::Two(AngleRange::new(0.0, end), AngleRange::new(start, TAU))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    /// Smallest angle in `[0, 2pi)` attaining the maximum.
    pub theta: f64,
    /// The plateau containing `theta` is `[plateau_start, plateau_end]`.
    /// Usually `plateau_start == theta`; when `theta == 0` and the plateau
    /// runs through `0`, it is unrolled as `[b, a + 2pi]`.
    pub plateau_start: f64,
    pub plateau_end: f64,
    /// Number of input ranges covering `theta`.
    pub arc_overlap: usize,
}

/// Endpoint event. `delta` is `+1` when entering a range and `-1` when leaving.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleEvent {
    pub angle: f64,
    pub delta: i32,
}

impl AngleEvent {
    #[inline]
    fn order(&self, other: &Self) -> Ordering {
        self.angle
            .total_cmp(&other.angle)
            .then(self.delta.cmp(&other.delta))
    }
}

/// Reusable event buffer for repeated sweeps.
#[derive(Debug, Default, Clone)]
pub struct Sweeper {
    events: Vec<AngleEvent>,
}

impl Sweeper {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&mut self) {
        self.events.clear();
    }

    #[inline]
    pub fn push(&mut self, range: AngleRange) {
        self.events.push(AngleEvent {
            angle: range.start,
            delta: 1,
        });
        self.events.push(AngleEvent {
            angle: range.end,
            delta: -1,
        });
    }

    pub fn push_pieces(&mut self, pieces: ArcPieces) {
        for r in pieces.iter() {
            self.push(r);
        }
    }

    /// Sorts the events (leaving before entering on ties) and scans them.
    /// Returns the first maximizing plateau.
    pub fn run(&mut self) -> SweepOutcome {
        let mut best = SweepOutcome {
            theta: 0.0,
            plateau_start: 0.0,
            plateau_end: TAU,
            arc_overlap: 0,
        };
        let mut tail = (0, TAU);
        self.scan(|overlap, start, end| {
            if overlap > best.arc_overlap {
                best = SweepOutcome {
                    theta: start,
                    plateau_start: start,
                    plateau_end: end,
                    arc_overlap: overlap,
                };
            }
            if end == TAU {
                tail = (overlap, start);
            }
        });
        let (tail_overlap, tail_start) = tail;
        if best.arc_overlap > 0
            && best.theta == 0.0
            && tail_overlap == best.arc_overlap
            && tail_start > best.plateau_end
        {
            best.plateau_start = tail_start;
            best.plateau_end += TAU;
        }
        best
    }

    /// Every plateau attaining the maximum coverage, in increasing angle order.
    /// A plateau wrapping through `0` is reported once, unrolled past `2pi`.
    pub fn run_all(&mut self) -> (usize, Vec<AngleRange>) {
        let mut max = 0;
        let mut plateaus = Vec::new();
        self.scan(|overlap, start, end| match overlap.cmp(&max) {
            Ordering::Greater => {
                max = overlap;
                plateaus.clear();
                plateaus.push(AngleRange::new(start, end));
            }
            Ordering::Equal if max > 0 => plateaus.push(AngleRange::new(start, end)),
            _ => {}
        });
        if max == 0 {
            plateaus.push(AngleRange::FULL);
        } else if plateaus.len() > 1 {
            // a plateau running through 0 shows up as [0, a] and [b, 2pi]
            let first = plateaus[0];
            let last = plateaus[plateaus.len() - 1];
            if first.start == 0.0 && last.end == TAU {
                plateaus.remove(0);
                let n = plateaus.len();
                plateaus[n - 1] = AngleRange::new(last.start, first.end + TAU);
            }
        }
        (max, plateaus)
    }

    /// Calls `visit(count, angle, next_angle)` after each `+1` event.
    fn scan(&mut self, mut visit: impl FnMut(usize, f64, f64)) {
        self.events.sort_unstable_by(AngleEvent::order);
        let mut running: i64 = 0;
        for (k, ev) in self.events.iter().enumerate() {
            running += ev.delta as i64;
            if ev.delta > 0 {
                // the next event cannot be a -1 at the same angle: those sort first
                let next = self.events.get(k + 1).map_or(TAU, |e| e.angle);
                visit(running as usize, ev.angle, next);
            }
        }
        debug_assert_eq!(running, 0);
    }
}

/// Angle covered by the largest number of `ranges`, with the smallest such
/// angle on ties.
pub fn sweep_max_overlap(ranges: &[AngleRange]) -> SweepOutcome {
    let mut sweeper = Sweeper::new();
    for &r in ranges {
        sweeper.push(r);
    }
    sweeper.run()
}
