//! Registration over all pivot pairs.
//!
//! For every pivot pair `(p, q)` the feasibility arcs of all non-pivot pairs
//! are swept to find the best rotation. The pair with the most matches wins;
//! its match count `K` and energy `E` satisfy `E = (M-1)(N-1) - K`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    check_delta, min_pairwise_distance, normalize_angle, rotate, MatchPair, Point2, PointCloud,
    RigidMotion,
};
use crate::intervals::{arc_from_polar, normalize_mod_2pi, AngleIntervalCase, AngleRange, Sweeper};
use crate::par::{map_indexed, Parallelism};

/// Best rotation for one fixed pivot pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PivotSolution {
    pub p: usize,
    pub q: usize,
    /// Smallest maximizing angle, in `[0, 2pi)`.
    pub theta: f64,
    /// Maximizing plateau containing `theta`, normally `[theta, end]`; every
    /// angle inside attains `k_total`. A plateau running through `0` is
    /// unrolled as `[start, end + 2pi]`.
    pub plateau: [f64; 2],
    /// Matched pairs including the pivot pair itself.
    pub k_total: usize,
}

impl PivotSolution {
    pub fn motion(&self) -> RigidMotion {
        RigidMotion::new(self.theta, self.p, self.q)
    }

    /// Midpoint of the plateau, the angle furthest from any arc boundary.
    pub fn plateau_mid(&self) -> f64 {
        normalize_angle(0.5 * (self.plateau[0] + self.plateau[1]))
    }

    /// `(M-1)(N-1) - (k_total - 1)`.
    pub fn energy(&self, m: usize, n: usize) -> usize {
        (m - 1) * (n - 1) - (self.k_total - 1)
    }

    /// Orders better solutions first: more matches, then smaller `(p, q, theta)`.
    pub fn rank(&self, other: &Self) -> Ordering {
        other
            .k_total
            .cmp(&self.k_total)
            .then(self.p.cmp(&other.p))
            .then(self.q.cmp(&other.q))
            .then(self.theta.total_cmp(&other.theta))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegisterOptions {
    /// Reject `delta >= spacing / 2` instead of warning through `delta_ok`.
    pub strict_delta: bool,
    /// Also report every optimal plateau of every optimal pivot pair.
    pub all_solutions: bool,
    pub parallelism: Parallelism,
}

impl Default for RegisterOptions {
    fn default() -> Self {
        Self {
            strict_delta: false,
            all_solutions: false,
            parallelism: Parallelism::Auto,
        }
    }
}

impl RegisterOptions {
    pub fn with_parallelism(mut self, parallelism: Parallelism) -> Self {
        self.parallelism = parallelism;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegistrationResult {
    pub best: PivotSolution,
    /// Pairs matched by the winning motion, pivot pair included, sorted by `i`.
    /// They are evaluated at the plateau midpoint.
    pub pairs: Vec<MatchPair>,
    pub energy: usize,
    /// `delta < spacing / 2`.
    pub delta_ok: bool,
    /// `min(spacing(X), spacing(Y))`; infinite when both clouds are singletons.
    pub spacing: f64,
    /// False when some point was within `delta` of two partners and the
    /// pairs had to be thinned out.
    pub injective: bool,
    pub all_optima: Option<Vec<PivotSolution>>,
}

impl RegistrationResult {
    pub fn motion(&self) -> RigidMotion {
        self.best.motion()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correspondences {
    pub pairs: Vec<MatchPair>,
    pub injective: bool,
}

/// Non-pivot points of a cloud in polar form around a pivot, sorted by norm.
#[derive(Debug, Clone)]
struct PolarFrame {
    points: Vec<Polar>,
}

#[derive(Debug, Clone, Copy)]
struct Polar {
    norm: f64,
    angle: f64,
}

impl PolarFrame {
    fn new(cloud: &PointCloud, pivot: usize) -> Result<Self> {
        let origin = cloud.get(pivot)?;
        let mut points = Vec::with_capacity(cloud.len().saturating_sub(1));
        for (i, &pt) in cloud.points().iter().enumerate() {
            if i == pivot {
                continue;
            }
            let v = pt - origin;
            let norm = v.norm();
            if norm == 0.0 {
                return Err(Error::PivotLeak);
            }
            points.push(Polar {
                norm,
                angle: v.angle(),
            });
        }
        points.sort_by(|a, b| a.norm.total_cmp(&b.norm).then(a.angle.total_cmp(&b.angle)));
        Ok(Self { points })
    }

    /// Feeds the sweeper with every arc against `other`; returns the number
    /// of pairs matched at every angle.
    fn load_arcs(&self, other: &PolarFrame, delta: f64, sweeper: &mut Sweeper) -> usize {
        sweeper.clear();
        let mut full = 0;
        let ys = &other.points;
        for x in &self.points {
            // wide enough to cover the cosine clamp band as well
            let window = delta + 1e-5 * (1.0 + x.norm);
            let lo = ys.partition_point(|y| y.norm < x.norm - window);
            for y in ys[lo..].iter().take_while(|y| y.norm <= x.norm + window) {
                match arc_from_polar(x.norm, x.angle, y.norm, y.angle, delta) {
                    AngleIntervalCase::Empty => {}
                    AngleIntervalCase::Full => full += 1,
                    AngleIntervalCase::Arc { center, half_width } => {
                        sweeper.push_pieces(normalize_mod_2pi(center, half_width))
                    }
                }
            }
        }
        full
    }

    fn solve(
        &self,
        other: &PolarFrame,
        p: usize,
        q: usize,
        delta: f64,
        sweeper: &mut Sweeper,
    ) -> PivotSolution {
        let full = self.load_arcs(other, delta, sweeper);
        let out = sweeper.run();
        PivotSolution {
            p,
            q,
            theta: normalize_angle(out.theta),
            plateau: [out.plateau_start, out.plateau_end],
            k_total: out.arc_overlap + full + 1,
        }
    }

    fn solve_all(
        &self,
        other: &PolarFrame,
        p: usize,
        q: usize,
        delta: f64,
        sweeper: &mut Sweeper,
    ) -> Vec<PivotSolution> {
        let full = self.load_arcs(other, delta, sweeper);
        let (overlap, plateaus) = sweeper.run_all();
        plateaus
            .into_iter()
            .map(|r: AngleRange| PivotSolution {
                p,
                q,
                theta: normalize_angle(r.start),
                plateau: [r.start, r.end],
                k_total: overlap + full + 1,
            })
            .collect()
    }
}

fn check_indices(x: &PointCloud, y: &PointCloud, p: usize, q: usize) -> Result<()> {
    x.get(p)?;
    y.get(q)?;
    Ok(())
}

/// Images `R(theta) (y_j - y_q)` for every `j`.
fn rotated_frame(y: &PointCloud, q: usize, theta: f64) -> Vec<Point2> {
    let origin = y.points()[q];
    y.points()
        .iter()
        .map(|&pt| rotate(pt - origin, theta))
        .collect()
}

fn shifted_frame(x: &PointCloud, p: usize) -> Vec<Point2> {
    let origin = x.points()[p];
    x.points().iter().map(|&pt| pt - origin).collect()
}

/// Number of non-pivot pairs within `delta` after translating by the pivots
/// and rotating `Y` by `theta`. Direct scan over all pairs.
pub fn count_matches(
    x: &PointCloud,
    y: &PointCloud,
    p: usize,
    q: usize,
    theta: f64,
    delta: f64,
) -> Result<usize> {
    check_delta(delta)?;
    check_indices(x, y, p, q)?;
    let xs = shifted_frame(x, p);
    let ys = rotated_frame(y, q, theta);
    let mut count = 0;
    for (i, &a) in xs.iter().enumerate() {
        if i == p {
            continue;
        }
        for (j, &b) in ys.iter().enumerate() {
            if j != q && a.distance(b) <= delta {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Sum of unit steps `H(d_ij - delta)` over non-pivot pairs: the number of
/// pairs further apart than `delta`.
pub fn energy(
    x: &PointCloud,
    y: &PointCloud,
    p: usize,
    q: usize,
    theta: f64,
    delta: f64,
) -> Result<usize> {
    check_delta(delta)?;
    check_indices(x, y, p, q)?;
    let xs = shifted_frame(x, p);
    let ys = rotated_frame(y, q, theta);
    Ok(xs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != p)
        .map(|(_, &a)| {
            ys.iter()
                .enumerate()
                .filter(|&(j, &b)| j != q && step(a.distance(b) - delta) == 1)
                .count()
        })
        .sum())
}

#[inline]
fn step(t: f64) -> u8 {
    u8::from(t > 0.0)
}

/// Best rotation for pivots `x[p]`, `y[q]`.
pub fn solve_pivot(
    x: &PointCloud,
    y: &PointCloud,
    p: usize,
    q: usize,
    delta: f64,
) -> Result<PivotSolution> {
    check_delta(delta)?;
    let fx = PolarFrame::new(x, p)?;
    let fy = PolarFrame::new(y, q)?;
    Ok(fx.solve(&fy, p, q, delta, &mut Sweeper::new()))
}

/// Pairs matched at the given configuration, pivot pair first.
///
/// When some point has several partners within `delta`, pairs are kept
/// greedily by increasing distance so that each index appears once, and
/// `injective` is false.
pub fn extract_correspondences(
    x: &PointCloud,
    y: &PointCloud,
    p: usize,
    q: usize,
    theta: f64,
    delta: f64,
) -> Result<Correspondences> {
    check_delta(delta)?;
    check_indices(x, y, p, q)?;
    let xs = shifted_frame(x, p);
    let ys = rotated_frame(y, q, theta);
    let mut raw = Vec::new();
    for (i, &a) in xs.iter().enumerate() {
        if i == p {
            continue;
        }
        for (j, &b) in ys.iter().enumerate() {
            if j == q {
                continue;
            }
            let distance = a.distance(b);
            if distance <= delta {
                raw.push(MatchPair { i, j, distance });
            }
        }
    }

    let mut used_i = vec![false; x.len()];
    let mut used_j = vec![false; y.len()];
    used_i[p] = true;
    used_j[q] = true;
    let injective = raw.iter().all(|m| {
        let fresh = !used_i[m.i] && !used_j[m.j];
        used_i[m.i] = true;
        used_j[m.j] = true;
        fresh
    });

    let mut pairs = vec![MatchPair {
        i: p,
        j: q,
        distance: 0.0,
    }];
    if injective {
        pairs.extend(raw);
    } else {
        raw.sort_by(|a, b| {
            a.distance
                .total_cmp(&b.distance)
                .then(a.i.cmp(&b.i))
                .then(a.j.cmp(&b.j))
        });
        used_i.fill(false);
        used_j.fill(false);
        used_i[p] = true;
        used_j[q] = true;
        for m in raw {
            if !used_i[m.i] && !used_j[m.j] {
                used_i[m.i] = true;
                used_j[m.j] = true;
                pairs.push(m);
            }
        }
    }
    pairs.sort_by_key(|m| (m.i, m.j));
    Ok(Correspondences { pairs, injective })
}

fn spacing_or_inf(cloud: &PointCloud) -> f64 {
    if cloud.len() < 2 {
        f64::INFINITY
    } else {
        min_pairwise_distance(cloud).unwrap_or(f64::INFINITY)
    }
}

/// Finds the rigid motion matching the most points of `y` to points of `x`.
pub fn register(
    x: &PointCloud,
    y: &PointCloud,
    delta: f64,
    options: &RegisterOptions,
) -> Result<RegistrationResult> {
    check_delta(delta)?;
    let spacing = spacing_or_inf(x).min(spacing_or_inf(y));
    let delta_ok = delta < spacing / 2.0;
    if options.strict_delta && !delta_ok {
        return Err(Error::DeltaTooLarge {
            delta,
            half_spacing: spacing / 2.0,
        });
    }

    let (m, n) = (x.len(), y.len());
    let par = options.parallelism;
    let fx = map_indexed(par, m, || (), |_, p| PolarFrame::new(x, p))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let fy = map_indexed(par, n, || (), |_, q| PolarFrame::new(y, q))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let solutions = map_indexed(par, m * n, Sweeper::new, |sweeper, k| {
        let (p, q) = (k / n, k % n);
        fx[p].solve(&fy[q], p, q, delta, sweeper)
    });
    // index order is (p, q) lexicographic, so min_by keeps the first on ties
    let best = *solutions
        .iter()
        .min_by(|a, b| a.rank(b))
        .expect("clouds are nonempty");

    let all_optima = options.all_solutions.then(|| {
        let winners: Vec<&PivotSolution> = solutions
            .iter()
            .filter(|s| s.k_total == best.k_total)
            .collect();
        map_indexed(par, winners.len(), Sweeper::new, |sweeper, k| {
            let w = winners[k];
            fx[w.p].solve_all(&fy[w.q], w.p, w.q, delta, sweeper)
        })
        .into_iter()
        .flatten()
        .collect()
    });

    let found = extract_correspondences(x, y, best.p, best.q, best.plateau_mid(), delta)?;
    Ok(RegistrationResult {
        best,
        pairs: found.pairs,
        energy: best.energy(m, n),
        delta_ok,
        spacing,
        injective: found.injective,
        all_optima,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{gen_disk_cloud, rotate_cloud, Seed};
    use std::f64::consts::{PI, TAU};

    /// Equilateral triangle of side 2 sqrt 3 and a segment of the same length.
    fn triangle_segment() -> (PointCloud, PointCloud) {
        let l = 2.0 * 3f64.sqrt();
        let h = l * 3f64.sqrt() / 2.0;
        let tri = PointCloud::from_xy(&[(0.0, 0.0), (l, 0.0), (l / 2.0, h)]).unwrap();
        let seg = PointCloud::from_xy(&[(0.0, 0.0), (l, 0.0)]).unwrap();
        (tri, seg)
    }

    #[test]
    fn triangle_segment_counts() {
        let (x, y) = triangle_segment();
        // pivots x3, y1 (1-based). x1 and x2 sit at polar angles 4pi/3 and 5pi/3
        // around x3; their bisector places y2 inside both radius-2 circles.
        let theta0 = 1.5 * PI;
        assert_eq!(count_matches(&x, &y, 2, 0, theta0, 2.0).unwrap(), 2);
        assert_eq!(energy(&x, &y, 2, 0, theta0, 2.0).unwrap(), 0);
        // y2 onto x1: segment along a triangle side
        let side = 4.0 * PI / 3.0;
        assert_eq!(count_matches(&x, &y, 2, 0, side, 2.0).unwrap(), 1);
        assert_eq!(energy(&x, &y, 2, 0, side, 2.0).unwrap(), 1);
    }

    #[test]
    fn self_overlap_count() {
        let x = PointCloud::from_xy(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        assert_eq!(count_matches(&x, &x, 0, 0, 0.0, 1e-6).unwrap(), 1);
        let e = count_matches(&x, &x, 0, 2, 0.0, 1e-6);
        assert_eq!(e, Err(Error::IndexOutOfRange { index: 2, len: 2 }));
    }

    #[test]
    fn singletons() {
        let x = PointCloud::from_xy(&[(1.0, 2.0)]).unwrap();
        let y = PointCloud::from_xy(&[(-3.0, 0.5)]).unwrap();
        assert_eq!(energy(&x, &y, 0, 0, 0.3, 0.1).unwrap(), 0);
        let s = solve_pivot(&x, &y, 0, 0, 0.1).unwrap();
        assert_eq!((s.k_total, s.theta), (1, 0.0));
        let r = register(&x, &y, 0.1, &RegisterOptions::default()).unwrap();
        assert_eq!((r.best.k_total, r.best.theta, r.energy), (1, 0.0, 0));
        assert_eq!(r.pairs.len(), 1);
        assert!(r.delta_ok);
    }

    #[test]
    fn identity_pivot() {
        let x = gen_disk_cloud(5, Seed(3)).unwrap();
        let s = solve_pivot(&x, &x, 2, 2, 1e-6).unwrap();
        assert_eq!(s.k_total, 5);
        assert_eq!(s.theta, 0.0);
        assert!(s.plateau[1] > 0.0);
        assert_eq!(count_matches(&x, &x, 2, 2, s.plateau_mid(), 1e-6).unwrap() + 1, 5);
    }

    #[test]
    fn counterexample_pivot_solution() {
        let (x, y) = triangle_segment();
        let s = solve_pivot(&x, &y, 2, 0, 2.0).unwrap();
        assert_eq!(s.k_total, 3);
        assert_eq!(count_matches(&x, &y, 2, 0, s.plateau_mid(), 2.0).unwrap() + 1, 3);

        // grid check of the maximum
        let best = (0..100_000)
            .map(|g| count_matches(&x, &y, 2, 0, TAU * g as f64 / 1e5, 2.0).unwrap())
            .max()
            .unwrap();
        assert_eq!(best + 1, s.k_total);
    }

    #[test]
    fn counterexample_extraction_flags_duplicate_partner() {
        let (x, y) = triangle_segment();
        let c = extract_correspondences(&x, &y, 2, 0, 1.5 * PI, 2.0).unwrap();
        assert!(!c.injective);
        assert_eq!(c.pairs.len(), 2);
        assert!(c.pairs.iter().any(|m| (m.i, m.j) == (2, 0)));
    }

    #[test]
    fn small_delta_registers_side() {
        let (x, y) = triangle_segment();
        let r = register(&x, &y, 1.0, &RegisterOptions::default()).unwrap();
        assert_eq!(r.best.k_total, 2);
        assert_eq!(r.energy, 1);
        assert!(r.delta_ok && r.injective);
        assert_eq!(r.pairs.len(), 2);
        let strict = RegisterOptions {
            strict_delta: true,
            ..Default::default()
        };
        assert!(register(&x, &y, 1.0, &strict).is_ok());
        let err = register(&x, &y, 2.0, &strict).unwrap_err();
        assert!(matches!(err, Error::DeltaTooLarge { half_spacing, .. } if (half_spacing - 3f64.sqrt()).abs() < 1e-12));
    }

    #[test]
    fn rotated_copy_recovers_inverse_angle() {
        let x = gen_disk_cloud(25, Seed(11)).unwrap();
        let y = rotate_cloud(&x, 1.0);
        let r = register(&x, &y, 1e-6, &RegisterOptions::default()).unwrap();
        assert_eq!(r.best.k_total, 25);
        let lo = r.best.plateau[0];
        let hi = r.best.plateau[1];
        let truth = TAU - 1.0;
        assert!(lo - 1e-9 <= truth && truth <= hi + 1e-9, "{lo} {hi}");
        assert_eq!(r.pairs.len(), 25);
        assert!(r.pairs.iter().all(|m| m.i == m.j));
    }

    #[test]
    fn all_solutions_lists_optima() {
        // square: four symmetric optima for each pivot pair
        let sq = PointCloud::from_xy(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap();
        let opts = RegisterOptions {
            all_solutions: true,
            ..Default::default()
        };
        let r = register(&sq, &sq, 0.01, &opts).unwrap();
        assert_eq!(r.best.k_total, 4);
        let all = r.all_optima.unwrap();
        assert!(all.iter().all(|s| s.k_total == 4));
        // each pivot pair has exactly one rotation mapping the square onto itself
        assert_eq!(all.len(), 16);
        let same_pair = all.iter().find(|s| (s.p, s.q) == (r.best.p, r.best.q)).unwrap();
        let [lo, hi] = same_pair.plateau;
        assert!(lo <= r.best.theta + TAU && r.best.theta + TAU <= hi);
    }
}
