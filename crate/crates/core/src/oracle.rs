//! Brute-force references for the sweep pipeline.
//!
//! Nothing here touches the arc or sweep code: match counts come from the
//! direct pair scan, and candidate angles from a separate law-of-cosines
//! evaluation.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_delta, min_pairwise_distance, normalize_angle, PointCloud};
use crate::registration::{count_matches, energy, extract_correspondences, PivotSolution, RegistrationResult};

/// Largest cloud accepted by [`brute_force_best`].
pub const ORACLE_LIMIT: usize = 20;

/// Energy sampled on the uniform grid `2 pi g / G`, `g = 0..G`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridProfile {
    pub thetas: Vec<f64>,
    pub energies: Vec<usize>,
}

impl GridProfile {
    /// Smallest sampled energy and the first angle attaining it.
    pub fn min(&self) -> (f64, usize) {
        let (g, &e) = self
            .energies
            .iter()
            .enumerate()
            .min_by_key(|&(g, &e)| (e, g))
            .expect("grid is nonempty");
        (self.thetas[g], e)
    }
}

pub fn grid_energy(
    x: &PointCloud,
    y: &PointCloud,
    p: usize,
    q: usize,
    delta: f64,
    samples: usize,
) -> Result<GridProfile> {
    if samples == 0 {
        return Err(Error::InvalidParameter("grid needs at least one sample".into()));
    }
    let thetas: Vec<f64> = (0..samples)
        .map(|g| TAU * g as f64 / samples as f64)
        .collect();
    let energies = thetas
        .iter()
        .map(|&t| energy(x, y, p, q, t, delta))
        .collect::<Result<_>>()?;
    Ok(GridProfile { thetas, energies })
}

/// Lowest grid energy over all pivot pairs: `(p, q, theta, energy)`.
pub fn grid_search(
    x: &PointCloud,
    y: &PointCloud,
    delta: f64,
    samples: usize,
) -> Result<(usize, usize, f64, usize)> {
    let mut best: Option<(usize, usize, f64, usize)> = None;
    for p in 0..x.len() {
        for q in 0..y.len() {
            let (t, e) = grid_energy(x, y, p, q, delta, samples)?.min();
            if best.is_none_or(|b| e < b.3) {
                best = Some((p, q, t, e));
            }
        }
    }
    Ok(best.expect("clouds are nonempty"))
}

/// Angles where some pair `(i, j)` sits exactly at distance `delta`, plus 0.
fn boundary_angles(x: &PointCloud, y: &PointCloud, p: usize, q: usize, delta: f64) -> Vec<f64> {
    let (xp, yq) = (x.points()[p], y.points()[q]);
    let mut out = vec![0.0];
    for (i, &xi) in x.points().iter().enumerate() {
        if i == p {
            continue;
        }
        let a = xi - xp;
        for (j, &yj) in y.points().iter().enumerate() {
            if j == q {
                continue;
            }
            let b = yj - yq;
            let (ra, rb) = (a.norm(), b.norm());
            let cos = (ra * ra + rb * rb - delta * delta) / (2.0 * ra * rb);
            if (-1.0..=1.0).contains(&cos) {
                let half = cos.acos();
                let mid = a.angle() - b.angle();
                out.push(normalize_angle(mid - half));
                out.push(normalize_angle(mid + half));
            }
        }
    }
    out
}

/// Exact optimum by evaluating the match count at every arc endpoint and
/// at the midpoint between consecutive endpoints.
pub fn brute_force_best(x: &PointCloud, y: &PointCloud, delta: f64) -> Result<RegistrationResult> {
    check_delta(delta)?;
    let (m, n) = (x.len(), y.len());
    if m > ORACLE_LIMIT || n > ORACLE_LIMIT {
        return Err(Error::OracleTooLarge {
            m,
            n,
            limit: ORACLE_LIMIT,
        });
    }

    let mut best: Option<PivotSolution> = None;
    for p in 0..m {
        for q in 0..n {
            let mut angles = boundary_angles(x, y, p, q, delta);
            angles.sort_by(f64::total_cmp);
            angles.dedup();
            let mut candidates = angles.clone();
            for w in angles.windows(2) {
                candidates.push(0.5 * (w[0] + w[1]));
            }
            let last = *angles.last().expect("contains 0");
            candidates.push(normalize_angle(0.5 * (last + angles[0] + TAU)));
            candidates.sort_by(f64::total_cmp);

            let mut local: Option<(usize, f64)> = None;
            for &t in &candidates {
                let k = count_matches(x, y, p, q, t, delta)?;
                if local.is_none_or(|(bk, _)| k > bk) {
                    local = Some((k, t));
                }
            }
            let (k, theta) = local.expect("at least one candidate");
            let sol = PivotSolution {
                p,
                q,
                theta,
                plateau: [theta, theta],
                k_total: k + 1,
            };
            if best.is_none_or(|b| sol.k_total > b.k_total) {
                best = Some(sol);
            }
        }
    }
    let best = best.expect("clouds are nonempty");
    let spacing = [x, y]
        .iter()
        .filter(|c| c.len() >= 2)
        .map(|c| min_pairwise_distance(c).unwrap_or(f64::INFINITY))
        .fold(f64::INFINITY, f64::min);
    let found = extract_correspondences(x, y, best.p, best.q, best.theta, delta)?;
    Ok(RegistrationResult {
        best,
        pairs: found.pairs,
        energy: best.energy(m, n),
        delta_ok: delta < spacing / 2.0,
        spacing,
        injective: found.injective,
        all_optima: None,
    })
}
