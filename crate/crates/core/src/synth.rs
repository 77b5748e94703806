//! Seeded generators for the synthetic experiments.
//!
//! All randomness flows from a [`Seed`] through ChaCha8, so a seed pins the
//! output bit for bit on every platform. Normal deviates use the Box-Muller
//! transform on that uniform stream.

use std::collections::HashSet;
use std::f64::consts::TAU;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{rotate, Point2, PointCloud};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent child seed for stream `k` (SplitMix64 finalizer).
    pub fn derive(self, k: u64) -> Seed {
        let mut z = self
            .0
            .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(k.wrapping_add(1)));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Seed(z ^ (z >> 31))
    }
}

/// Pair of independent standard normal deviates (Box-Muller).
pub fn standard_normal_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    // u1 in (0, 1] keeps the logarithm finite
    let u1 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (TAU * u2).sin_cos();
    (r * c, r * s)
}

fn key(p: Point2) -> (u64, u64) {
    ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits())
}

/// `(t, sin t)` at `n` evenly spaced `t` covering `[0, 2pi]` inclusive.
pub fn gen_sine(n: usize) -> Result<PointCloud> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "sine needs at least 2 samples, got {n}"
        )));
    }
    let step = TAU / (n - 1) as f64;
    let pts = (0..n)
        .map(|k| {
            let t = if k == n - 1 { TAU } else { step * k as f64 };
            Point2::new(t, t.sin())
        })
        .collect();
    PointCloud::new(pts, Some("sine".into()))
}

/// `(3 cos t, 2 sin t)` at `t = 2 pi k / n`, `k = 0..n`.
///
/// The partition leaves out `t = 2pi`, which would repeat the first point.
pub fn gen_ellipse(n: usize) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::InvalidParameter("ellipse needs at least 1 sample".into()));
    }
    let pts = (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            Point2::new(3.0 * t.cos(), 2.0 * t.sin())
        })
        .collect();
    PointCloud::new(pts, Some("ellipse".into()))
}

/// Zero-based indices kept after removing 1-based inclusive `ranges` from `1..=n`.
pub fn kept_indices(n: usize, ranges: &[(usize, usize)]) -> Result<Vec<usize>> {
    let mut sorted = ranges.to_vec();
    sorted.sort_unstable();
    for (k, &(a, b)) in sorted.iter().enumerate() {
        if a == 0 || a > b || b > n {
            return Err(Error::InvalidParameter(format!(
                "deletion range {a}..={b} outside 1..={n}"
            )));
        }
        if k > 0 && a <= sorted[k - 1].1 {
            return Err(Error::InvalidParameter(format!(
                "deletion ranges {:?} and {:?} overlap",
                sorted[k - 1],
                (a, b)
            )));
        }
    }
    Ok((0..n)
        .filter(|&i| !sorted.iter().any(|&(a, b)| a <= i + 1 && i < b))
        .collect())
}

/// Ellipse samples minus the deleted ranges, followed by `n_outliers`
/// points drawn from an isotropic normal of deviation `outlier_sigma`.
pub fn gen_ellipse_partial(
    n: usize,
    deleted_ranges: &[(usize, usize)],
    n_outliers: usize,
    outlier_sigma: f64,
    seed: Seed,
) -> Result<PointCloud> {
    if outlier_sigma.is_nan() || outlier_sigma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "outlier sigma must be nonnegative, got {outlier_sigma}"
        )));
    }
    let kept = kept_indices(n, deleted_ranges)?;
    let mut pts: Vec<Point2> = if n == 0 {
        Vec::new()
    } else {
        let full = gen_ellipse(n)?;
        kept.iter().map(|&i| full.points()[i]).collect()
    };
    let mut seen: HashSet<_> = pts.iter().map(|&p| key(p)).collect();
    let mut rng = seed.rng();
    while pts.len() < kept.len() + n_outliers {
        let (a, b) = standard_normal_pair(&mut rng);
        let p = Point2::new(outlier_sigma * a, outlier_sigma * b);
        if seen.insert(key(p)) {
            pts.push(p);
        }
    }
    PointCloud::new(pts, Some("ellipse-partial".into()))
}

/// Uniform points in the open unit disk, by rejection from the square.
pub fn gen_disk_cloud(n: usize, seed: Seed) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::InvalidParameter("disk cloud needs at least 1 point".into()));
    }
    let mut rng = seed.rng();
    let mut seen = HashSet::with_capacity(n);
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let p = Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if p.norm_squared() < 1.0 && seen.insert(key(p)) {
            pts.push(p);
        }
    }
    PointCloud::new(pts, Some("disk".into()))
}

/// Adds independent `N(0, sigma^2)` noise to each coordinate. A point whose
/// noisy image collides with an earlier one is redrawn.
pub fn add_gaussian_noise(cloud: &PointCloud, sigma: f64, seed: Seed) -> Result<PointCloud> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "noise sigma must be nonnegative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(cloud.clone());
    }
    let mut rng = seed.rng();
    let mut seen = HashSet::with_capacity(cloud.len());
    let mut out = Vec::with_capacity(cloud.len());
    for &p in cloud.points() {
        loop {
            let (a, b) = standard_normal_pair(&mut rng);
            let moved = Point2::new(p.x + sigma * a, p.y + sigma * b);
            if seen.insert(key(moved)) {
                out.push(moved);
                break;
            }
        }
    }
    PointCloud::new(out, cloud.label().map(str::to_owned))
}

/// Rotation of every point about the origin.
pub fn rotate_cloud(cloud: &PointCloud, theta: f64) -> PointCloud {
    PointCloud::from_points_unchecked(
        cloud.points().iter().map(|&p| rotate(p, theta)).collect(),
        cloud.label().map(str::to_owned),
    )
}

/// Points at `indices`, in the order given.
pub fn take_subset(cloud: &PointCloud, indices: &[usize]) -> Result<PointCloud> {
    let pts = indices
        .iter()
        .map(|&i| cloud.get(i))
        .collect::<Result<Vec<_>>>()?;
    PointCloud::new(pts, cloud.label().map(str::to_owned))
}

/// `k` distinct indices below `n`, ascending.
pub fn random_indices<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Result<Vec<usize>> {
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "cannot draw {k} of {n} points"
        )));
    }
    let mut idx = index::sample(rng, n, k).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

/// `k` random points of `cloud`, in their original order.
pub fn random_subset(cloud: &PointCloud, k: usize, seed: Seed) -> Result<PointCloud> {
    if k == 0 {
        return Err(Error::InvalidParameter("subset must be nonempty".into()));
    }
    let idx = random_indices(&mut seed.rng(), cloud.len(), k)?;
    take_subset(cloud, &idx)
}

/// Synthetic registration problem with known answer.
///
/// `y` was produced by rotating (a part of) `x` by `rotation` about the
/// origin and adding noise; registration should recover `-rotation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticPair {
    pub x: PointCloud,
    pub y: PointCloud,
    pub rotation: f64,
    pub sigma: f64,
    /// `(i, j)`: `y[j]` is the noisy rotated image of `x[i]`.
    pub correspondences: Vec<(usize, usize)>,
    /// Noise vector added to `y[j]`, aligned with `correspondences`.
    pub noise: Vec<Point2>,
}

impl SyntheticPair {
    /// Rotation that registration should find, in `[0, 2pi)`.
    pub fn expected_theta(&self) -> f64 {
        crate::geometry::normalize_angle(-self.rotation)
    }

    /// Lower bound on the optimal match count from the ground truth: with a
    /// true pair `(i, j)` as pivots and the true rotation, each other true
    /// pair whose noise differs from the pivot's by at most `delta` matches.
    pub fn ground_truth_lower_bound(&self, delta: f64) -> usize {
        if self.noise.is_empty() {
            return 1;
        }
        self.noise
            .iter()
            .map(|&e| {
                self.noise
                    .iter()
                    .filter(|&&f| (f - e).norm() <= delta)
                    .count()
            })
            .max()
            .unwrap_or(1)
    }
}

/// Rotates `base[keep]` by `rotation`, adds noise, then appends `extra` points.
fn build_pair(
    x: PointCloud,
    keep: &[(usize, Point2)],
    extra: &[Point2],
    rotation: f64,
    sigma: f64,
    seed: Seed,
) -> Result<SyntheticPair> {
    let mut rng = seed.rng();
    let mut seen = HashSet::new();
    let mut pts = Vec::with_capacity(keep.len() + extra.len());
    let mut correspondences = Vec::with_capacity(keep.len());
    let mut noise = Vec::with_capacity(keep.len());
    for &(i, p) in keep {
        let r = rotate(p, rotation);
        loop {
            let (a, b) = standard_normal_pair(&mut rng);
            let e = Point2::new(sigma * a, sigma * b);
            if seen.insert(key(r + e)) {
                correspondences.push((i, pts.len()));
                noise.push(e);
                pts.push(r + e);
                break;
            }
            if sigma == 0.0 {
                return Err(Error::InvalidParameter("rotated points collide".into()));
            }
        }
    }
    for &p in extra {
        if !seen.insert(key(p)) {
            return Err(Error::InvalidParameter("outlier collides with a data point".into()));
        }
        pts.push(p);
    }
    let y = PointCloud::new(pts, x.label().map(|l| format!("{l}-moved")))?;
    Ok(SyntheticPair {
        x,
        y,
        rotation,
        sigma,
        correspondences,
        noise,
    })
}

/// Sine curve and a rotated noisy copy.
pub fn sine_pair(n: usize, rotation: f64, sigma: f64, seed: Seed) -> Result<SyntheticPair> {
    let x = gen_sine(n)?;
    let keep: Vec<_> = x.points().iter().copied().enumerate().collect();
    build_pair(x, &keep, &[], rotation, sigma, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipseParams {
    pub n: usize,
    /// 1-based inclusive ranges removed from the moved copy.
    pub deleted_ranges: Vec<(usize, usize)>,
    pub n_outliers: usize,
    pub outlier_sigma: f64,
    pub rotation: f64,
    pub sigma: f64,
}

impl Default for EllipseParams {
    fn default() -> Self {
        Self {
            n: 200,
            deleted_ranges: vec![(51, 69), (111, 169), (196, 199)],
            n_outliers: 50,
            outlier_sigma: 2.0,
            rotation: 2.0,
            sigma: 0.01,
        }
    }
}

/// Full ellipse against a rotated, noisy, partially deleted copy with outliers.
pub fn ellipse_pair(params: &EllipseParams, seed: Seed) -> Result<SyntheticPair> {
    let x = gen_ellipse(params.n)?;
    let partial = gen_ellipse_partial(
        params.n,
        &params.deleted_ranges,
        params.n_outliers,
        params.outlier_sigma,
        seed.derive(0),
    )?;
    let kept = kept_indices(params.n, &params.deleted_ranges)?;
    let keep: Vec<_> = kept.iter().map(|&i| (i, x.points()[i])).collect();
    let outliers = &partial.points()[kept.len()..];
    build_pair(x, &keep, outliers, params.rotation, params.sigma, seed.derive(1))
}

/// Disk cloud against a rotated noisy random subset of `k` of its points.
pub fn disk_subset_pair(
    n: usize,
    k: usize,
    rotation: f64,
    sigma: f64,
    seed: Seed,
) -> Result<SyntheticPair> {
    let x = gen_disk_cloud(n, seed.derive(0))?;
    let idx = random_indices(&mut seed.derive(1).rng(), n, k)?;
    let keep: Vec<_> = idx.iter().map(|&i| (i, x.points()[i])).collect();
    build_pair(x, &keep, &[], rotation, sigma, seed.derive(2))
}

/// Two clouds of `cloud_size` points drawn from `pool` sharing exactly
/// `shared` points; `y` is then rotated and perturbed.
pub fn shared_subset_pair(
    pool: &PointCloud,
    cloud_size: usize,
    shared: usize,
    rotation: f64,
    sigma: f64,
    seed: Seed,
) -> Result<SyntheticPair> {
    if shared > cloud_size || 2 * cloud_size - shared > pool.len() {
        return Err(Error::InvalidParameter(format!(
            "cannot draw two clouds of {cloud_size} sharing {shared} from a pool of {}",
            pool.len()
        )));
    }
    let mut rng = seed.derive(0).rng();
    let picked = index::sample(&mut rng, pool.len(), 2 * cloud_size - shared).into_vec();
    let (common, rest) = picked.split_at(shared);
    let (only_x, only_y) = rest.split_at(cloud_size - shared);

    let mut x_idx: Vec<usize> = common.iter().chain(only_x).copied().collect();
    let mut y_idx: Vec<usize> = common.iter().chain(only_y).copied().collect();
    x_idx.sort_unstable();
    y_idx.sort_unstable();
    let x = take_subset(pool, &x_idx)?;

    let common: HashSet<usize> = common.iter().copied().collect();
    // y keeps pool order; shared points carry their index in x
    let keep: Vec<(usize, Point2)> = y_idx
        .iter()
        .map(|&g| {
            let i = if common.contains(&g) {
                x_idx.binary_search(&g).expect("shared point is in x")
            } else {
                usize::MAX
            };
            (i, pool.points()[g])
        })
        .collect();
    let mut pair = build_pair(x, &keep, &[], rotation, sigma, seed.derive(1))?;
    let (corr, noise): (Vec<_>, Vec<_>) = pair
        .correspondences
        .iter()
        .zip(&pair.noise)
        .filter(|((i, _), _)| *i != usize::MAX)
        .map(|(&c, &e)| (c, e))
        .unzip();
    pair.correspondences = corr;
    pair.noise = noise;
    Ok(pair)
}

/// Uniform angle in `[0, 2pi)`.
pub fn random_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.gen_range(0.0..TAU)
}
