//! Library classification and common-subset-size experiments.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, PointCloud};
use crate::par::Parallelism;
use crate::registration::{register, PivotSolution, RegisterOptions};
use crate::synth::{
    add_gaussian_noise, gen_disk_cloud, random_angle, random_indices, rotate_cloud,
    shared_subset_pair, take_subset, Seed,
};

/// Unsigned angular distance in degrees, in `[0, 180]`.
pub fn circular_angle_error_deg(found: f64, truth: f64) -> f64 {
    let d = normalize_angle(found - truth);
    d.min(TAU - d).to_degrees()
}

/// Registers `query` against every library cloud and returns the one with
/// the most matches (lowest index on ties).
pub fn classify(
    library: &[PointCloud],
    query: &PointCloud,
    delta: f64,
    parallelism: Parallelism,
) -> Result<(usize, PivotSolution)> {
    if library.is_empty() {
        return Err(Error::InvalidParameter("library is empty".into()));
    }
    let opts = RegisterOptions::default().with_parallelism(parallelism);
    let mut best: Option<(usize, PivotSolution)> = None;
    for (idx, cloud) in library.iter().enumerate() {
        let r = register(cloud, query, delta, &opts)?;
        if best.is_none_or(|(_, b)| r.best.k_total > b.k_total) {
            best = Some((idx, r.best));
        }
    }
    Ok(best.expect("library is nonempty"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationParams {
    pub n_clouds: usize,
    pub cloud_size: usize,
    /// Inclusive range of query subset sizes.
    pub subset_range: (usize, usize),
    pub sigma: f64,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for ClassificationParams {
    fn default() -> Self {
        Self {
            n_clouds: 50,
            cloud_size: 150,
            subset_range: (75, 150),
            sigma: 0.01,
            delta: 0.01,
            trials: 50,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationTrial {
    pub truth: usize,
    pub predicted: usize,
    pub subset_size: usize,
    pub k_total: usize,
    pub rotation: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub params: ClassificationParams,
    pub trials: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// One entry per correctly classified trial.
    pub angle_errors_deg: Vec<f64>,
    pub mean_error_deg: Option<f64>,
    pub std_error_deg: Option<f64>,
    pub max_error_deg: Option<f64>,
    pub records: Vec<ClassificationTrial>,
}

/// Mean, sample standard deviation and maximum.
fn summary(values: &[f64]) -> (Option<f64>, Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (Some(mean), Some(std), Some(max))
}

pub fn run_classification_experiment(
    params: &ClassificationParams,
    parallelism: Parallelism,
) -> Result<ClassificationReport> {
    let (lo, hi) = params.subset_range;
    if params.n_clouds == 0 || params.cloud_size == 0 || lo == 0 || lo > hi || hi > params.cloud_size {
        return Err(Error::InvalidParameter(format!(
            "invalid classification parameters: {params:?}"
        )));
    }
    let seed = Seed(params.seed);
    let library = (0..params.n_clouds)
        .map(|c| {
            gen_disk_cloud(params.cloud_size, seed.derive(c as u64))
                .map(|cloud| cloud.with_label(format!("cloud-{c}")))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::with_capacity(params.trials);
    let trial_seed = seed.derive(u64::MAX);
    for t in 0..params.trials {
        let s = trial_seed.derive(t as u64);
        let mut rng = s.rng();
        let truth = rng.gen_range(0..params.n_clouds);
        let size = rng.gen_range(lo..=hi);
        let rotation = random_angle(&mut rng);
        let idx = random_indices(&mut rng, params.cloud_size, size)?;
        let subset = take_subset(&library[truth], &idx)?;
        let query = add_gaussian_noise(&rotate_cloud(&subset, rotation), params.sigma, s.derive(0))?;

        let (predicted, sol) = classify(&library, &query, params.delta, parallelism)?;
        records.push(ClassificationTrial {
            truth,
            predicted,
            subset_size: size,
            k_total: sol.k_total,
            rotation,
            theta: sol.theta,
        });
    }

    let angle_errors_deg: Vec<f64> = records
        .iter()
        .filter(|r| r.truth == r.predicted)
        .map(|r| circular_angle_error_deg(r.theta, -r.rotation))
        .collect();
    let correct = angle_errors_deg.len();
    let (mean, std, max) = summary(&angle_errors_deg);
    Ok(ClassificationReport {
        params: params.clone(),
        trials: params.trials,
        correct,
        accuracy: if params.trials == 0 {
            0.0
        } else {
            correct as f64 / params.trials as f64
        },
        angle_errors_deg,
        mean_error_deg: mean,
        std_error_deg: std,
        max_error_deg: max,
        records,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetParams {
    pub pool_size: usize,
    pub cloud_size: usize,
    pub k_values: Vec<usize>,
    pub trials_per_k: usize,
    pub sigma: f64,
    pub delta: f64,
    pub seed: u64,
}

impl Default for SubsetParams {
    fn default() -> Self {
        Self {
            pool_size: 300,
            cloud_size: 150,
            k_values: vec![10, 20, 30, 40, 50, 70, 80, 100, 150],
            trials_per_k: 20,
            sigma: 0.01,
            delta: 0.01,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetTrial {
    pub k: usize,
    pub k_total: usize,
    /// Match count guaranteed by the ground truth alone.
    pub lower_bound: usize,
    pub angle_error_deg: f64,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetSweepReport {
    pub params: SubsetParams,
    pub k_values: Vec<usize>,
    pub success_rate: Vec<f64>,
    pub trials_per_k: usize,
    pub records: Vec<SubsetTrial>,
}

impl SubsetSweepReport {
    pub fn rate(&self, k: usize) -> Option<f64> {
        self.k_values
            .iter()
            .position(|&v| v == k)
            .map(|i| self.success_rate[i])
    }
}

/// A registration counts as a success below this angular error.
pub const SUCCESS_THRESHOLD_DEG: f64 = 1.0;

pub fn run_subset_experiment(
    params: &SubsetParams,
    parallelism: Parallelism,
) -> Result<SubsetSweepReport> {
    if params.cloud_size == 0 || params.cloud_size > params.pool_size {
        return Err(Error::InvalidParameter(format!(
            "cloud size {} must be in 1..={}",
            params.cloud_size, params.pool_size
        )));
    }
    if let Some(&k) = params
        .k_values
        .iter()
        .find(|&&k| k > params.cloud_size || 2 * params.cloud_size - k > params.pool_size)
    {
        return Err(Error::InvalidParameter(format!(
            "k = {k} incompatible with clouds of {} from a pool of {}",
            params.cloud_size, params.pool_size
        )));
    }
    let seed = Seed(params.seed);
    let opts = RegisterOptions::default().with_parallelism(parallelism);
    let mut records = Vec::new();
    let mut success_rate = Vec::with_capacity(params.k_values.len());
    for (ki, &k) in params.k_values.iter().enumerate() {
        let mut hits = 0;
        for t in 0..params.trials_per_k {
            let s = seed.derive(ki as u64).derive(t as u64);
            let pool = gen_disk_cloud(params.pool_size, s.derive(0))?;
            let rotation = random_angle(&mut s.derive(1).rng());
            let pair = shared_subset_pair(
                &pool,
                params.cloud_size,
                k,
                rotation,
                params.sigma,
                s.derive(2),
            )?;
            let r = register(&pair.x, &pair.y, params.delta, &opts)?;
            let err = circular_angle_error_deg(r.best.theta, pair.expected_theta());
            let success = err < SUCCESS_THRESHOLD_DEG;
            hits += usize::from(success);
            records.push(SubsetTrial {
                k,
                k_total: r.best.k_total,
                lower_bound: pair.ground_truth_lower_bound(params.delta),
                angle_error_deg: err,
                success,
            });
        }
        success_rate.push(if params.trials_per_k == 0 {
            0.0
        } else {
            hits as f64 / params.trials_per_k as f64
        });
    }
    Ok(SubsetSweepReport {
        params: params.clone(),
        k_values: params.k_values.clone(),
        success_rate,
        trials_per_k: params.trials_per_k,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angle_error_examples() {
        assert_eq!(circular_angle_error_deg(1.3, 1.3), 0.0);
        let e = circular_angle_error_deg(0.1, TAU - 0.1);
        assert!((e - 0.2f64.to_degrees()).abs() < 1e-9);
        assert!((e - 11.459).abs() < 1e-3);
        assert!((circular_angle_error_deg(PI, 0.0) - 180.0).abs() < 1e-12);
        assert!((circular_angle_error_deg(-0.1, 0.1) - 0.2f64.to_degrees()).abs() < 1e-9);
    }

    #[test]
    fn classify_single_candidate() {
        let a = gen_disk_cloud(30, Seed(1)).unwrap();
        let q = add_gaussian_noise(&rotate_cloud(&a, 0.7), 0.01, Seed(2)).unwrap();
        let (idx, sol) = classify(std::slice::from_ref(&a), &q, 0.01, Parallelism::Sequential).unwrap();
        assert_eq!(idx, 0);
        assert!(sol.k_total >= 2);
        assert!(classify(&[], &q, 0.01, Parallelism::Sequential).is_err());
    }

    #[test]
    fn classify_unrelated_query_is_total() {
        let lib: Vec<_> = (0..3).map(|i| gen_disk_cloud(20, Seed(i)).unwrap()).collect();
        let q = gen_disk_cloud(20, Seed(99)).unwrap();
        let (idx, sol) = classify(&lib, &q, 0.01, Parallelism::Sequential).unwrap();
        assert!(idx < 3);
        assert!(sol.k_total >= 1);
    }

    #[test]
    fn noiseless_full_subsets_classify_perfectly() {
        let params = ClassificationParams {
            n_clouds: 4,
            cloud_size: 20,
            subset_range: (20, 20),
            sigma: 0.0,
            delta: 0.01,
            trials: 5,
            seed: 3,
        };
        let r = run_classification_experiment(&params, Parallelism::Sequential).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert!(r.records.iter().all(|t| t.k_total == 20));
        assert_eq!(r.angle_errors_deg.len(), 5);
    }

    #[test]
    fn zero_trials_report_is_empty() {
        let params = ClassificationParams {
            n_clouds: 2,
            cloud_size: 10,
            subset_range: (5, 10),
            trials: 0,
            ..Default::default()
        };
        let r = run_classification_experiment(&params, Parallelism::Sequential).unwrap();
        assert_eq!((r.trials, r.correct, r.accuracy), (0, 0, 0.0));
        assert!(r.angle_errors_deg.is_empty() && r.mean_error_deg.is_none());
    }

    #[test]
    fn subset_parameter_checks() {
        let bad = SubsetParams {
            pool_size: 100,
            cloud_size: 60,
            k_values: vec![10],
            ..Default::default()
        };
        assert!(run_subset_experiment(&bad, Parallelism::Sequential).is_err());
    }

    #[test]
    fn identical_subclouds_always_succeed() {
        let params = SubsetParams {
            pool_size: 40,
            cloud_size: 20,
            k_values: vec![20],
            trials_per_k: 3,
            sigma: 0.0,
            delta: 0.01,
            seed: 5,
        };
        let r = run_subset_experiment(&params, Parallelism::Sequential).unwrap();
        assert_eq!(r.rate(20), Some(1.0));
    }
}
