//! Registration of unlabeled 2D point clouds by maximal common subset.
//!
//! Given two clouds `X` and `Y` and a noise tolerance `delta`, the solver
//! finds a rigid motion that places as many points of `Y` within `delta` of
//! points of `X` as possible. Each pair of pivot points (one per cloud) is
//! moved to the origin, which turns the search into a pure rotation problem.
//! For a fixed pivot pair, the rotations matching `x_i` with `y_j` form an
//! arc of the circle; the best rotation is the angle covered by the most
//! arcs, found with an endpoint sweep.
//!
//! ```
//! use pivotsweep::{register, PointCloud, RegisterOptions};
//!
//! let x = PointCloud::from_xy(&[(0.0, 0.0), (1.0, 0.0), (0.0, 2.0)]).unwrap();
//! let y = pivotsweep::synth::rotate_cloud(&x, 0.5);
//! let result = register(&x, &y, 1e-6, &RegisterOptions::default()).unwrap();
//! assert_eq!(result.best.k_total, 3);
//! ```

mod error;
pub mod experiments;
pub mod geometry;
pub mod intervals;
pub mod oracle;
pub mod par;
pub mod registration;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::{
    min_pairwise_distance, normalize_angle, rotate, translate_to_pivot, validate_delta, MatchPair,
    Point2, PointCloud, RigidMotion, DeltaReport,
};
pub use intervals::{match_interval, normalize_mod_2pi, sweep_max_overlap, AngleIntervalCase};
pub use par::Parallelism;
pub use registration::{
    count_matches, energy, extract_correspondences, register, solve_pivot, Correspondences,
    PivotSolution, RegisterOptions, RegistrationResult,
};
