//! Command-line front end: cloud generation, registration and the two
//! benchmark experiments. `run` returns the process exit code:
//! 0 on success, 1 for input errors, 2 when `--strict-delta` rejects δ.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pivotsweep::experiments::{
    run_classification_experiment, run_subset_experiment, ClassificationParams, SubsetParams,
};
use pivotsweep::synth::{
    disk_subset_pair, ellipse_pair, gen_disk_cloud, gen_ellipse_partial, gen_sine, sine_pair,
    EllipseParams, Seed, SyntheticPair,
};
use pivotsweep::{register, Parallelism, PointCloud, RegisterOptions, RigidMotion};
use thiserror::Error;

pub mod files;
pub mod svg;

use files::{Manifest, ResultFile};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    StrictDelta(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        Self::Input(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 1,
            Self::StrictDelta(_) => 2,
        }
    }
}

impl From<pivotsweep::Error> for CliError {
    fn from(e: pivotsweep::Error) -> Self {
        match e {
            pivotsweep::Error::DeltaTooLarge { .. } => Self::StrictDelta(e.to_string()),
            other => Self::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pivotsweep", version, about = "Rigid registration of 2D point clouds by maximal common subset")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find the rotation and pivot pair matching the most points.
    Register(RegisterArgs),
    /// Write synthetic clouds.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run a seeded experiment and write its report.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Debug, Args)]
struct RegisterArgs {
    #[arg(long)]
    cloud_x: PathBuf,
    #[arg(long)]
    cloud_y: PathBuf,
    /// Match tolerance.
    #[arg(long)]
    delta: f64,
    /// Refuse δ ≥ half the smallest point spacing (exit code 2).
    #[arg(long)]
    strict_delta: bool,
    /// Also list every optimal plateau of every optimal pivot pair.
    #[arg(long)]
    all_solutions: bool,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long)]
    threads: Option<usize>,
    /// Result JSON; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overlay plot of X, the moved Y and the matched pairs.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Output {
    /// Cloud file (`.json` or CSV); printed to stdout as CSV when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// `(t, sin t)` on an inclusive grid over `[0, 2pi]`.
    Sine {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
    /// `(3 cos t, 2 sin t)` with optional deletions and gaussian outliers.
    Ellipse {
        #[arg(long, default_value_t = 200)]
        n: usize,
        /// 1-based inclusive index range to delete, e.g. `51-69`; repeatable.
        #[arg(long = "delete", value_parser = parse_range)]
        deleted: Vec<(usize, usize)>,
        #[arg(long, default_value_t = 0)]
        outliers: usize,
        #[arg(long, default_value_t = 2.0)]
        outlier_sigma: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Uniform points in the unit disk.
    Disk {
        #[arg(long, default_value_t = 150)]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
    /// A cloud and a rotated, noisy partial copy, plus the ground truth.
    Pair(PairArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PairKind {
    Sine,
    Ellipse,
    Disk,
}

#[derive(Debug, Args)]
struct PairArgs {
    #[arg(long, value_enum)]
    kind: PairKind,
    /// Points on the curve or in the disk (ellipse and sine default to 200, disk to 150).
    #[arg(long)]
    n: Option<usize>,
    /// Rotation applied to the copy, radians.
    #[arg(long, default_value_t = 2.0)]
    rotation: f64,
    #[arg(long, default_value_t = 0.01)]
    sigma: f64,
    /// Ellipse: 1-based inclusive range removed from the copy; repeatable.
    /// Defaults to 51-69, 111-169 and 196-199.
    #[arg(long = "delete", value_parser = parse_range)]
    deleted: Vec<(usize, usize)>,
    /// Ellipse: keep every point of the copy.
    #[arg(long, conflicts_with = "deleted")]
    no_deletions: bool,
    /// Ellipse: outliers appended to the copy.
    #[arg(long, default_value_t = 50)]
    outliers: usize,
    #[arg(long, default_value_t = 2.0)]
    outlier_sigma: f64,
    /// Disk: points kept in the copy (default n / 2).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out_x: PathBuf,
    #[arg(long)]
    out_y: PathBuf,
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct BenchOutput {
    #[arg(long)]
    threads: Option<usize>,
    /// Report JSON; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum BenchCommand {
    /// Identify noisy rotated subsets among a library of clouds.
    Classify {
        #[arg(long, default_value_t = 50)]
        clouds: usize,
        #[arg(long, default_value_t = 150)]
        cloud_size: usize,
        #[arg(long, default_value_t = 75)]
        subset_min: usize,
        #[arg(long, default_value_t = 150)]
        subset_max: usize,
        #[arg(long, default_value_t = 0.01)]
        sigma: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: BenchOutput,
    },
    /// Success rate against the number of common points.
    Subset {
        #[arg(long, default_value_t = 300)]
        pool: usize,
        #[arg(long, default_value_t = 150)]
        cloud_size: usize,
        /// Comma-separated common-point counts.
        #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50,70,80,100,150")]
        k: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0.01)]
        sigma: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: BenchOutput,
    },
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once('-')
        .ok_or_else(|| format!("expected FIRST-LAST, got `{s}`"))?;
    let a = a.trim().parse().map_err(|_| format!("bad range start in `{s}`"))?;
    let b = b.trim().parse().map_err(|_| format!("bad range end in `{s}`"))?;
    Ok((a, b))
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Register(args) => cmd_register(args),
        Command::Gen(g) => cmd_gen(g),
        Command::Bench(b) => cmd_bench(b),
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => files::write_text(p, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::input(e.to_string())),
    }
}

fn cmd_register(args: RegisterArgs) -> Result<(), CliError> {
    let x = files::read_cloud(&args.cloud_x)?;
    let y = files::read_cloud(&args.cloud_y)?;
    let opts = RegisterOptions {
        strict_delta: args.strict_delta,
        all_solutions: args.all_solutions,
        parallelism: Parallelism::from_threads(args.threads),
    };
    let start = Instant::now();
    let r = register(&x, &y, args.delta, &opts)?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    if !r.delta_ok {
        eprintln!(
            "warning: delta {} is not below half the point spacing {}; matches may not be one-to-one",
            args.delta,
            r.spacing / 2.0
        );
    }
    if let Some(path) = &args.svg {
        // drawn at the plateau midpoint, where the pairs were evaluated
        let motion = RigidMotion::new(r.best.plateau_mid(), r.best.p, r.best.q);
        let moved = motion.apply(&x, &y)?;
        files::write_text(path, &svg::overlay(x.points(), &moved, &r.pairs))?;
    }
    let result = ResultFile::new(&r, args.delta, runtime_ms);
    emit(args.out.as_deref(), &files::to_json_string(&result))
}

fn write_generated(cloud: &PointCloud, output: &Output, manifest: Manifest) -> Result<(), CliError> {
    match &output.out {
        Some(p) => files::write_cloud(p, cloud)?,
        None => emit(None, &files::to_csv(cloud))?,
    }
    if let Some(p) = &output.manifest {
        files::write_json(p, &manifest)?;
    }
    Ok(())
}

fn single_manifest(kind: &str, seed: u64, n: usize, cloud: &PointCloud) -> Manifest {
    Manifest {
        kind: kind.into(),
        seed,
        n,
        x_points: cloud.len(),
        y_points: None,
        rotation: None,
        expected_theta: None,
        sigma: None,
        deleted_ranges: Vec::new(),
        n_outliers: 0,
        outlier_sigma: None,
        correspondences: Vec::new(),
    }
}

fn cmd_gen(command: GenCommand) -> Result<(), CliError> {
    match command {
        GenCommand::Sine { n, output } => {
            let cloud = gen_sine(n)?;
            let m = single_manifest("sine", output.seed, n, &cloud);
            write_generated(&cloud, &output, m)
        }
        GenCommand::Ellipse {
            n,
            deleted,
            outliers,
            outlier_sigma,
            output,
        } => {
            let cloud = gen_ellipse_partial(n, &deleted, outliers, outlier_sigma, Seed(output.seed))?;
            let mut m = single_manifest("ellipse", output.seed, n, &cloud);
            m.deleted_ranges = deleted;
            m.n_outliers = outliers;
            m.outlier_sigma = Some(outlier_sigma);
            write_generated(&cloud, &output, m)
        }
        GenCommand::Disk { n, output } => {
            let cloud = gen_disk_cloud(n, Seed(output.seed))?;
            let m = single_manifest("disk", output.seed, n, &cloud);
            write_generated(&cloud, &output, m)
        }
        GenCommand::Pair(args) => gen_pair(args),
    }
}

fn gen_pair(a: PairArgs) -> Result<(), CliError> {
    let seed = Seed(a.seed);
    let (kind, n, pair, deleted, outliers): (_, _, SyntheticPair, _, _) = match a.kind {
        PairKind::Sine => {
            let n = a.n.unwrap_or(200);
            ("sine", n, sine_pair(n, a.rotation, a.sigma, seed)?, Vec::new(), None)
        }
        PairKind::Ellipse => {
            let defaults = EllipseParams::default();
            let params = EllipseParams {
                n: a.n.unwrap_or(defaults.n),
                deleted_ranges: if a.no_deletions {
                    Vec::new()
                } else if a.deleted.is_empty() {
                    defaults.deleted_ranges
                } else {
                    a.deleted
                },
                n_outliers: a.outliers,
                outlier_sigma: a.outlier_sigma,
                rotation: a.rotation,
                sigma: a.sigma,
            };
            let pair = ellipse_pair(&params, seed)?;
            (
                "ellipse",
                params.n,
                pair,
                params.deleted_ranges,
                Some((params.n_outliers, params.outlier_sigma)),
            )
        }
        PairKind::Disk => {
            let n = a.n.unwrap_or(150);
            let k = a.k.unwrap_or(n / 2);
            ("disk", n, disk_subset_pair(n, k, a.rotation, a.sigma, seed)?, Vec::new(), None)
        }
    };
    files::write_cloud(&a.out_x, &pair.x)?;
    files::write_cloud(&a.out_y, &pair.y)?;
    if let Some(p) = &a.manifest {
        let manifest = Manifest {
            kind: kind.into(),
            seed: a.seed,
            n,
            x_points: pair.x.len(),
            y_points: Some(pair.y.len()),
            rotation: Some(pair.rotation),
            expected_theta: Some(pair.expected_theta()),
            sigma: Some(pair.sigma),
            deleted_ranges: deleted,
            n_outliers: outliers.map_or(0, |o| o.0),
            outlier_sigma: outliers.map(|o| o.1),
            correspondences: pair.correspondences.clone(),
        };
        files::write_json(p, &manifest)?;
    }
    Ok(())
}

fn cmd_bench(command: BenchCommand) -> Result<(), CliError> {
    match command {
        BenchCommand::Classify {
            clouds,
            cloud_size,
            subset_min,
            subset_max,
            sigma,
            delta,
            trials,
            seed,
            output,
        } => {
            let params = ClassificationParams {
                n_clouds: clouds,
                cloud_size,
                subset_range: (subset_min, subset_max),
                sigma,
                delta,
                trials,
                seed,
            };
            let report =
                run_classification_experiment(&params, Parallelism::from_threads(output.threads))?;
            if let Some(p) = &output.plot {
                let plot = svg::histogram(&report.angle_errors_deg, 10, "angle error (degrees)");
                files::write_text(p, &plot)?;
            }
            emit(output.out.as_deref(), &files::to_json_string(&report))
        }
        BenchCommand::Subset {
            pool,
            cloud_size,
            k,
            trials,
            sigma,
            delta,
            seed,
            output,
        } => {
            let params = SubsetParams {
                pool_size: pool,
                cloud_size,
                k_values: k,
                trials_per_k: trials,
                sigma,
                delta,
                seed,
            };
            let report = run_subset_experiment(&params, Parallelism::from_threads(output.threads))?;
            if let Some(p) = &output.plot {
                files::write_text(p, &svg::rate_chart(&report.k_values, &report.success_rate))?;
            }
            emit(output.out.as_deref(), &files::to_json_string(&report))
        }
    }
}
