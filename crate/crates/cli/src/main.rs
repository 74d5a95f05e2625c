//! `wlab` — batch front end for the W-Delaunay toolkit.
//!
//! One JSON config document drives every subcommand; CLI flags override
//! individual fields. Exit codes: 0 success, 2 config/validation error,
//! 3 numerical failure. `WLAB_THREADS` caps the worker pool.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use wlab_core::relation::RelationSpec;

#[derive(Debug)]
pub enum AppError {
    Config(String),
    Numerical(String),
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Config(m) => write!(f, "config error: {m}"),
            AppError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => 2,
            AppError::Numerical(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "wlab",
    version,
    about = "Rotational Weingarten surface toolkit"
)]
struct Cli {
    /// JSON config file; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (default: ./out or config out_dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Linear relation constant a.
    #[arg(long, global = true)]
    a: Option<f64>,

    /// Linear relation constant b.
    #[arg(long, global = true)]
    b: Option<f64>,

    /// Constant mean curvature H (overrides --a/--b).
    #[arg(long = "cmc", global = true)]
    cmc_h: Option<f64>,

    /// Seed for randomized harnesses.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate one family member; writes profile.csv, extrema.csv, profile.json.
    Profile(ProfileArgs),
    /// Sweep the family over neck radii; writes family.csv.
    Sweep(SweepArgs),
    /// Compare closed-form and quadrature flux; writes flux.json.
    Flux(FluxArgs),
    /// Masses and balance of configured ends; writes mass.json.
    Mass,
    /// α tables, moving-plane scans and symmetry detection; writes alpha.csv, scan.json.
    Alexandrov(AlexandrovArgs),
    /// Balance verdict and end-count bound; writes bounds.json.
    Bounds(BoundsArgs),
    /// Randomized loop-parity harness; writes parity.csv, parity.json.
    Parity(ParityArgs),
}

#[derive(Args)]
struct ProfileArgs {
    /// Neck radius of the member.
    #[arg(long)]
    neck_r: Option<f64>,
    /// Periods to integrate.
    #[arg(long)]
    periods: Option<f64>,
    /// Integrator tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Also write profile.obj with this angular resolution.
    #[arg(long)]
    n_theta: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated neck radto sweep, as fractions of a.
    #[arg(long, value_delimiter = ',')]
    fractions: Option<Vec<f64>>,
}

#[derive(Args)]
struct FluxArgs {
    #[arg(long)]
    neck_r: Option<f64>,
    #[arg(long)]
    n_theta: Option<usize>,
}

#[derive(Args)]
struct AlexandrovArgs {
    /// OBJ mesh to analyze (closed). Default: a capped family member.
    #[arg(long)]
    mesh: Option<PathBuf>,
    #[arg(long)]
    neck_r: Option<f64>,
    #[arg(long)]
    n_theta: Option<usize>,
    /// Scan-plane distance from the axis.
    #[arg(long)]
    plane_distance: Option<f64>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Boundary circle radius.
    #[arg(long)]
    disk_radius: Option<f64>,
    /// Use the sharp a²+b denominator for the end-count bound.
    #[arg(long)]
    sharp: bool,
}

#[derive(Args)]
struct ParityArgs {
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    n_theta: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    init_thread_pool()?;

    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };

    // Global overrides.
    if let Some(h) = cli.cmc_h {
        cfg.relation = Some(RelationSpec::Cmc { h });
    } else if cli.a.is_some() || cli.b.is_some() {
        let (mut a, mut b) = match cfg.relation_spec() {
            RelationSpec::Linear { a, b } => (a, b),
            _ => (1.0, 1.0),
        };
        if let Some(v) = cli.a {
            a = v;
        }
        if let Some(v) = cli.b {
            b = v;
        }
        cfg.relation = Some(RelationSpec::Linear { a, b });
    }
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    let out_dir = cli
        .out
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));

    match &cli.cmd {
        Cmd::Profile(args) => {
            if let Some(v) = args.neck_r {
                cfg.profile.neck_r = v;
            }
            if let Some(v) = args.periods {
                cfg.profile.periods = v;
            }
            if let Some(v) = args.tol {
                cfg.profile.tol = v;
            }
            if let Some(v) = args.n_theta {
                cfg.profile.n_theta = v;
            }
            commands::cmd_profile(&cfg, &out_dir)
        }
        Cmd::Sweep(args) => {
            if let Some(v) = &args.fractions {
                cfg.sweep.neck_fractions = v.clone();
            }
            commands::cmd_sweep(&cfg, &out_dir)
        }
        Cmd::Flux(args) => {
            if let Some(v) = args.neck_r {
                cfg.flux.neck_r = v;
            }
            if let Some(v) = args.n_theta {
                cfg.flux.n_theta = v;
            }
            commands::cmd_flux(&cfg, &out_dir)
        }
        Cmd::Mass => commands::cmd_mass(&cfg, &out_dir),
        Cmd::Alexandrov(args) => {
            if let Some(v) = &args.mesh {
                cfg.alexandrov.mesh = Some(v.clone());
            }
            if let Some(v) = args.neck_r {
                cfg.alexandrov.neck_r = v;
            }
            if let Some(v) = args.n_theta {
                cfg.alexandrov.n_theta = v;
            }
            if let Some(v) = args.plane_distance {
                cfg.alexandrov.plane_distance = v;
            }
            commands::cmd_alexandrov(&cfg, &out_dir)
        }
        Cmd::Bounds(args) => {
            if let Some(v) = args.disk_radius {
                cfg.bounds.disk_radius = v;
            }
            if args.sharp {
                cfg.bounds.sharp = true;
            }
            commands::cmd_bounds(&cfg, &out_dir)
        }
        Cmd::Parity(args) => {
            if let Some(v) = args.trials {
                cfg.parity.trials = v;
            }
            if let Some(v) = args.n_theta {
                cfg.parity.n_theta = v;
            }
            commands::cmd_parity(&cfg, &out_dir)
        }
    }
}

/// `WLAB_THREADS` caps the rayon worker pool.
fn init_thread_pool() -> Result<(), AppError> {
    if let Ok(v) = std::env::var("WLAB_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| AppError::Config(format!("WLAB_THREADS must be an integer, got {v}")))?;
        if n == 0 {
            return Err(AppError::Config("WLAB_THREADS must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| AppError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}
