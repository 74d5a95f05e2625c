//! The run configuration: one self-describing JSON document, with CLI
//! flags overriding individual fields.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wlab_core::flux::EndSpec;
use wlab_core::relation::RelationSpec;

use crate::AppError;

fn default_tol() -> f64 {
    1e-11
}

fn default_n_theta() -> usize {
    256
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Curvature relation; linear a = b = 1 when absent.
    pub relation: Option<RelationSpec>,
    /// Seed for randomized harnesses; same seed, bit-identical logs.
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub profile: ProfileConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub flux: FluxConfig,
    #[serde(default)]
    pub mass: MassConfig,
    #[serde(default)]
    pub alexandrov: AlexandrovConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
    #[serde(default)]
    pub parity: ParityConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| AppError::Config(format!("bad config {}: {e}", path.display())))
    }

    pub fn relation_spec(&self) -> RelationSpec {
        self.relation
            .clone()
            .unwrap_or(RelationSpec::Linear { a: 1.0, b: 1.0 })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileConfig {
    pub neck_r: f64,
    /// Number of periods to integrate.
    pub periods: f64,
    pub tol: f64,
    /// Write an OBJ of the revolved profile when > 0.
    pub n_theta: usize,
    pub n_rings: usize,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self {
            neck_r: 0.5,
            periods: 1.0,
            tol: default_tol(),
            n_theta: 0,
            n_rings: 64,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Neck radii as fractions of a.
    pub neck_fractions: Vec<f64>,
    pub tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            neck_fractions: (1..=9).map(|k| 0.1 * k as f64).collect(),
            tol: default_tol(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FluxConfig {
    pub neck_r: f64,
    pub n_theta: usize,
    pub tol: f64,
    /// Extra (generic) parallels per period, besides the neck and bulge.
    pub n_parallels: usize,
}

impl Default for FluxConfig {
    fn default() -> Self {
        Self {
            neck_r: 0.5,
            n_theta: 512,
            tol: default_tol(),
            n_parallels: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct MassConfig {
    pub ends: Vec<EndSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlexandrovConfig {
    /// OBJ mesh to analyze; a capped family member is generated when absent.
    pub mesh: Option<PathBuf>,
    pub neck_r: f64,
    pub n_theta: usize,
    pub n_rings: usize,
    /// Distance from the scan plane to the rotation axis.
    pub plane_distance: f64,
    /// Heights for the α table.
    pub n_heights: usize,
    pub n_rays: usize,
    /// Directions to scan; defaults to e1, e2, e3.
    pub directions: Vec<[f64; 3]>,
    pub scan_tol: f64,
    pub symmetry_tol: f64,
}

impl Default for AlexandrovConfig {
    fn default() -> Self {
        Self {
            mesh: None,
            neck_r: 0.5,
            n_theta: default_n_theta(),
            n_rings: 96,
            plane_distance: 2.0,
            n_heights: 12,
            n_rays: 128,
            directions: vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            scan_tol: 1e-4,
            symmetry_tol: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    pub disk_radius: f64,
    pub ends: Vec<EndSpec>,
    /// Use the sharp a² + b denominator for the end-count bound.
    pub sharp: bool,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            disk_radius: 1.0,
            ends: Vec::new(),
            sharp: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParityConfig {
    pub trials: usize,
    pub n_theta: usize,
}

impl Default for ParityConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            n_theta: 32,
        }
    }
}
