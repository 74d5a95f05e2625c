use thiserror::Error;

/// Errors produced by the geometric and numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Linear solve of κ₁ hits the pole `a + b·κ₂ = 0`.
    #[error("singular denominator a + b*kappa2 = 0 at kappa2 = {kappa2}")]
    SingularDenominator { kappa2: f64 },

    /// The root bracket for the general elliptic solve could not be
    /// established even after widening.
    #[error(
        "bracket failure solving kappa1 for kappa2 = {kappa2}: g({lo}) = {g_lo}, g({hi}) = {g_hi}"
    )]
    BracketFailure {
        kappa2: f64,
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    /// Initial data starts at (or below) the axis threshold.
    #[error("initial radius {y} is below the axis threshold {y_min}")]
    AxisStart { y: f64, y_min: f64 },

    /// The adaptive step controller collapsed below the floor.
    #[error("step size collapsed to {h} at s = {s}")]
    StepCollapse { s: f64, h: f64 },

    #[error("profile has no extrema: {0}")]
    NoExtrema(String),

    #[error("degenerate strip: consecutive profile samples coincide near s = {s}")]
    DegenerateStrip { s: f64 },

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("mesh is not closed: {0} boundary edges")]
    OpenMesh(usize),

    /// Cap boundary does not sit on the surface boundary it is supposed to close.
    #[error("mismatched cap boundary: largest gap {gap} exceeds tolerance {tol}")]
    MismatchedBoundary { gap: f64, tol: f64 },

    #[error("cycle is not closed: {0}")]
    NonClosedCycle(String),

    /// Line cast produced an odd/degenerate hit pattern on a closed mesh.
    #[error("non-manifold hit pattern while casting through the mesh ({hits} hits)")]
    NonManifoldHit { hits: usize },

    #[error("slice at height {t} does not meet the surface")]
    EmptySlice { t: f64 },

    #[error("query point lies on the curve")]
    PointOnCurve,

    /// The parity check requires the reference ray to avoid the surface.
    #[error("ray intersects the surface at parameter {t}")]
    RayIntersectsSurface { t: f64 },

    #[error("series start failed: epsilon {eps} is below the precision floor")]
    SeriesStart { eps: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("parse error: {0}")]
    Parse(String),
}
