//! Flux of the vertical field through cycles on linear Weingarten
//! surfaces: closed form at parallels, quadrature on meshes, end masses,
//! and the balancing identity on capped compact cycles.
//!
//! Sign convention (global, used everywhere): a parallel cut below a
//! positive end is evaluated with downward conormal and downward cap
//! normal (`orientation = +1`). With that choice the flux at any parallel
//! equals `−π·I` with `I = y² − 2a·y·cosψ − b·cos²ψ`, so a bulge gives
//! `−π(R² − 2aR − b) = π(Rr + b)`, the mass of the end. Negative ends flip
//! both vectors (`orientation = −1`).

use serde::{Deserialize, Serialize};

use crate::mesh::TriMesh;
use crate::profile::ProfileState;
use crate::relation::{solve_kappa1, WeingartenRelation};
use crate::vec3::{self, Vec3};
use crate::{Error, Result};

use std::f64::consts::PI;

/// A parallel (horizontal circle) of a surface of revolution about the
/// z-axis, with the conormal/cap orientation sign.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Parallel {
    pub y: f64,
    pub psi: f64,
    pub z: f64,
    /// +1: positive-end convention (downward conormal and cap normal).
    pub orientation: i8,
}

impl Parallel {
    pub fn from_state(state: &ProfileState, orientation: i8) -> Self {
        Self {
            y: state.y,
            psi: state.psi,
            z: state.z,
            orientation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndSign {
    Positive,
    Negative,
}

/// A vertical annular end described by the W-Delaunay it converges to.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EndSpec {
    pub sign: EndSign,
    /// Big radius R.
    pub r_big: f64,
    /// Small radius r.
    pub r_small: f64,
    /// Relation constant b (0 for cmc).
    pub b: f64,
    /// cmc value H (unused for linear ends).
    #[serde(default)]
    pub h: f64,
}

impl EndSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_small > 0.0 && self.r_small <= self.r_big) {
            return Err(Error::InvalidParameter(format!(
                "end radii must satisfy 0 < r <= R, got r = {}, R = {}",
                self.r_small, self.r_big
            )));
        }
        if self.b < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "end constant b must be >= 0, got {}",
                self.b
            )));
        }
        Ok(())
    }
}

/// Closed-form flux at a parallel: `−π(y² − 2a·y·cosψ − b·cos²ψ)` for
/// orientation +1 (the first integral times −π).
pub fn flux_at_parallel(p: &Parallel, a: f64, b: f64) -> f64 {
    let c = p.psi.cos();
    let i = p.y * p.y - 2.0 * a * p.y * c - b * c * c;
    -(p.orientation as f64) * PI * i
}

/// Mass of a linear Weingarten end: `π(R·r + b)`.
pub fn mass_of_end(e: &EndSpec) -> f64 {
    PI * (e.r_big * e.r_small + e.b)
}

/// Mass of a cmc end: `π(r/H − r²)` for `0 < r < 1/H`, `H > 0`.
pub fn cmc_mass(r: f64, h: f64) -> Result<f64> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "cmc mass needs H > 0, got {h}"
        )));
    }
    if !(r > 0.0 && r < 1.0 / h) {
        return Err(Error::InvalidParameter(format!(
            "cmc mass needs 0 < r < 1/H, got r = {r}, 1/H = {}",
            1.0 / h
        )));
    }
    Ok(PI * (r / h - r * r))
}

/// One sample of a loop on the surface, carrying the data the line
/// integrand needs: position, conormal, and the shape operator applied to
/// the conormal.
#[derive(Debug, Clone, Copy)]
pub struct LoopSample {
    pub point: Vec3,
    pub conormal: Vec3,
    pub mean_curvature: f64,
    /// `A·ν`, the shape operator applied to the conormal.
    pub shape_conormal: Vec3,
}

/// `(2a·Id + b·T)ν` with `T = 2H·Id − A` at one sample, applied to `Y`.
fn line_integrand(s: &LoopSample, y_field: Vec3, a: f64, b: f64) -> f64 {
    let t_nu = vec3::sub(
        vec3::scale(s.conormal, 2.0 * s.mean_curvature),
        s.shape_conormal,
    );
    let op_nu = vec3::add(vec3::scale(s.conormal, 2.0 * a), vec3::scale(t_nu, b));
    vec3::dot(y_field, op_nu)
}

/// Trapezoid quadrature of `⟨Y, (2a + bT)ν⟩` over a closed polygonal loop.
fn loop_integral(samples: &[LoopSample], y_field: Vec3, a: f64, b: f64) -> f64 {
    let n = samples.len();
    let mut total = 0.0;
    for i in 0..n {
        let s0 = &samples[i];
        let s1 = &samples[(i + 1) % n];
        let seg = vec3::dist(s1.point, s0.point);
        total +=
            0.5 * (line_integrand(s0, y_field, a, b) + line_integrand(s1, y_field, a, b)) * seg;
    }
    total
}

/// Flat-triangle quadrature of `⟨Y, n⟩` over a cap.
fn cap_integral(cap: &TriMesh, y_field: Vec3) -> f64 {
    (0..cap.triangles.len())
        .map(|t| 0.5 * vec3::dot(y_field, cap.triangle_normal_area(t)))
        .sum()
}

/// Quadrature form of the flux: cap term minus half the line term,
/// `∫_K ⟨e₃, n_K⟩ − ½ ∫_Γ ⟨e₃, (2a + bT)ν_Γ⟩`.
///
/// The cap boundary must sit on the sampled loop (checked coarsely).
pub fn flux_quadrature(loop_samples: &[LoopSample], cap: &TriMesh, a: f64, b: f64) -> Result<f64> {
    if loop_samples.len() < 8 {
        return Err(Error::InvalidParameter(
            "flux quadrature needs at least 8 loop samples".into(),
        ));
    }
    check_cap_matches_loop(cap, loop_samples)?;
    let cap_term = cap_integral(cap, vec3::E3);
    let line_term = loop_integral(loop_samples, vec3::E3, a, b);
    Ok(cap_term - 0.5 * line_term)
}

fn check_cap_matches_loop(cap: &TriMesh, samples: &[LoopSample]) -> Result<()> {
    if cap.boundary_loops.len() != 1 {
        return Err(Error::MismatchedBoundary {
            gap: f64::INFINITY,
            tol: 0.0,
        });
    }
    // Coarse check: every cap boundary vertex must lie near the sampled
    // polygon. Scale the tolerance with the loop size.
    let diam = loop_diameter(samples);
    let tol = 0.02 * diam.max(1e-12);
    let mut gap: f64 = 0.0;
    for &vi in &cap.boundary_loops[0] {
        let p = cap.vertices[vi as usize];
        let d = samples
            .iter()
            .map(|s| vec3::dist(s.point, p))
            .fold(f64::INFINITY, f64::min);
        gap = gap.max(d);
    }
    // Polygon spacing bounds how far a matching vertex can sit from samples.
    let spacing = polygon_spacing(samples);
    if gap > tol + spacing {
        return Err(Error::MismatchedBoundary { gap, tol });
    }
    Ok(())
}

fn loop_diameter(samples: &[LoopSample]) -> f64 {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for s in samples {
        for k in 0..3 {
            lo[k] = lo[k].min(s.point[k]);
            hi[k] = hi[k].max(s.point[k]);
        }
    }
    vec3::dist(hi, lo)
}

fn polygon_spacing(samples: &[LoopSample]) -> f64 {
    let n = samples.len();
    (0..n)
        .map(|i| vec3::dist(samples[i].point, samples[(i + 1) % n].point))
        .fold(0.0, f64::max)
}

/// Sample a parallel of a rotational Weingarten surface with analytic
/// curvature data. The conormal is the meridian direction, a principal
/// direction with eigenvalue κ₁; `orientation = +1` points it downward
/// (the positive-end convention).
pub fn parallel_loop_samples(
    state: &ProfileState,
    relation: &WeingartenRelation,
    n: usize,
    orientation: i8,
) -> Result<Vec<LoopSample>> {
    let kappa2 = state.psi.cos() / state.y;
    let kappa1 = solve_kappa1(relation, kappa2)?;
    let h = 0.5 * (kappa1 + kappa2);
    let sign = -(orientation as f64);
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let theta = 2.0 * PI * j as f64 / n as f64;
        let (st, ct) = theta.sin_cos();
        let point = [state.y * ct, state.y * st, state.z];
        // Meridian (profile tangent) direction at this angle.
        let tangent = [state.psi.sin() * ct, state.psi.sin() * st, state.psi.cos()];
        let conormal = vec3::scale(tangent, sign);
        out.push(LoopSample {
            point,
            conormal,
            mean_curvature: h,
            shape_conormal: vec3::scale(conormal, kappa1),
        });
    }
    Ok(out)
}

/// Horizontal disk cap matching [`parallel_loop_samples`]; orientation +1
/// gives the downward normal.
pub fn parallel_cap(state: &ProfileState, n: usize, orientation: i8) -> TriMesh {
    crate::mesh::horizontal_disk([0.0, 0.0, state.z], state.y, n, orientation < 0)
}

/// A planar cap of a compact cycle with its boundary curve data.
///
/// Both the cap normal and the boundary conormal follow the cycle
/// orientation: normals point into the enclosed solid (the mean-curvature
/// side of the surface part) and conormals point toward the surface part.
#[derive(Debug, Clone)]
pub struct CapData {
    pub mesh: TriMesh,
    pub boundary_samples: Vec<LoopSample>,
}

/// A compact cycle: a surface-of-revolution part plus planar caps.
#[derive(Debug, Clone)]
pub struct BalancingCycle {
    pub surface: TriMesh,
    pub caps: Vec<CapData>,
}

/// Cap for a cut parallel of a balancing cycle. `surface_above` selects
/// whether the surface part of the cycle sits above or below the cut; the
/// cap normal points into the solid and the conormal toward the surface.
pub fn cycle_cap(
    state: &ProfileState,
    relation: &WeingartenRelation,
    n: usize,
    surface_above: bool,
) -> Result<CapData> {
    let orient = if surface_above { -1 } else { 1 };
    let mesh = crate::mesh::horizontal_disk([0.0, 0.0, state.z], state.y, n, surface_above);
    let boundary_samples = parallel_loop_samples(state, relation, n, orient)?;
    Ok(CapData {
        mesh,
        boundary_samples,
    })
}

/// Evaluate both sides of the balancing formula
/// `Σ ∫_cap ⟨Y, n⟩ = ½ Σ ∮ ⟨Y, (2a + bT)ν⟩`
/// on a capped compact cycle and return the scaled residual
/// `|LHS − RHS| / max(diam², |LHS|, |RHS|)`.
pub fn balancing_check(cycle: &BalancingCycle, y_field: Vec3, a: f64, b: f64) -> Result<f64> {
    if cycle.caps.len() != cycle.surface.boundary_loops.len() {
        return Err(Error::NonClosedCycle(format!(
            "{} caps for {} surface boundary loops",
            cycle.caps.len(),
            cycle.surface.boundary_loops.len()
        )));
    }
    // Each cap must close one surface boundary loop.
    let spacing = cycle.surface.max_edge_len();
    for (ci, cap) in cycle.caps.iter().enumerate() {
        let mut best = f64::INFINITY;
        for lp in &cycle.surface.boundary_loops {
            let mut gap: f64 = 0.0;
            for s in &cap.boundary_samples {
                let d = lp
                    .iter()
                    .map(|&vi| vec3::dist(cycle.surface.vertices[vi as usize], s.point))
                    .fold(f64::INFINITY, f64::min);
                gap = gap.max(d);
            }
            best = best.min(gap);
        }
        if best > 2.0 * spacing {
            return Err(Error::NonClosedCycle(format!(
                "cap {ci} sits {best} away from every surface boundary loop"
            )));
        }
    }

    let lhs: f64 = cycle
        .caps
        .iter()
        .map(|c| cap_integral(&c.mesh, y_field))
        .sum();
    let rhs: f64 = 0.5
        * cycle
            .caps
            .iter()
            .map(|c| loop_integral(&c.boundary_samples, y_field, a, b))
            .sum::<f64>();

    let diam = cycle.surface.bbox().diagonal();
    let scale = (diam * diam).max(lhs.abs()).max(rhs.abs()).max(1e-300);
    Ok((lhs - rhs).abs() / scale)
}
