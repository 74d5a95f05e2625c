//! Alexandrov functions and the moving-plane reflection machinery.
//!
//! The Alexandrov function α₁(p) is the chord-midpoint depth of the surface
//! along the line p + ℝν: the largest-parameter hit t₁ when the line is
//! tangent there, else (t₁ + t₂)/2 with t₂ the next hit below. α(t) is the
//! sup of α₁ over a horizontal slice of the scan plane.
//!
//! The moving-plane scan advances a plane from its first touch, reflects
//! the swept part and stops at the first offset where the reflected part
//! leaves the enclosed region or the swept part stops being a graph over
//! the plane. Symmetry detection runs the scan from both sides; the two
//! one-sided stops carry opposite mesh-resolution bias, so the detected
//! plane is their midpoint.

use serde::{Deserialize, Serialize};

use crate::bvh::Bvh;
use crate::mesh::{Aabb, TriMesh};
use crate::vec3::{self, Vec3};
use crate::{Error, Result};

/// Tangency threshold on |⟨ν, surface normal⟩| for the α₁ tangential branch.
pub const EPS_TAN: f64 = 1e-6;

/// A scan plane: `base + offset·ν` with unit normal ν.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScanPlane {
    pub base: Vec3,
    pub normal: Vec3,
    pub offset: f64,
}

impl ScanPlane {
    pub fn new(base: Vec3, normal: Vec3, offset: f64) -> Self {
        Self {
            base,
            normal: vec3::normalize(normal),
            offset,
        }
    }

    /// A point on the plane.
    pub fn point(&self) -> Vec3 {
        vec3::add(self.base, vec3::scale(self.normal, self.offset))
    }

    /// Signed distance of `x` from the plane along the normal.
    pub fn signed_distance(&self, x: Vec3) -> f64 {
        vec3::dot(vec3::sub(x, self.point()), self.normal)
    }
}

/// A surface that can report every intersection with a line.
pub trait RayTarget {
    /// All hits of the full line `origin + t·dir`, sorted by t.
    fn hits(&self, origin: Vec3, dir: Vec3) -> Vec<SurfaceHit>;
    fn bounds(&self) -> Aabb;
    /// Whether the surface meets the horizontal slice near height `t`.
    fn meets_height(&self, t: f64) -> bool {
        let bb = self.bounds();
        t >= bb.min[2] && t <= bb.max[2]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SurfaceHit {
    pub t: f64,
    pub normal: Vec3,
}

/// A triangle mesh with its acceleration structure.
pub struct MeshSurface {
    pub mesh: TriMesh,
    bvh: Bvh,
    slice_band: f64,
}

impl MeshSurface {
    pub fn new(mesh: TriMesh) -> Self {
        let bvh = Bvh::build(&mesh);
        // A mesh has no exact height-t points; accept slices within two
        // edge lengths.
        let slice_band = 2.0 * mesh.max_edge_len();
        Self {
            mesh,
            bvh,
            slice_band,
        }
    }

    pub fn bvh(&self) -> &Bvh {
        &self.bvh
    }
}

impl RayTarget for MeshSurface {
    fn hits(&self, origin: Vec3, dir: Vec3) -> Vec<SurfaceHit> {
        self.bvh
            .line_hits(origin, dir)
            .into_iter()
            .map(|h| SurfaceHit {
                t: h.t,
                normal: h.normal,
            })
            .collect()
    }

    fn bounds(&self) -> Aabb {
        self.mesh.bbox()
    }

    fn meets_height(&self, t: f64) -> bool {
        self.mesh
            .vertices
            .iter()
            .any(|v| (v[2] - t).abs() < self.slice_band)
    }
}

/// Analytic sphere, for oracle tests.
pub struct AnalyticSphere {
    pub center: Vec3,
    pub radius: f64,
}

impl RayTarget for AnalyticSphere {
    fn hits(&self, origin: Vec3, dir: Vec3) -> Vec<SurfaceHit> {
        let oc = vec3::sub(origin, self.center);
        let a = vec3::dot(dir, dir);
        let b = 2.0 * vec3::dot(oc, dir);
        let c = vec3::dot(oc, oc) - self.radius * self.radius;
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Vec::new();
        }
        let sq = disc.sqrt();
        let mut out = Vec::new();
        for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
            let p = vec3::add(origin, vec3::scale(dir, t));
            out.push(SurfaceHit {
                t,
                normal: vec3::normalize(vec3::sub(p, self.center)),
            });
        }
        // A grazing line is a single tangency.
        if out.len() == 2 && (out[1].t - out[0].t).abs() < 1e-9 * (1.0 + out[0].t.abs()) {
            out.truncate(1);
        }
        out
    }

    fn bounds(&self) -> Aabb {
        let mut bb = Aabb::empty();
        bb.grow(vec3::sub(self.center, [self.radius; 3]));
        bb.grow(vec3::add(self.center, [self.radius; 3]));
        bb
    }
}

/// Analytic infinite cylinder, for oracle tests.
pub struct AnalyticCylinder {
    pub point: Vec3,
    pub axis: Vec3,
    pub radius: f64,
}

impl RayTarget for AnalyticCylinder {
    fn hits(&self, origin: Vec3, dir: Vec3) -> Vec<SurfaceHit> {
        let axis = vec3::normalize(self.axis);
        let oc = vec3::sub(origin, self.point);
        let d_perp = vec3::sub(dir, vec3::scale(axis, vec3::dot(dir, axis)));
        let o_perp = vec3::sub(oc, vec3::scale(axis, vec3::dot(oc, axis)));
        let a = vec3::dot(d_perp, d_perp);
        if a < 1e-300 {
            return Vec::new(); // line parallel to the axis
        }
        let b = 2.0 * vec3::dot(o_perp, d_perp);
        let c = vec3::dot(o_perp, o_perp) - self.radius * self.radius;
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Vec::new();
        }
        let sq = disc.sqrt();
        let mut out = Vec::new();
        for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
            let p = vec3::add(origin, vec3::scale(dir, t));
            let rel = vec3::sub(p, self.point);
            let radial = vec3::sub(rel, vec3::scale(axis, vec3::dot(rel, axis)));
            out.push(SurfaceHit {
                t,
                normal: vec3::normalize(radial),
            });
        }
        if out.len() == 2 && (out[1].t - out[0].t).abs() < 1e-9 * (1.0 + out[0].t.abs()) {
            out.truncate(1);
        }
        out
    }

    fn bounds(&self) -> Aabb {
        // Unbounded along the axis; report a large box.
        let mut bb = Aabb::empty();
        bb.grow(vec3::sub(self.point, [1e9; 3]));
        bb.grow(vec3::add(self.point, [1e9; 3]));
        bb
    }
}

/// The Alexandrov function at a point of the scan plane: cast the line
/// `p + ℝν`, take the largest hit t₁, and return t₁ for a tangential hit
/// or the chord midpoint (t₁ + t₂)/2 otherwise. `None` when the line
/// misses the surface.
pub fn alpha1<S: RayTarget + ?Sized>(
    surface: &S,
    plane: &ScanPlane,
    p: Vec3,
) -> Result<Option<f64>> {
    let nu = plane.normal;
    let hits = surface.hits(p, nu);
    if hits.is_empty() {
        return Ok(None);
    }
    let top = hits.last().unwrap();
    if vec3::dot(nu, top.normal).abs() < EPS_TAN {
        return Ok(Some(top.t));
    }
    if hits.len() < 2 {
        return Err(Error::NonManifoldHit { hits: hits.len() });
    }
    let second = hits[hits.len() - 2];
    Ok(Some(0.5 * (top.t + second.t)))
}

/// One sampled α₁ value along the slice line.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Alpha1Sample {
    /// Offset of the sample point along the in-plane horizontal direction.
    pub lambda: f64,
    pub alpha1: f64,
}

/// α(t) = sup of α₁ over `n_rays` sample points of the height-t line of
/// the scan plane. Also returns the per-point values.
pub fn alpha_at_height<S: RayTarget + ?Sized>(
    surface: &S,
    plane: &ScanPlane,
    t: f64,
    n_rays: usize,
) -> Result<(f64, Vec<Alpha1Sample>)> {
    if !surface.meets_height(t) {
        return Err(Error::EmptySlice { t });
    }
    // Horizontal in-plane direction.
    let u = vec3::normalize(vec3::cross(plane.normal, vec3::E3));
    let q = plane.point();
    let (lo, hi) = surface.bounds().extent_along(u);
    let q_along = vec3::dot(q, u);
    let (lo, hi) = (lo - q_along, hi - q_along);
    let pad = 0.01 * (hi - lo).max(1e-12);

    let mut best: Option<f64> = None;
    let mut detail = Vec::new();
    for k in 0..n_rays {
        let lambda = lo - pad + (hi - lo + 2.0 * pad) * k as f64 / (n_rays - 1).max(1) as f64;
        let p = [q[0] + lambda * u[0], q[1] + lambda * u[1], t];
        if let Some(a) = alpha1(surface, plane, p)? {
            detail.push(Alpha1Sample { lambda, alpha1: a });
            best = Some(best.map_or(a, |b: f64| b.max(a)));
        }
    }
    match best {
        Some(v) => Ok((v, detail)),
        None => Err(Error::EmptySlice { t }),
    }
}

/// α over a list of heights.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaTable {
    pub heights: Vec<f64>,
    pub alpha: Vec<f64>,
    pub plane: ScanPlane,
    /// Per-height sampled α₁ values.
    #[serde(skip)]
    pub detail: Vec<Vec<Alpha1Sample>>,
}

pub fn alpha_table<S: RayTarget + ?Sized>(
    surface: &S,
    plane: &ScanPlane,
    heights: &[f64],
    n_rays: usize,
) -> Result<AlphaTable> {
    let mut alpha = Vec::with_capacity(heights.len());
    let mut detail = Vec::with_capacity(heights.len());
    for &t in heights {
        let (a, d) = alpha_at_height(surface, plane, t, n_rays)?;
        alpha.push(a);
        detail.push(d);
    }
    Ok(AlphaTable {
        heights: heights.to_vec(),
        alpha,
        plane: *plane,
        detail,
    })
}

/// Error envelope for the α convergence report.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum AlphaEnvelope {
    /// Fixed allowance (mesh tolerance) at every height.
    Constant(f64),
    /// `2·amplitude·exp(−rate·t)`: a radial perturbation of that size moves
    /// each chord endpoint by at most its amplitude at the slice height.
    ExponentialDecay { amplitude: f64, rate: f64 },
}

impl AlphaEnvelope {
    pub fn bound(&self, t: f64) -> f64 {
        match self {
            AlphaEnvelope::Constant(c) => *c,
            AlphaEnvelope::ExponentialDecay { amplitude, rate } => {
                2.0 * amplitude * (-rate * t).exp()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AlphaConvergenceEntry {
    pub t: f64,
    pub alpha: f64,
    pub error: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlphaConvergenceReport {
    pub axis_distance: f64,
    pub entries: Vec<AlphaConvergenceEntry>,
    pub passed: bool,
}

/// Check |α(t_k) − d| against an envelope, where `d` is the distance from
/// the scan plane to the vertical axis through `axis_xy`.
pub fn alpha_limit_check<S: RayTarget + ?Sized>(
    surface: &S,
    plane: &ScanPlane,
    heights: &[f64],
    axis_xy: [f64; 2],
    envelope: AlphaEnvelope,
    n_rays: usize,
) -> Result<AlphaConvergenceReport> {
    let axis_point = [axis_xy[0], axis_xy[1], plane.point()[2]];
    let d = plane.signed_distance(axis_point);
    let table = alpha_table(surface, plane, heights, n_rays)?;
    let mut entries = Vec::with_capacity(heights.len());
    let mut passed = true;
    for (&t, &a) in table.heights.iter().zip(table.alpha.iter()) {
        let error = (a - d).abs();
        let bound = envelope.bound(t);
        if error > bound {
            passed = false;
        }
        entries.push(AlphaConvergenceEntry {
            t,
            alpha: a,
            error,
            bound,
        });
    }
    Ok(AlphaConvergenceReport {
        axis_distance: d,
        entries,
        passed,
    })
}

/// Householder reflection of a mesh through a plane; winding is flipped so
/// the mesh stays consistently oriented.
pub fn reflect_through_plane(mesh: &TriMesh, plane: &ScanPlane) -> TriMesh {
    let q = plane.point();
    let nu = plane.normal;
    let vertices: Vec<Vec3> = mesh
        .vertices
        .iter()
        .map(|&v| reflect_point(v, q, nu))
        .collect();
    let mut triangles = mesh.triangles.clone();
    for t in &mut triangles {
        t.swap(1, 2);
    }
    TriMesh {
        vertices,
        triangles,
        boundary_loops: mesh
            .boundary_loops
            .iter()
            .map(|l| {
                let mut l = l.clone();
                l.reverse();
                l
            })
            .collect(),
    }
}

#[inline]
fn reflect_point(x: Vec3, plane_point: Vec3, nu: Vec3) -> Vec3 {
    let d = vec3::dot(vec3::sub(x, plane_point), nu);
    vec3::sub(x, vec3::scale(nu, 2.0 * d))
}

/// What stopped a moving-plane scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContactKind {
    /// A reflected point left the enclosed region.
    Interior,
    /// Reflected boundary contact (open inputs; not produced for closed meshes).
    Boundary,
    /// The swept part stopped being a graph over the plane.
    GraphViolation,
    /// No violation up to the far side of the mesh.
    None,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanOutcome {
    /// Plane coordinate ⟨x, ν⟩ at which the procedure stops.
    pub stop_t: f64,
    pub contact: ContactKind,
    pub contact_point: Option<Vec3>,
    /// First-touch coordinate T (plane tangent to the mesh).
    pub first_touch: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanConfig {
    /// Coarse step; 0 selects extent/200.
    pub step: f64,
    /// Bisection refinement tolerance on the stop coordinate.
    pub tol: f64,
    /// Distance a reflected point may sit outside the mesh before it
    /// counts as a violation; 0 selects a mesh-resolution default.
    pub surface_tol: f64,
    /// Cap on the number of reflected sample points per plane test.
    pub max_samples: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            step: 0.0,
            tol: 1e-4,
            surface_tol: 0.0,
            max_samples: 1500,
        }
    }
}

struct ScanContext<'a> {
    mesh: &'a TriMesh,
    bvh: &'a Bvh,
    nu: Vec3,
    coords: Vec<f64>,
    surface_tol: f64,
    max_samples: usize,
}

impl ScanContext<'_> {
    /// Interior condition at plane coordinate `t`: every clipped point
    /// reflects to the inside of the mesh (up to the surface tolerance).
    /// Returns the worst offender.
    fn interior_violation(&self, t: f64) -> Option<Vec3> {
        let clipped: Vec<usize> = (0..self.mesh.vertices.len())
            .filter(|&i| self.coords[i] < t)
            .collect();
        if clipped.is_empty() {
            return None;
        }
        let stride = clipped.len().div_ceil(self.max_samples);
        let mut worst: Option<(f64, Vec3)> = None;
        for &i in clipped.iter().step_by(stride) {
            let x = self.mesh.vertices[i];
            let reflected = vec3::add(x, vec3::scale(self.nu, 2.0 * (t - self.coords[i])));
            if !self.bvh.is_inside(reflected) {
                let d = self.bvh.distance(reflected);
                if d > self.surface_tol && worst.is_none_or(|(best, _)| d > best) {
                    worst = Some((d, reflected));
                }
            }
        }
        worst.map(|(_, p)| p)
    }
}

/// Advance a plane with normal ν from outside the mesh, reflecting the
/// swept part, and return the minimal plane coordinate at which either the
/// reflected part leaves the enclosed region (interior condition, located
/// by bisection) or the swept part stops being a graph over the plane
/// (normal condition: a clipped facet faces forward along ν).
pub fn moving_plane_scan(mesh: &TriMesh, nu: Vec3, cfg: &ScanConfig) -> Result<ScanOutcome> {
    if !mesh.is_closed() {
        return Err(Error::OpenMesh(mesh.boundary_loops.len()));
    }
    let nu = vec3::normalize(nu);
    let bvh = Bvh::build(mesh);
    let coords: Vec<f64> = mesh.vertices.iter().map(|&v| vec3::dot(v, nu)).collect();
    let first_touch = coords.iter().copied().fold(f64::INFINITY, f64::min);
    let far_side = coords.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let extent = far_side - first_touch;
    let diag = mesh.bbox().diagonal();

    let step = if cfg.step > 0.0 {
        cfg.step
    } else {
        extent / 200.0
    };
    let (sagitta, dihedral) = mesh.smoothness_stats();
    let surface_tol = if cfg.surface_tol > 0.0 {
        cfg.surface_tol
    } else {
        // Allowance for tessellation flatness when reflecting a curved
        // surface onto itself.
        (3.0 * sagitta).max(1e-9 * diag)
    };

    // Graph condition. A facet of the swept part with outward normal
    // having a positive ν-component makes the sweep fold over the plane.
    // Facets tilt by up to the dihedral scale around the smooth normal,
    // so near-tangent facets only count past a matching threshold.
    let outward_sign = if mesh.signed_volume() >= 0.0 {
        1.0
    } else {
        -1.0
    };
    let graph_eps = (3.0 * dihedral).clamp(1e-7, 0.5);
    let mut graph_stop = f64::INFINITY;
    let mut graph_point = None;
    for ti in 0..mesh.triangles.len() {
        let n = vec3::normalize(mesh.triangle_normal_area(ti));
        if outward_sign * vec3::dot(n, nu) > graph_eps {
            let tri = mesh.triangles[ti];
            let min_c = tri
                .iter()
                .map(|&v| coords[v as usize])
                .fold(f64::INFINITY, f64::min);
            if min_c < graph_stop {
                graph_stop = min_c;
                graph_point = Some(mesh.triangle_centroid(ti));
            }
        }
    }

    let ctx = ScanContext {
        mesh,
        bvh: &bvh,
        nu,
        coords,
        surface_tol,
        max_samples: cfg.max_samples.max(64),
    };

    // Coarse march up to the first interior violation (no point marching
    // past the graph stop).
    let mut t_ok = first_touch;
    let mut interior_bad = None;
    let mut k = 1usize;
    loop {
        let t = first_touch + step * k as f64;
        if t > (far_side + step).min(graph_stop + step) {
            break;
        }
        if let Some(p) = ctx.interior_violation(t) {
            interior_bad = Some((t, p));
            break;
        }
        t_ok = t;
        k += 1;
    }

    let interior_stop = interior_bad.map(|(mut t_bad, mut point)| {
        while t_bad - t_ok > cfg.tol {
            let mid = 0.5 * (t_ok + t_bad);
            match ctx.interior_violation(mid) {
                Some(p) => {
                    t_bad = mid;
                    point = p;
                }
                None => t_ok = mid,
            }
        }
        (0.5 * (t_ok + t_bad), point)
    });

    let outcome = match interior_stop {
        Some((t_i, p)) if t_i <= graph_stop => ScanOutcome {
            stop_t: t_i,
            contact: ContactKind::Interior,
            contact_point: Some(p),
            first_touch,
        },
        _ if graph_stop.is_finite() => ScanOutcome {
            stop_t: graph_stop,
            contact: ContactKind::GraphViolation,
            contact_point: graph_point,
            first_touch,
        },
        _ => ScanOutcome {
            stop_t: far_side,
            contact: ContactKind::None,
            contact_point: None,
            first_touch,
        },
    };
    Ok(outcome)
}

#[derive(Debug, Clone, Copy)]
pub struct SymmetryConfig {
    pub scan: ScanConfig,
    /// Tolerance for both the two-sided stop agreement and the reflected
    /// coincidence (Hausdorff) test.
    pub tol: f64,
}

impl Default for SymmetryConfig {
    fn default() -> Self {
        Self {
            scan: ScanConfig::default(),
            tol: 1e-2,
        }
    }
}

/// Run the scan in +ν and −ν; when both stop at the same plane and the
/// reflection through it maps the mesh onto itself (vertex-sampled
/// Hausdorff distance within tolerance), return that plane.
pub fn alexandrov_symmetry(
    mesh: &TriMesh,
    nu: Vec3,
    cfg: &SymmetryConfig,
) -> Result<Option<ScanPlane>> {
    let nu = vec3::normalize(nu);
    let up = moving_plane_scan(mesh, nu, &cfg.scan)?;
    let down = moving_plane_scan(mesh, vec3::scale(nu, -1.0), &cfg.scan)?;
    if up.contact == ContactKind::None || down.contact == ContactKind::None {
        return Ok(None);
    }
    // Both stops as coordinates along +ν. The one-sided stops carry a
    // mesh-scale bias (opposite on the two sides), so agreement is judged
    // at mesh resolution; the reflected-coincidence test below is the
    // decisive one.
    let c_up = up.stop_t;
    let c_down = -down.stop_t;
    let agree_tol = cfg.tol.max(3.0 * mesh.max_edge_len());
    if (c_up - c_down).abs() > agree_tol {
        return Ok(None);
    }
    let mid = 0.5 * (c_up + c_down);
    let plane = ScanPlane::new(vec3::scale(nu, mid), nu, 0.0);

    // Reflected coincidence. Reflection is an involution, so sampling the
    // reflected vertices against the original surface is symmetric.
    let bvh = Bvh::build(mesh);
    let q = plane.point();
    let mut hausdorff: f64 = 0.0;
    for &v in &mesh.vertices {
        let r = reflect_point(v, q, nu);
        hausdorff = hausdorff.max(bvh.distance(r));
        if hausdorff > cfg.tol {
            return Ok(None);
        }
    }
    Ok(Some(plane))
}

/// The 26 directions of the {−1, 0, 1}³ grid, normalized.
pub fn direction_grid_26() -> Vec<Vec3> {
    let mut dirs = Vec::with_capacity(26);
    for i in -1i32..=1 {
        for j in -1i32..=1 {
            for k in -1i32..=1 {
                if i == 0 && j == 0 && k == 0 {
                    continue;
                }
                dirs.push(vec3::normalize([i as f64, j as f64, k as f64]));
            }
        }
    }
    dirs
}
