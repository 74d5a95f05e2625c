//! Indexed triangle meshes: revolution surfaces, caps, OBJ I/O.
//!
//! Meshes are validated on construction: every undirected edge belongs to
//! at most two triangles, shared edges are traversed in opposite directions
//! (consistent winding), and boundary edges chain into closed loops.
//!
//! Revolution meshes are wound so triangle normals follow the
//! mean-curvature convention of the profile (pointing towards the axis on
//! the embedded family). Code that needs outward normals checks the signed
//! volume instead of assuming.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::profile::ProfileCurve;
use crate::vec3::{self, Vec3};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
    /// Ordered vertex-index cycles of the boundary, one per loop.
    pub boundary_loops: Vec<Vec<u32>>,
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn empty() -> Self {
        Self {
            min: [f64::INFINITY; 3],
            max: [f64::NEG_INFINITY; 3],
        }
    }

    #[allow(clippy::needless_range_loop)]
    pub fn grow(&mut self, p: Vec3) {
        for k in 0..3 {
            self.min[k] = self.min[k].min(p[k]);
            self.max[k] = self.max[k].max(p[k]);
        }
    }

    pub fn union(mut self, other: &Aabb) -> Self {
        self.grow(other.min);
        self.grow(other.max);
        self
    }

    pub fn diagonal(&self) -> f64 {
        vec3::dist(self.max, self.min)
    }

    pub fn center(&self) -> Vec3 {
        vec3::scale(vec3::add(self.min, self.max), 0.5)
    }

    /// Extent of the box along a (unit) direction.
    #[allow(clippy::needless_range_loop)]
    pub fn extent_along(&self, dir: Vec3) -> (f64, f64) {
        let mut lo = 0.0;
        let mut hi = 0.0;
        for k in 0..3 {
            let (a, b) = (self.min[k] * dir[k], self.max[k] * dir[k]);
            lo += a.min(b);
            hi += a.max(b);
        }
        (lo, hi)
    }
}

impl TriMesh {
    /// Build and validate a mesh; boundary loops are extracted here.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        let nv = vertices.len() as u32;
        let mut directed: HashMap<(u32, u32), u32> = HashMap::new();
        for (ti, t) in triangles.iter().enumerate() {
            if t[0] == t[1] || t[1] == t[2] || t[2] == t[0] {
                return Err(Error::Mesh(format!("degenerate triangle {ti}: {t:?}")));
            }
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if a >= nv || b >= nv {
                    return Err(Error::Mesh(format!(
                        "triangle {ti} references vertex out of range"
                    )));
                }
                if directed.insert((a, b), ti as u32).is_some() {
                    return Err(Error::Mesh(format!(
                        "edge ({a}, {b}) traversed twice in the same direction; winding is inconsistent"
                    )));
                }
            }
        }
        // A boundary edge is a directed edge without its opposite.
        let mut next_on_boundary: HashMap<u32, u32> = HashMap::new();
        for &(a, b) in directed.keys() {
            if !directed.contains_key(&(b, a)) && next_on_boundary.insert(a, b).is_some() {
                return Err(Error::Mesh(format!(
                    "vertex {a} has multiple outgoing boundary edges (non-manifold boundary)"
                )));
            }
        }
        let mut boundary_loops = Vec::new();
        let mut seen: Vec<u32> = next_on_boundary.keys().copied().collect();
        seen.sort_unstable();
        let mut visited: HashMap<u32, bool> = HashMap::new();
        for &start in &seen {
            if visited.get(&start).copied().unwrap_or(false) {
                continue;
            }
            let mut cycle = vec![start];
            visited.insert(start, true);
            let mut cur = next_on_boundary[&start];
            let mut guard = 0;
            while cur != start {
                cycle.push(cur);
                visited.insert(cur, true);
                cur = *next_on_boundary
                    .get(&cur)
                    .ok_or_else(|| Error::Mesh(format!("boundary chain broken at vertex {cur}")))?;
                guard += 1;
                if guard > next_on_boundary.len() {
                    return Err(Error::Mesh("boundary loop does not close".into()));
                }
            }
            boundary_loops.push(cycle);
        }

        Ok(Self {
            vertices,
            triangles,
            boundary_loops,
        })
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_loops.is_empty()
    }

    pub fn triangle_points(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    /// Unnormalized normal (twice the area vector) of a triangle.
    pub fn triangle_normal_area(&self, t: usize) -> Vec3 {
        let [p0, p1, p2] = self.triangle_points(t);
        vec3::cross(vec3::sub(p1, p0), vec3::sub(p2, p0))
    }

    pub fn triangle_centroid(&self, t: usize) -> Vec3 {
        let [p0, p1, p2] = self.triangle_points(t);
        vec3::scale(vec3::add(vec3::add(p0, p1), p2), 1.0 / 3.0)
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| 0.5 * vec3::norm(self.triangle_normal_area(t)))
            .sum()
    }

    /// Signed volume by the divergence theorem; positive when the winding
    /// points outward. Only meaningful for closed meshes.
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let a = self.vertices[t[0] as usize];
                let b = self.vertices[t[1] as usize];
                let c = self.vertices[t[2] as usize];
                vec3::dot(a, vec3::cross(b, c)) / 6.0
            })
            .sum()
    }

    /// V − E + F.
    pub fn euler_characteristic(&self) -> i64 {
        let mut edges: Vec<(u32, u32)> = Vec::with_capacity(self.triangles.len() * 3);
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.push((a.min(b), a.max(b)));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        self.vertices.len() as i64 - edges.len() as i64 + self.triangles.len() as i64
    }

    pub fn bbox(&self) -> Aabb {
        let mut bb = Aabb::empty();
        for &v in &self.vertices {
            bb.grow(v);
        }
        bb
    }

    /// Tessellation flatness statistics over the smooth (non-crease)
    /// edges: `(max sagitta, max dihedral angle)`. The sagitta of an edge
    /// is `ℓ·θ/8` with θ the dihedral between the adjacent triangle
    /// normals (a circular arc of curvature radius ℓ/θ). Crease edges
    /// (θ ≥ 0.5 rad) are intentional geometry and are skipped.
    pub fn smoothness_stats(&self) -> (f64, f64) {
        let mut normals = Vec::with_capacity(self.triangles.len());
        for t in 0..self.triangles.len() {
            normals.push(vec3::normalize(self.triangle_normal_area(t)));
        }
        let mut edge_tri: HashMap<(u32, u32), u32> = HashMap::new();
        let mut worst_sagitta = 0.0f64;
        let mut worst_angle = 0.0f64;
        for (ti, t) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if let Some(&other) = edge_tri.get(&(b, a)) {
                    let cosang = vec3::dot(normals[ti], normals[other as usize]).clamp(-1.0, 1.0);
                    let ang = cosang.acos();
                    if ang < 0.5 {
                        let len = vec3::dist(self.vertices[a as usize], self.vertices[b as usize]);
                        worst_sagitta = worst_sagitta.max(len * ang / 8.0);
                        worst_angle = worst_angle.max(ang);
                    }
                } else {
                    edge_tri.insert((a, b), ti as u32);
                }
            }
        }
        (worst_sagitta, worst_angle)
    }

    /// Max sagitta over smooth edges; see [`TriMesh::smoothness_stats`].
    pub fn max_smooth_sagitta(&self) -> f64 {
        self.smoothness_stats().0
    }

    pub fn max_edge_len(&self) -> f64 {
        let mut m = 0.0f64;
        for t in &self.triangles {
            let [p0, p1, p2] = [
                self.vertices[t[0] as usize],
                self.vertices[t[1] as usize],
                self.vertices[t[2] as usize],
            ];
            m = m
                .max(vec3::dist(p0, p1))
                .max(vec3::dist(p1, p2))
                .max(vec3::dist(p2, p0));
        }
        m
    }

    /// Reverse all windings.
    pub fn flip_orientation(&mut self) {
        for t in &mut self.triangles {
            t.swap(1, 2);
        }
        for l in &mut self.boundary_loops {
            l.reverse();
        }
    }

    /// Rigidly move the mesh: rotate about `axis` by `angle`, then translate.
    pub fn rigid_transformed(&self, axis: Vec3, angle: f64, translation: Vec3) -> TriMesh {
        let vertices = self
            .vertices
            .iter()
            .map(|&v| vec3::add(vec3::rotate_about(v, axis, angle), translation))
            .collect();
        TriMesh {
            vertices,
            triangles: self.triangles.clone(),
            boundary_loops: self.boundary_loops.clone(),
        }
    }

    /// Append another mesh (disjoint union).
    pub fn merged(&self, other: &TriMesh) -> Result<TriMesh> {
        let off = self.vertices.len() as u32;
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut triangles = self.triangles.clone();
        triangles.extend(
            other
                .triangles
                .iter()
                .map(|t| [t[0] + off, t[1] + off, t[2] + off]),
        );
        TriMesh::new(vertices, triangles)
    }

    /// Close one boundary loop with a triangle fan to its centroid. The fan
    /// winding is forced by the existing triangles (a boundary loop is
    /// traversed with the surface on a fixed side), so the mesh stays
    /// consistently oriented.
    pub fn capped_loop(&self, loop_index: usize) -> Result<TriMesh> {
        let cycle = self
            .boundary_loops
            .get(loop_index)
            .ok_or_else(|| Error::Mesh(format!("no boundary loop {loop_index}")))?
            .clone();
        let centroid = cycle.iter().fold([0.0; 3], |acc, &i| {
            vec3::add(acc, self.vertices[i as usize])
        });
        let centroid = vec3::scale(centroid, 1.0 / cycle.len() as f64);

        let mut vertices = self.vertices.clone();
        let c_idx = vertices.len() as u32;
        vertices.push(centroid);
        let mut triangles = self.triangles.clone();
        for k in 0..cycle.len() {
            let a = cycle[k];
            let b = cycle[(k + 1) % cycle.len()];
            triangles.push([b, a, c_idx]);
        }
        TriMesh::new(vertices, triangles)
    }

    /// Close every boundary loop with a centroid fan, keeping the winding
    /// consistent with the existing triangles.
    pub fn capped_all(&self) -> Result<TriMesh> {
        let mut mesh = self.clone();
        while !mesh.boundary_loops.is_empty() {
            let cycle = mesh.boundary_loops[0].clone();
            let centroid = cycle.iter().fold([0.0; 3], |acc, &i| {
                vec3::add(acc, mesh.vertices[i as usize])
            });
            let centroid = vec3::scale(centroid, 1.0 / cycle.len() as f64);
            let c_idx = mesh.vertices.len() as u32;
            let mut vertices = mesh.vertices;
            vertices.push(centroid);
            let mut triangles = mesh.triangles;
            for k in 0..cycle.len() {
                let a = cycle[k];
                let b = cycle[(k + 1) % cycle.len()];
                triangles.push([b, a, c_idx]);
            }
            mesh = TriMesh::new(vertices, triangles)?;
        }
        Ok(mesh)
    }

    /// Write Wavefront OBJ (`v x y z`, `f i j k`, 1-based).
    pub fn write_obj(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        for v in &self.vertices {
            writeln!(out, "v {} {} {}", v[0], v[1], v[2])?;
        }
        for t in &self.triangles {
            writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        Ok(())
    }

    /// Read a triangle-only OBJ; faces with more than three vertices are
    /// fan-triangulated.
    pub fn read_obj(path: impl AsRef<Path>) -> Result<TriMesh> {
        let file = std::fs::File::open(path)?;
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            let mut it = line.split_whitespace();
            match it.next() {
                Some("v") => {
                    let mut p = [0.0; 3];
                    for coord in &mut p {
                        *coord = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| {
                            Error::Parse(format!("bad vertex on line {}", lineno + 1))
                        })?;
                    }
                    vertices.push(p);
                }
                Some("f") => {
                    let idx: Vec<u32> = it
                        .map(|tok| {
                            tok.split('/')
                                .next()
                                .and_then(|s| s.parse::<i64>().ok())
                                .filter(|&i| i > 0)
                                .map(|i| (i - 1) as u32)
                                .ok_or_else(|| {
                                    Error::Parse(format!("bad face index on line {}", lineno + 1))
                                })
                        })
                        .collect::<Result<_>>()?;
                    if idx.len() < 3 {
                        return Err(Error::Parse(format!(
                            "face with fewer than 3 vertices on line {}",
                            lineno + 1
                        )));
                    }
                    for k in 1..idx.len() - 1 {
                        triangles.push([idx[0], idx[k], idx[k + 1]]);
                    }
                }
                _ => {}
            }
        }
        TriMesh::new(vertices, triangles)
    }
}

/// Revolve a resampled span of the generating curve about the z-axis.
///
/// Rings are uniform in arclength; boundary loops are the parallels at the
/// ends of `s_range`. Triangle normals follow the mean-curvature
/// orientation of the profile.
pub fn revolve(
    curve: &ProfileCurve,
    s_range: (f64, f64),
    n_rings: usize,
    n_theta: usize,
) -> Result<TriMesh> {
    revolve_with_offset(curve, s_range, n_rings, n_theta, |_, _| 0.0)
}

/// [`revolve`] with a radial perturbation `offset(z, θ)` added to the radius.
pub fn revolve_with_offset(
    curve: &ProfileCurve,
    s_range: (f64, f64),
    n_rings: usize,
    n_theta: usize,
    offset: impl Fn(f64, f64) -> f64,
) -> Result<TriMesh> {
    if n_theta < 8 {
        return Err(Error::InvalidParameter(format!(
            "revolve needs n_theta >= 8, got {n_theta}"
        )));
    }
    if n_rings < 2 {
        return Err(Error::InvalidParameter("revolve needs n_rings >= 2".into()));
    }
    let states = curve.resample(s_range.0, s_range.1, n_rings);
    let scale = states
        .iter()
        .fold(0.0f64, |m, p| m.max(p.y.abs()).max(p.z.abs()));
    for w in states.windows(2) {
        let dy = w[1].y - w[0].y;
        let dz = w[1].z - w[0].z;
        if (dy * dy + dz * dz).sqrt() < 1e-14 * scale.max(1.0) {
            return Err(Error::DegenerateStrip { s: w[0].s });
        }
    }

    let mut vertices = Vec::with_capacity(n_rings * n_theta);
    for st in &states {
        for j in 0..n_theta {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
            let r = st.y + offset(st.z, theta);
            vertices.push([r * theta.cos(), r * theta.sin(), st.z]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * (n_rings - 1) * n_theta);
    let idx = |i: usize, j: usize| (i * n_theta + (j % n_theta)) as u32;
    for i in 0..n_rings - 1 {
        for j in 0..n_theta {
            triangles.push([idx(i, j), idx(i + 1, j), idx(i, j + 1)]);
            triangles.push([idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    TriMesh::new(vertices, triangles)
}

/// Revolve a polyline profile `(y, z)` about the vertical axis through
/// `(center_x, center_y)`. Endpoints with `y = 0` become apex vertices, so
/// domes and caps close cleanly.
pub fn revolve_polyline(
    profile: &[[f64; 2]],
    center_xy: [f64; 2],
    n_theta: usize,
) -> Result<TriMesh> {
    if n_theta < 8 {
        return Err(Error::InvalidParameter(format!(
            "revolve needs n_theta >= 8, got {n_theta}"
        )));
    }
    if profile.len() < 2 {
        return Err(Error::InvalidParameter(
            "profile needs at least 2 points".into(),
        ));
    }
    if profile.iter().any(|p| p[0] < 0.0) {
        return Err(Error::InvalidParameter("profile radii must be >= 0".into()));
    }
    if profile[1..profile.len().max(2) - 1]
        .iter()
        .any(|p| p[0] == 0.0)
    {
        return Err(Error::InvalidParameter(
            "only profile endpoints may touch the axis".into(),
        ));
    }

    let apex_start = profile[0][0] == 0.0;
    let apex_end = profile[profile.len() - 1][0] == 0.0;
    let ring_range = {
        let lo = usize::from(apex_start);
        let hi = profile.len() - usize::from(apex_end);
        lo..hi
    };
    let rings: Vec<[f64; 2]> = profile[ring_range].to_vec();
    if rings.is_empty() {
        return Err(Error::InvalidParameter("profile is all axis points".into()));
    }

    let mut vertices = Vec::with_capacity(rings.len() * n_theta + 2);
    for p in &rings {
        for j in 0..n_theta {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
            vertices.push([
                center_xy[0] + p[0] * theta.cos(),
                center_xy[1] + p[0] * theta.sin(),
                p[1],
            ]);
        }
    }
    let idx = |i: usize, j: usize| (i * n_theta + (j % n_theta)) as u32;
    let mut triangles = Vec::new();
    for i in 0..rings.len() - 1 {
        for j in 0..n_theta {
            triangles.push([idx(i, j), idx(i + 1, j), idx(i, j + 1)]);
            triangles.push([idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    if apex_start {
        let apex = vertices.len() as u32;
        vertices.push([center_xy[0], center_xy[1], profile[0][1]]);
        for j in 0..n_theta {
            triangles.push([apex, idx(0, j), idx(0, j + 1)]);
        }
    }
    if apex_end {
        let apex = vertices.len() as u32;
        vertices.push([center_xy[0], center_xy[1], profile[profile.len() - 1][1]]);
        let last = rings.len() - 1;
        for j in 0..n_theta {
            triangles.push([apex, idx(last, j + 1), idx(last, j)]);
        }
    }
    TriMesh::new(vertices, triangles)
}

/// A horizontal disk (triangle fan) with its normal along ±e₃.
pub fn horizontal_disk(center: Vec3, radius: f64, n_theta: usize, normal_up: bool) -> TriMesh {
    let mut vertices = Vec::with_capacity(n_theta + 1);
    for j in 0..n_theta {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
        vertices.push([
            center[0] + radius * theta.cos(),
            center[1] + radius * theta.sin(),
            center[2],
        ]);
    }
    vertices.push(center);
    let c = n_theta as u32;
    let mut triangles = Vec::with_capacity(n_theta);
    for j in 0..n_theta as u32 {
        let a = j;
        let b = (j + 1) % n_theta as u32;
        if normal_up {
            triangles.push([a, b, c]);
        } else {
            triangles.push([b, a, c]);
        }
    }
    TriMesh::new(vertices, triangles).expect("disk fan is manifold")
}

/// Closed lat-long sphere mesh with outward winding.
pub fn sphere_mesh(center: Vec3, radius: f64, n_theta: usize, n_phi: usize) -> TriMesh {
    assert!(n_theta >= 8 && n_phi >= 4);
    let mut vertices = Vec::new();
    // Interior latitude rings (poles handled as single vertices).
    for i in 1..n_phi {
        let phi = std::f64::consts::PI * i as f64 / n_phi as f64;
        for j in 0..n_theta {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
            vertices.push([
                center[0] + radius * phi.sin() * theta.cos(),
                center[1] + radius * phi.sin() * theta.sin(),
                center[2] + radius * phi.cos(),
            ]);
        }
    }
    let north = vertices.len() as u32;
    vertices.push([center[0], center[1], center[2] + radius]);
    let south = vertices.len() as u32;
    vertices.push([center[0], center[1], center[2] - radius]);

    let idx = |i: usize, j: usize| (i * n_theta + (j % n_theta)) as u32;
    let mut triangles = Vec::new();
    for j in 0..n_theta {
        // North cap (ring 0 is the closest to the north pole).
        triangles.push([north, idx(0, j), idx(0, j + 1)]);
        // South cap.
        triangles.push([south, idx(n_phi - 2, j + 1), idx(n_phi - 2, j)]);
    }
    for i in 0..n_phi - 2 {
        for j in 0..n_theta {
            triangles.push([idx(i, j), idx(i + 1, j), idx(i, j + 1)]);
            triangles.push([idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    let mut mesh = TriMesh::new(vertices, triangles).expect("sphere mesh is manifold");
    if mesh.signed_volume() < 0.0 {
        mesh.flip_orientation();
    }
    mesh
}

/// A closed round cylinder with axis tilted in the xz-plane, cut by the
/// horizontal planes z = 0 and z = height, with planar elliptic caps.
///
/// The boundary ellipses have their major axis along e₁ (the tilt
/// direction); the only mirror plane of the solid has normal e₂.
pub fn tilted_cylinder(
    radius: f64,
    tilt: f64,
    height: f64,
    n_theta: usize,
    n_rings: usize,
) -> Result<TriMesh> {
    if !(radius > 0.0 && height > 0.0) || tilt.abs() >= 1.2 || tilt.is_nan() {
        return Err(Error::InvalidParameter(
            "tilted_cylinder needs radius, height > 0 and |tilt| < 1.2 rad".into(),
        ));
    }
    let (sin_phi, cos_phi) = tilt.sin_cos();
    let u = [cos_phi, 0.0, -sin_phi];
    let v = [0.0, 1.0, 0.0];
    let w = [sin_phi, 0.0, cos_phi];

    let mut vertices = Vec::with_capacity((n_rings + 1) * n_theta + 2);
    for i in 0..=n_rings {
        let f = i as f64 / n_rings as f64;
        for j in 0..n_theta {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
            let circ = vec3::add(
                vec3::scale(u, radius * theta.cos()),
                vec3::scale(v, radius * theta.sin()),
            );
            // Axis parameter at which the generator line crosses z = 0 / z = h.
            let s0 = -circ[2] / cos_phi;
            let s1 = (height - circ[2]) / cos_phi;
            let s = s0 + f * (s1 - s0);
            vertices.push(vec3::add(circ, vec3::scale(w, s)));
        }
    }
    let bottom_center = vertices.len() as u32;
    vertices.push([0.0, 0.0, 0.0]);
    let top_center = vertices.len() as u32;
    vertices.push([height * tilt.tan(), 0.0, height]);

    let idx = |i: usize, j: usize| (i * n_theta + (j % n_theta)) as u32;
    let mut triangles = Vec::new();
    for i in 0..n_rings {
        for j in 0..n_theta {
            triangles.push([idx(i, j), idx(i + 1, j), idx(i, j + 1)]);
            triangles.push([idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    for j in 0..n_theta {
        triangles.push([bottom_center, idx(0, j), idx(0, j + 1)]);
        triangles.push([top_center, idx(n_rings, j + 1), idx(n_rings, j)]);
    }
    let mut mesh = TriMesh::new(vertices, triangles)?;
    if mesh.signed_volume() < 0.0 {
        mesh.flip_orientation();
    }
    Ok(mesh)
}
