//! Axis-aligned bounding-volume hierarchy over mesh triangles.
//!
//! Supports full-line intersection queries (every hit along `p + t·d`,
//! t ∈ ℝ), parity-based inside tests with jittered retries on edge-grazing
//! hits, and closest-point distance queries.

use crate::mesh::{Aabb, TriMesh};
use crate::vec3::{self, Vec3};

const LEAF_SIZE: usize = 8;

/// A triangle hit along a line.
#[derive(Debug, Clone, Copy)]
pub struct LineHit {
    /// Line parameter of the hit point.
    pub t: f64,
    /// Triangle index in the source mesh.
    pub tri: u32,
    /// Unit normal from the triangle winding.
    pub normal: Vec3,
    /// Smallest barycentric coordinate: near zero means an edge graze.
    pub min_bary: f64,
}

#[derive(Debug, Clone)]
struct Node {
    bbox: Aabb,
    /// Leaf: range into `order`. Inner: children indices.
    left: u32,
    right: u32,
    start: u32,
    count: u32,
}

#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
    tris: Vec<[Vec3; 3]>,
}

impl Bvh {
    pub fn build(mesh: &TriMesh) -> Self {
        let tris: Vec<[Vec3; 3]> = (0..mesh.triangles.len())
            .map(|t| mesh.triangle_points(t))
            .collect();
        let centroids: Vec<Vec3> = tris
            .iter()
            .map(|t| vec3::scale(vec3::add(vec3::add(t[0], t[1]), t[2]), 1.0 / 3.0))
            .collect();
        let mut order: Vec<u32> = (0..tris.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * tris.len().max(1));
        let n = order.len();
        build_node(&tris, &centroids, &mut order, 0, n, &mut nodes);
        Self { nodes, order, tris }
    }

    /// Every intersection of the full line `origin + t·dir` with the mesh.
    /// Hits are sorted by increasing `t`.
    pub fn line_hits(&self, origin: Vec3, dir: Vec3) -> Vec<LineHit> {
        let mut hits = Vec::new();
        if self.tris.is_empty() {
            return hits;
        }
        let inv = [1.0 / dir[0], 1.0 / dir[1], 1.0 / dir[2]];
        let mut stack = vec![0usize];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni];
            if !line_intersects_aabb(&node.bbox, origin, inv) {
                continue;
            }
            if node.count > 0 {
                for k in node.start..node.start + node.count {
                    let ti = self.order[k as usize];
                    if let Some(hit) = line_triangle(&self.tris[ti as usize], origin, dir) {
                        hits.push(LineHit {
                            t: hit.0,
                            tri: ti,
                            normal: hit.1,
                            min_bary: hit.2,
                        });
                    }
                }
            } else {
                stack.push(node.left as usize);
                stack.push(node.right as usize);
            }
        }
        hits.sort_by(|a, b| a.t.partial_cmp(&b.t).expect("finite hit parameters"));
        // A line through a shared edge or vertex reports once per incident
        // triangle; collapse those, keeping the most interior hit.
        let scale = 1.0 + hits.iter().fold(0.0f64, |m, h| m.max(h.t.abs()));
        let mut dedup: Vec<LineHit> = Vec::with_capacity(hits.len());
        for h in hits {
            match dedup.last_mut() {
                Some(prev) if (h.t - prev.t).abs() < 1e-9 * scale => {
                    if h.min_bary > prev.min_bary {
                        *prev = h;
                    }
                }
                _ => dedup.push(h),
            }
        }
        dedup
    }

    /// Parity test against a closed mesh. Edge-grazing directions are
    /// retried with a deterministic jitter sequence.
    pub fn is_inside(&self, point: Vec3) -> bool {
        for attempt in 0..16 {
            let dir = jitter_direction(attempt);
            let hits = self.line_hits(point, dir);
            let mut clean = true;
            let mut crossings = 0usize;
            for h in &hits {
                if h.t <= 0.0 {
                    continue;
                }
                if h.min_bary < 1e-9 {
                    clean = false;
                    break;
                }
                crossings += 1;
            }
            if clean {
                return crossings % 2 == 1;
            }
        }
        // Pathological point (on an edge from every direction tried);
        // classify by the last parity anyway.
        let hits = self.line_hits(point, jitter_direction(0));
        hits.iter().filter(|h| h.t > 0.0).count() % 2 == 1
    }

    /// Distance from a point to the mesh surface.
    pub fn distance(&self, point: Vec3) -> f64 {
        if self.tris.is_empty() {
            return f64::INFINITY;
        }
        let mut best = f64::INFINITY;
        // Depth-first with box-distance pruning, nearer child first.
        let mut stack = vec![0usize];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni];
            if aabb_distance_sq(&node.bbox, point) >= best * best {
                continue;
            }
            if node.count > 0 {
                for k in node.start..node.start + node.count {
                    let ti = self.order[k as usize];
                    let d = point_triangle_distance(point, &self.tris[ti as usize]);
                    best = best.min(d);
                }
            } else {
                let dl = aabb_distance_sq(&self.nodes[node.left as usize].bbox, point);
                let dr = aabb_distance_sq(&self.nodes[node.right as usize].bbox, point);
                if dl < dr {
                    stack.push(node.right as usize);
                    stack.push(node.left as usize);
                } else {
                    stack.push(node.left as usize);
                    stack.push(node.right as usize);
                }
            }
        }
        best
    }
}

fn build_node(
    tris: &[[Vec3; 3]],
    centroids: &[Vec3],
    order: &mut [u32],
    start: usize,
    count: usize,
    nodes: &mut Vec<Node>,
) -> u32 {
    let mut bbox = Aabb::empty();
    for &ti in &order[start..start + count] {
        for p in &tris[ti as usize] {
            bbox.grow(*p);
        }
    }
    let idx = nodes.len() as u32;
    nodes.push(Node {
        bbox,
        left: 0,
        right: 0,
        start: start as u32,
        count: count as u32,
    });
    if count <= LEAF_SIZE {
        return idx;
    }
    // Split at the centroid median along the widest axis.
    let mut axis = 0;
    let mut width = 0.0;
    for k in 0..3 {
        let w = bbox.max[k] - bbox.min[k];
        if w > width {
            width = w;
            axis = k;
        }
    }
    let mid = start + count / 2;
    order[start..start + count].select_nth_unstable_by(count / 2, |&a, &b| {
        centroids[a as usize][axis]
            .partial_cmp(&centroids[b as usize][axis])
            .expect("finite centroids")
    });
    let left = build_node(tris, centroids, order, start, mid - start, nodes);
    let right = build_node(tris, centroids, order, mid, start + count - mid, nodes);
    nodes[idx as usize].left = left;
    nodes[idx as usize].right = right;
    nodes[idx as usize].count = 0;
    idx
}

fn line_intersects_aabb(bb: &Aabb, origin: Vec3, inv_dir: Vec3) -> bool {
    let mut t_lo = f64::NEG_INFINITY;
    let mut t_hi = f64::INFINITY;
    for k in 0..3 {
        if inv_dir[k].is_finite() {
            let a = (bb.min[k] - origin[k]) * inv_dir[k];
            let b = (bb.max[k] - origin[k]) * inv_dir[k];
            t_lo = t_lo.max(a.min(b));
            t_hi = t_hi.min(a.max(b));
        } else if origin[k] < bb.min[k] || origin[k] > bb.max[k] {
            return false;
        }
    }
    t_hi >= t_lo
}

/// Möller–Trumbore without the t > 0 constraint. Returns
/// `(t, unit normal, min barycentric)`.
fn line_triangle(tri: &[Vec3; 3], origin: Vec3, dir: Vec3) -> Option<(f64, Vec3, f64)> {
    let e1 = vec3::sub(tri[1], tri[0]);
    let e2 = vec3::sub(tri[2], tri[0]);
    let p = vec3::cross(dir, e2);
    let det = vec3::dot(e1, p);
    if det.abs() < 1e-300 {
        return None;
    }
    let inv_det = 1.0 / det;
    let s = vec3::sub(origin, tri[0]);
    let u = vec3::dot(s, p) * inv_det;
    if !(-1e-12..=1.0 + 1e-12).contains(&u) {
        return None;
    }
    let q = vec3::cross(s, e1);
    let v = vec3::dot(dir, q) * inv_det;
    if v < -1e-12 || u + v > 1.0 + 1e-12 {
        return None;
    }
    let t = vec3::dot(e2, q) * inv_det;
    let n = vec3::normalize(vec3::cross(e1, e2));
    let min_bary = u.min(v).min(1.0 - u - v);
    Some((t, n, min_bary))
}

#[allow(clippy::needless_range_loop)]
fn aabb_distance_sq(bb: &Aabb, p: Vec3) -> f64 {
    let mut d2 = 0.0;
    for k in 0..3 {
        let d = (bb.min[k] - p[k]).max(0.0).max(p[k] - bb.max[k]);
        d2 += d * d;
    }
    d2
}

/// Closest distance from a point to a triangle (region-based).
pub fn point_triangle_distance(p: Vec3, tri: &[Vec3; 3]) -> f64 {
    let ab = vec3::sub(tri[1], tri[0]);
    let ac = vec3::sub(tri[2], tri[0]);
    let ap = vec3::sub(p, tri[0]);

    let d1 = vec3::dot(ab, ap);
    let d2 = vec3::dot(ac, ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return vec3::norm(ap);
    }

    let bp = vec3::sub(p, tri[1]);
    let d3 = vec3::dot(ab, bp);
    let d4 = vec3::dot(ac, bp);
    if d3 >= 0.0 && d4 <= d3 {
        return vec3::norm(bp);
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return vec3::dist(p, vec3::add(tri[0], vec3::scale(ab, v)));
    }

    let cp = vec3::sub(p, tri[2]);
    let d5 = vec3::dot(ab, cp);
    let d6 = vec3::dot(ac, cp);
    if d6 >= 0.0 && d5 <= d6 {
        return vec3::norm(cp);
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return vec3::dist(p, vec3::add(tri[0], vec3::scale(ac, w)));
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return vec3::dist(
            p,
            vec3::add(tri[1], vec3::scale(vec3::sub(tri[2], tri[1]), w)),
        );
    }

    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    let closest = vec3::add(tri[0], vec3::add(vec3::scale(ab, v), vec3::scale(ac, w)));
    vec3::dist(p, closest)
}

/// Deterministic jitter sequence of unit directions for parity retries.
fn jitter_direction(attempt: usize) -> Vec3 {
    // Low-discrepancy-ish angles; the first is a fixed irrational direction.
    let a = 0.5380850 + attempt as f64 * 0.7639320;
    let b = 1.1755705 + attempt as f64 * 0.5097955;
    vec3::normalize([a.cos() * b.sin(), a.sin() * b.sin(), b.cos()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::sphere_mesh;

    #[test]
    fn sphere_line_hits_and_parity() {
        let mesh = sphere_mesh([0.0; 3], 1.0, 48, 24);
        let bvh = Bvh::build(&mesh);
        let hits = bvh.line_hits([0.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
        assert_eq!(hits.len(), 2);
        assert!((hits[0].t + 1.0).abs() < 0.01);
        assert!((hits[1].t - 1.0).abs() < 0.01);

        assert!(bvh.is_inside([0.0, 0.0, 0.0]));
        assert!(bvh.is_inside([0.5, 0.3, 0.2]));
        assert!(!bvh.is_inside([1.5, 0.0, 0.0]));
        assert!(!bvh.is_inside([0.9, 0.9, 0.9]));
    }

    #[test]
    fn distance_to_sphere() {
        let mesh = sphere_mesh([0.0; 3], 1.0, 96, 48);
        let bvh = Bvh::build(&mesh);
        // Interior and exterior points; the mesh is inscribed, so allow its sagitta.
        assert!((bvh.distance([0.0, 0.0, 0.0]) - 1.0).abs() < 3e-3);
        assert!((bvh.distance([2.0, 0.0, 0.0]) - 1.0).abs() < 3e-3);
        assert!(bvh.distance([0.0, 0.0, 1.0]) < 3e-3);
    }

    #[test]
    fn point_triangle_distance_regions() {
        let tri = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        // Above the interior.
        assert!((point_triangle_distance([0.2, 0.2, 1.0], &tri) - 1.0).abs() < 1e-15);
        // Nearest to a vertex.
        assert!((point_triangle_distance([-1.0, -1.0, 0.0], &tri) - 2f64.sqrt()).abs() < 1e-15);
        // Nearest to an edge.
        assert!((point_triangle_distance([0.5, -1.0, 0.0], &tri) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn line_hits_count_on_tangent_band() {
        // A line through the sphere center in a ring direction hits exactly twice
        // regardless of the tessellation seams.
        let mesh = sphere_mesh([0.0; 3], 1.0, 32, 16);
        let bvh = Bvh::build(&mesh);
        for k in 0..50 {
            let ang = k as f64 * 0.137;
            let dir = [ang.cos(), ang.sin(), 0.3 * (k as f64 * 0.61).sin()];
            let hits = bvh.line_hits([0.05, -0.02, 0.01], vec3::normalize(dir));
            assert_eq!(hits.len(), 2, "direction {k}");
        }
    }
}
