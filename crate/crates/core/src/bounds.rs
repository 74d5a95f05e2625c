//! Balance of end masses, the area inequalities, the minimum positive end
//! count, and the loop-parity check.
//!
//! These are advisory classifiers over user-supplied end configurations;
//! nothing here claims a surface realizing a configuration exists.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bvh::Bvh;
use crate::flux::{mass_of_end, EndSign, EndSpec};
use crate::mesh::{revolve_polyline, TriMesh};
use crate::vec3::{self, Vec3};
use crate::{Error, Result};

use std::f64::consts::PI;

/// Signed winding number of a closed planar polyline about `p`.
pub fn winding_number(polyline: &[[f64; 2]], p: [f64; 2]) -> Result<i64> {
    if polyline.len() < 3 {
        return Err(Error::InvalidParameter(
            "winding number needs a closed polyline with >= 3 vertices".into(),
        ));
    }
    // Scale-aware on-curve rejection.
    let scale = polyline.iter().fold(0.0f64, |m, q| {
        m.max((q[0] - p[0]).abs() + (q[1] - p[1]).abs())
    });
    let eps = 1e-12 * scale.max(1.0);

    let n = polyline.len();
    let mut w = 0i64;
    for i in 0..n {
        let a = polyline[i];
        let b = polyline[(i + 1) % n];
        if point_segment_distance(p, a, b) < eps {
            return Err(Error::PointOnCurve);
        }
        // Signed crossing of the horizontal ray from p.
        let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        if a[1] <= p[1] {
            if b[1] > p[1] && cross > 0.0 {
                w += 1;
            }
        } else if b[1] <= p[1] && cross < 0.0 {
            w -= 1;
        }
    }
    Ok(w)
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let d = [ap[0] - t * ab[0], ap[1] - t * ab[1]];
    (d[0] * d[0] + d[1] * d[1]).sqrt()
}

/// Planar loops in the boundary plane together with a marked point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanarLoopSet {
    pub loops: Vec<Vec<[f64; 2]>>,
    pub marked_point: [f64; 2],
}

impl PlanarLoopSet {
    /// Validates that the loops are simple and pairwise disjoint
    /// (quadratic segment test; the loop sets here are small).
    pub fn new(loops: Vec<Vec<[f64; 2]>>, marked_point: [f64; 2]) -> Result<Self> {
        let segs: Vec<(usize, [f64; 2], [f64; 2])> = loops
            .iter()
            .enumerate()
            .flat_map(|(li, l)| (0..l.len()).map(move |i| (li, l[i], l[(i + 1) % l.len()])))
            .collect();
        for (i, &(la, a0, a1)) in segs.iter().enumerate() {
            for &(lb, b0, b1) in segs.iter().skip(i + 1) {
                let adjacent = la == lb
                    && (points_eq(a0, b0)
                        || points_eq(a0, b1)
                        || points_eq(a1, b0)
                        || points_eq(a1, b1));
                if adjacent {
                    continue;
                }
                if segments_intersect(a0, a1, b0, b1) {
                    return Err(Error::InvalidParameter(format!(
                        "loops {la} and {lb} intersect"
                    )));
                }
            }
        }
        Ok(Self {
            loops,
            marked_point,
        })
    }

    pub fn nonzero_winding_count(&self) -> Result<usize> {
        let mut count = 0;
        for l in &self.loops {
            if winding_number(l, self.marked_point)? != 0 {
                count += 1;
            }
        }
        Ok(count)
    }
}

fn points_eq(a: [f64; 2], b: [f64; 2]) -> bool {
    a[0] == b[0] && a[1] == b[1]
}

fn segments_intersect(a0: [f64; 2], a1: [f64; 2], b0: [f64; 2], b1: [f64; 2]) -> bool {
    let d = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| {
        (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    };
    let d1 = d(a0, a1, b0);
    let d2 = d(a0, a1, b1);
    let d3 = d(b0, b1, a0);
    let d4 = d(b0, b1, a1);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Result of a loop-parity check on one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ParityOutcome {
    /// Winding number of each boundary loop about the ray's base point.
    pub windings: Vec<i64>,
    /// Number of boundary loops with nonzero winding.
    pub nonzero_count: usize,
    /// PASS iff the count is even (zero included).
    pub pass: bool,
}

/// Count boundary loops of `surface` that are non-contractible in the
/// plane minus the ray's base point, verifying the hypotheses: the surface
/// sits in the closed upper halfspace with its boundary in the plane, and
/// the ray avoids the surface.
pub fn loop_parity_check(surface: &TriMesh, ray: &[Vec3]) -> Result<ParityOutcome> {
    if ray.len() < 2 {
        return Err(Error::InvalidParameter(
            "ray polyline needs at least 2 points".into(),
        ));
    }
    let scale = surface.bbox().diagonal().max(1.0);
    let plane_tol = 1e-9 * scale;
    if surface.vertices.iter().any(|v| v[2] < -plane_tol) {
        return Err(Error::InvalidParameter(
            "surface must lie in the closed upper halfspace".into(),
        ));
    }
    for l in &surface.boundary_loops {
        for &vi in l {
            if surface.vertices[vi as usize][2].abs() > plane_tol {
                return Err(Error::InvalidParameter(
                    "surface boundary must lie in the plane z = 0".into(),
                ));
            }
        }
    }

    // The ray must avoid the surface.
    let bvh = Bvh::build(surface);
    for seg in ray.windows(2) {
        let dir = vec3::sub(seg[1], seg[0]);
        let len = vec3::norm(dir);
        if len == 0.0 {
            continue;
        }
        let dir = vec3::scale(dir, 1.0 / len);
        for h in bvh.line_hits(seg[0], dir) {
            if h.t > -plane_tol && h.t < len + plane_tol {
                return Err(Error::RayIntersectsSurface { t: h.t });
            }
        }
    }

    let p = [ray[0][0], ray[0][1]];
    let mut windings = Vec::with_capacity(surface.boundary_loops.len());
    for l in &surface.boundary_loops {
        let poly: Vec<[f64; 2]> = l
            .iter()
            .map(|&vi| {
                let v = surface.vertices[vi as usize];
                [v[0], v[1]]
            })
            .collect();
        windings.push(winding_number(&poly, p)?);
    }
    let nonzero_count = windings.iter().filter(|&&w| w != 0).count();
    Ok(ParityOutcome {
        windings,
        nonzero_count,
        pass: nonzero_count % 2 == 0,
    })
}

/// Signed mass balance: positive ends minus negative ends.
pub fn balance(ends: &[EndSpec]) -> f64 {
    ends.iter()
        .map(|e| {
            let m = mass_of_end(e);
            match e.sign {
                EndSign::Positive => m,
                EndSign::Negative => -m,
            }
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    InequalityHolds,
    InequalityViolated,
    /// Zero balance with ends present: the configuration is inconsistent
    /// with a non-compact surface, which would have to be compact.
    CompactForced,
}

/// Outcome of the area inequality for one end configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BalanceReport {
    pub disk_area: f64,
    pub positive_mass_sum: f64,
    pub negative_mass_sum: f64,
    pub balance: f64,
    pub verdict: Verdict,
    /// Lower bound on the positive end count, when a single (a, b) pair is
    /// implied by the positive ends (a from R + r = 2a).
    pub min_positive_ends: Option<u64>,
}

/// Evaluate the balance sign and the corresponding area inequality:
/// `|D| <= Σ_I W_i − Σ_J W_j` for non-negative balance and
/// `|D| >= Σ_J W_j − Σ_I W_i` otherwise. Zero balance with ends present is
/// flagged as compact-forced.
pub fn balance_verdict(disk_area: f64, ends: &[EndSpec]) -> Result<BalanceReport> {
    if !disk_area.is_finite() || disk_area <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "disk area must be positive, got {disk_area}"
        )));
    }
    for e in ends {
        e.validate()?;
    }
    let positive_mass_sum: f64 = ends
        .iter()
        .filter(|e| e.sign == EndSign::Positive)
        .map(mass_of_end)
        .sum();
    let negative_mass_sum: f64 = ends
        .iter()
        .filter(|e| e.sign == EndSign::Negative)
        .map(mass_of_end)
        .sum();
    let bal = positive_mass_sum - negative_mass_sum;

    let mass_scale = positive_mass_sum + negative_mass_sum;
    let verdict = if !ends.is_empty() && bal.abs() <= 1e-12 * mass_scale.max(1.0) {
        Verdict::CompactForced
    } else if bal >= 0.0 {
        if disk_area <= bal {
            Verdict::InequalityHolds
        } else {
            Verdict::InequalityViolated
        }
    } else if disk_area >= -bal {
        Verdict::InequalityHolds
    } else {
        Verdict::InequalityViolated
    };

    // Infer (a, b) from the positive ends when they agree.
    let min_positive = {
        let pos: Vec<&EndSpec> = ends
            .iter()
            .filter(|e| e.sign == EndSign::Positive)
            .collect();
        if pos.is_empty() {
            None
        } else {
            let a0 = 0.5 * (pos[0].r_big + pos[0].r_small);
            let b0 = pos[0].b;
            let consistent = pos.iter().all(|e| {
                (0.5 * (e.r_big + e.r_small) - a0).abs() < 1e-9 * a0.max(1.0)
                    && (e.b - b0).abs() < 1e-9 * b0.max(1.0)
            });
            if consistent && a0 > 0.0 {
                let r = (disk_area / PI).sqrt();
                Some(min_positive_ends(r, a0, b0))
            } else {
                None
            }
        }
    };

    Ok(BalanceReport {
        disk_area,
        positive_mass_sum,
        negative_mass_sum,
        balance: bal,
        verdict,
        min_positive_ends: min_positive,
    })
}

/// Integer lower bound `⌈r²/(2a² + b)⌉` on the number of positive ends of
/// a non-compact configuration with boundary circle radius `r`. An exactly
/// integral ratio resolves to that integer.
pub fn min_positive_ends(boundary_radius: f64, a: f64, b: f64) -> u64 {
    min_ends_from_ratio(boundary_radius * boundary_radius / (2.0 * a * a + b))
}

/// Variant with the sharper denominator `a² + b` (from `Rr <= a²`).
pub fn min_positive_ends_sharp(boundary_radius: f64, a: f64, b: f64) -> u64 {
    min_ends_from_ratio(boundary_radius * boundary_radius / (a * a + b))
}

fn min_ends_from_ratio(x: f64) -> u64 {
    assert!(x >= 0.0 && x.is_finite());
    let rounded = x.round();
    if (x - rounded).abs() < 1e-9 * (1.0 + x) {
        rounded as u64
    } else {
        x.ceil() as u64
    }
}

/// One randomized loop-parity trial.
#[derive(Debug, Clone, Serialize)]
pub struct ParityTrial {
    pub seed: u64,
    pub loop_count: usize,
    pub nonzero_count: usize,
    pub pass: bool,
}

/// Build a random valid configuration (domes and tube arches over the
/// plane, footprints avoiding the vertical ray through the origin) and run
/// the parity check on it.
pub fn run_parity_trial(seed: u64, n_theta: usize) -> Result<ParityTrial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mesh: Option<TriMesh> = None;

    // Concentric tube arches around the origin: each contributes two
    // loops winding about the marked point.
    let n_rings_around = rng.gen_range(0..=2);
    let mut inner = 0.0;
    for _ in 0..n_rings_around {
        let r_in = inner + rng.gen_range(0.3..0.6);
        let r_out = r_in + rng.gen_range(0.2..0.5);
        inner = r_out;
        let tube = tube_arch(r_in, r_out, [0.0, 0.0], n_theta)?;
        mesh = Some(match mesh {
            Some(m) => m.merged(&tube)?,
            None => tube,
        });
    }

    // Off-origin components whose footprints avoid the ray and each other.
    let n_extra = rng.gen_range(0..=2);
    let mut placed: Vec<([f64; 2], f64)> = vec![([0.0, 0.0], inner)];
    for _ in 0..n_extra {
        let mut attempt = 0;
        loop {
            attempt += 1;
            if attempt > 40 {
                break;
            }
            let ang = rng.gen_range(0.0..2.0 * PI);
            let dist = rng.gen_range(inner + 1.0..inner + 4.0);
            let rad = rng.gen_range(0.2..0.8);
            let c = [dist * ang.cos(), dist * ang.sin()];
            let clear = placed.iter().all(|&(pc, pr)| {
                let d = ((c[0] - pc[0]).powi(2) + (c[1] - pc[1]).powi(2)).sqrt();
                d > pr + rad + 0.1
            }) && dist > rad + 0.1;
            if !clear {
                continue;
            }
            let comp = if rng.gen_bool(0.5) {
                dome(rad, c, n_theta)?
            } else {
                tube_arch(rad * rng.gen_range(0.3..0.7), rad, c, n_theta)?
            };
            mesh = Some(match mesh {
                Some(m) => m.merged(&comp)?,
                None => comp,
            });
            placed.push((c, rad));
            break;
        }
    }

    let mesh = match mesh {
        Some(m) => m,
        // Nothing got placed: a lone off-origin dome.
        None => dome(0.5, [2.0, 0.0], n_theta)?,
    };

    let top = mesh.bbox().max[2] + 1.0;
    let ray = vec![[0.0, 0.0, 0.0], [0.0, 0.0, top]];
    let outcome = loop_parity_check(&mesh, &ray)?;
    Ok(ParityTrial {
        seed,
        loop_count: mesh.boundary_loops.len(),
        nonzero_count: outcome.nonzero_count,
        pass: outcome.pass,
    })
}

/// Deterministic batch of parity trials (seed + index per trial).
pub fn run_parity_trials(n: usize, base_seed: u64, n_theta: usize) -> Result<Vec<ParityTrial>> {
    (0..n)
        .map(|i| run_parity_trial(base_seed.wrapping_add(i as u64), n_theta))
        .collect()
}

/// Hemispherical dome over the circle of the given radius.
fn dome(radius: f64, center_xy: [f64; 2], n_theta: usize) -> Result<TriMesh> {
    let n = 8;
    let mut profile: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let phi = 0.5 * PI * i as f64 / n as f64;
            [radius * phi.cos(), radius * phi.sin()]
        })
        .collect();
    profile.push([0.0, radius]); // exact apex on the axis
    revolve_polyline(&profile, center_xy, n_theta)
}

/// Half-torus arch joining concentric circles of radii r_in < r_out.
fn tube_arch(r_in: f64, r_out: f64, center_xy: [f64; 2], n_theta: usize) -> Result<TriMesh> {
    let mid = 0.5 * (r_in + r_out);
    let amp = 0.5 * (r_out - r_in);
    let n = 12;
    let profile: Vec<[f64; 2]> = (0..=n)
        .map(|i| {
            let phi = PI * i as f64 / n as f64;
            [mid + amp * phi.cos(), amp * phi.sin()]
        })
        .collect();
    revolve_polyline(&profile, center_xy, n_theta)
}
