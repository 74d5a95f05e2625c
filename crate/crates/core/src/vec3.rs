//! Minimal 3-vector helpers over `[f64; 3]`.

pub type Vec3 = [f64; 3];

pub const E1: Vec3 = [1.0, 0.0, 0.0];
pub const E2: Vec3 = [0.0, 1.0, 0.0];
pub const E3: Vec3 = [0.0, 0.0, 1.0];

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: Vec3, b: Vec3) -> f64 {
    norm(sub(a, b))
}

#[inline]
pub fn normalize(a: Vec3) -> Vec3 {
    let n = norm(a);
    scale(a, 1.0 / n)
}

/// Any unit vector orthogonal to `a` (assumed non-zero).
pub fn any_orthonormal(a: Vec3) -> Vec3 {
    let pick = if a[0].abs() < 0.9 { E1 } else { E2 };
    normalize(cross(a, pick))
}

/// Rotation of `v` about the unit axis `axis` by `angle` (Rodrigues).
pub fn rotate_about(v: Vec3, axis: Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    let k = axis;
    let kxv = cross(k, v);
    let kdv = dot(k, v);
    add(add(scale(v, c), scale(kxv, s)), scale(k, kdv * (1.0 - c)))
}
