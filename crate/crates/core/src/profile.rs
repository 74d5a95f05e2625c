//! The generating-curve ODE for rotational Weingarten surfaces.
//!
//! The profile is parametrized by arclength `s` with radius `y`, height `z`
//! and `ψ`, the angle between the generating curve and the rotation axis:
//!
//! ```text
//! dy/ds = sin ψ,   dz/ds = cos ψ,   dψ/ds = −κ₁,
//! ```
//!
//! with κ₁ the profile principal curvature solved pointwise from
//! κ₂ = cos ψ / y through the curvature relation. On the linear/cmc classes
//! the quantity `I = y² − 2a·y·cos ψ − b·cos²ψ` is a first integral (it is
//! the flux up to a factor −π), which the integrator records per sample.
//!
//! Sign conventions: κ₁ = −dψ/ds, κ₂ = cos ψ / y, and the embedded
//! unduloid-type family runs on the cos ψ ∈ (0, 1] branch, so the cylinder
//! of the linear relation sits at radius `y = a`.

use serde::{Deserialize, Serialize};

use crate::ode::{Dopri5, Flow, OdeSystem, Step, Termination};
use crate::relation::{solve_kappa1, WeingartenRelation};
use crate::{Error, Result};

/// Relative axis threshold: radii below `1e-8 × scale` count as axis contact.
pub const AXIS_THRESHOLD_REL: f64 = 1e-8;

/// Bisection target for extremum events: |sin ψ| below this at the located s.
pub const EVENT_TOL: f64 = 1e-10;

/// One point of the generating curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileState {
    pub s: f64,
    pub y: f64,
    pub z: f64,
    pub psi: f64,
}

impl ProfileState {
    pub fn new(s: f64, y: f64, z: f64, psi: f64) -> Self {
        Self { s, y, z, psi }
    }
}

/// Why an integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileTermination {
    /// Ran to the requested arclength.
    ReachedSMax,
    /// Radius fell to the axis threshold (the "american football" limit for
    /// the family, the pole for the sphere). A normal outcome, not an error.
    AxisContact,
}

/// An integrated generating curve with per-step Hermite data.
#[derive(Debug, Clone)]
pub struct ProfileCurve {
    pub relation: WeingartenRelation,
    /// Samples at accepted step endpoints, strictly increasing in `s`.
    pub samples: Vec<ProfileState>,
    /// `(dy, dz, dψ)/ds` at each sample; enables dense output.
    pub derivs: Vec<[f64; 3]>,
    /// First-integral value per sample; empty for general elliptic
    /// relations, which carry no conserved quantity here.
    pub first_integral_values: Vec<f64>,
    pub termination: ProfileTermination,
}

/// One analyzed period of the W-Delaunay family.
#[derive(Debug, Clone)]
pub struct DelaunayProfile {
    /// The integrated curve, spanning at least one full period.
    pub curve: ProfileCurve,
    /// Big radius (bulge).
    pub r_big: f64,
    /// Small radius (neck).
    pub r_small: f64,
    /// Arclength of one neck-to-neck period.
    pub period: f64,
    /// First-integral value of the member.
    pub i0: f64,
}

/// The flux first integral `I = y² − 2a·y·cos ψ − b·cos²ψ`.
pub fn first_integral(state: &ProfileState, a: f64, b: f64) -> f64 {
    let c = state.psi.cos();
    state.y * state.y - 2.0 * a * state.y * c - b * c * c
}

/// Characteristic length of a relation: `a` for the linear/cmc classes
/// (the axis threshold is `1e-8·a`), the curvature radius `1/f(0)` for a
/// general elliptic `f`.
pub fn length_scale(relation: &WeingartenRelation) -> f64 {
    if let Some((a, _)) = relation.flux_parameters() {
        if a.abs() > 0.0 {
            return a.abs();
        }
    }
    let f0 = relation.f_at_zero().abs();
    if f0 > 0.0 {
        1.0 / f0
    } else {
        1.0
    }
}

/// Right-hand side of the profile system at one state.
///
/// Errors on states at or below the axis threshold; inside the integrator
/// the evaluation is total (radius clamped) and axis contact is a stop
/// condition instead.
pub fn profile_rhs(state: &ProfileState, relation: &WeingartenRelation) -> Result<(f64, f64, f64)> {
    let y_min = AXIS_THRESHOLD_REL * length_scale(relation);
    if state.y < y_min {
        return Err(Error::AxisStart { y: state.y, y_min });
    }
    let kappa2 = state.psi.cos() / state.y;
    let kappa1 = solve_kappa1(relation, kappa2)?;
    Ok((state.psi.sin(), state.psi.cos(), -kappa1))
}

struct ProfileSystem<'a> {
    relation: &'a WeingartenRelation,
}

impl OdeSystem<3> for ProfileSystem<'_> {
    fn rhs(&self, _s: f64, y: &[f64; 3]) -> Result<[f64; 3]> {
        // Total on y > 0: trial stages may probe close to the axis and are
        // then rejected by the error controller rather than failing hard.
        let radius = y[0].max(1e-30);
        let kappa2 = y[2].cos() / radius;
        let kappa1 = solve_kappa1(self.relation, kappa2)?;
        Ok([y[2].sin(), y[2].cos(), -kappa1])
    }
}

/// Options for [`integrate_profile_with`].
#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    pub s_max: f64,
    /// Local error per unit arclength.
    pub tol: f64,
    /// Stop (normally) when the radius falls below this.
    pub y_stop: Option<f64>,
}

/// Integrate the generating curve from `initial` over `[initial.s, s_max]`.
pub fn integrate_profile(
    initial: ProfileState,
    relation: &WeingartenRelation,
    s_max: f64,
    tol: f64,
) -> Result<ProfileCurve> {
    integrate_profile_with(
        initial,
        relation,
        IntegrateOptions {
            s_max,
            tol,
            y_stop: None,
        },
    )
}

pub fn integrate_profile_with(
    initial: ProfileState,
    relation: &WeingartenRelation,
    opts: IntegrateOptions,
) -> Result<ProfileCurve> {
    let scale = length_scale(relation);
    let y_min = AXIS_THRESHOLD_REL * scale;
    if initial.y <= y_min {
        return Err(Error::AxisStart {
            y: initial.y,
            y_min,
        });
    }
    let y_stop = opts.y_stop.unwrap_or(y_min).max(y_min);

    let sys = ProfileSystem { relation };
    let solver = Dopri5::new(opts.tol);

    let flux_ab = relation.flux_parameters();
    let mut samples = vec![initial];
    let mut derivs = {
        let f0 = sys.rhs(initial.s, &[initial.y, initial.z, initial.psi])?;
        vec![f0]
    };
    let mut hit_axis = false;

    let term = solver.integrate(
        &sys,
        initial.s,
        [initial.y, initial.z, initial.psi],
        opts.s_max,
        |st: &Step<3>| {
            samples.push(ProfileState {
                s: st.s1,
                y: st.y1[0],
                z: st.y1[1],
                psi: st.y1[2],
            });
            derivs.push(st.f1);
            if st.y1[0] < y_stop {
                hit_axis = true;
                Flow::Stop
            } else {
                Flow::Continue
            }
        },
    )?;

    let termination = match term {
        Termination::Completed => ProfileTermination::ReachedSMax,
        Termination::StoppedBySink if hit_axis => ProfileTermination::AxisContact,
        Termination::StoppedBySink => ProfileTermination::ReachedSMax,
    };

    let first_integral_values = match flux_ab {
        Some((a, b)) => samples.iter().map(|st| first_integral(st, a, b)).collect(),
        None => Vec::new(),
    };

    Ok(ProfileCurve {
        relation: relation.clone(),
        samples,
        derivs,
        first_integral_values,
        termination,
    })
}

impl ProfileCurve {
    pub fn s_start(&self) -> f64 {
        self.samples[0].s
    }

    pub fn s_end(&self) -> f64 {
        self.samples.last().unwrap().s
    }

    fn segment_index(&self, s: f64) -> usize {
        let n = self.samples.len();
        match self
            .samples
            .binary_search_by(|p| p.s.partial_cmp(&s).expect("finite s"))
        {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    fn step_of_segment(&self, i: usize) -> Step<3> {
        let p0 = &self.samples[i];
        let p1 = &self.samples[i + 1];
        Step {
            s0: p0.s,
            s1: p1.s,
            y0: [p0.y, p0.z, p0.psi],
            y1: [p1.y, p1.z, p1.psi],
            f0: self.derivs[i],
            f1: self.derivs[i + 1],
        }
    }

    /// Dense-output state at arclength `s` (cubic Hermite per step).
    pub fn state_at(&self, s: f64) -> ProfileState {
        let i = self.segment_index(s);
        let st = self.step_of_segment(i).interpolate(s);
        ProfileState {
            s,
            y: st[0],
            z: st[1],
            psi: st[2],
        }
    }

    /// Uniform resampling of `[s_lo, s_hi]` with `n` points (endpoints included).
    pub fn resample(&self, s_lo: f64, s_hi: f64, n: usize) -> Vec<ProfileState> {
        assert!(n >= 2);
        (0..n)
            .map(|k| {
                let s = s_lo + (s_hi - s_lo) * k as f64 / (n - 1) as f64;
                self.state_at(s)
            })
            .collect()
    }

    /// Spread of the recorded first integral, `max − min`; `None` for
    /// general elliptic relations.
    pub fn first_integral_spread(&self) -> Option<f64> {
        if self.first_integral_values.is_empty() {
            return None;
        }
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in &self.first_integral_values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Some(hi - lo)
    }

    /// Largest radius along the curve, refined through the extremum events
    /// when there are any.
    pub fn max_radius(&self) -> f64 {
        let coarse = self
            .samples
            .iter()
            .fold(f64::NEG_INFINITY, |m, p| m.max(p.y));
        match detect_extrema(self) {
            Ok(ExtremaOutcome::Found(events)) => events
                .iter()
                .filter(|e| e.kind == ExtremumKind::Bulge)
                .fold(coarse, |m, e| m.max(e.y)),
            _ => coarse,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtremumKind {
    Neck,
    Bulge,
}

/// A located radius extremum (sin ψ = 0 event).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Extremum {
    pub s: f64,
    pub y: f64,
    pub z: f64,
    pub kind: ExtremumKind,
}

#[derive(Debug, Clone)]
pub enum ExtremaOutcome {
    /// Cylinder: everywhere-extremal, reported with its radius.
    Degenerate {
        radius: f64,
    },
    Found(Vec<Extremum>),
}

/// Locate all radius extrema of the curve by bisecting sign changes of
/// sin ψ down to |sin ψ| < 1e-10.
pub fn detect_extrema(curve: &ProfileCurve) -> Result<ExtremaOutcome> {
    let n = curve.samples.len();
    if n < 2 {
        return Err(Error::NoExtrema("curve has fewer than 2 samples".into()));
    }

    // Cylinder: ψ stays at 0 and the radius never moves.
    let max_sin = curve
        .samples
        .iter()
        .fold(0.0f64, |m, p| m.max(p.psi.sin().abs()));
    let (y_lo, y_hi) = curve
        .samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.y), hi.max(p.y))
        });
    if max_sin < 1e-9 && (y_hi - y_lo) < 1e-9 * y_hi.max(1.0) {
        return Ok(ExtremaOutcome::Degenerate {
            radius: 0.5 * (y_lo + y_hi),
        });
    }

    let mut events = Vec::new();
    // The start point may itself sit exactly on an extremum.
    if curve.samples[0].psi.sin().abs() < EVENT_TOL {
        push_extremum(curve, curve.samples[0].s, &mut events)?;
    }
    for i in 0..n - 1 {
        let g0 = curve.samples[i].psi.sin();
        let g1 = curve.samples[i + 1].psi.sin();
        if g0 == 0.0 && i > 0 {
            push_extremum(curve, curve.samples[i].s, &mut events)?;
        } else if g0 * g1 < 0.0 {
            let step = curve.step_of_segment(i);
            let s_star = bisect_sin_psi(&step);
            push_extremum(curve, s_star, &mut events)?;
        }
    }

    if events.is_empty() {
        return Err(Error::NoExtrema(
            "profile is monotone over the integrated range".into(),
        ));
    }
    Ok(ExtremaOutcome::Found(events))
}

fn bisect_sin_psi(step: &Step<3>) -> f64 {
    let (mut lo, mut hi) = (step.s0, step.s1);
    let mut g_lo = step.interpolate(lo)[2].sin();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let g_mid = step.interpolate(mid)[2].sin();
        if g_mid.abs() < EVENT_TOL || (hi - lo) < f64::EPSILON * (1.0 + hi.abs()) {
            return mid;
        }
        if g_lo * g_mid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            g_lo = g_mid;
        }
    }
    0.5 * (lo + hi)
}

fn push_extremum(curve: &ProfileCurve, s: f64, events: &mut Vec<Extremum>) -> Result<()> {
    let st = curve.state_at(s);
    // y'' = cos ψ · ψ' at sin ψ = 0; sign decides neck vs bulge.
    let (_, _, dpsi) = profile_rhs(&st, &curve.relation)?;
    let ypp = st.psi.cos() * dpsi;
    let kind = if ypp > 0.0 {
        ExtremumKind::Neck
    } else {
        ExtremumKind::Bulge
    };
    events.push(Extremum {
        s,
        y: st.y,
        z: st.z,
        kind,
    });
    Ok(())
}

/// Arclength period of the cylinder linearization, `2π·sqrt(a² + b)`; the
/// family period approaches this as the neck radius tends to `a`.
pub fn cylinder_period(a: f64, b: f64) -> f64 {
    2.0 * std::f64::consts::PI * (a * a + b).sqrt()
}

/// Construct one member of the W-Delaunay family from its neck radius.
///
/// Integrates from the neck initial condition `(y = neck_r, ψ = 0)` on the
/// cos ψ = +1 branch over (at least) one full neck → bulge → neck period.
/// Requires a linear or cmc relation with positive `a`.
pub fn delaunay_family(
    relation: &WeingartenRelation,
    neck_r: f64,
    tol: f64,
) -> Result<DelaunayProfile> {
    let (a, b) = relation.flux_parameters().ok_or_else(|| {
        Error::InvalidParameter("the W-Delaunay family needs a linear or cmc relation".into())
    })?;
    if a <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "family needs a > 0 (cmc H > 0), got a = {a}"
        )));
    }
    if !(neck_r > 0.0 && neck_r <= a) {
        return Err(Error::InvalidParameter(format!(
            "neck radius must lie in (0, a]; got neck_r = {neck_r}, a = {a}"
        )));
    }

    let start = ProfileState::new(0.0, neck_r, 0.0, 0.0);
    let i0 = first_integral(&start, a, b);

    // Cylinder member: the fixed point of the profile flow.
    if (neck_r - a).abs() < 1e-12 * a {
        let period = cylinder_period(a, b);
        let curve = integrate_profile(start, relation, period, tol)?;
        return Ok(DelaunayProfile {
            curve,
            r_big: neck_r,
            r_small: neck_r,
            period,
            i0,
        });
    }

    // The period is bounded by the cylinder linearization for every member
    // we have met, but integrate generously and extend on demand.
    let mut s_max = 2.6 * cylinder_period(a, b);
    for _attempt in 0..4 {
        let curve = integrate_profile(start, relation, s_max, tol)?;
        if curve.termination == ProfileTermination::AxisContact {
            // Football limit: report as near-axis approach.
            return Err(Error::AxisStart {
                y: neck_r,
                y_min: AXIS_THRESHOLD_REL * length_scale(relation),
            });
        }
        match detect_extrema(&curve)? {
            ExtremaOutcome::Degenerate { radius } => {
                return Ok(DelaunayProfile {
                    curve,
                    r_big: radius,
                    r_small: radius,
                    period: cylinder_period(a, b),
                    i0,
                });
            }
            ExtremaOutcome::Found(events) => {
                let ok = events.len() >= 3
                    && events[0].kind == ExtremumKind::Neck
                    && events[1].kind == ExtremumKind::Bulge
                    && events[2].kind == ExtremumKind::Neck;
                if ok {
                    return Ok(DelaunayProfile {
                        curve,
                        r_big: events[1].y,
                        r_small: neck_r,
                        period: events[2].s,
                        i0,
                    });
                }
            }
        }
        s_max *= 2.0;
    }
    Err(Error::NoExtrema(format!(
        "no full period found within s = {s_max} for neck_r = {neck_r}"
    )))
}

/// Integrate the sphere profile of the class from a near-pole series start.
///
/// At the pole regularity forces the umbilic curvature κ solving
/// `2aκ + bκ² = 1`; the start is seeded from the local expansion at
/// arclength `eps/κ` off the axis and the curve is integrated until it
/// returns to the axis on the far side.
pub fn sphere_profile_with_eps(a: f64, b: f64, eps: f64, tol: f64) -> Result<ProfileCurve> {
    if !a.is_finite() || a <= 0.0 || b < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sphere profile needs a > 0, b >= 0; got a = {a}, b = {b}"
        )));
    }
    if eps < 1e3 * f64::EPSILON {
        return Err(Error::SeriesStart { eps });
    }
    let kappa = if b > 0.0 {
        ((a * a + b).sqrt() - a) / b
    } else {
        0.5 / a
    };
    let rho = 1.0 / kappa;

    let relation = if b > 0.0 {
        WeingartenRelation::linear(a, b)?
    } else {
        WeingartenRelation::cmc(0.5 / a)?
    };

    // Local solution of the regular pole: y ≈ ρ sin(s/ρ), ψ ≈ π/2 − s/ρ.
    let start = ProfileState::new(
        eps * rho,
        rho * eps.sin(),
        rho * (1.0 - eps.cos()),
        std::f64::consts::FRAC_PI_2 - eps,
    );

    integrate_profile_with(
        start,
        &relation,
        IntegrateOptions {
            s_max: 1.5 * std::f64::consts::PI * rho,
            tol,
            y_stop: Some(start.y),
        },
    )
}

/// [`sphere_profile_with_eps`] with the default series offset `1e-6`.
pub fn sphere_profile(a: f64, b: f64, tol: f64) -> Result<ProfileCurve> {
    sphere_profile_with_eps(a, b, 1e-6, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-11;

    fn linear(a: f64, b: f64) -> WeingartenRelation {
        WeingartenRelation::linear(a, b).unwrap()
    }

    #[test]
    fn rhs_on_cylinder_is_a_fixed_point() {
        let rel = linear(1.0, 1.0);
        let st = ProfileState::new(0.0, 1.0, 0.0, 0.0);
        let (dy, dz, dpsi) = profile_rhs(&st, &rel).unwrap();
        assert_eq!(dy, 0.0);
        assert_eq!(dz, 1.0);
        assert_eq!(dpsi, 0.0);
    }

    #[test]
    fn rhs_matches_closed_form_solve() {
        // y = 2, ψ = 0 with a = b = 1: κ₂ = 1/2, κ₁ = (1 − 1/2)/(1 + 1/2) = 1/3.
        let rel = linear(1.0, 1.0);
        let st = ProfileState::new(0.0, 2.0, 0.0, 0.0);
        let (_, _, dpsi) = profile_rhs(&st, &rel).unwrap();
        assert!((dpsi + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rhs_on_cmc_cylinder() {
        let rel = WeingartenRelation::cmc(0.5).unwrap();
        let st = ProfileState::new(0.0, 1.0, 0.0, 0.0);
        let (dy, _, dpsi) = profile_rhs(&st, &rel).unwrap();
        assert_eq!(dy, 0.0);
        assert_eq!(dpsi, 0.0);
    }

    #[test]
    fn rhs_rejects_axis_states() {
        let rel = linear(1.0, 1.0);
        let st = ProfileState::new(0.0, 1e-12, 0.0, 0.0);
        assert!(matches!(
            profile_rhs(&st, &rel),
            Err(Error::AxisStart { .. })
        ));
    }

    #[test]
    fn first_integral_reference_values() {
        // Bulge: I = R² − 2aR − b; cylinder y = a: I = −a² − b.
        let bulge = ProfileState::new(0.0, 1.5, 0.0, 0.0);
        assert!((first_integral(&bulge, 1.0, 1.0) - (2.25 - 3.0 - 1.0)).abs() < 1e-15);
        let cyl = ProfileState::new(0.0, 1.0, 0.0, 0.0);
        assert!((first_integral(&cyl, 1.0, 1.0) - (-2.0)).abs() < 1e-15);
    }

    #[test]
    fn cylinder_profile_stays_put() {
        let rel = linear(1.0, 1.0);
        let curve =
            integrate_profile(ProfileState::new(0.0, 1.0, 0.0, 0.0), &rel, 10.0, TOL).unwrap();
        for p in &curve.samples {
            assert!((p.y - 1.0).abs() < 1e-9, "y drifted to {}", p.y);
            assert!(p.psi.abs() < 1e-9);
        }
        assert!(matches!(
            detect_extrema(&curve).unwrap(),
            ExtremaOutcome::Degenerate { .. }
        ));
    }

    #[test]
    fn oscillation_between_neck_and_bulge() {
        let rel = linear(1.0, 1.0);
        let prof = delaunay_family(&rel, 0.5, TOL).unwrap();
        assert!((prof.r_small - 0.5).abs() < 1e-12);
        // R + r = 2a.
        assert!(
            (prof.r_big + prof.r_small - 2.0).abs() < 1e-6,
            "R = {}",
            prof.r_big
        );
        assert!(prof.period > 0.0);
        // y stays within [r, R] (up to event tolerance).
        for p in &prof.curve.samples {
            assert!(p.y > 0.5 - 1e-6 && p.y < prof.r_big + 1e-6);
        }
    }

    #[test]
    fn first_integral_is_conserved_over_three_periods() {
        let rel = linear(1.0, 1.0);
        let prof = delaunay_family(&rel, 0.5, TOL).unwrap();
        let s_max = 3.0 * prof.period;
        let curve =
            integrate_profile(ProfileState::new(0.0, 0.5, 0.0, 0.0), &rel, s_max, TOL).unwrap();
        let i0 = curve.first_integral_values[0];
        let drift = curve
            .first_integral_values
            .iter()
            .fold(0.0f64, |m, &v| m.max((v - i0).abs()));
        assert!(
            drift < 1e-8 * (1.0 + i0.abs()),
            "first-integral drift {drift:e}"
        );
    }

    #[test]
    fn first_integral_derivative_vanishes_along_solution() {
        // Finite-difference dI/ds along the solution, plus the analytic
        // bracket y − a·cosψ + ψ′(a·y + b·cosψ) that must vanish.
        let (a, b) = (1.0, 1.0);
        let rel = linear(a, b);
        let curve =
            integrate_profile(ProfileState::new(0.0, 0.6, 0.0, 0.0), &rel, 8.0, TOL).unwrap();
        let i_of = |s: f64| first_integral(&curve.state_at(s), a, b);
        let i_scale = 1.0 + i_of(0.1).abs();
        for k in 1..40 {
            let s = 0.3 + k as f64 * 0.15;
            if s > curve.s_end() - 0.3 {
                break;
            }
            // I is constant along the solution, so a wide stencil has no
            // truncation error and divides away the conservation noise.
            let h = 0.25;
            let didds = (i_of(s + h) - i_of(s - h)) / (2.0 * h);
            assert!(didds.abs() < 1e-8 * i_scale, "dI/ds = {didds:e} at s = {s}");

            let st = curve.state_at(s);
            let (_, _, dpsi) = profile_rhs(&st, &rel).unwrap();
            let bracket = st.y - a * st.psi.cos() + dpsi * (a * st.y + b * st.psi.cos());
            assert!(bracket.abs() < 1e-9, "bracket = {bracket:e}");
        }
    }

    #[test]
    fn detect_extrema_radii_identity() {
        // First bulge radius from the first-integral equality: R = 2a − r.
        let rel = linear(1.0, 1.0);
        let prof = delaunay_family(&rel, 0.5, TOL).unwrap();
        assert!((prof.r_big - 1.5).abs() < 1e-6);

        let cmc = WeingartenRelation::cmc(0.5).unwrap();
        let prof = delaunay_family(&cmc, 0.3, TOL).unwrap();
        assert!((prof.r_big - 1.7).abs() < 1e-6, "cmc R = {}", prof.r_big);
    }

    #[test]
    fn family_endpoint_is_the_cylinder() {
        let rel = linear(1.0, 1.0);
        let prof = delaunay_family(&rel, 1.0, TOL).unwrap();
        assert_eq!(prof.r_big, 1.0);
        assert_eq!(prof.r_small, 1.0);
        assert!((prof.period - cylinder_period(1.0, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn family_rejects_bad_neck_radius() {
        let rel = linear(1.0, 1.0);
        assert!(delaunay_family(&rel, 0.0, TOL).is_err());
        assert!(delaunay_family(&rel, 1.5, TOL).is_err());
    }

    #[test]
    fn periodicity_of_the_family_member() {
        let rel = linear(1.0, 1.0);
        let prof = delaunay_family(&rel, 0.4, TOL).unwrap();
        let p0 = prof.curve.state_at(0.0);
        let p1 = prof.curve.state_at(prof.period);
        assert!((p0.y - p1.y).abs() < 1e-6, "y: {} vs {}", p0.y, p1.y);
        assert!((p0.psi - p1.psi).abs() < 1e-6);
        // z advances by the translational period.
        assert!(p1.z > p0.z);
    }

    #[test]
    fn family_big_radius_is_decreasing_in_neck_radius() {
        let rel = linear(1.0, 1.0);
        let mut prev = f64::INFINITY;
        for k in 1..=10 {
            let r = 0.1 * k as f64;
            let prof = delaunay_family(&rel, r, TOL).unwrap();
            assert!(prof.r_big < prev + 1e-9, "R not decreasing at r = {r}");
            prev = prof.r_big;
        }
        assert!((prev - 1.0).abs() < 1e-6, "R(a) should be a");
    }

    #[test]
    fn football_limit() {
        // As the neck radius shrinks the bulge approaches 2a.
        let rel = linear(1.0, 1.0);
        let prof = delaunay_family(&rel, 0.02, TOL).unwrap();
        assert!((prof.r_big - 1.98).abs() < 1e-6);
        // Below the axis threshold the start itself is rejected.
        assert!(matches!(
            delaunay_family(&rel, 1e-12, TOL),
            Err(Error::InvalidParameter(_)) | Err(Error::AxisStart { .. })
        ));
    }

    #[test]
    fn sphere_profile_recovers_radius() {
        // a = b = 1: ρ = 1 + sqrt(2).
        let curve = sphere_profile(1.0, 1.0, TOL).unwrap();
        let rho = 1.0 + 2f64.sqrt();
        assert!(
            (curve.max_radius() - rho).abs() < 1e-5,
            "max radius {} vs {rho}",
            curve.max_radius()
        );
        assert_eq!(curve.termination, ProfileTermination::AxisContact);

        // b = 0 (cmc H = 1/2): ρ = 2.
        let curve = sphere_profile(1.0, 0.0, TOL).unwrap();
        assert!((curve.max_radius() - 2.0).abs() < 1e-5);
    }

    #[test]
    fn sphere_profile_closes_mirrored() {
        let curve = sphere_profile(1.0, 1.0, TOL).unwrap();
        let first = curve.samples.first().unwrap();
        let last = curve.samples.last().unwrap();
        // Endpoint returns to the axis with ψ mirrored.
        assert!(last.y < 2.0 * first.y);
        assert!(
            (last.psi + first.psi).abs() < 1e-4,
            "psi not mirrored: {} vs {}",
            first.psi,
            last.psi
        );
    }

    #[test]
    fn sphere_profile_eps_floor() {
        assert!(matches!(
            sphere_profile_with_eps(1.0, 1.0, 1e-14, TOL),
            Err(Error::SeriesStart { .. })
        ));
    }

    #[test]
    fn convergence_order_of_the_integrator() {
        // Halving the tolerance must reduce the end-state defect in a way
        // consistent with a 4th/5th-order embedded method (roughly
        // proportional to the tolerance itself under EPUS control).
        let rel = linear(1.0, 1.0);
        let reference = {
            let prof = delaunay_family(&rel, 0.5, 1e-13).unwrap();
            prof.curve.state_at(prof.period)
        };
        let mut errs = Vec::new();
        for tol in [1e-6, 1e-8, 1e-10] {
            let prof = delaunay_family(&rel, 0.5, tol).unwrap();
            let st = prof.curve.state_at(prof.period);
            errs.push(((st.y - reference.y).powi(2) + (st.psi - reference.psi).powi(2)).sqrt());
        }
        assert!(errs[1] < errs[0] / 10.0, "errs = {errs:?}");
        assert!(errs[2] < errs[1] / 10.0, "errs = {errs:?}");
    }

    #[test]
    fn general_elliptic_profile_integrates_without_first_integral() {
        let f = crate::relation::linear_to_f(1.0, 1.0).unwrap();
        let rel = WeingartenRelation::GeneralElliptic(f);
        let curve =
            integrate_profile(ProfileState::new(0.0, 0.5, 0.0, 0.0), &rel, 5.0, 1e-9).unwrap();
        assert!(curve.first_integral_values.is_empty());
        assert!(curve.first_integral_spread().is_none());
        // The trajectory still matches the linear closed-form dynamics.
        let lin = linear(1.0, 1.0);
        let curve_lin =
            integrate_profile(ProfileState::new(0.0, 0.5, 0.0, 0.0), &lin, 5.0, 1e-9).unwrap();
        let end = curve.state_at(5.0);
        let end_lin = curve_lin.state_at(5.0);
        assert!((end.y - end_lin.y).abs() < 1e-6);
    }
}
