//! Curvature relations `H = f(H² − K)` and the pointwise solve of one
//! principal curvature from the other.
//!
//! The linear class `2aH + bK = 1` (a, b > 0) and the cmc class (`b = 0`)
//! have closed-form solves; a general elliptic `f` is handled by a
//! bracketed Newton iteration, which is well posed because ellipticity
//! `4·t·f′(t)² < 1` makes the defect strictly monotone in κ₁.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::interp::MonotoneCubic;
use crate::{Error, Result};

/// Absolute residual tolerance for the general elliptic solve.
pub const RESIDUAL_TOL: f64 = 1e-12;

/// Margin below which the strict inequality `4tf'(t)^2 < 1` is treated as
/// violated; floating-point equality is meaningless.
pub const ELLIPTICITY_MARGIN: f64 = 1e-10;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar function `f` on `[0, ∞)` together with its derivative, either
/// analytic callbacks or a monotone-interpolated sample table.
#[derive(Clone)]
pub struct EllipticFn {
    f: ScalarFn,
    df: ScalarFn,
}

impl fmt::Debug for EllipticFn {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("EllipticFn")
            .field("f(0)", &(self.f)(0.0))
            .finish()
    }
}

impl EllipticFn {
    pub fn from_callbacks(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            f: Arc::new(f),
            df: Arc::new(df),
        }
    }

    /// Build from a sampled table on a strictly increasing `t` grid; the
    /// derivative comes from the monotone cubic interpolant.
    pub fn from_table(t: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        let interp = MonotoneCubic::new(t, f)?;
        let interp = Arc::new(interp);
        let i2 = interp.clone();
        Ok(Self {
            f: Arc::new(move |t| interp.eval(t)),
            df: Arc::new(move |t| i2.deriv(t)),
        })
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    #[inline]
    pub fn deriv(&self, t: f64) -> f64 {
        (self.df)(t)
    }
}

/// The curvature relation of a Weingarten surface.
#[derive(Debug, Clone)]
pub enum WeingartenRelation {
    /// `2aH + bK = 1` with a, b positive.
    Linear { a: f64, b: f64 },
    /// Constant mean curvature `H ≠ 0`.
    Cmc { h: f64 },
    /// `H = f(H² − K)` with `f` elliptic.
    GeneralElliptic(EllipticFn),
}

impl WeingartenRelation {
    pub fn linear(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 || !b.is_finite() || b <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "linear relation needs a > 0 and b > 0, got a = {a}, b = {b}"
            )));
        }
        Ok(Self::Linear { a, b })
    }

    pub fn cmc(h: f64) -> Result<Self> {
        if h == 0.0 || !h.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cmc relation needs H != 0, got H = {h}"
            )));
        }
        Ok(Self::Cmc { h })
    }

    /// The `(a, b)` pair of the flux first integral, when one exists:
    /// `(a, b)` for the linear class and `(1/(2H), 0)` for cmc. General
    /// elliptic relations carry none.
    pub fn flux_parameters(&self) -> Option<(f64, f64)> {
        match self {
            Self::Linear { a, b } => Some((*a, *b)),
            Self::Cmc { h } => Some((0.5 / h, 0.0)),
            Self::GeneralElliptic(_) => None,
        }
    }

    /// `f(0)` of the equivalent elliptic form; the sphere radius of the
    /// class is `1/f(0)` when `f(0) > 0`.
    pub fn f_at_zero(&self) -> f64 {
        match self {
            Self::Linear { a, b } => (((a * a + b).sqrt()) - a) / b,
            Self::Cmc { h } => *h,
            Self::GeneralElliptic(f) => f.eval(0.0),
        }
    }
}

/// A pair of principal curvatures; κ₁ is the profile (meridian) curvature
/// and κ₂ the rotational one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvaturePair {
    pub kappa1: f64,
    pub kappa2: f64,
}

impl CurvaturePair {
    #[inline]
    pub fn mean(&self) -> f64 {
        0.5 * (self.kappa1 + self.kappa2)
    }

    #[inline]
    pub fn gauss(&self) -> f64 {
        self.kappa1 * self.kappa2
    }

    /// `t = H² − K = ((κ₁ − κ₂)/2)²`, the argument of `f`.
    #[inline]
    pub fn deficit(&self) -> f64 {
        let d = 0.5 * (self.kappa1 - self.kappa2);
        d * d
    }

    /// `H − f(H² − K)` for the given relation (with the linear and cmc
    /// classes read through their elliptic form).
    pub fn residual(&self, relation: &WeingartenRelation) -> f64 {
        match relation {
            WeingartenRelation::Linear { a, b } => 2.0 * a * self.mean() + b * self.gauss() - 1.0,
            WeingartenRelation::Cmc { h } => self.mean() - h,
            WeingartenRelation::GeneralElliptic(f) => self.mean() - f.eval(self.deficit()),
        }
    }
}

/// Convert the linear relation `2aH + bK = 1` to its elliptic form
/// `f(t) = (sqrt(a² + b + b²t) − a)/b`.
pub fn linear_to_f(a: f64, b: f64) -> Result<EllipticFn> {
    if !a.is_finite() || a <= 0.0 || !b.is_finite() || b <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "linear_to_f needs a > 0 and b > 0, got a = {a}, b = {b}"
        )));
    }
    Ok(EllipticFn::from_callbacks(
        move |t| ((a * a + b + b * b * t).sqrt() - a) / b,
        move |t| b / (2.0 * (a * a + b + b * b * t).sqrt()),
    ))
}

/// Outcome of sampling the strict ellipticity inequality.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EllipticityReport {
    pub elliptic: bool,
    /// min over samples of `1 − 4tf′(t)²`.
    pub worst_margin: f64,
    /// A sample point realizing the violation, when not elliptic.
    pub violating_t: Option<f64>,
}

/// Sample `4·t·f′(t)² < 1` on a log-spaced grid over `(0, t_max]`.
pub fn check_ellipticity(f: &EllipticFn, t_max: f64, n_samples: usize) -> EllipticityReport {
    assert!(t_max > 0.0, "t_max must be positive");
    assert!(n_samples >= 2, "need at least two samples");

    let lo = t_max * 1e-12;
    let ratio = (t_max / lo).ln();
    let mut worst = f64::INFINITY;
    let mut violating = None;
    for i in 0..n_samples {
        let t = lo * (ratio * i as f64 / (n_samples - 1) as f64).exp();
        let d = f.deriv(t);
        let margin = 1.0 - 4.0 * t * d * d;
        if margin < worst {
            worst = margin;
            if margin < ELLIPTICITY_MARGIN {
                violating = Some(t);
            }
        }
    }
    EllipticityReport {
        elliptic: worst >= ELLIPTICITY_MARGIN,
        worst_margin: worst,
        violating_t: violating,
    }
}

/// Solve the pointwise curvature equation for κ₁ given κ₂.
///
/// Linear: `κ₁ = (1 − a·κ₂)/(a + b·κ₂)` exactly. Cmc: `κ₁ = 2H − κ₂`.
/// General elliptic: the unique root of
/// `g(κ₁) = (κ₁ + κ₂)/2 − f(((κ₁ − κ₂)/2)²)`.
pub fn solve_kappa1(relation: &WeingartenRelation, kappa2: f64) -> Result<f64> {
    match relation {
        WeingartenRelation::Linear { a, b } => {
            let den = a + b * kappa2;
            if den.abs() < 1e-300 {
                return Err(Error::SingularDenominator { kappa2 });
            }
            Ok((1.0 - a * kappa2) / den)
        }
        WeingartenRelation::Cmc { h } => Ok(2.0 * h - kappa2),
        WeingartenRelation::GeneralElliptic(f) => solve_kappa1_elliptic(f, kappa2),
    }
}

fn solve_kappa1_elliptic(f: &EllipticFn, kappa2: f64) -> Result<f64> {
    let g = |k1: f64| {
        let t = 0.25 * (k1 - kappa2) * (k1 - kappa2);
        0.5 * (k1 + kappa2) - f.eval(t)
    };
    let dg = |k1: f64| {
        let d = 0.5 * (k1 - kappa2);
        0.5 - f.deriv(d * d) * d
    };

    // Initial bracket, widened geometrically on failure. Ellipticity makes
    // g strictly increasing, so a sign change pins the unique root.
    let half_width = 2.0 * (f.eval(0.0).abs() + kappa2.abs() + 1.0);
    let mut lo = kappa2 - half_width;
    let mut hi = kappa2 + half_width;
    let mut g_lo = g(lo);
    let mut g_hi = g(hi);
    let mut tries = 0;
    while g_lo * g_hi > 0.0 {
        tries += 1;
        // The cap matters: far outside the solvable branch g approaches a
        // negative constant, and widening into the 1e16 range manufactures
        // sign changes out of cancellation noise.
        if tries > 12 || !g_lo.is_finite() || !g_hi.is_finite() {
            return Err(Error::BracketFailure {
                kappa2,
                lo,
                hi,
                g_lo,
                g_hi,
            });
        }
        let mid = 0.5 * (lo + hi);
        let w = (hi - lo) * 1.0; // doubles the bracket each round
        lo = mid - w;
        hi = mid + w;
        g_lo = g(lo);
        g_hi = g(hi);
    }

    // Newton safeguarded by bisection inside [lo, hi].
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gx = g(x);
        if gx.abs() < RESIDUAL_TOL {
            return Ok(x);
        }
        if gx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let d = dg(x);
        let newton = x - gx / d;
        x = if d.abs() > 1e-300 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    let gx = g(x);
    if gx.abs() < RESIDUAL_TOL {
        Ok(x)
    } else {
        Err(Error::BracketFailure {
            kappa2,
            lo,
            hi,
            g_lo: g(lo),
            g_hi: g(hi),
        })
    }
}

/// Relation specification as it appears in config documents.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RelationSpec {
    Linear {
        a: f64,
        b: f64,
    },
    Cmc {
        #[serde(rename = "H")]
        h: f64,
    },
    Table {
        t: Vec<f64>,
        f: Vec<f64>,
    },
}

impl RelationSpec {
    pub fn build(&self) -> Result<WeingartenRelation> {
        match self {
            Self::Linear { a, b } => WeingartenRelation::linear(*a, *b),
            Self::Cmc { h } => WeingartenRelation::cmc(*h),
            Self::Table { t, f } => Ok(WeingartenRelation::GeneralElliptic(
                EllipticFn::from_table(t.clone(), f.clone())?,
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_to_f_at_zero() {
        // bH² + 2aH − 1 = bt at t = 0, a = b = 1 gives H = sqrt(2) − 1.
        let f = linear_to_f(1.0, 1.0).unwrap();
        assert!((f.eval(0.0) - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        // 2aH + bK = 1 with K = H² at t = 0.
        let h = f.eval(0.0);
        assert!((2.0 * h + h * h - 1.0).abs() < 1e-14);
    }

    #[test]
    fn linear_to_f_is_elliptic_everywhere() {
        let f = linear_to_f(1.0, 1.0).unwrap();
        for t in [0.0, 1.0, 10.0, 1e6] {
            let d = f.deriv(t);
            assert!(4.0 * t * d * d < 1.0, "ellipticity fails at t = {t}");
        }
        let rep = check_ellipticity(&f, 1e6, 400);
        assert!(rep.elliptic);
        assert!(rep.worst_margin > 0.0);
    }

    #[test]
    fn linear_to_f_cmc_limit() {
        // b -> 0+ at fixed t approaches the cmc value 1/(2a).
        let t = 3.7;
        let a = 1.0;
        let mut prev_err = f64::INFINITY;
        for b in [1e-2, 1e-4, 1e-6] {
            let f = linear_to_f(a, b).unwrap();
            let err = (f.eval(t) - 0.5 / a).abs();
            assert!(err < prev_err);
            prev_err = err;
        }
        assert!(prev_err < 1e-5);
    }

    #[test]
    fn ellipticity_rejects_sqrt() {
        // f = sqrt(t) sits exactly on the border 4t f'^2 = 1.
        let f = EllipticFn::from_callbacks(|t| t.sqrt(), |t| 0.5 / t.sqrt());
        let rep = check_ellipticity(&f, 10.0, 100);
        assert!(!rep.elliptic);
        assert!(rep.violating_t.is_some());
        assert!(rep.worst_margin.abs() < 1e-9);
    }

    #[test]
    fn ellipticity_of_constant_f() {
        let f = EllipticFn::from_callbacks(|_| 0.5, |_| 0.0);
        let rep = check_ellipticity(&f, 1e6, 100);
        assert!(rep.elliptic);
        assert!((rep.worst_margin - 1.0).abs() < 1e-15);
    }

    #[test]
    fn solve_kappa1_linear_cases() {
        let rel = WeingartenRelation::linear(1.0, 1.0).unwrap();
        // Numerator 1 − a·κ₂ vanishes at κ₂ = 1: the cylinder of radius a.
        assert_eq!(solve_kappa1(&rel, 1.0).unwrap(), 0.0);
        // Singular denominator at κ₂ = −a/b.
        assert!(matches!(
            solve_kappa1(&rel, -1.0),
            Err(Error::SingularDenominator { .. })
        ));
    }

    #[test]
    fn umbilic_fixed_point_matches_quadratic() {
        // Sphere: κ₁ = κ₂ = κ with 2aκ + bκ² = 1; a = b = 1 gives κ = sqrt(2) − 1.
        let kappa = 2f64.sqrt() - 1.0;
        let rel = WeingartenRelation::linear(1.0, 1.0).unwrap();
        let k1 = solve_kappa1(&rel, kappa).unwrap();
        assert!((k1 - kappa).abs() < 1e-14);

        let gen = WeingartenRelation::GeneralElliptic(linear_to_f(1.0, 1.0).unwrap());
        let k1g = solve_kappa1(&gen, kappa).unwrap();
        assert!((k1g - kappa).abs() < 1e-10);
        // Sphere radius 1/κ = 1 + sqrt(2).
        assert!((1.0 / k1g - (1.0 + 2f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn general_solver_agrees_with_linear_closed_form() {
        // The elliptic form f carries the H > 0 branch of the linear
        // relation, which exists exactly for κ₂ > −a/b.
        for (a, b) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.3)] {
            let lin = WeingartenRelation::linear(a, b).unwrap();
            let gen = WeingartenRelation::GeneralElliptic(linear_to_f(a, b).unwrap());
            let mut k2 = -a / b + 0.05;
            while k2 <= 10.0 {
                let exact = solve_kappa1(&lin, k2).unwrap();
                let num = solve_kappa1(&gen, k2).unwrap();
                // Near the κ₂ = −a/b pole κ₁ blows up and the residual
                // tolerance maps to a κ₁ error proportional to |κ₁|.
                assert!(
                    (exact - num).abs() < 1e-9 * (1.0 + exact.abs()),
                    "mismatch at a={a} b={b} k2={k2}: {exact} vs {num}"
                );
                let pair = CurvaturePair {
                    kappa1: num,
                    kappa2: k2,
                };
                assert!(pair.residual(&lin).abs() < 1e-9);
                k2 += 0.25;
            }
        }
    }

    #[test]
    fn general_solver_reports_missing_branch() {
        // Below κ₂ = −a/b the relation H = f(H² − K) has no solution
        // (f > 0 forces H > 0); the solver must say so rather than
        // return a spurious root.
        let gen = WeingartenRelation::GeneralElliptic(linear_to_f(1.0, 1.0).unwrap());
        for k2 in [-2.0, -5.0, -10.0] {
            assert!(
                matches!(solve_kappa1(&gen, k2), Err(Error::BracketFailure { .. })),
                "expected bracket failure at k2 = {k2}"
            );
        }
    }

    #[test]
    fn solve_root_is_bracketed_by_neighbors() {
        let gen = WeingartenRelation::GeneralElliptic(linear_to_f(1.2, 0.7).unwrap());
        let k2 = 0.8;
        let k1 = solve_kappa1(&gen, k2).unwrap();
        let g = |x: f64| {
            let t = 0.25 * (x - k2) * (x - k2);
            0.5 * (x + k2) - linear_to_f(1.2, 0.7).unwrap().eval(t)
        };
        let delta = 1e-6;
        assert!(g(k1 - delta) < 0.0 && g(k1 + delta) > 0.0);
    }

    #[test]
    fn table_backed_relation_solves() {
        // Sample the linear elliptic f on a grid and compare the solves.
        let (a, b) = (1.0, 1.0);
        let f = linear_to_f(a, b).unwrap();
        let t: Vec<f64> = (0..200).map(|i| (i as f64 / 10.0).powi(2)).collect();
        let vals: Vec<f64> = t.iter().map(|&x| f.eval(x)).collect();
        let table = EllipticFn::from_table(t, vals).unwrap();
        assert!(check_ellipticity(&table, 300.0, 200).elliptic);

        let rel_table = WeingartenRelation::GeneralElliptic(table);
        let rel_lin = WeingartenRelation::linear(a, b).unwrap();
        for k2 in [0.2, 0.5, 1.0, 2.0] {
            let kt = solve_kappa1(&rel_table, k2).unwrap();
            let kl = solve_kappa1(&rel_lin, k2).unwrap();
            assert!((kt - kl).abs() < 1e-5, "k2 = {k2}: {kt} vs {kl}");
        }
    }

    #[test]
    fn relation_spec_round_trip() {
        let spec: RelationSpec =
            serde_json::from_str(r#"{"kind":"linear","a":1.0,"b":2.0}"#).unwrap();
        assert!(matches!(
            spec.build().unwrap(),
            WeingartenRelation::Linear { .. }
        ));
        let spec: RelationSpec = serde_json::from_str(r#"{"kind":"cmc","H":0.5}"#).unwrap();
        assert!(matches!(spec.build().unwrap(), WeingartenRelation::Cmc { h } if h == 0.5));
        let spec: RelationSpec =
            serde_json::from_str(r#"{"kind":"table","t":[0.0,1.0,2.0],"f":[0.4,0.5,0.6]}"#)
                .unwrap();
        assert!(spec.build().is_ok());
    }

    #[test]
    fn relations_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync + Clone>() {}
        assert_send_sync::<WeingartenRelation>();
        assert_send_sync::<EllipticFn>();
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(WeingartenRelation::linear(0.0, 1.0).is_err());
        assert!(WeingartenRelation::linear(1.0, -1.0).is_err());
        assert!(WeingartenRelation::cmc(0.0).is_err());
        assert!(linear_to_f(-1.0, 1.0).is_err());
    }
}
