//! Embedded Dormand–Prince 5(4) step with PI step-size control.
//!
//! The integrator hands every accepted step (with endpoint derivatives) to
//! a caller-supplied sink, which is enough to reconstruct a cubic Hermite
//! dense output and to do event localization afterwards.

use crate::{Error, Result};

/// Right-hand side of an autonomous-in-form system dy/ds = f(s, y).
/// Evaluations may fail (e.g. on a constraint solve inside the RHS).
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, s: f64, y: &[f64; N]) -> Result<[f64; N]>;
}

/// One accepted step with endpoint slopes (cubic Hermite data).
#[derive(Debug, Clone, Copy)]
pub struct Step<const N: usize> {
    pub s0: f64,
    pub s1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    pub f0: [f64; N],
    pub f1: [f64; N],
}

impl<const N: usize> Step<N> {
    /// Cubic Hermite interpolation of the state at `s` inside the step.
    #[allow(clippy::needless_range_loop)]
    pub fn interpolate(&self, s: f64) -> [f64; N] {
        let h = self.s1 - self.s0;
        let u = (s - self.s0) / h;
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] =
                h00 * self.y0[i] + h10 * h * self.f0[i] + h01 * self.y1[i] + h11 * h * self.f1[i];
        }
        out
    }
}

/// Whether to keep integrating after a step was delivered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

/// Why the integration loop ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Reached `s_max`.
    Completed,
    /// The step sink asked to stop.
    StoppedBySink,
}

#[derive(Debug, Clone)]
pub struct Dopri5 {
    /// Local error per unit arclength.
    pub tol: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: u64,
    pub safety: f64,
}

impl Dopri5 {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            h_min: 1e-14,
            h_max: f64::INFINITY,
            max_steps: 50_000_000,
            safety: 0.9,
        }
    }

    /// Integrate from `(s0, y0)` to `s_max`, delivering each accepted step.
    pub fn integrate<const N: usize, S: OdeSystem<N>>(
        &self,
        sys: &S,
        s0: f64,
        y0: [f64; N],
        s_max: f64,
        mut sink: impl FnMut(&Step<N>) -> Flow,
    ) -> Result<Termination> {
        assert!(s_max > s0, "forward integration only");
        let mut s = s0;
        let mut y = y0;
        let mut f = sys.rhs(s, &y)?;

        let f_scale: f64 = (0..N).map(|i| f[i].abs()).fold(0.0, f64::max);
        let mut h = (0.01 * (1.0 + norm_inf(&y)) / (1.0 + f_scale))
            .min(s_max - s0)
            .clamp(self.h_min, self.h_max);
        let mut err_prev: f64 = 1.0;

        for _ in 0..self.max_steps {
            if s >= s_max {
                return Ok(Termination::Completed);
            }
            if h > s_max - s {
                h = s_max - s;
            }

            let (y1, f1, err_norm) = self.try_step(sys, s, &y, &f, h)?;
            // Error per unit arclength.
            let err = err_norm / (self.tol * h.max(1e-300));
            if !err.is_finite() {
                // Stage evaluations blew up (e.g. near the axis); back off hard.
                h = (h * 0.1).max(self.h_min);
                if h <= self.h_min {
                    return Err(Error::StepCollapse { s, h });
                }
                continue;
            }
            if err <= 1.0 {
                let step = Step {
                    s0: s,
                    s1: s + h,
                    y0: y,
                    y1,
                    f0: f,
                    f1,
                };
                s += h;
                y = y1;
                f = f1; // FSAL
                if sink(&step) == Flow::Stop {
                    return Ok(Termination::StoppedBySink);
                }
                let fac = self.safety * err.max(1e-10).powf(-0.175) * err_prev.powf(0.1);
                err_prev = err.max(1e-10);
                h = (h * fac.clamp(0.2, 5.0)).clamp(self.h_min, self.h_max);
            } else {
                let fac = self.safety * err.powf(-0.25);
                h = (h * fac.clamp(0.1, 1.0)).max(self.h_min);
                if h <= self.h_min && err > 1.0 {
                    return Err(Error::StepCollapse { s, h });
                }
            }
        }
        Err(Error::StepCollapse { s, h })
    }

    /// One trial step; returns the 5th-order solution, its slope, and the
    /// scaled error estimate.
    #[allow(clippy::needless_range_loop)]
    fn try_step<const N: usize, S: OdeSystem<N>>(
        &self,
        sys: &S,
        s: f64,
        y: &[f64; N],
        f0: &[f64; N],
        h: f64,
    ) -> Result<([f64; N], [f64; N], f64)> {
        let mut k = [[0.0; N]; 7];
        k[0] = *f0;
        let mut y_tmp = [0.0; N];
        for stage in 1..6 {
            for n in 0..N {
                let mut acc = 0.0;
                for j in 0..stage {
                    acc += A[stage][j] * k[j][n];
                }
                y_tmp[n] = y[n] + h * acc;
            }
            k[stage] = sys.rhs(s + C[stage] * h, &y_tmp)?;
        }
        // Sixth combination is the 5th-order solution itself (FSAL).
        let mut y5 = [0.0; N];
        for n in 0..N {
            let mut acc = 0.0;
            for j in 0..6 {
                acc += B5[j] * k[j][n];
            }
            y5[n] = y[n] + h * acc;
        }
        k[6] = sys.rhs(s + h, &y5)?;

        let mut err: f64 = 0.0;
        for n in 0..N {
            let mut e = 0.0;
            for j in 0..7 {
                e += E[j] * k[j][n];
            }
            e *= h;
            err = err.max(e.abs() / (1.0 + y5[n].abs()));
        }
        Ok((y5, k[6], err))
    }
}

fn norm_inf<const N: usize>(y: &[f64; N]) -> f64 {
    y.iter().fold(0.0, |m, v| m.max(v.abs()))
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

const B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];

/// b5 − b4 (error weights, including the FSAL stage).
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

#[cfg(test)]
mod tests {
    use super::*;

    struct Harmonic;
    impl OdeSystem<2> for Harmonic {
        fn rhs(&self, _s: f64, y: &[f64; 2]) -> Result<[f64; 2]> {
            Ok([y[1], -y[0]])
        }
    }

    #[test]
    fn harmonic_oscillator_round_trip() {
        let solver = Dopri5::new(1e-11);
        let mut last = [0.0; 2];
        let term = solver
            .integrate(
                &Harmonic,
                0.0,
                [1.0, 0.0],
                2.0 * std::f64::consts::PI,
                |st| {
                    last = st.y1;
                    Flow::Continue
                },
            )
            .unwrap();
        assert_eq!(term, Termination::Completed);
        assert!((last[0] - 1.0).abs() < 1e-8, "y(2pi) = {}", last[0]);
        assert!(last[1].abs() < 1e-8);
    }

    #[test]
    fn tolerance_controls_error() {
        // End-state error should drop by roughly the tolerance ratio.
        let run = |tol: f64| {
            let solver = Dopri5::new(tol);
            let mut last = [0.0; 2];
            solver
                .integrate(
                    &Harmonic,
                    0.0,
                    [1.0, 0.0],
                    2.0 * std::f64::consts::PI,
                    |st| {
                        last = st.y1;
                        Flow::Continue
                    },
                )
                .unwrap();
            (last[0] - 1.0).abs() + last[1].abs()
        };
        let coarse = run(1e-6);
        let fine = run(1e-10);
        assert!(fine < coarse / 50.0, "coarse = {coarse:e}, fine = {fine:e}");
    }

    #[test]
    fn hermite_interpolation_is_accurate() {
        let solver = Dopri5::new(1e-10);
        let mut worst: f64 = 0.0;
        solver
            .integrate(&Harmonic, 0.0, [1.0, 0.0], 3.0, |st| {
                for k in 1..5 {
                    let s = st.s0 + (st.s1 - st.s0) * k as f64 / 5.0;
                    let y = st.interpolate(s);
                    worst = worst.max((y[0] - s.cos()).abs());
                }
                Flow::Continue
            })
            .unwrap();
        assert!(worst < 1e-8, "dense output error {worst:e}");
    }

    #[test]
    fn sink_can_stop_early() {
        let solver = Dopri5::new(1e-9);
        let term = solver
            .integrate(&Harmonic, 0.0, [1.0, 0.0], 100.0, |st| {
                if st.s1 > 1.0 {
                    Flow::Stop
                } else {
                    Flow::Continue
                }
            })
            .unwrap();
        assert_eq!(term, Termination::StoppedBySink);
    }
}
