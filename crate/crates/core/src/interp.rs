//! Monotone (shape-preserving) cubic interpolation on a strictly
//! increasing grid, with an evaluable derivative.
//!
//! Slopes follow the Fritsch–Carlson construction, so an increasing data
//! table yields an increasing interpolant. Evaluation outside the grid
//! extrapolates linearly with the boundary slope.

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Endpoint derivatives per node.
    m: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidParameter(format!(
                "table lengths differ: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::InvalidParameter(
                "table needs at least two nodes".into(),
            ));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "table abscissae must be strictly increasing".into(),
            ));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "table values must be finite".into(),
            ));
        }

        let n = x.len();
        let mut delta = vec![0.0; n - 1];
        for i in 0..n - 1 {
            delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        }

        let mut m = vec![0.0; n];
        m[0] = delta[0];
        m[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                m[i] = 0.0;
            } else {
                // Weighted harmonic mean keeps the interpolant monotone.
                let w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
                let w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
                m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        // Fritsch-Carlson boundary limiting.
        for i in [0usize, n - 2] {
            let d = delta[i];
            if d == 0.0 {
                m[i] = 0.0;
                m[i + 1] = 0.0;
            } else {
                let a = m[i] / d;
                let b = m[i + 1] / d;
                if a < 0.0 {
                    m[i] = 0.0;
                }
                if b < 0.0 {
                    m[i + 1] = 0.0;
                }
                if a > 3.0 {
                    m[i] = 3.0 * d;
                }
                if b > 3.0 {
                    m[i + 1] = 3.0 * d;
                }
            }
        }

        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    fn segment(&self, t: f64) -> usize {
        match self
            .x
            .binary_search_by(|v| v.partial_cmp(&t).expect("finite"))
        {
            Ok(i) => i.min(self.x.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.x.len() - 2),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let u = (t - self.x[i]) / h;
        let (h00, h10, h01, h11) = hermite_basis(u);
        h00 * self.y[i] + h10 * h * self.m[i] + h01 * self.y[i + 1] + h11 * h * self.m[i + 1]
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let u = (t - self.x[i]) / h;
        let d00 = (6.0 * u * u - 6.0 * u) / h;
        let d10 = 3.0 * u * u - 4.0 * u + 1.0;
        let d01 = (-6.0 * u * u + 6.0 * u) / h;
        let d11 = 3.0 * u * u - 2.0 * u;
        d00 * self.y[i] + d10 * self.m[i] + d01 * self.y[i + 1] + d11 * self.m[i + 1]
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }
}

#[inline]
fn hermite_basis(u: f64) -> (f64, f64, f64, f64) {
    let u2 = u * u;
    let u3 = u2 * u;
    (
        2.0 * u3 - 3.0 * u2 + 1.0,
        u3 - 2.0 * u2 + u,
        -2.0 * u3 + 3.0 * u2,
        u3 - u2,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_linear_data_exactly() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v + 1.0).collect();
        let c = MonotoneCubic::new(x, y).unwrap();
        for t in [0.0, 0.3, 4.7, 8.999] {
            assert!((c.eval(t) - (3.0 * t + 1.0)).abs() < 1e-12);
            assert!((c.deriv(t) - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn stays_monotone_on_increasing_data() {
        let x = vec![0.0, 0.5, 1.0, 3.0, 10.0];
        let y = vec![0.0, 0.1, 2.0, 2.1, 5.0];
        let c = MonotoneCubic::new(x, y).unwrap();
        let mut prev = c.eval(0.0);
        for k in 1..=1000 {
            let t = 10.0 * k as f64 / 1000.0;
            let v = c.eval(t);
            assert!(v >= prev - 1e-12, "non-monotone at t = {t}");
            prev = v;
        }
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(MonotoneCubic::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(MonotoneCubic::new(vec![0.0], vec![1.0]).is_err());
        assert!(MonotoneCubic::new(vec![0.0, 1.0], vec![1.0]).is_err());
    }
}
