//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size real systems.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th-order weights minus embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on the internal step, if any.
    pub h_max: Option<f64>,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12, max_steps: 5_000_000, h_max: None }
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

impl Dopri5 {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, ..Self::default() }
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = Some(h_max);
        self
    }

    /// Integrates `dy/dt = f(t, y)` from `y0` at `times[0]`, returning the
    /// state at every entry of `times` (which must be non-decreasing).
    pub fn solve<const N: usize, F>(&self, f: F, y0: [f64; N], times: &[f64]) -> Result<Vec<[f64; N]>>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let Some(&t_start) = times.first() else {
            return Ok(Vec::new());
        };
        if times.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::InvalidArgument("output times must be non-decreasing".into()));
        }
        let span = times[times.len() - 1] - t_start;
        let mut out = Vec::with_capacity(times.len());
        out.push(y0);

        let mut t = t_start;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = (span * 1e-3).max(f64::MIN_POSITIVE);
        if let Some(h_max) = self.h_max {
            h = h.min(h_max);
        }
        let mut steps = 0usize;

        for &t_out in &times[1..] {
            while t < t_out {
                if steps >= self.max_steps {
                    return Err(Error::StepBudget { max_steps: self.max_steps, t });
                }
                steps += 1;
                let remaining = t_out - t;
                let last = h >= remaining;
                let h_try = if last { remaining } else { h };

                let k2 = f(t + C2 * h_try, &axpy(&y, h_try, &[(A21, &k1)]));
                let k3 = f(t + C3 * h_try, &axpy(&y, h_try, &[(A31, &k1), (A32, &k2)]));
                let k4 = f(t + C4 * h_try, &axpy(&y, h_try, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
                let k5 = f(
                    t + C5 * h_try,
                    &axpy(&y, h_try, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
                );
                let k6 = f(
                    t + h_try,
                    &axpy(&y, h_try, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
                );
                let y_new = axpy(&y, h_try, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
                let t_new = if last { t_out } else { t + h_try };
                let k7 = f(t_new, &y_new);

                let mut err_sq = 0.0;
                for i in 0..N {
                    let e = h_try
                        * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                    let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                    err_sq += (e / scale).powi(2);
                }
                let err = (err_sq / N as f64).sqrt();

                let factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                };

                if err <= 1.0 {
                    t = t_new;
                    y = y_new;
                    k1 = k7;
                    // Don't let the clipped final step shrink the step carried forward.
                    if !last || h_try * factor > h {
                        h = h_try * factor;
                    }
                } else {
                    h = h_try * factor.min(1.0);
                }
                if let Some(h_max) = self.h_max {
                    h = h.min(h_max);
                }
                if h < f64::EPSILON * t.abs().max(span) {
                    return Err(Error::StepUnderflow { t });
                }
            }
            out.push(y);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let times: Vec<f64> = (0..=10).map(|k| k as f64 * 0.5).collect();
        let sol = Dopri5::default().solve(|_, y: &[f64; 1]| [-y[0]], [1.0], &times).unwrap();
        for (t, y) in times.iter().zip(&sol) {
            assert!((y[0] - (-t).exp()).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn harmonic_oscillator() {
        let times = [0.0, 10.0 * std::f64::consts::PI];
        let sol = Dopri5::default()
            .solve(|_, y: &[f64; 2]| [y[1], -y[0]], [1.0, 0.0], &times)
            .unwrap();
        assert!((sol[1][0] - 1.0).abs() < 1e-7);
        assert!(sol[1][1].abs() < 1e-7);
    }

    #[test]
    fn budget_exhaustion_reported() {
        let solver = Dopri5 { max_steps: 3, ..Dopri5::default() };
        let err = solver
            .solve(|t, _: &[f64; 1]| [(100.0 * t).cos()], [0.0], &[0.0, 100.0])
            .unwrap_err();
        assert!(matches!(err, Error::StepBudget { .. }));
    }

    #[test]
    fn rejects_decreasing_times() {
        let err = Dopri5::default().solve(|_, y: &[f64; 1]| [y[0]], [1.0], &[1.0, 0.0]);
        assert!(err.is_err());
    }
}
