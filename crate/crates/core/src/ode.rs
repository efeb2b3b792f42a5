//! Adaptive Dormand–Prince 5(4) integrator for small complex systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) type State = [Complex64; 2];

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
// 5th-order weights (also row 7 of the tableau, FSAL)
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 5th minus 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

pub(crate) struct Dopri5 {
    pub tol: f64,
    pub max_steps: usize,
}

pub(crate) struct Solution {
    pub t: Vec<f64>,
    pub y: Vec<State>,
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..2 {
            out[i] += k[i] * (h * c);
        }
    }
    out
}

impl Dopri5 {
    /// Integrates `y' = f(t, y)` from `t0` to `t1 > t0`, recording every
    /// accepted step. Error control is mixed absolute/relative with both
    /// tolerances equal to `tol`.
    pub fn solve<F>(&self, f: F, t0: f64, t1: f64, y0: State) -> Result<Solution>
    where
        F: Fn(f64, &State) -> State,
    {
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = self.initial_step(&f, t0, &y0, &k1, t1 - t0);
        let mut out = Solution {
            t: vec![t0],
            y: vec![y0],
        };

        let mut steps = 0usize;
        while t < t1 {
            if steps >= self.max_steps {
                return Err(Error::TooManySteps {
                    max_steps: self.max_steps,
                });
            }
            steps += 1;
            let last = t + h >= t1;
            if last {
                h = t1 - t;
            }
            if h <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { eta: t, step: h });
            }

            let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(
                t + C4 * h,
                &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = f(
                t + C5 * h,
                &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                t + h,
                &axpy(
                    &y,
                    h,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y_new = axpy(
                &y,
                h,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
            );
            let k7 = f(t + h, &y_new);

            let mut err_sq = 0.0;
            for i in 0..2 {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6
                    + k7[i] * E7)
                    * h;
                let scale = self.tol * (1.0 + y[i].norm().max(y_new[i].norm()));
                err_sq += (e.norm() / scale).powi(2);
            }
            let err = (err_sq / 2.0).sqrt();
            if !err.is_finite() {
                h *= MIN_FACTOR;
                continue;
            }

            if err <= 1.0 {
                t = if last { t1 } else { t + h };
                y = y_new;
                k1 = k7;
                out.t.push(t);
                out.y.push(y);
            }
            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            h *= if err <= 1.0 { factor } else { factor.min(1.0) };
        }
        Ok(out)
    }

    fn initial_step<F>(&self, f: &F, t0: f64, y0: &State, f0: &State, span: f64) -> f64
    where
        F: Fn(f64, &State) -> State,
    {
        let norm = |v: &State| (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        let scale = self.tol * (1.0 + norm(y0));
        let d0 = norm(y0) / scale;
        let d1 = norm(f0) / scale;
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let y1 = axpy(y0, h0, &[(1.0, f0)]);
        let f1 = f(t0 + h0, &y1);
        let d2 = norm(&[f1[0] - f0[0], f1[1] - f0[1]]) / scale / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    }
}
