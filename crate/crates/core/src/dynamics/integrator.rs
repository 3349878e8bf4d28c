//! Dormand–Prince 5(4) with step-size control and the 4th-order continuous
//! extension, specialised to autonomous systems over complex vectors.

use crate::error::{Error, Result};
use crate::fock::{C64, ZERO};

/// Step-size control settings. Times are in units of the caller's rate unit.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            initial_step: 1e-3,
            max_step: 0.05,
            max_steps: 50_000_000,
        }
    }
}

impl IntegratorOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.initial_step > 0.0
            && self.max_step > 0.0
            && self.rel_tol.is_finite()
            && self.abs_tol.is_finite()
            && self.initial_step.is_finite()
            && self.max_step.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(
                "integrator tolerances and step sizes must be positive and finite".into(),
            ))
        }
    }
}

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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

pub(crate) struct Dopri5<F> {
    f: F,
    opts: IntegratorOptions,
    t: f64,
    y: Vec<C64>,
    /// k[0] holds f(y) at the current point; k[1..6] are the stages of the
    /// last accepted step and k[6] the first stage of that step.
    k: [Vec<C64>; 7],
    h: f64,
    t_prev: f64,
    h_prev: f64,
    y_prev: Vec<C64>,
    y_new: Vec<C64>,
    tmp: Vec<C64>,
    pub steps: usize,
    pub rejected: usize,
}

impl<F: FnMut(&[C64], &mut [C64])> Dopri5<F> {
    pub fn new(mut f: F, t0: f64, y0: Vec<C64>, opts: IntegratorOptions) -> Self {
        let n = y0.len();
        let mut k: [Vec<C64>; 7] = std::array::from_fn(|_| vec![ZERO; n]);
        f(&y0, &mut k[0]);
        Self {
            f,
            h: opts.initial_step.min(opts.max_step),
            opts,
            t: t0,
            t_prev: t0,
            h_prev: 0.0,
            y_prev: y0.clone(),
            y: y0,
            k,
            y_new: vec![ZERO; n],
            tmp: vec![ZERO; n],
            steps: 0,
            rejected: 0,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[C64] {
        &self.y
    }

    /// f evaluated at the current state.
    pub fn derivative(&self) -> &[C64] {
        &self.k[0]
    }

    fn stage(&mut self, idx: usize, h: f64, coeffs: &[(usize, f64)]) {
        let n = self.y.len();
        for i in 0..n {
            let mut acc = ZERO;
            for &(s, c) in coeffs {
                acc += self.k[s][i] * c;
            }
            self.tmp[i] = self.y[i] + acc * h;
        }
        let (tmp, k) = (&self.tmp, &mut self.k);
        (self.f)(tmp, &mut k[idx]);
    }

    /// Takes one accepted step without passing `t_end`.
    pub fn step(&mut self, t_end: f64) -> Result<()> {
        let n = self.y.len();
        let mut failed = false;
        loop {
            if self.steps + self.rejected >= self.opts.max_steps {
                return Err(Error::TooManySteps {
                    steps: self.opts.max_steps,
                    t: self.t,
                });
            }
            let remaining = t_end - self.t;
            let floor = 1e-14 * self.t.abs().max(1.0);
            let mut h = self.h.min(self.opts.max_step);
            let clipped = h >= remaining;
            if clipped {
                h = remaining;
            } else if h < floor {
                return Err(Error::StepUnderflow { t: self.t });
            }

            self.stage(1, h, &[(0, A21)]);
            self.stage(2, h, &[(0, A31), (1, A32)]);
            self.stage(3, h, &[(0, A41), (1, A42), (2, A43)]);
            self.stage(4, h, &[(0, A51), (1, A52), (2, A53), (3, A54)]);
            self.stage(5, h, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)]);
            for i in 0..n {
                let k = &self.k;
                let incr = k[0][i] * B1 + k[2][i] * B3 + k[3][i] * B4 + k[4][i] * B5 + k[5][i] * B6;
                self.y_new[i] = self.y[i] + incr * h;
            }
            // Stage 7 (FSAL) goes into k[6]; the old first stage is rotated
            // there on acceptance.
            {
                let (y_new, k) = (&self.y_new, &mut self.k);
                (self.f)(y_new, &mut k[6]);
            }
            let mut acc = 0.0;
            for i in 0..n {
                let k = &self.k;
                let e = (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7) * h;
                let sc = self.opts.abs_tol + self.opts.rel_tol * self.y[i].norm().max(self.y_new[i].norm());
                let r = e.norm() / sc;
                acc += r * r;
            }
            let err = (acc / n.max(1) as f64).sqrt();

            if err.is_finite() && err <= 1.0 {
                self.t_prev = self.t;
                self.h_prev = h;
                std::mem::swap(&mut self.y_prev, &mut self.y);
                std::mem::swap(&mut self.y, &mut self.y_new);
                // k[0] <- f(y_new), k[6] <- old first stage.
                self.k.swap(0, 6);
                self.t = if h == remaining { t_end } else { self.t + h };
                self.steps += 1;
                let mut fac = if err == 0.0 { 5.0 } else { 0.9 * err.powf(-0.2) };
                fac = fac.clamp(0.2, 5.0);
                if failed {
                    fac = fac.min(1.0);
                }
                // A step shortened to land on t_end says nothing about the
                // admissible size.
                self.h = if clipped { self.h.max(h * fac) } else { h * fac };
                return Ok(());
            }
            self.rejected += 1;
            failed = true;
            let fac = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.2, 1.0)
            } else {
                0.2
            };
            self.h = h * fac;
        }
    }

    /// Dense output inside the last accepted step, t ∈ [t_prev, t].
    pub fn interpolate(&self, t: f64, out: &mut [C64]) {
        if t >= self.t || self.h_prev == 0.0 {
            out.copy_from_slice(&self.y);
            return;
        }
        let h = self.h_prev;
        let theta = ((t - self.t_prev) / h).clamp(0.0, 1.0);
        let theta1 = 1.0 - theta;
        let k1 = &self.k[6];
        let k7 = &self.k[0];
        let k = &self.k;
        for i in 0..out.len() {
            let y0 = self.y_prev[i];
            let ydiff = self.y[i] - y0;
            let bspl = k1[i] * h - ydiff;
            let r4 = ydiff - k7[i] * h - bspl;
            let r5 = (k1[i] * D1 + k[2][i] * D3 + k[3][i] * D4 + k[4][i] * D5 + k[5][i] * D6 + k7[i] * D7) * h;
            out[i] = y0 + (ydiff + (bspl + (r4 + r5 * theta1) * theta) * theta1) * theta;
        }
    }
}
