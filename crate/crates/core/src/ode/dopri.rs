//! Dormand-Prince 5(4) with Shampine's free fourth-order dense output.

use super::Tolerances;
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

const SAFETY: f64 = 0.9;
const MAX_GROWTH: f64 = 5.0;
const MAX_SHRINK: f64 = 0.2;
pub const MAX_REJECTIONS: usize = 50;
const MAX_STEPS: usize = 5_000_000;

/// Dense-output polynomial of one accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment<const N: usize> {
    t0: f64,
    h: f64,
    r: [[f64; N]; 5],
}

impl<const N: usize> Segment<N> {
    pub fn eval(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let r = &self.r;
        std::array::from_fn(|i| r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i]))))
    }
}

/// One accepted step as returned by [`Stepper::step`].
#[derive(Debug, Clone)]
pub struct AcceptedStep<const N: usize> {
    pub t_start: f64,
    pub t_end: f64,
    pub y_start: [f64; N],
    pub y_end: [f64; N],
    pub error: f64,
    pub segment: Segment<N>,
}

pub struct Stepper<F, const N: usize> {
    field: F,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    tol: Tolerances,
    steps: usize,
    just_rejected: bool,
}

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

fn all_finite<const N: usize>(v: &[f64; N]) -> bool {
    v.iter().all(|x| x.is_finite())
}

impl<F, const N: usize> Stepper<F, N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(field: F, t0: f64, y0: [f64; N], tol: Tolerances, horizon: f64) -> Result<Self> {
        if !all_finite(&y0) {
            return Err(Error::NonFiniteState { t: t0 });
        }
        let k1 = field(t0, &y0);
        if !all_finite(&k1) {
            return Err(Error::NonFiniteState { t: t0 });
        }
        let mut s = Self {
            field,
            t: t0,
            y: y0,
            k1,
            h: 0.0,
            tol,
            steps: 0,
            just_rejected: false,
        };
        s.h = s.initial_step(horizon.abs().max(f64::MIN_POSITIVE));
        Ok(s)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    fn scale(&self, a: &[f64; N], b: &[f64; N]) -> [f64; N] {
        std::array::from_fn(|i| self.tol.atol + self.tol.rtol * a[i].abs().max(b[i].abs()))
    }

    fn rms(v: &[f64; N], sk: &[f64; N]) -> f64 {
        (v.iter().zip(sk).map(|(x, s)| (x / s).powi(2)).sum::<f64>() / N as f64).sqrt()
    }

    fn initial_step(&self, hmax: f64) -> f64 {
        let sk = self.scale(&self.y, &self.y);
        let dnf = Self::rms(&self.k1, &sk);
        let dny = Self::rms(&self.y, &sk);
        let mut h = if dnf <= 1e-5 || dny <= 1e-5 {
            1e-6
        } else {
            0.01 * dny / dnf
        };
        h = h.min(hmax);
        let y1 = axpy(&self.y, &[(h, &self.k1)]);
        let f1 = (self.field)(self.t + h, &y1);
        let diff: [f64; N] = std::array::from_fn(|i| f1[i] - self.k1[i]);
        let der2 = Self::rms(&diff, &sk) / h;
        let der12 = der2.abs().max(dnf);
        let h1 = if der12 <= 1e-15 || !der12.is_finite() {
            (h * 1e-3).max(1e-6)
        } else {
            (0.01 / der12).powf(0.2)
        };
        (100.0 * h).min(h1).min(hmax)
    }

    /// Take one accepted step that does not pass `t_limit`.
    pub fn step(&mut self, t_limit: f64) -> Result<AcceptedStep<N>> {
        self.steps += 1;
        if self.steps > MAX_STEPS {
            return Err(Error::StepSizeUnderflow { t: self.t });
        }
        let (t, y, k1) = (self.t, self.y, self.k1);
        let mut h = self.h;
        let mut rejections = 0;
        loop {
            if t + 1.01 * h >= t_limit {
                h = t_limit - t;
            }
            if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { t });
            }
            let f = &self.field;
            let y2 = axpy(&y, &[(h * A21, &k1)]);
            let k2 = f(t + C2 * h, &y2);
            let y3 = axpy(&y, &[(h * A31, &k1), (h * A32, &k2)]);
            let k3 = f(t + C3 * h, &y3);
            let y4 = axpy(&y, &[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)]);
            let k4 = f(t + C4 * h, &y4);
            let y5 = axpy(&y, &[(h * A51, &k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)]);
            let k5 = f(t + C5 * h, &y5);
            let y6 = axpy(
                &y,
                &[
                    (h * A61, &k1),
                    (h * A62, &k2),
                    (h * A63, &k3),
                    (h * A64, &k4),
                    (h * A65, &k5),
                ],
            );
            let t_new = if h == t_limit - t { t_limit } else { t + h };
            let k6 = f(t_new, &y6);
            let y_new = axpy(
                &y,
                &[
                    (h * A71, &k1),
                    (h * A73, &k3),
                    (h * A74, &k4),
                    (h * A75, &k5),
                    (h * A76, &k6),
                ],
            );
            let k7 = f(t_new, &y_new);
            let err_vec: [f64; N] = std::array::from_fn(|i| {
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
            });
            let err = Self::rms(&err_vec, &self.scale(&y, &y_new));

            if !err.is_finite() || !all_finite(&y_new) || !all_finite(&k7) {
                rejections += 1;
                if rejections > MAX_REJECTIONS {
                    return Err(Error::NonFiniteState { t });
                }
                h *= MAX_SHRINK;
                self.just_rejected = true;
                continue;
            }

            if err <= 1.0 {
                let ydiff: [f64; N] = std::array::from_fn(|i| y_new[i] - y[i]);
                let bspl: [f64; N] = std::array::from_fn(|i| h * k1[i] - ydiff[i]);
                let r3: [f64; N] = std::array::from_fn(|i| ydiff[i] - h * k7[i] - bspl[i]);
                let r4: [f64; N] = std::array::from_fn(|i| {
                    h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
                });
                let mut factor = if err == 0.0 {
                    MAX_GROWTH
                } else {
                    (SAFETY * err.powf(-0.2)).clamp(MAX_SHRINK, MAX_GROWTH)
                };
                if self.just_rejected {
                    factor = factor.min(1.0);
                }
                self.just_rejected = false;
                self.t = t_new;
                self.y = y_new;
                self.k1 = k7;
                self.h = h * factor;
                return Ok(AcceptedStep {
                    t_start: t,
                    t_end: t_new,
                    y_start: y,
                    y_end: y_new,
                    error: err,
                    segment: Segment {
                        t0: t,
                        h,
                        r: [y, ydiff, bspl, r3, r4],
                    },
                });
            }

            rejections += 1;
            if rejections > MAX_REJECTIONS {
                return Err(Error::StepSizeUnderflow { t });
            }
            h *= (SAFETY * err.powf(-0.2)).clamp(MAX_SHRINK, 1.0);
            self.just_rejected = true;
        }
    }
}

/// Solution of an initial value problem with continuous (dense) output.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    times: Vec<f64>,
    states: Vec<[f64; N]>,
    segments: Vec<Segment<N>>,
    errors: Vec<f64>,
}

impl<const N: usize> Trajectory<N> {
    pub fn new(t0: f64, y0: [f64; N]) -> Self {
        Self {
            times: vec![t0],
            states: vec![y0],
            segments: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn push(&mut self, step: AcceptedStep<N>) {
        debug_assert!(step.t_end > *self.times.last().unwrap());
        self.times.push(step.t_end);
        self.states.push(step.y_end);
        self.segments.push(step.segment);
        self.errors.push(step.error);
    }

    /// Node times (strictly increasing).
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[[f64; N]] {
        &self.states
    }

    /// Normalised local error estimate of each accepted step.
    pub fn step_errors(&self) -> &[f64] {
        &self.errors
    }

    pub fn steps(&self) -> usize {
        self.segments.len()
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn initial_state(&self) -> [f64; N] {
        self.states[0]
    }

    pub fn final_state(&self) -> [f64; N] {
        *self.states.last().unwrap()
    }

    /// Dense output at `t`, or `None` outside the covered interval.
    /// Node times return the stored samples exactly.
    pub fn try_eval(&self, t: f64) -> Option<[f64; N]> {
        if !(t >= self.t_start() && t <= self.t_end()) {
            return None;
        }
        let i = self.times.partition_point(|&s| s <= t) - 1;
        if self.times[i] == t || i == self.segments.len() {
            return Some(self.states[i]);
        }
        Some(self.segments[i].eval(t))
    }

    /// Dense output at `t`, clamped to the covered interval.
    pub fn eval(&self, t: f64) -> [f64; N] {
        self.try_eval(t.clamp(self.t_start(), self.t_end()))
            .expect("clamped time is covered")
    }

    /// Index of the step containing `t` (clamped).
    pub fn segment_index(&self, t: f64) -> usize {
        let i = self.times.partition_point(|&s| s <= t);
        i.saturating_sub(1).min(self.segments.len().saturating_sub(1))
    }

    /// Drop everything after `t`, making `(t, state)` the final node.
    pub fn truncate(&mut self, t: f64, state: [f64; N]) {
        let i = self.segment_index(t);
        if self.times[i] == t {
            self.times.truncate(i + 1);
            self.states.truncate(i + 1);
            self.segments.truncate(i);
            self.errors.truncate(i);
            self.states[i] = state;
            return;
        }
        self.times.truncate(i + 1);
        self.states.truncate(i + 1);
        self.segments.truncate(i + 1);
        self.errors.truncate(i + 1);
        self.times.push(t);
        self.states.push(state);
    }

    /// `n` evenly spaced samples over the full interval, endpoints included.
    pub fn uniform_samples(&self, n: usize) -> Vec<(f64, [f64; N])> {
        let (a, b) = (self.t_start(), self.t_end());
        let n = n.max(2);
        (0..n)
            .map(|k| {
                let t = if k == n - 1 {
                    b
                } else {
                    a + (b - a) * k as f64 / (n - 1) as f64
                };
                (t, self.eval(t))
            })
            .collect()
    }

    /// `int f(t, y(t)) dt` over the whole trajectory, five-point Gauss per step.
    pub fn quadrature(&self, f: impl Fn(f64, &[f64; N]) -> f64) -> f64 {
        self.cumulative_quadrature(f).last().copied().unwrap_or(0.0)
    }

    /// Running integral of `f(t, y(t))` at every node, starting at 0.
    pub fn cumulative_quadrature(&self, f: impl Fn(f64, &[f64; N]) -> f64) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.times.len());
        out.push(0.0);
        for (i, seg) in self.segments.iter().enumerate() {
            let (a, b) = (self.times[i], self.times[i + 1]);
            acc += crate::numerics::gauss5(|t| f(t, &seg.eval(t)), a, b);
            out.push(acc);
        }
        out
    }
}
