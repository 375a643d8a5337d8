//! First-order bifurcation function for time-periodic forcing.
//!
//! For a forcing `e(t)` with the cycle's period,
//! `F(s) = int_0^tau0 u0'(t + s) e(t) dt`. Simple zeros of `F` mark the
//! phases at which a periodic solution persists under weak forcing.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::cycle::PeriodicOrbit;
use crate::error::{Error, Result};
use crate::model::ScalarFunction;
use crate::numerics::{bracketed_root, golden_max};
use crate::report::CsvTable;

pub const MIN_SAMPLES: usize = 1024;
pub const ZERO_TOL: f64 = 1e-10;
pub const DEGENERATE_SLOPE: f64 = 1e-6;
pub const IDENTICALLY_ZERO: f64 = 1e-9;
const PERIODICITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct BifurcationFunction {
    pub tau0: f64,
    pub s: Vec<f64>,
    pub values: Vec<f64>,
    pub derivative: Vec<f64>,
    /// DFT of `values`, scaled by `1/n`, indexed by signed frequency.
    coefficients: Vec<(f64, Complex<f64>)>,
}

impl BifurcationFunction {
    pub fn from_samples(tau0: f64, values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 4 || !(tau0 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "need >= 4 samples and tau0 > 0, got {n}, {tau0}"
            )));
        }
        let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let coefficients: Vec<(f64, Complex<f64>)> = buf
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let freq = if 2 * k < n { k as f64 } else { k as f64 - n as f64 };
                // split the Nyquist mode evenly so the interpolant stays real
                let c = if 2 * k == n { c * 0.5 } else { *c };
                (std::f64::consts::TAU * freq / tau0, c / n as f64)
            })
            .collect();

        let mut dbuf: Vec<Complex<f64>> = coefficients
            .iter()
            .enumerate()
            .map(|(k, (w, c))| {
                if 2 * k == n {
                    Complex::new(0.0, 0.0)
                } else {
                    c * Complex::new(0.0, *w) * n as f64
                }
            })
            .collect();
        FftPlanner::new().plan_fft_inverse(n).process(&mut dbuf);
        let derivative = dbuf.iter().map(|c| c.re / n as f64).collect();
        let s = (0..n).map(|k| tau0 * k as f64 / n as f64).collect();
        Ok(Self {
            tau0,
            s,
            values,
            derivative,
            coefficients,
        })
    }

    /// Trigonometric interpolant of `F` at any `s`.
    pub fn eval(&self, s: f64) -> f64 {
        self.coefficients
            .iter()
            .map(|(w, c)| (c * Complex::from_polar(1.0, w * s)).re)
            .sum()
    }

    /// Derivative of the interpolant.
    pub fn eval_derivative(&self, s: f64) -> f64 {
        self.coefficients
            .iter()
            .map(|(w, c)| (c * Complex::new(0.0, *w) * Complex::from_polar(1.0, w * s)).re)
            .sum()
    }

    /// Mean of `F` over one period.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `|F(0) - F(tau0)|`, with `F(tau0)` continued from the samples
    /// through the interpolant.
    pub fn period_mismatch(&self) -> f64 {
        (self.eval(self.tau0) - self.values[0]).abs()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["s", "F", "Fprime"]);
        for i in 0..self.s.len() {
            t.push_numbers(&[self.s[i], self.values[i], self.derivative[i]]);
        }
        t
    }
}

/// Sample `F` on `n_samples` equally spaced shifts with the periodic
/// trapezoid rule on the same grid.
pub fn bifurcation_function(
    orbit: &PeriodicOrbit,
    e: &ScalarFunction,
    n_samples: usize,
) -> Result<BifurcationFunction> {
    let n = n_samples.max(MIN_SAMPLES);
    let tau0 = orbit.tau0;
    let scale = (0..=256)
        .map(|k| e.eval(tau0 * k as f64 / 256.0).abs())
        .fold(1.0, f64::max);
    let mismatch = (0..=256)
        .map(|k| {
            let t = tau0 * k as f64 / 256.0;
            (e.eval(t + tau0) - e.eval(t)).abs()
        })
        .fold(0.0, f64::max);
    if mismatch > PERIODICITY_TOL * scale {
        return Err(Error::NonPeriodicForcing { mismatch });
    }
    let h = tau0 / n as f64;
    let udot: Vec<f64> = (0..n).map(|j| orbit.state_at(h * j as f64)[1]).collect();
    let forcing: Vec<f64> = (0..n).map(|j| e.eval(h * j as f64)).collect();
    let values = (0..n)
        .map(|k| h * (0..n).map(|j| udot[(j + k) % n] * forcing[j]).sum::<f64>())
        .collect();
    BifurcationFunction::from_samples(tau0, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Zero {
    pub s0: f64,
    pub value: f64,
    pub fprime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroReport {
    pub simple: Vec<Zero>,
    pub degenerate: Vec<Zero>,
    pub identically_zero: bool,
}

pub fn find_simple_zeros(bf: &BifurcationFunction) -> ZeroReport {
    let mut report = ZeroReport {
        simple: Vec::new(),
        degenerate: Vec::new(),
        identically_zero: bf.max_abs() < IDENTICALLY_ZERO,
    };
    if report.identically_zero {
        return report;
    }
    let n = bf.values.len();
    let h = bf.tau0 / n as f64;
    let mut found: Vec<f64> = Vec::new();
    for k in 0..n {
        let (s0, f0) = (bf.s[k], bf.values[k]);
        let (s1, f1) = (s0 + h, bf.values[(k + 1) % n]);
        let fm = bf.values[(k + n - 1) % n];
        if f0.abs() < ZERO_TOL {
            found.push(s0);
        } else if f0 * f1 < 0.0 && f1.abs() >= ZERO_TOL {
            let (root, _, _) = bracketed_root(|s| bf.eval(s), s0, s1, f0, f1, ZERO_TOL, 80);
            found.push(root);
        } else if f0.abs() <= fm.abs() && f0.abs() <= f1.abs() && fm * f1 > 0.0 {
            // touching zero candidate between neighbours of equal sign
            let (s, neg_abs) = golden_max(|s| -bf.eval(s).abs(), s0 - h, s1, 1e-14 * bf.tau0);
            if -neg_abs < ZERO_TOL {
                found.push(s);
            }
        }
    }
    for s in found {
        let s = s.rem_euclid(bf.tau0);
        let dup = report.simple.iter().chain(&report.degenerate).any(|z| {
            let d = (z.s0 - s).abs();
            d.min(bf.tau0 - d) < 0.5 * h
        });
        if dup {
            continue;
        }
        let zero = Zero {
            s0: s,
            value: bf.eval(s),
            fprime: bf.eval_derivative(s),
        };
        if zero.fprime.abs() < DEGENERATE_SLOPE {
            report.degenerate.push(zero);
        } else {
            report.simple.push(zero);
        }
    }
    report
}
