//! Existence certificate for periodic solutions of the perturbed oscillator.
//!
//! All suprema are taken by dense sampling with local golden-section
//! refinement. The result is converged, not rigorous.

use rayon::prelude::*;
use serde::Serialize;

use crate::cycle::{orbit_geometry, PeriodicOrbit};
use crate::error::Result;
use crate::floquet::FloquetData;
use crate::model::LienardSystem;
use crate::numerics::sup_on_interval;
use crate::report::{fmt_num, CsvTable};

/// Samples per sup-norm over `[-r, r]` and over time intervals.
pub const SUP_SAMPLES: usize = 4096;
/// `(s, u, u')` grid for the perturbation constants.
pub const Q_GRID: (usize, usize) = (128, 64);
/// Margin keeping the reported period window strictly inside `tau0/2`.
pub const TAU1_MARGIN: f64 = 1e-6;

/// Sampling resolution for the suprema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SamplingGrid {
    pub sup_samples: usize,
    /// Points in phase and along each state axis.
    pub q_grid: (usize, usize),
}

impl Default for SamplingGrid {
    fn default() -> Self {
        Self {
            sup_samples: SUP_SAMPLES,
            q_grid: Q_GRID,
        }
    }
}

impl SamplingGrid {
    pub fn doubled(self) -> Self {
        Self {
            sup_samples: 2 * self.sup_samples,
            q_grid: (2 * self.q_grid.0, 2 * self.q_grid.1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateConstants {
    pub r: f64,
    pub sigma: f64,
    pub max_radius: f64,
    pub a: f64,
    pub tau0: f64,
    pub rho2: f64,
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
    pub f1: f64,
    pub f2: f64,
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "K_inv")]
    pub k_inv: f64,
    #[serde(rename = "K_half")]
    pub k_half: f64,
    #[serde(rename = "P")]
    pub p: f64,
}

fn sup_abs(f: impl Fn(f64) -> f64, r: f64, n: usize) -> f64 {
    sup_on_interval(|x| f(x).abs(), -r, r, n).1
}

/// `(q0, q1, q2)` for `q(s, x) = (-gamma(s, x2, -x1 - F(x2)), 0)` over one
/// phase period and the disk of radius `r`. `q1` uses the entrywise matrix
/// norm of `dq/dx`.
fn perturbation_constants(sys: &LienardSystem, r: f64, (ns, nx): (usize, usize)) -> (f64, f64, f64) {
    let Some(gamma) = sys.perturbation() else {
        return (0.0, 0.0, 0.0);
    };
    let axis: Vec<f64> = (0..nx).map(|i| -r + 2.0 * r * i as f64 / (nx - 1) as f64).collect();
    (0..ns)
        .into_par_iter()
        .map(|k| {
            let s = k as f64 / ns as f64;
            let mut acc = (0.0f64, 0.0f64, 0.0f64);
            for &u in &axis {
                for &udot in &axis {
                    let x = [-udot - sys.big_f().eval(u), u];
                    if !sys.in_disk(x, r) {
                        continue;
                    }
                    let d = gamma.partials(s, u, udot);
                    // dq1/dx1 = gamma_udot; dq1/dx2 = -gamma_u + f(x2) gamma_udot
                    let dx1 = d.d_udot;
                    let dx2 = -d.d_u + sys.f().eval(u) * d.d_udot;
                    acc.0 = acc.0.max(d.value.abs());
                    acc.1 = acc.1.max(2.0 * dx1.abs().max(dx2.abs()));
                    acc.2 = acc.2.max(d.d_theta.abs());
                }
            }
            acc
        })
        .reduce(|| (0.0, 0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1), a.2.max(b.2)))
}

pub fn compute_constants(
    sys: &LienardSystem,
    orbit: &PeriodicOrbit,
    fd: &FloquetData,
    r: f64,
) -> Result<EstimateConstants> {
    compute_constants_with(sys, orbit, fd, r, SamplingGrid::default())
}

pub fn compute_constants_with(
    sys: &LienardSystem,
    orbit: &PeriodicOrbit,
    fd: &FloquetData,
    r: f64,
    grid: SamplingGrid,
) -> Result<EstimateConstants> {
    let geo = orbit_geometry(orbit, r)?;
    let (g, f) = (sys.g(), sys.f());
    let n = grid.sup_samples;
    let (q0, q1, q2) = perturbation_constants(sys, r, grid.q_grid);
    let (k, k_inv) = fd.fundamental.sup_norms(|m| m.max_norm(), n);
    let p = sup_on_interval(
        |t| {
            let [u, v] = orbit.state_at(t);
            g.eval(u).hypot(v)
        },
        0.0,
        orbit.tau0,
        n,
    )
    .1;
    Ok(EstimateConstants {
        r,
        sigma: geo.sigma,
        max_radius: geo.max_radius,
        a: orbit.a,
        tau0: orbit.tau0,
        rho2: fd.rho2(),
        g0: sup_abs(|x| g.eval(x), r, n),
        g1: sup_abs(|x| g.deriv(x), r, n),
        g2: sup_abs(|x| g.deriv2(x), r, n),
        f1: sup_abs(|x| f.eval(x), r, n),
        f2: sup_abs(|x| f.deriv(x), r, n),
        q0,
        q1,
        q2,
        k,
        k_inv,
        k_half: 0.5 * k,
        p,
    })
}

impl EstimateConstants {
    /// `sigma exp(-3/2 g1 tau0)`.
    pub fn rhs(&self) -> f64 {
        self.sigma * (-1.5 * self.g1 * self.tau0).exp()
    }

    /// Largest `|epsilon|` admitted with `h = 0`.
    pub fn epsilon0(&self) -> f64 {
        2.0 * self.rhs() / (3.0 * self.g0)
    }

    pub fn tau1(&self) -> f64 {
        0.5 * self.tau0 - TAU1_MARGIN
    }
}

pub const REASON_AMPLITUDE: &str = "amplitude inequality";
pub const REASON_PERIOD: &str = "period window";
pub const REASON_PHASE: &str = "phase bound";
pub const REASON_STABILITY: &str = "stability condition";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExistenceCertificate {
    pub constants: EstimateConstants,
    pub epsilon: f64,
    pub h: f64,
    pub tau: f64,
    pub phi: f64,
    pub epsilon0: f64,
    pub tau1: f64,
    pub tau_window: (f64, f64),
    pub phi_bound: f64,
    /// `3/2 g0 |epsilon| + |h|`.
    pub inequality_lhs: f64,
    /// `3/2 q0 |epsilon| + |h|`, for comparison.
    pub inequality_lhs_q0: f64,
    pub inequality_rhs: f64,
    #[serde(rename = "condition10")]
    pub stable: bool,
    pub verdict: bool,
    /// Names of the failed conditions; empty when the verdict holds.
    pub reasons: Vec<String>,
}

pub fn certify(c: &EstimateConstants, epsilon: f64, h: f64, tau: f64, phi: f64, stable: bool) -> ExistenceCertificate {
    let rhs = c.rhs();
    let lhs = 1.5 * c.g0 * epsilon.abs() + h.abs();
    let half = 0.5 * c.tau0;
    let tau1 = c.tau1();
    let mut reasons = Vec::new();
    if !(lhs < rhs) {
        reasons.push(REASON_AMPLITUDE.to_string());
    }
    if !((tau - c.tau0).abs() < half) {
        reasons.push(REASON_PERIOD.to_string());
    }
    if !(phi.abs() < half) {
        reasons.push(REASON_PHASE.to_string());
    }
    if !stable {
        reasons.push(REASON_STABILITY.to_string());
    }
    ExistenceCertificate {
        constants: *c,
        epsilon,
        h,
        tau,
        phi,
        epsilon0: c.epsilon0(),
        tau1,
        tau_window: (c.tau0 - tau1, c.tau0 + tau1),
        phi_bound: half,
        inequality_lhs: lhs,
        inequality_lhs_q0: 1.5 * c.q0 * epsilon.abs() + h.abs(),
        inequality_rhs: rhs,
        stable,
        verdict: reasons.is_empty(),
        reasons,
    }
}

impl ExistenceCertificate {
    pub const CSV_HEADER: [&'static str; 13] = [
        "epsilon", "h", "tau", "phi", "r", "sigma", "g0", "g1", "lhs", "lhs_q0", "rhs", "epsilon0", "verdict",
    ];

    pub fn csv_cells(&self) -> Vec<String> {
        let c = &self.constants;
        let mut cells: Vec<String> = [
            self.epsilon,
            self.h,
            self.tau,
            self.phi,
            c.r,
            c.sigma,
            c.g0,
            c.g1,
            self.inequality_lhs,
            self.inequality_lhs_q0,
            self.inequality_rhs,
            self.epsilon0,
        ]
        .iter()
        .map(|&x| fmt_num(x))
        .collect();
        cells.push(self.verdict.to_string());
        cells
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&Self::CSV_HEADER);
        t.push_cells(self.csv_cells());
        t
    }
}
