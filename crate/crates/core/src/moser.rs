//! Moser's example: `x'' + x + x^3 + eps f(t, x, x') = 0` with a coupling
//! that only acts in the quadrants `x x' > 0`.
//!
//! `V = 2x^2 + x^4 + 2x'^2` satisfies `V' = -4 eps x' f`, which is negative
//! inside those quadrants and zero elsewhere, so no nonconstant solution can
//! be periodic. The scan here checks that decay numerically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::{integrate, Tolerances, Trajectory};

pub const MAX_EPSILON: f64 = 0.5;
/// Allowed rise of `V` above its running minimum.
pub const UPSTEP_TOL: f64 = 1e-9;
pub const STRICT_DECAY: f64 = 1e-12;
/// Sample spacing for the monotonicity and rate checks.
pub const SAMPLE_DT: f64 = 0.005;
const RATE_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoserSystem {
    epsilon: f64,
}

/// `x^2 y^3` on the quadrants `x y > 0`, zero elsewhere. C^1 across the axes.
pub fn q(x: f64, y: f64) -> f64 {
    if x * y > 0.0 {
        x * x * y * y * y
    } else {
        0.0
    }
}

pub fn dq_dx(x: f64, y: f64) -> f64 {
    if x * y > 0.0 {
        2.0 * x * y * y * y
    } else {
        0.0
    }
}

pub fn dq_dy(x: f64, y: f64) -> f64 {
    if x * y > 0.0 {
        3.0 * x * x * y * y
    } else {
        0.0
    }
}

pub fn lyapunov_v(x: f64, xdot: f64) -> f64 {
    2.0 * x * x + x.powi(4) + 2.0 * xdot * xdot
}

pub fn lyapunov_rate(sys: &MoserSystem, t: f64, x: f64, xdot: f64) -> f64 {
    -4.0 * sys.epsilon * xdot * sys.coupling(t, x, xdot)
}

impl MoserSystem {
    /// `0 <= epsilon <= 0.5`; `epsilon = 0` gives the conservative Duffing core.
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..=MAX_EPSILON).contains(&epsilon) {
            return Err(Error::InvalidInput(format!(
                "epsilon must lie in [0, {MAX_EPSILON}], got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `f(t, x, y) = (2 + cos 2 pi t) q(x, y)`.
    pub fn coupling(&self, t: f64, x: f64, y: f64) -> f64 {
        (2.0 + (std::f64::consts::TAU * t).cos()) * q(x, y)
    }

    pub fn coupling_dy(&self, t: f64, x: f64, y: f64) -> f64 {
        (2.0 + (std::f64::consts::TAU * t).cos()) * dq_dy(x, y)
    }

    /// `x + x^3 + eps f(t, x, y)`.
    pub fn phi(&self, t: f64, x: f64, y: f64) -> f64 {
        x + x * x * x + self.epsilon * self.coupling(t, x, y)
    }

    pub fn field(&self, t: f64, s: &[f64; 2]) -> [f64; 2] {
        [s[1], -self.phi(t, s[0], s[1])]
    }

    pub fn simulate(&self, start: [f64; 2], t_final: f64, tol: Tolerances) -> Result<Trajectory<2>> {
        integrate(|t, s| self.field(t, s), start, 0.0, t_final, tol)
    }

    /// Re-check the defining properties of the coupling on `n` random
    /// points of `[0, 1] x [-1, 1]^2`.
    pub fn verify_construction(&self, n: usize, seed: u64) -> ConstructionReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failures = [0usize; 4];
        for _ in 0..n {
            let t: f64 = rng.gen_range(0.0..1.0);
            let x: f64 = rng.gen_range(-1.0..1.0);
            let y: f64 = rng.gen_range(-1.0..1.0);
            let f = self.coupling(t, x, y);
            if (self.coupling(t + 1.0, x, y) - f).abs() > 1e-12 * f.abs() {
                failures[0] += 1;
            }
            if x * y <= 0.0 {
                if f != 0.0 || self.coupling_dy(t, x, y) != 0.0 {
                    failures[1] += 1;
                }
            } else {
                if !(self.coupling_dy(t, x, y) > 0.0) {
                    failures[2] += 1;
                }
                if !(x * f > 0.0 && y * f > 0.0) {
                    failures[3] += 1;
                }
            }
        }
        let origin = self.coupling(0.0, 0.0, 0.0);
        let checks = vec![
            ("period one in t", failures[0]),
            ("vanishes off the quadrants", failures[1]),
            ("increasing in y on the quadrants", failures[2]),
            ("x f > 0 and y f > 0 on the quadrants", failures[3]),
            ("vanishes at the origin", usize::from(origin != 0.0)),
        ];
        ConstructionReport {
            samples: n,
            passed: checks.iter().all(|c| c.1 == 0),
            checks: checks
                .into_iter()
                .map(|(name, failures)| ConstructionCheck { name, failures })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructionCheck {
    pub name: &'static str,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructionReport {
    pub samples: usize,
    pub checks: Vec<ConstructionCheck>,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanOptions {
    pub n_trajectories: usize,
    pub t_final: f64,
    /// Half-width of the start box; defaults to `epsilon`.
    pub box_size: Option<f64>,
    pub seed: u64,
    pub tol: Tolerances,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            n_trajectories: 100,
            t_final: 20.0,
            box_size: None,
            seed: 0,
            tol: Tolerances {
                rtol: 1e-12,
                atol: 1e-14,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub start: [f64; 2],
    #[serde(rename = "V_initial")]
    pub v_initial: f64,
    #[serde(rename = "V_final")]
    pub v_final: f64,
    pub max_upstep: f64,
    pub strict_decay: bool,
    /// Time spent with `x x' > 0`.
    pub quadrant_time: f64,
    /// `max |dV/dt + 4 eps x' f|` with `dV/dt` from central differences.
    pub rate_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub epsilon: f64,
    pub n_trajectories: usize,
    pub t_final: f64,
    pub box_size: f64,
    pub seed: u64,
    pub rtol: f64,
    pub atol: f64,
    pub trajectories: Vec<TrajectoryRecord>,
    pub max_upstep: f64,
    pub max_rate_gap: f64,
    pub strictly_decaying: usize,
    /// Trajectories that entered a quadrant but lost less than the strict
    /// decay threshold.
    pub unresolved: usize,
    /// Every trajectory that entered a quadrant strictly lost energy.
    pub no_periodic_orbit: bool,
}

fn scan_one(sys: &MoserSystem, start: [f64; 2], t_final: f64, tol: Tolerances) -> Result<TrajectoryRecord> {
    let traj = sys.simulate(start, t_final, tol)?;
    let v_at = |t: f64| {
        let [x, y] = traj.eval(t);
        lyapunov_v(x, y)
    };
    let n = (t_final / SAMPLE_DT).ceil() as usize;
    let mut running_min = lyapunov_v(start[0], start[1]);
    let v_initial = running_min;
    let (mut max_upstep, mut quadrant_time, mut rate_gap) = (0.0f64, 0.0, 0.0f64);
    for k in 1..=n {
        let t = (k as f64 * SAMPLE_DT).min(t_final);
        let [x, y] = traj.eval(t);
        let v = lyapunov_v(x, y);
        let up = v - running_min;
        if up > UPSTEP_TOL {
            return Err(Error::MonotonicityViolation { upstep: up, t });
        }
        max_upstep = max_upstep.max(up);
        running_min = running_min.min(v);
        if x * y > 0.0 {
            quadrant_time += SAMPLE_DT;
        }
        if t + RATE_FD_STEP < t_final {
            let dv = (v_at(t + RATE_FD_STEP) - v_at(t - RATE_FD_STEP)) / (2.0 * RATE_FD_STEP);
            rate_gap = rate_gap.max((dv - lyapunov_rate(sys, t, x, y)).abs());
        }
    }
    let v_final = v_at(t_final);
    Ok(TrajectoryRecord {
        start,
        v_initial,
        v_final,
        max_upstep,
        strict_decay: v_initial - v_final > STRICT_DECAY,
        quadrant_time,
        rate_gap,
    })
}

/// Integrate `n_trajectories` seeded random starts from the box
/// `|x|, |x'| < box_size` and check that `V` never increases.
pub fn nonexistence_scan(sys: &MoserSystem, opts: &ScanOptions) -> Result<ScanReport> {
    opts.tol.validate()?;
    let box_size = opts.box_size.unwrap_or(sys.epsilon);
    if !(box_size > 0.0 && box_size.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "box size must be positive, got {box_size}"
        )));
    }
    if !(opts.t_final >= 20.0 && opts.t_final.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "t_final must cover at least 20 periods, got {}",
            opts.t_final
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<[f64; 2]> = (0..opts.n_trajectories)
        .map(|_| [rng.gen_range(-box_size..box_size), rng.gen_range(-box_size..box_size)])
        .collect();
    let trajectories = starts
        .par_iter()
        .map(|&s| scan_one(sys, s, opts.t_final, opts.tol))
        .collect::<Result<Vec<_>>>()?;
    let entered = |r: &&TrajectoryRecord| r.quadrant_time > 0.0;
    let unresolved = trajectories.iter().filter(entered).filter(|r| !r.strict_decay).count();
    Ok(ScanReport {
        epsilon: sys.epsilon,
        n_trajectories: opts.n_trajectories,
        t_final: opts.t_final,
        box_size,
        seed: opts.seed,
        rtol: opts.tol.rtol,
        atol: opts.tol.atol,
        max_upstep: trajectories.iter().map(|r| r.max_upstep).fold(0.0, f64::max),
        max_rate_gap: trajectories.iter().map(|r| r.rate_gap).fold(0.0, f64::max),
        strictly_decaying: trajectories.iter().filter(|r| r.strict_decay).count(),
        no_periodic_orbit: sys.epsilon > 0.0 && unresolved == 0,
        unresolved,
        trajectories,
    })
}
