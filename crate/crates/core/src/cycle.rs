//! Limit cycles of the unperturbed oscillator by scalar Newton shooting on
//! the half-line `{u' = 0, u > 0}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::LienardSystem;
use crate::numerics::sup_on_interval;
use crate::ode::{integrate, integrate_to_section, Direction, Section, Tolerances, Trajectory};
use crate::report::CsvTable;

pub const MAX_SHOOTING_STEPS: usize = 20;
pub const UPDATE_TOL: f64 = 1e-10;
pub const CLOSURE_TOL: f64 = 1e-8;
pub const SINGULAR_TOL: f64 = 1e-8;
pub const MIN_SAMPLES: usize = 512;
const GEOMETRY_SAMPLES: usize = 4096;
const MAX_HALVINGS: usize = 8;

/// A closed orbit `(u0, u0')` on `[0, tau0]` with `u0(0) = a`, `u0'(0) = 0`.
#[derive(Debug, Clone)]
pub struct PeriodicOrbit {
    pub a: f64,
    pub tau0: f64,
    pub closure_residual: f64,
    pub max_radius: f64,
    pub newton_iterations: usize,
    /// `P'(a)` of the scalar return map, when the orbit came from shooting.
    pub return_map_derivative: Option<f64>,
    trajectory: Trajectory<2>,
}

impl PeriodicOrbit {
    fn from_trajectory(a: f64, trajectory: Trajectory<2>) -> Self {
        let tau0 = trajectory.t_end();
        let [u1, v1] = trajectory.final_state();
        let closure_residual = (u1 - a).hypot(v1);
        let (_, max_radius) = sup_on_interval(
            |t| {
                let [u, v] = trajectory.eval(t);
                u.hypot(v)
            },
            0.0,
            tau0,
            GEOMETRY_SAMPLES,
        );
        Self {
            a,
            tau0,
            closure_residual,
            max_radius,
            newton_iterations: 0,
            return_map_derivative: None,
            trajectory,
        }
    }

    /// Integrate from `(a, 0)` for a known period. Useful for fixtures
    /// where shooting does not apply, such as the orbits of a center.
    pub fn integrate(sys: &LienardSystem, a: f64, tau0: f64, tol: Tolerances) -> Result<Self> {
        if !(a > 0.0) || !(tau0 > 0.0) {
            return Err(Error::InvalidInput(format!("need a > 0 and tau0 > 0, got {a}, {tau0}")));
        }
        let unperturbed = sys.unperturbed();
        let traj = integrate(|t, y| unperturbed.uv_field(t, y), [a, 0.0], 0.0, tau0, tol)?;
        Ok(Self::from_trajectory(a, traj))
    }

    pub fn trajectory(&self) -> &Trajectory<2> {
        &self.trajectory
    }

    /// `(u0(t), u0'(t))`, extended periodically.
    pub fn state_at(&self, t: f64) -> [f64; 2] {
        self.trajectory.eval(t.rem_euclid(self.tau0))
    }

    /// `n` evenly spaced samples on `[0, tau0]` (at least 512).
    pub fn sample(&self, n: usize) -> Vec<(f64, [f64; 2])> {
        self.trajectory.uniform_samples(n.max(MIN_SAMPLES))
    }

    pub fn to_csv(&self, n: usize) -> CsvTable {
        let mut table = CsvTable::new(&["t", "u", "udot"]);
        for (t, [u, v]) in self.sample(n) {
            table.push_numbers(&[t, u, v]);
        }
        table
    }
}

struct Return {
    p: f64,
    period: f64,
    trajectory: Trajectory<2>,
}

struct ReturnMap<'a> {
    sys: &'a LienardSystem,
    section: Section<2>,
    max_time: f64,
    tol: Tolerances,
}

impl ReturnMap<'_> {
    fn eval(&self, a: f64) -> Result<Return> {
        let sys = self.sys;
        let (trajectory, event) = integrate_to_section(
            |t, y| sys.uv_field(t, y),
            [a, 0.0],
            0.0,
            self.section,
            self.max_time,
            self.tol,
        )
        .map_err(|e| match e {
            Error::NoCrossing { max_time } => Error::NoReturn { max_time },
            other => other,
        })?;
        Ok(Return {
            p: event.state[0],
            period: event.t,
            trajectory,
        })
    }

    fn derivative(&self, a: f64) -> Result<f64> {
        let d = 1e-6 * a.max(1.0);
        Ok((self.eval(a + d)?.p - self.eval(a - d)?.p) / (2.0 * d))
    }
}

fn guess_frequency(sys: &LienardSystem, a: f64) -> f64 {
    [(sys.g().eval(a) / a).abs().sqrt(), sys.g().deriv(0.0).abs().sqrt()]
        .into_iter()
        .filter(|w| *w > 0.0 && w.is_finite())
        .fold(f64::INFINITY, f64::min)
}

/// Newton shooting for the isolated periodic orbit through `(a, 0)`.
///
/// The Newton step on `P(a) - a` is backtracked on the merit `|P(a) - a| / a`,
/// which keeps the iteration away from the equilibrium `a = 0`; when
/// backtracking fails a Newton step on `ln(P(a) / a)` is taken instead.
pub fn find_limit_cycle(sys: &LienardSystem, a_guess: f64, tol: Tolerances) -> Result<PeriodicOrbit> {
    tol.validate()?;
    if !(a_guess > 0.0 && a_guess.is_finite()) {
        return Err(Error::InvalidInput(format!("a_guess must be positive, got {a_guess}")));
    }
    if sys.is_perturbed() {
        return Err(Error::InvalidInput("shooting requires the unperturbed system".into()));
    }
    let g_a = sys.g().eval(a_guess);
    if g_a == 0.0 || !g_a.is_finite() {
        return Err(Error::DegenerateAmplitude { value: g_a });
    }
    // u'' = -g(a) at the start fixes which way u' leaves the section.
    let direction = if g_a > 0.0 {
        Direction::Decreasing
    } else {
        Direction::Increasing
    };
    let omega = guess_frequency(sys, a_guess);
    let max_time = if omega.is_finite() { 50.0 / omega } else { 1e3 };
    let map = ReturnMap {
        sys,
        section: Section::coordinate(1, 0.0, direction).with_guard(0, 0.0),
        max_time,
        tol,
    };

    let mut a = a_guess;
    let mut current = map.eval(a)?;
    for iteration in 1..=MAX_SHOOTING_STEPS {
        let dp = map.derivative(a)?;
        if (dp - 1.0).abs() < SINGULAR_TOL {
            return Err(Error::SingularShooting { derivative: dp });
        }
        let residual = current.p - a;
        let step = -residual / (dp - 1.0);
        let merit = residual.abs() / a;

        let (a_new, next) = if step.abs() < 1e-8 * a.max(1.0) {
            (a + step, map.eval(a + step)?)
        } else {
            let mut accepted = None;
            let mut lambda = 1.0;
            for _ in 0..=MAX_HALVINGS {
                let trial = a + lambda * step;
                if trial > 0.0 {
                    if let Ok(r) = map.eval(trial) {
                        if (r.p - trial).abs() / trial < merit {
                            accepted = Some((trial, r));
                            break;
                        }
                    }
                }
                lambda *= 0.5;
            }
            match accepted {
                Some(x) => x,
                None => {
                    let h = (current.p / a).ln();
                    let dh = dp / current.p - 1.0 / a;
                    if !(current.p > 0.0) || !h.is_finite() || dh == 0.0 {
                        return Err(Error::Diverged { iterations: iteration });
                    }
                    let trial = a * (-h / (a * dh)).exp();
                    (trial, map.eval(trial)?)
                }
            }
        };

        let update = (a_new - a).abs();
        a = a_new;
        current = next;
        let closure = (current.p - a).hypot(current.trajectory.final_state()[1]);
        if update < UPDATE_TOL && closure < CLOSURE_TOL {
            let mut orbit = PeriodicOrbit::from_trajectory(a, current.trajectory);
            debug_assert!((orbit.tau0 - current.period).abs() < 1e-12);
            orbit.newton_iterations = iteration;
            orbit.return_map_derivative = Some(map.derivative(a)?);
            return Ok(orbit);
        }
    }
    Err(Error::Diverged {
        iterations: MAX_SHOOTING_STEPS,
    })
}

/// Largest radius of the orbit in the `(u, u')` plane and its distance to the
/// boundary of the disk of radius `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitGeometry {
    pub r: f64,
    pub max_radius: f64,
    pub sigma: f64,
}

pub fn orbit_geometry(orbit: &PeriodicOrbit, r: f64) -> Result<OrbitGeometry> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {r}")));
    }
    let sigma = r - orbit.max_radius;
    if sigma <= 0.0 {
        return Err(Error::OrbitOutsideS {
            r,
            max_radius: orbit.max_radius,
        });
    }
    Ok(OrbitGeometry {
        r,
        max_radius: orbit.max_radius,
        sigma,
    })
}
