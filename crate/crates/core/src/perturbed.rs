//! Periodic solutions of the forced oscillator near a limit cycle.
//!
//! The forcing `eps * gamma((t + phi) / tau, u, u')` has the same period
//! `tau` as the solution sought. Newton's method runs on the two unknowns
//! `(tau, h)` with the initial state pinned to `(a + h, 0)`.

use serde::Serialize;

use crate::cycle::PeriodicOrbit;
use crate::error::{Error, Result};
use crate::floquet::FloquetData;
use crate::linalg::Mat2;
use crate::model::LienardSystem;
use crate::ode::{integrate, Tolerances, Trajectory};
use crate::report::{fmt_num, CsvTable};

pub const MAX_NEWTON_STEPS: usize = 25;
pub const MAX_CONDITION: f64 = 1e12;
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const STEP_TOL: f64 = 1e-10;
const MAX_HALVINGS: usize = 8;

#[derive(Debug, Clone)]
pub struct PerturbedSolution {
    pub epsilon: f64,
    pub phi: f64,
    pub tau: f64,
    pub h: f64,
    /// `|state(tau) - state(0)|`.
    pub residual: f64,
    pub newton_iterations: usize,
    system: LienardSystem,
    trajectory: Trajectory<2>,
}

impl PerturbedSolution {
    /// `(u, u')` on `[0, tau]`.
    pub fn trajectory(&self) -> &Trajectory<2> {
        &self.trajectory
    }

    /// The forced system with its period set to `tau`.
    pub fn system(&self) -> &LienardSystem {
        &self.system
    }

    /// Integrate the second period `[tau, 2 tau]` and return the largest
    /// deviation from the first period over `samples` points.
    pub fn periodicity_defect(&self, samples: usize, tol: Tolerances) -> Result<f64> {
        let (sys, phi, tau) = (&self.system, self.phi, self.tau);
        let second = integrate(
            |t, y| sys.uv_field(t + phi, y),
            self.trajectory.final_state(),
            tau,
            2.0 * tau,
            tol,
        )?;
        let n = samples.max(2);
        Ok((0..=n)
            .map(|k| {
                let t = tau * k as f64 / n as f64;
                let (p, q) = (self.trajectory.eval(t), second.eval(t + tau));
                (p[0] - q[0]).hypot(p[1] - q[1])
            })
            .fold(0.0, f64::max))
    }
}

struct Residual<'a> {
    sys: &'a LienardSystem,
    a: f64,
    phi: f64,
    tol: Tolerances,
}

impl Residual<'_> {
    fn run(&self, tau: f64, h: f64) -> Result<(LienardSystem, Trajectory<2>, [f64; 2])> {
        if !(tau > 0.0) {
            return Err(Error::NewtonDiverged { iterations: 0 });
        }
        let sys = self.sys.with_tau(tau);
        let phi = self.phi;
        let start = [self.a + h, 0.0];
        let traj = integrate(|t, y| sys.uv_field(t + phi, y), start, 0.0, tau, self.tol)?;
        let end = traj.final_state();
        Ok((sys, traj, [end[0] - start[0], end[1] - start[1]]))
    }

    fn eval(&self, x: [f64; 2]) -> Result<[f64; 2]> {
        Ok(self.run(x[0], x[1])?.2)
    }
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Solve for the periodic solution at `(epsilon, phi)`, starting Newton
/// from `(tau_guess, h_guess)`.
#[allow(clippy::too_many_arguments)]
pub fn solve_perturbed(
    sys: &LienardSystem,
    orbit0: &PeriodicOrbit,
    fd: &FloquetData,
    epsilon: f64,
    phi: f64,
    tau_guess: f64,
    h_guess: f64,
    tol: Tolerances,
) -> Result<PerturbedSolution> {
    tol.validate()?;
    if !epsilon.is_finite() || !phi.is_finite() {
        return Err(Error::InvalidInput("epsilon and phi must be finite".into()));
    }
    if epsilon != 0.0 && sys.perturbation().is_none() {
        return Err(Error::InvalidInput("nonzero epsilon needs a perturbation".into()));
    }
    if fd.jacobi.det_j == 0.0 {
        return Err(Error::SingularJacobian {
            condition: f64::INFINITY,
        });
    }
    let (a, tau0) = (orbit0.a, orbit0.tau0);
    let forced = sys.with_epsilon(epsilon);
    let map = Residual {
        sys: &forced,
        a,
        phi,
        tol,
    };
    let in_window = |tau: f64| (tau - tau0).abs() < 0.5 * tau0;
    let (dt_fd, dh_fd) = (1e-6 * tau_guess.abs().max(1.0), 1e-6 * a.abs().max(1.0));

    let mut x = [tau_guess, h_guess];
    if !in_window(x[0]) {
        return Err(Error::NewtonDiverged { iterations: 0 });
    }
    let mut r = map.eval(x)?;
    for iteration in 1..=MAX_NEWTON_STEPS {
        let r_t = map.eval([x[0] + dt_fd, x[1]])?;
        let r_h = map.eval([x[0], x[1] + dh_fd])?;
        let jac = Mat2::new(
            (r_t[0] - r[0]) / dt_fd,
            (r_h[0] - r[0]) / dh_fd,
            (r_t[1] - r[1]) / dt_fd,
            (r_h[1] - r[1]) / dh_fd,
        );
        let condition = jac.condition_number();
        if !(condition <= MAX_CONDITION) {
            return Err(Error::SingularJacobian { condition });
        }
        let inv = jac.inverse().ok_or(Error::SingularJacobian { condition })?;
        let dx = inv.mul_vec(r);
        let mut lambda = 1.0;
        let mut next = None;
        for k in 0..=MAX_HALVINGS {
            let trial = [x[0] - lambda * dx[0], x[1] - lambda * dx[1]];
            if in_window(trial[0]) {
                if let Ok(rt) = map.eval(trial) {
                    if norm(rt) < norm(r) || k == MAX_HALVINGS {
                        next = Some((trial, rt));
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        let Some((x_new, r_new)) = next else {
            return Err(Error::NewtonDiverged { iterations: iteration });
        };
        let step = norm([x_new[0] - x[0], x_new[1] - x[1]]);
        x = x_new;
        r = r_new;
        if norm(r) < RESIDUAL_TOL && step < STEP_TOL {
            let (system, trajectory, res) = map.run(x[0], x[1])?;
            return Ok(PerturbedSolution {
                epsilon,
                phi,
                tau: x[0],
                h: x[1],
                residual: norm(res),
                newton_iterations: iteration,
                system,
                trajectory,
            });
        }
    }
    Err(Error::NewtonDiverged {
        iterations: MAX_NEWTON_STEPS,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub phi: f64,
    pub tau: f64,
    pub h: f64,
    pub residual: f64,
    pub iterations: usize,
    /// `"converged"` or the error name.
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Index of the first failed row, if any.
    pub failure_index: Option<usize>,
}

impl SweepTable {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["epsilon", "phi", "tau", "h", "residual", "iterations", "status"]);
        for r in &self.rows {
            t.push_cells(vec![
                fmt_num(r.epsilon),
                fmt_num(r.phi),
                fmt_num(r.tau),
                fmt_num(r.h),
                fmt_num(r.residual),
                r.iterations.to_string(),
                r.status.clone(),
            ]);
        }
        t
    }
}

/// Natural continuation in `epsilon` along a grid starting at 0. Each solve
/// starts from the previous solution; the sweep stops at the first failure.
pub fn sweep_epsilon(
    sys: &LienardSystem,
    orbit0: &PeriodicOrbit,
    fd: &FloquetData,
    grid: &[f64],
    phi: f64,
    tol: Tolerances,
) -> Result<SweepTable> {
    if grid.first() != Some(&0.0) {
        return Err(Error::InvalidInput("epsilon grid must start at 0".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("epsilon grid must be strictly increasing".into()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    let mut guess = (orbit0.tau0, 0.0);
    for (i, &eps) in grid.iter().enumerate() {
        match solve_perturbed(sys, orbit0, fd, eps, phi, guess.0, guess.1, tol) {
            Ok(sol) => {
                guess = (sol.tau, sol.h);
                rows.push(SweepRow {
                    epsilon: eps,
                    phi,
                    tau: sol.tau,
                    h: sol.h,
                    residual: sol.residual,
                    iterations: sol.newton_iterations,
                    status: "converged".into(),
                });
            }
            Err(e) => {
                let iterations = match e {
                    Error::NewtonDiverged { iterations } => iterations,
                    _ => 0,
                };
                rows.push(SweepRow {
                    epsilon: eps,
                    phi,
                    tau: f64::NAN,
                    h: f64::NAN,
                    residual: f64::NAN,
                    iterations,
                    status: e.name().to_string(),
                });
                return Ok(SweepTable {
                    rows,
                    failure_index: Some(i),
                });
            }
        }
    }
    Ok(SweepTable {
        rows,
        failure_index: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::find_limit_cycle;
    use crate::model::Perturbation;

    fn setup(p: Perturbation) -> (LienardSystem, PeriodicOrbit, FloquetData) {
        let tol = Tolerances::default();
        let base = LienardSystem::van_der_pol(1.0);
        let orbit = find_limit_cycle(&base, 2.0, tol).unwrap();
        let fd = FloquetData::compute(&base, &orbit, tol).unwrap();
        let sys = base.with_perturbation(p, 0.0, orbit.tau0).unwrap();
        (sys, orbit, fd)
    }

    #[test]
    fn zero_epsilon_returns_cycle() {
        let (sys, orbit, fd) = setup(Perturbation::harmonic(1.0, 1.0, 0.0).unwrap());
        let sol = solve_perturbed(&sys, &orbit, &fd, 0.0, 0.0, orbit.tau0, 0.0, Tolerances::default()).unwrap();
        assert!((sol.tau - orbit.tau0).abs() < 1e-8);
        assert!(sol.h.abs() < 1e-8);
        assert!(sol.residual < 1e-9);
    }

    #[test]
    fn weak_forcing_converges() {
        let (sys, orbit, fd) = setup(Perturbation::harmonic(1.0, 1.0, 0.0).unwrap());
        let tol = Tolerances::default();
        let sol = solve_perturbed(&sys, &orbit, &fd, 1e-3, 0.0, orbit.tau0, 0.0, tol).unwrap();
        assert!((sol.tau - orbit.tau0).abs() < 1e-2 && sol.h.abs() < 1e-2);
        assert!(sol.residual < 1e-9);
        assert!(sol.periodicity_defect(64, tol).unwrap() < 1e-7);
    }

    #[test]
    fn sweep_validation() {
        let (sys, orbit, fd) = setup(Perturbation::constant(1.0));
        let tol = Tolerances::default();
        assert!(sweep_epsilon(&sys, &orbit, &fd, &[0.1, 0.2], 0.0, tol).is_err());
        assert!(sweep_epsilon(&sys, &orbit, &fd, &[0.0, 0.2, 0.1], 0.0, tol).is_err());
        let t = sweep_epsilon(&sys, &orbit, &fd, &[0.0], 0.0, tol).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert!((t.rows[0].tau - orbit.tau0).abs() < 1e-8);
        assert!(t.failure_index.is_none());
    }
}
