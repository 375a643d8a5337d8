//! Linear stability of a limit cycle.
//!
//! Along the orbit `p(t) = (-u0' - F(u0), u0)` the variational equation is
//! `y' = A(t) y` with
//!
//! ```text
//! A(t) = [[ 0, g'(u0(t)) ],
//!         [-1, -f(u0(t)) ]]
//! ```
//!
//! Its fundamental matrix `Y(t)` (with `Y(0) = I`) has Wronskian
//! `W(t) = det Y(t) = exp(-int_0^t f(u0))`. Since `p'(0) = (g(a), 0)` is a
//! fixed vector of the monodromy `Y(tau0)`, that matrix is upper triangular
//! with diagonal `(1, W(tau0))`: the multipliers are `rho1 = 1` and
//! `rho2 = W(tau0)`, and the cycle is orbitally stable exactly when the
//! damping integral `int_0^tau0 f(u0)` is positive.
//!
//! The Jacobi matrix of the periodicity conditions in the unknowns
//! (amplitude, period) is `J = -I + diag(g(a), 0) + Y(tau0)`.

use serde::Serialize;

use crate::cycle::PeriodicOrbit;
use crate::error::{Error, Result};
use crate::linalg::{Eigenvalues, Mat2};
use crate::model::LienardSystem;
use crate::numerics::sup_on_interval;
use crate::ode::{
    integrate_with_variational, integrate_with_variational_backward, monodromy_of, Tolerances, Trajectory,
};

/// Relative tolerance when matching the numerical spectrum of `Y(tau0)`.
pub const MULTIPLIER_TOL: f64 = 1e-5;
/// `|1 - rho2|` below this means 1 is not a simple multiplier.
pub const SIMPLE_MULTIPLIER_TOL: f64 = 1e-8;
pub const DEGENERATE_AMPLITUDE_TOL: f64 = 1e-12;
/// Bound on `|Y21(tau0)|` and `|Y11(tau0) - 1|` for the triangular check.
pub const TRIANGULAR_TOL: f64 = 1e-6;

/// `Y(t)` along the orbit on `[0, tau0]`, plus its backward extension to
/// `[-tau0/2, 0]`, and the Wronskian computed independently by quadrature.
#[derive(Debug, Clone)]
pub struct FundamentalMatrix {
    pub a: f64,
    pub tau0: f64,
    /// `g(a)`, the first component of `p'(0)`.
    pub g_a: f64,
    forward: Trajectory<6>,
    backward: Trajectory<6>,
    /// `W(t)` at the forward grid nodes.
    wronskian: Vec<f64>,
    /// `int_0^tau0 f(u0)`.
    pub damping_integral: f64,
    /// `max |det Y(t) - W(t)|` over the forward grid.
    pub liouville_deviation: f64,
}

impl FundamentalMatrix {
    /// `Y(tau0)`.
    pub fn monodromy(&self) -> Mat2 {
        monodromy_of(&self.forward.final_state()).1
    }

    /// `Y(t)` for `t` in `[-tau0/2, tau0]` (clamped).
    pub fn y_at(&self, t: f64) -> Mat2 {
        if t >= 0.0 {
            monodromy_of(&self.forward.eval(t)).1
        } else {
            monodromy_of(&self.backward.eval(-t)).1
        }
    }

    /// Forward grid nodes with `Y` and `W` at each.
    pub fn path(&self) -> impl Iterator<Item = (f64, Mat2, f64)> + '_ {
        self.forward
            .times()
            .iter()
            .zip(self.forward.states())
            .zip(&self.wronskian)
            .map(|((&t, y), &w)| (t, monodromy_of(y).1, w))
    }

    /// Backward nodes as `(t, Y(t))` with `t <= 0`.
    pub fn backward_path(&self) -> impl Iterator<Item = (f64, Mat2)> + '_ {
        self.backward
            .times()
            .iter()
            .zip(self.backward.states())
            .map(|(&s, y)| (-s, monodromy_of(y).1))
    }

    /// Supremum over `[-tau0/2, tau0]` of `norm(Y(t))` and `norm(Y(t)^{-1})`.
    pub fn sup_norms(&self, norm: impl Fn(&Mat2) -> f64, samples: usize) -> (f64, f64) {
        let lo = -0.5 * self.tau0;
        let of_y = |t: f64| norm(&self.y_at(t));
        let of_inv = |t: f64| self.y_at(t).inverse().map_or(f64::INFINITY, |m| norm(&m));
        let mut k = sup_on_interval(of_y, lo, self.tau0, samples).1;
        let mut k_inv = sup_on_interval(of_inv, lo, self.tau0, samples).1;
        for (_, m) in self.backward_path().chain(self.path().map(|(t, m, _)| (t, m))) {
            k = k.max(norm(&m));
            k_inv = k_inv.max(m.inverse().map_or(f64::INFINITY, |i| norm(&i)));
        }
        (k, k_inv)
    }
}

pub fn fundamental_matrix(sys: &LienardSystem, orbit: &PeriodicOrbit, tol: Tolerances) -> Result<FundamentalMatrix> {
    let sys = sys.unperturbed();
    let x0 = [-sys.big_f().eval(orbit.a), orbit.a];
    let forward = integrate_with_variational(&sys, x0, Mat2::IDENTITY, 0.0, orbit.tau0, tol)?;
    let backward = integrate_with_variational_backward(&sys, x0, Mat2::IDENTITY, 0.5 * orbit.tau0, tol)?;
    let damping = forward.cumulative_quadrature(|_, y| sys.f().eval(y[1]));
    let wronskian: Vec<f64> = damping.iter().map(|d| (-d).exp()).collect();
    let liouville_deviation = forward
        .states()
        .iter()
        .zip(&wronskian)
        .map(|(y, w)| (monodromy_of(y).1.det() - w).abs())
        .fold(0.0, f64::max);
    Ok(FundamentalMatrix {
        a: orbit.a,
        tau0: orbit.tau0,
        g_a: sys.g().eval(orbit.a),
        damping_integral: *damping.last().unwrap(),
        forward,
        backward,
        wronskian,
        liouville_deviation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Multipliers {
    pub rho1: f64,
    pub rho2: f64,
    /// Damping integral positive, equivalently `0 < rho2 < 1`.
    pub stable: bool,
    /// Eigenvalues of the numerically integrated `Y(tau0)`.
    pub numerical: Eigenvalues,
}

fn rel_gap(x: f64, e: f64) -> f64 {
    (x - e).abs() / e.abs().max(f64::MIN_POSITIVE)
}

/// `rho1 = 1`, `rho2 = W(tau0)`, cross-checked against the eigenvalues of
/// `Y(tau0)`.
pub fn multipliers(fm: &FundamentalMatrix) -> Result<Multipliers> {
    let rho1 = 1.0;
    let rho2 = (-fm.damping_integral).exp();
    let numerical = fm.monodromy().eigenvalues();
    let pair = match numerical {
        Eigenvalues::Real(pair) => Some(pair),
        // a numerically split double root
        Eigenvalues::Complex { re, im } if im <= MULTIPLIER_TOL * re.abs() => Some([re, re]),
        Eigenvalues::Complex { .. } => None,
    };
    let mut expected = [rho1, rho2];
    expected.sort_by(|x, y| y.abs().total_cmp(&x.abs()));
    // an eigenvalue cannot be resolved more finely than det Y itself
    let floor = 10.0 * fm.liouville_deviation;
    let close = |x: f64, e: f64| rel_gap(x, e) <= MULTIPLIER_TOL || (x - e).abs() <= floor;
    let matched = pair.is_some_and(|p| {
        (close(p[0], expected[0]) && close(p[1], expected[1])) || (close(p[1], expected[0]) && close(p[0], expected[1]))
    });
    if !matched {
        let numerical = match numerical {
            Eigenvalues::Real(p) => p,
            Eigenvalues::Complex { re, im } => [re, im],
        };
        return Err(Error::MultiplierMismatch { numerical, expected });
    }
    Ok(Multipliers {
        rho1,
        rho2,
        stable: fm.damping_integral > 0.0,
        numerical,
    })
}

/// The Jacobi matrix, its inverse and norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiData {
    pub j: Mat2,
    pub j_inv: Mat2,
    /// `2 max(|1/g(a)|, |1/(1 - rho2)|, |J^{-1}_{12}|)`.
    pub j_inv_norm: f64,
    pub j_inv_spectral_norm: f64,
    /// `Y12(tau0) / g(a)^2`.
    pub v_tau0: f64,
    pub det_j: f64,
}

impl JacobiData {
    /// Assemble from `Y(tau0)`.
    pub fn new(monodromy: Mat2, g_a: f64, rho2: f64) -> Result<Self> {
        if g_a.abs() < DEGENERATE_AMPLITUDE_TOL {
            return Err(Error::DegenerateAmplitude { value: g_a.abs() });
        }
        let gap = (1.0 - rho2).abs();
        if gap < SIMPLE_MULTIPLIER_TOL {
            return Err(Error::SimpleMultiplierViolation { gap });
        }
        let j = Mat2::diag(g_a - 1.0, -1.0) + monodromy;
        let j_inv = j.inverse().ok_or(Error::SimpleMultiplierViolation { gap })?;
        let j_inv_norm = 2.0
            * (1.0 / g_a)
                .abs()
                .max((1.0 / (1.0 - rho2)).abs())
                .max(j_inv.get(0, 1).abs());
        Ok(Self {
            j,
            j_inv,
            j_inv_norm,
            j_inv_spectral_norm: j_inv.spectral_norm(),
            v_tau0: monodromy.get(0, 1) / (g_a * g_a),
            det_j: j.det(),
        })
    }

    /// Assemble from the idealised monodromy `[[1, g(a)^2 v], [0, rho2]]`.
    pub fn from_parts(g_a: f64, rho2: f64, v_tau0: f64) -> Result<Self> {
        Self::new(Mat2::new(1.0, g_a * g_a * v_tau0, 0.0, rho2), g_a, rho2)
    }
}

pub fn jacobi_matrix(fm: &FundamentalMatrix, m: &Multipliers) -> Result<JacobiData> {
    JacobiData::new(fm.monodromy(), fm.g_a, m.rho2)
}

/// Numerical consistency checks, reported alongside the results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FloquetChecks {
    /// `max |det Y(t) - W(t)|` on `[0, tau0]`.
    pub liouville_deviation: f64,
    /// `|rho1 rho2 - det Y(tau0)|`.
    pub multiplier_product_gap: f64,
    /// `|Y(tau0) p'(0) - p'(0)| / |g(a)|`.
    pub trivial_eigenpair_residual: f64,
    pub y21: f64,
    pub y11_minus_one: f64,
    pub triangular: bool,
    /// `|det J - g(a)(rho2 - 1)| / |g(a)(rho2 - 1)|`.
    pub det_j_relative_gap: f64,
    /// `max |J J^{-1} - I|`.
    pub inverse_residual: f64,
    /// `J^{-1}_{12}` in closed form, `g(a) v / (1 - rho2)`.
    pub closed_form_off_diagonal: f64,
    /// The same entry without the `1/g(a)` factor, `g(a)^2 v / (1 - rho2)`.
    pub g2v_over_gap: f64,
    /// Relative mismatch between the numerical inverse and the closed form.
    pub closed_form_gap: f64,
}

/// Everything about the cycle's linearisation in one place.
#[derive(Debug, Clone)]
pub struct FloquetData {
    pub fundamental: FundamentalMatrix,
    pub multipliers: Multipliers,
    pub jacobi: JacobiData,
    pub checks: FloquetChecks,
}

impl FloquetData {
    pub fn compute(sys: &LienardSystem, orbit: &PeriodicOrbit, tol: Tolerances) -> Result<Self> {
        let fundamental = fundamental_matrix(sys, orbit, tol)?;
        let multipliers = multipliers(&fundamental)?;
        let jacobi = jacobi_matrix(&fundamental, &multipliers)?;
        let checks = checks(&fundamental, &multipliers, &jacobi);
        Ok(Self {
            fundamental,
            multipliers,
            jacobi,
            checks,
        })
    }

    pub fn rho2(&self) -> f64 {
        self.multipliers.rho2
    }

    pub fn monodromy(&self) -> Mat2 {
        self.fundamental.monodromy()
    }

    pub fn report(&self) -> FloquetReport {
        FloquetReport {
            a: self.fundamental.a,
            tau0: self.fundamental.tau0,
            rho1: self.multipliers.rho1,
            rho2: self.multipliers.rho2,
            damping_integral: self.fundamental.damping_integral,
            condition10: self.multipliers.stable,
            numerical_multipliers: self.multipliers.numerical,
            monodromy: self.monodromy(),
            j: self.jacobi.j,
            j_inv: self.jacobi.j_inv,
            j_inv_norm: self.jacobi.j_inv_norm,
            j_inv_spectral_norm: self.jacobi.j_inv_spectral_norm,
            v_tau0: self.jacobi.v_tau0,
            checks: self.checks,
        }
    }
}

fn checks(fm: &FundamentalMatrix, m: &Multipliers, jd: &JacobiData) -> FloquetChecks {
    let y = fm.monodromy();
    let g = fm.g_a;
    let image = y.mul_vec([g, 0.0]);
    let expected_det = g * (m.rho2 - 1.0);
    let closed = g * jd.v_tau0 / (1.0 - m.rho2);
    let closed_inv = Mat2::new(1.0 / g, closed, 0.0, -1.0 / (1.0 - m.rho2));
    FloquetChecks {
        liouville_deviation: fm.liouville_deviation,
        multiplier_product_gap: (m.rho1 * m.rho2 - y.det()).abs(),
        trivial_eigenpair_residual: (image[0] - g).hypot(image[1]) / g.abs(),
        y21: y.get(1, 0),
        y11_minus_one: y.get(0, 0) - 1.0,
        triangular: y.get(1, 0).abs() < TRIANGULAR_TOL && (y.get(0, 0) - 1.0).abs() < TRIANGULAR_TOL,
        det_j_relative_gap: (jd.det_j - expected_det).abs() / expected_det.abs(),
        inverse_residual: (jd.j * jd.j_inv - Mat2::IDENTITY).max_abs_entry(),
        closed_form_off_diagonal: closed,
        g2v_over_gap: g * g * jd.v_tau0 / (1.0 - m.rho2),
        closed_form_gap: (jd.j_inv - closed_inv).max_abs_entry() / closed_inv.max_abs_entry(),
    }
}

/// JSON form of [`FloquetData`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloquetReport {
    pub a: f64,
    pub tau0: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub damping_integral: f64,
    pub condition10: bool,
    pub numerical_multipliers: Eigenvalues,
    pub monodromy: Mat2,
    #[serde(rename = "J")]
    pub j: Mat2,
    #[serde(rename = "J_inv")]
    pub j_inv: Mat2,
    #[serde(rename = "J_inv_norm")]
    pub j_inv_norm: f64,
    #[serde(rename = "J_inv_spectral_norm")]
    pub j_inv_spectral_norm: f64,
    pub v_tau0: f64,
    pub checks: FloquetChecks,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::find_limit_cycle;
    use crate::model::ScalarFunction;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::TAU;

    #[test]
    fn symbolic_fixture() {
        let jd = JacobiData::from_parts(2.0, 0.5, 0.1).unwrap();
        assert!((jd.j - Mat2::new(2.0, 0.4, 0.0, -0.5)).max_abs_entry() < 1e-15);
        assert_abs_diff_eq!(jd.det_j, -1.0, epsilon = 1e-15);
        assert!((jd.j * jd.j_inv - Mat2::IDENTITY).max_abs_entry() < 1e-14);
        assert_abs_diff_eq!(jd.v_tau0, 0.1, epsilon = 1e-15);
        // max(1/2, 2, |0.4 / (2 * -0.5)|) = 2
        assert_abs_diff_eq!(jd.j_inv_norm, 4.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            JacobiData::from_parts(2.0, 1.0 - 1e-9, 0.1),
            Err(Error::SimpleMultiplierViolation { .. })
        ));
        assert!(matches!(
            JacobiData::from_parts(1e-13, 0.5, 0.1),
            Err(Error::DegenerateAmplitude { .. })
        ));
    }

    #[test]
    fn center_has_unit_multipliers() {
        let sys = LienardSystem::new(
            ScalarFunction::zero(),
            ScalarFunction::polynomial(vec![0.0, 1.0]).unwrap(),
        );
        let orbit = PeriodicOrbit::integrate(&sys, 1.0, TAU, Tolerances::default()).unwrap();
        let fm = fundamental_matrix(&sys, &orbit, Tolerances::default()).unwrap();
        assert!((fm.monodromy() - Mat2::IDENTITY).max_abs_entry() < 1e-8);
        assert!(fm.path().all(|(_, _, w)| w == 1.0));
        let m = multipliers(&fm).unwrap();
        assert_eq!(m.rho2, 1.0);
        assert!(!m.stable);
        assert!(jacobi_matrix(&fm, &m).is_err());
    }

    #[test]
    fn constant_damping_wronskian() {
        let c = 0.3;
        let sys = LienardSystem::new(
            ScalarFunction::constant(c),
            ScalarFunction::polynomial(vec![0.0, 1.0]).unwrap(),
        );
        let orbit = PeriodicOrbit::integrate(&sys, 1.0, 2.0, Tolerances::default()).unwrap();
        let fm = fundamental_matrix(&sys, &orbit, Tolerances::default()).unwrap();
        assert_abs_diff_eq!(fm.damping_integral, 2.0 * c, epsilon = 1e-12);
        assert!(fm.liouville_deviation < 1e-9);
    }

    #[test]
    fn van_der_pol_is_stable() {
        let sys = LienardSystem::van_der_pol(1.0);
        let tol = Tolerances::default();
        let orbit = find_limit_cycle(&sys, 2.0, tol).unwrap();
        let fd = FloquetData::compute(&sys, &orbit, tol).unwrap();
        assert!(fd.multipliers.stable);
        assert!(fd.rho2() > 0.0 && fd.rho2() < 1.0);
        assert!(fd.checks.triangular, "{:?}", fd.checks);
        assert!(fd.checks.liouville_deviation < 1e-7);
        assert!(fd.checks.closed_form_gap < 1e-6);
        let json = serde_json::to_value(fd.report()).unwrap();
        assert_eq!(json["condition10"], true);
        assert!(json["J"].is_array());
    }
}
