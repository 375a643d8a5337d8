use super::{Stepper, Tolerances, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::model::LienardSystem;

/// Farkas-frame state and the variational matrix, packed as
/// `[x1, x2, m11, m12, m21, m22]`.
fn pack(x: [f64; 2], m: Mat2) -> [f64; 6] {
    let [a, b, c, d] = m.to_flat();
    [x[0], x[1], a, b, c, d]
}

/// Split a packed variational state into `(x, M)`.
pub fn monodromy_of(y: &[f64; 6]) -> ([f64; 2], Mat2) {
    ([y[0], y[1]], Mat2::from_flat(&y[2..]))
}

fn variational_field(sys: &LienardSystem, sign: f64) -> impl Fn(f64, &[f64; 6]) -> [f64; 6] + '_ {
    move |t, y| {
        let x2 = y[1];
        let dx = sys.farkas_field(t, &[y[0], x2]);
        let gp = sys.g().deriv(x2);
        let f = sys.f().eval(x2);
        // A = [[0, g'(x2)], [-1, -f(x2)]]
        [
            sign * dx[0],
            sign * dx[1],
            sign * gp * y[4],
            sign * gp * y[5],
            sign * (-y[2] - f * y[4]),
            sign * (-y[3] - f * y[5]),
        ]
    }
}

fn check(sys: &LienardSystem, tol: Tolerances) -> Result<()> {
    tol.validate()?;
    if sys.is_perturbed() {
        return Err(Error::InvalidInput(
            "variational system requires an unperturbed system".into(),
        ));
    }
    Ok(())
}

fn run(
    sys: &LienardSystem,
    y0: [f64; 6],
    start: f64,
    duration: f64,
    sign: f64,
    tol: Tolerances,
) -> Result<Trajectory<6>> {
    let mut traj = Trajectory::new(start, y0);
    if duration == 0.0 {
        return Ok(traj);
    }
    let end = start + duration;
    let mut stepper = Stepper::new(variational_field(sys, sign), start, y0, tol, duration)?;
    while stepper.t() < end {
        traj.push(stepper.step(end)?);
    }
    Ok(traj)
}

/// Integrate the farkas-frame orbit from `x0` together with `M' = A(t) M`,
/// `M(t0) = m0`, on `[t0, t1]`.
pub fn integrate_with_variational(
    sys: &LienardSystem,
    x0: [f64; 2],
    m0: Mat2,
    t0: f64,
    t1: f64,
    tol: Tolerances,
) -> Result<Trajectory<6>> {
    check(sys, tol)?;
    if !(t1 >= t0) {
        return Err(Error::InvalidInput(format!("need t1 >= t0, got [{t0}, {t1}]")));
    }
    run(sys, pack(x0, m0), t0, t1 - t0, 1.0, tol)
}

/// The same system run backwards for `duration`. The returned trajectory is
/// parameterised by elapsed reversed time `s`: its value at `s` is the state
/// at time `t0 - s`.
pub fn integrate_with_variational_backward(
    sys: &LienardSystem,
    x0: [f64; 2],
    m0: Mat2,
    duration: f64,
    tol: Tolerances,
) -> Result<Trajectory<6>> {
    check(sys, tol)?;
    if !(duration >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "duration must be non-negative, got {duration}"
        )));
    }
    run(sys, pack(x0, m0), 0.0, duration, -1.0, tol)
}
