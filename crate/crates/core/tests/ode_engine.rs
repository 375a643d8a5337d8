mod common;

use approx::assert_abs_diff_eq;
use lienard::linalg::Mat2;
use lienard::model::LienardSystem;
use lienard::ode::{integrate, integrate_to_section, integrate_with_variational, Direction, Section, Tolerances};
use lienard::Error;
use std::f64::consts::TAU;

fn harmonic(_t: f64, y: &[f64; 2]) -> [f64; 2] {
    [y[1], -y[0]]
}

fn vdp(mu: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    move |_t, y| [y[1], -y[0] - mu * (y[0] * y[0] - 1.0) * y[1]]
}

#[test]
fn exponential_growth() {
    let traj = integrate(|_t, y: &[f64; 1]| *y, [1.0], 0.0, 1.0, Tolerances::default()).unwrap();
    assert_abs_diff_eq!(traj.final_state()[0], std::f64::consts::E, epsilon = 1e-8);
}

#[test]
fn stiff_ish_van_der_pol_at_loose_tolerance() {
    let loose = integrate(vdp(5.0), [2.0, 0.0], 0.0, 20.0, Tolerances::new(1e-3, 1e-3).unwrap()).unwrap();
    let sharp = integrate(vdp(5.0), [2.0, 0.0], 0.0, 20.0, Tolerances::new(1e-6, 1e-6).unwrap()).unwrap();
    let (a, b) = (loose.final_state(), sharp.final_state());
    assert!((a[0] - b[0]).hypot(a[1] - b[1]) < 1e-2, "{a:?} vs {b:?}");
}

#[test]
fn tighter_tolerance_never_hurts_harmonic_endpoint() {
    let mut previous = f64::INFINITY;
    for k in 4..=10 {
        let tol = Tolerances::new(10f64.powi(-k), 1e-14).unwrap();
        let y = integrate(harmonic, [1.0, 0.0], 0.0, TAU, tol).unwrap().final_state();
        let err = (y[0] - 1.0).hypot(y[1]);
        assert!(err <= previous * 1.0001, "rtol 1e-{k}: {err:e} after {previous:e}");
        previous = err;
    }
    assert!(previous < 1e-8);
}

#[test]
fn dense_output_midpoints_match_reintegration() {
    let tol = Tolerances::new(1e-6, 1e-9).unwrap();
    let fine = Tolerances::new(1e-13, 1e-14).unwrap();
    let traj = integrate(vdp(1.0), [2.0, 0.0], 0.0, 8.0, tol).unwrap();
    let (times, states) = (traj.times(), traj.states());
    for k in (0..traj.steps()).step_by(7) {
        let mid = 0.5 * (times[k] + times[k + 1]);
        let reference = integrate(vdp(1.0), states[k], times[k], mid, fine)
            .unwrap()
            .final_state();
        let y = traj.eval(mid);
        for i in 0..2 {
            let local = tol.rtol * reference[i].abs() + tol.atol;
            assert!(
                (y[i] - reference[i]).abs() < 10.0 * local,
                "t={mid}: {y:?} vs {reference:?}"
            );
        }
    }
}

#[test]
fn van_der_pol_returns_contract() {
    let tol = Tolerances::new(1e-12, 1e-14).unwrap();
    let section = Section::coordinate(1, 0.0, Direction::Decreasing).with_guard(0, 0.0);
    let (_, first) = integrate_to_section(vdp(1.0), [2.5, 0.0], 0.0, section, 50.0, tol).unwrap();
    let (_, second) = integrate_to_section(vdp(1.0), first.state, first.t, section, 50.0, tol).unwrap();
    assert!((first.t - common::VDP_MU_1.tau0).abs() < 1.0, "{first:?}");
    assert!((second.t - first.t - common::VDP_MU_1.tau0).abs() < 1e-3, "{second:?}");
    assert!(first.residual.abs() < 1e-10 && second.residual.abs() < 1e-10);
    let to_cycle = (first.state[0] - common::VDP_MU_1.a).abs();
    assert!((second.state[0] - first.state[0]).abs() < to_cycle);
}

#[test]
fn section_requires_time_budget() {
    let section = Section::coordinate(0, 10.0, Direction::Either);
    let r = integrate_to_section(harmonic, [1.0, 0.0], 0.0, section, 20.0, Tolerances::default());
    assert!(matches!(r, Err(Error::NoCrossing { .. })));
}

#[test]
fn zero_length_variational_run_is_identity() {
    let sys = LienardSystem::van_der_pol(1.0);
    let m0 = Mat2::new(2.0, -1.0, 0.5, 3.0);
    let traj = integrate_with_variational(&sys, [0.3, -0.2], m0, 1.0, 1.0, Tolerances::default()).unwrap();
    assert_eq!(traj.final_state()[2..], [2.0, -1.0, 0.5, 3.0]);
}

#[test]
fn variational_columns_match_finite_differences() {
    let (sys, orbit) = common::vdp_cycle(1.0);
    let tol = Tolerances::new(1e-12, 1e-14).unwrap();
    let x0 = [-sys.big_f().eval(orbit.a), orbit.a];
    let t1 = orbit.tau0;
    let traj = integrate_with_variational(&sys, x0, Mat2::IDENTITY, 0.0, t1, tol).unwrap();
    let m = traj.final_state();
    let flow = |x: [f64; 2]| {
        integrate(|t, y| sys.farkas_field(t, y), x, 0.0, t1, tol)
            .unwrap()
            .final_state()
    };
    let d = 1e-6;
    for j in 0..2 {
        let (mut plus, mut minus) = (x0, x0);
        plus[j] += d;
        minus[j] -= d;
        let (p, q) = (flow(plus), flow(minus));
        for i in 0..2 {
            let fd = (p[i] - q[i]) / (2.0 * d);
            let exact = m[2 + 2 * i + j];
            assert!(
                (fd - exact).abs() <= 1e-4 * exact.abs().max(1.0),
                "M[{i}][{j}]: fd {fd} vs {exact}"
            );
        }
    }
}

#[test]
fn liouville_on_the_cycle() {
    let (sys, orbit) = common::vdp_cycle(1.0);
    let x0 = [-sys.big_f().eval(orbit.a), orbit.a];
    let traj = integrate_with_variational(&sys, x0, Mat2::IDENTITY, 0.0, orbit.tau0, Tolerances::default()).unwrap();
    let damping = traj.quadrature(|_t, y| sys.f().eval(y[1]));
    let m = traj.final_state();
    let det = m[2] * m[5] - m[3] * m[4];
    assert!((det - (-damping).exp()).abs() < 1e-7);
    assert_abs_diff_eq!(damping, common::VDP_MU_1.damping_integral, epsilon = 1e-6);
}
