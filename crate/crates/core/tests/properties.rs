mod common;

use proptest::prelude::*;

use lienard::certificate::{certify, compute_constants, compute_constants_with, SamplingGrid};
use lienard::cycle::find_limit_cycle;
use lienard::floquet::FloquetData;
use lienard::linalg::Mat2;
use lienard::loud::{bifurcation_function, find_simple_zeros};
use lienard::model::system::{Frame, PhasePoint};
use lienard::model::{LienardSystem, Perturbation, ScalarFunction};
use lienard::moser::{lyapunov_rate, lyapunov_v, nonexistence_scan, MoserSystem, ScanOptions};
use lienard::ode::{integrate, Tolerances};
use lienard::perturbed::solve_perturbed;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn cubic_spring(k1: f64, k3: f64) -> LienardSystem {
    LienardSystem::new(
        ScalarFunction::zero(),
        ScalarFunction::polynomial(vec![0.0, k1, 0.0, k3]).unwrap(),
    )
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn frames_round_trip_and_fields_agree(mu in 0.1f64..3.0, u in -3.0f64..3.0, v in -3.0f64..3.0, t in 0.0f64..10.0) {
        let sys = LienardSystem::van_der_pol(mu)
            .with_perturbation(Perturbation::harmonic(0.7, 1.0, 0.3).unwrap(), 0.05, 5.0)
            .unwrap();
        let p = PhasePoint::uv(u, v);
        let [du, dv] = sys.vector_field(p, t);
        for frame in [Frame::LienardPlane, Frame::Farkas] {
            let q = sys.to_frame(p, frame);
            let back = sys.to_uv(q);
            prop_assert!((back[0] - u).abs() < 1e-12 && (back[1] - v).abs() < 1e-12);
            // chain rule through the frame change
            let d_big_f = sys.f().eval(u) * du;
            let expected = match frame {
                Frame::LienardPlane => [du, dv + d_big_f],
                Frame::Farkas => [-dv - d_big_f, du],
                Frame::Uv => unreachable!(),
            };
            let got = sys.vector_field(q, t);
            prop_assert!((got[0] - expected[0]).abs() < 1e-9 && (got[1] - expected[1]).abs() < 1e-9,
                "{frame}: {got:?} vs {expected:?}");
        }
    }

    #[test]
    fn mat2_inverse_and_determinant(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0, d in -5.0f64..5.0) {
        let m = Mat2::new(a, b, c, d);
        prop_assume!(m.det().abs() > 1e-3);
        let inv = m.inverse().unwrap();
        let id = m * inv;
        prop_assert!((id - Mat2::IDENTITY).max_abs_entry() < 1e-9 * m.condition_number());
        prop_assert!((m.det() * inv.det() - 1.0).abs() < 1e-9 * m.condition_number());
    }

    #[test]
    fn harmonic_phase_factors_are_periodic(amp in -2.0f64..2.0, k in 1u32..5, shift in -3.0f64..3.0, theta in -2.0f64..2.0) {
        let p = Perturbation::harmonic(amp, k as f64, shift).unwrap();
        let (x, y) = (p.eval(theta, 0.4, -0.2), p.eval(theta + 1.0, 0.4, -0.2));
        prop_assert!((x - y).abs() < 1e-12);
    }

    #[test]
    fn tolerance_range_is_enforced(exp in -16.0f64..0.0) {
        let v = 10f64.powf(exp);
        let ok = (Tolerances::MIN..=Tolerances::MAX).contains(&v);
        prop_assert_eq!(Tolerances::new(v, 1e-12).is_ok(), ok);
    }

    #[test]
    fn moser_rate_identity(eps in 0.0f64..0.5, t in 0.0f64..1.0, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let sys = MoserSystem::new(eps).unwrap();
        let [dx, dy] = sys.field(t, &[x, y]);
        let dv = (4.0 * x + 4.0 * x.powi(3)) * dx + 4.0 * y * dy;
        prop_assert!((dv - lyapunov_rate(&sys, t, x, y)).abs() < 1e-12);
        prop_assert!(lyapunov_rate(&sys, t, x, y) <= 0.0);
        prop_assert!(lyapunov_v(x, y) >= 0.0);
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn trajectories_are_well_formed(u0 in -2.0f64..2.0, v0 in -2.0f64..2.0, mu in 0.0f64..2.0, rtol_exp in 4i32..12) {
        let tol = Tolerances::new(10f64.powi(-rtol_exp), 1e-12).unwrap();
        let sys = LienardSystem::van_der_pol(mu);
        let traj = integrate(|t, y| sys.uv_field(t, y), [u0, v0], 0.0, 5.0, tol).unwrap();
        prop_assert!(traj.times().windows(2).all(|w| w[1] > w[0]));
        for (t, y) in traj.times().iter().zip(traj.states()) {
            prop_assert_eq!(traj.eval(*t), *y);
        }
    }

    #[test]
    fn conservative_flow_keeps_energy(k1 in 0.5f64..2.0, k3 in 0.0f64..1.0, amp in 0.2f64..2.0) {
        let sys = cubic_spring(k1, k3);
        let energy = |y: [f64; 2]| sys.big_g().eval(y[0]) + 0.5 * y[1] * y[1];
        let traj = integrate(|t, y| sys.uv_field(t, y), [amp, 0.0], 0.0, 10.0, Tolerances::default()).unwrap();
        let e0 = energy([amp, 0.0]);
        let drift = traj.states().iter().map(|y| (energy(*y) - e0).abs()).fold(0.0, f64::max);
        prop_assert!(drift < 1e-8, "drift {drift:e}");
    }

    #[test]
    fn odd_symmetry_of_solutions(mu in 0.1f64..2.0, u0 in -2.0f64..2.0, v0 in -2.0f64..2.0) {
        let sys = LienardSystem::van_der_pol(mu);
        let tol = Tolerances::default();
        let plus = integrate(|t, y| sys.uv_field(t, y), [u0, v0], 0.0, 3.0, tol).unwrap();
        let minus = integrate(|t, y| sys.uv_field(t, y), [-u0, -v0], 0.0, 3.0, tol).unwrap();
        for k in 0..=30 {
            let t = 0.1 * k as f64;
            let (p, q) = (plus.eval(t), minus.eval(t));
            prop_assert!((p[0] + q[0]).abs() < 1e-10 && (p[1] + q[1]).abs() < 1e-10);
        }
    }

    #[test]
    fn vdp_cycle_properties(mu in 0.3f64..3.0) {
        let tol = Tolerances::default();
        let sys = LienardSystem::van_der_pol(mu);
        let orbit = find_limit_cycle(&sys, 2.0, tol).unwrap();
        // half-period symmetry
        for k in 0..32 {
            let t = orbit.tau0 * k as f64 / 32.0;
            let (p, q) = (orbit.state_at(t), orbit.state_at(t + 0.5 * orbit.tau0));
            prop_assert!((p[0] + q[0]).abs() < 1e-6 && (p[1] + q[1]).abs() < 1e-6);
        }
        // return-map slope is the nontrivial multiplier
        let fd = FloquetData::compute(&sys, &orbit, tol).unwrap();
        let slope = orbit.return_map_derivative.unwrap();
        prop_assert!((slope.abs() - fd.rho2()).abs() < 1e-4, "P' {slope} vs rho2 {}", fd.rho2());
        prop_assert!(fd.checks.triangular);
        // isolation
        for da in [-1e-3, 1e-3] {
            let again = find_limit_cycle(&sys, orbit.a + da, tol).unwrap();
            prop_assert!((again.a - orbit.a).abs() < 1e-7 && (again.tau0 - orbit.tau0).abs() < 1e-7);
        }
    }

    #[test]
    fn bifurcation_function_mean_and_shift(k in 1u32..4, shift in 0.0f64..6.0, amp in 0.1f64..2.0) {
        let (_, orbit) = common::vdp_cycle(1.0);
        let w = std::f64::consts::TAU * k as f64 / orbit.tau0;
        let e = ScalarFunction::catalog("sin", &[amp, w, 0.0]).unwrap();
        let bf = bifurcation_function(&orbit, &e, 1024).unwrap();
        prop_assert!(bf.mean().abs() < 1e-8);
        let delayed = bifurcation_function(&orbit, &e.delayed(shift), 1024).unwrap();
        for j in (0..1024).step_by(64) {
            let s = bf.s[j];
            prop_assert!((delayed.eval(s) - bf.eval(s + shift)).abs() < 1e-6 * bf.max_abs().max(1.0));
        }
    }
}

#[test]
fn scan_is_reproducible() {
    let sys = MoserSystem::new(0.2).unwrap();
    let opts = ScanOptions {
        n_trajectories: 8,
        seed: 42,
        ..ScanOptions::default()
    };
    let a = nonexistence_scan(&sys, &opts).unwrap();
    let b = nonexistence_scan(&sys, &opts).unwrap();
    assert_eq!(a, b);
}

#[test]
fn certificate_constants_behave() {
    let (base, orbit, fd) = common::vdp_floquet(1.0);
    let sys = base
        .with_perturbation(Perturbation::harmonic(1.0, 1.0, 0.0).unwrap(), 0.0, orbit.tau0)
        .unwrap();
    let by_r: Vec<_> = [2.9, 3.0, 4.0]
        .iter()
        .map(|&r| compute_constants(&sys, &orbit, &fd, r).unwrap())
        .collect();
    for w in by_r.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        assert!(b.g0 >= a.g0 && b.g1 >= a.g1 && b.g2 >= a.g2 && b.f1 >= a.f1 && b.f2 >= a.f2);
    }
    for c in &by_r {
        assert!(c.sigma > 0.0 && c.g0 > 0.0 && c.epsilon0() > 0.0);
        assert!(certify(c, 0.0, 0.0, orbit.tau0, 0.0, true).verdict);
    }

    let coarse = &by_r[1];
    let fine = compute_constants_with(&sys, &orbit, &fd, 3.0, SamplingGrid::default().doubled()).unwrap();
    let pairs = [
        ("g0", coarse.g0, fine.g0, 1e-9),
        ("g1", coarse.g1, fine.g1, 1e-9),
        ("f1", coarse.f1, fine.f1, 1e-9),
        ("f2", coarse.f2, fine.f2, 1e-9),
        ("q0", coarse.q0, fine.q0, 1e-3),
        ("q2", coarse.q2, fine.q2, 1e-3),
        ("K", coarse.k, fine.k, 1e-3),
        ("K_inv", coarse.k_inv, fine.k_inv, 1e-3),
        ("P", coarse.p, fine.p, 1e-3),
    ];
    for (name, a, b, rel) in pairs {
        assert!((a - b).abs() <= rel * b.abs().max(1e-300), "{name}: {a} vs {b}");
    }
}

#[test]
fn simple_zero_phase_seeds_newton() {
    let (base, orbit, fd) = common::vdp_floquet(1.0);
    let e = ScalarFunction::catalog("cos_phase", &[1.0, 1.0, 0.0])
        .unwrap()
        .rescaled(1.0 / orbit.tau0);
    let zeros = find_simple_zeros(&bifurcation_function(&orbit, &e, 1024).unwrap());
    assert_eq!(zeros.simple.len(), 2);
    let sys = base
        .with_perturbation(Perturbation::harmonic(1.0, 1.0, 0.0).unwrap(), 0.0, orbit.tau0)
        .unwrap();
    for z in &zeros.simple {
        let sol = solve_perturbed(&sys, &orbit, &fd, 1e-4, z.s0, orbit.tau0, 0.0, Tolerances::default()).unwrap();
        assert!(sol.residual < 1e-9);
    }
}
