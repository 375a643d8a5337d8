//! Solve for the periodic orbit of the forced Van der Pol oscillator and
//! check that it repeats.
//!
//!     cargo run --release --example perturbed_orbit

use lienard::cycle::find_limit_cycle;
use lienard::floquet::FloquetData;
use lienard::perturbed::solve_perturbed;
use lienard::{LienardSystem, Perturbation, Tolerances};

fn main() -> lienard::Result<()> {
    let tol = Tolerances::default();
    let base = LienardSystem::van_der_pol(1.0);
    let orbit = find_limit_cycle(&base, 2.0, tol)?;
    let fd = FloquetData::compute(&base, &orbit, tol)?;

    let forced = base
        .clone()
        .with_perturbation(Perturbation::harmonic(1.0, 1.0, 0.0)?, 0.0, orbit.tau0)?;
    println!("time-periodic forcing, phi = 0");
    for eps in [1e-4, 1e-3, 1e-2, 5e-2] {
        let s = solve_perturbed(&forced, &orbit, &fd, eps, 0.0, orbit.tau0, 0.0, tol)?;
        println!(
            "  eps = {eps:7.0e}  tau - tau0 = {:+.6e}  h = {:+.6e}  iterations = {}  defect = {:.1e}",
            s.tau - orbit.tau0,
            s.h,
            s.newton_iterations,
            s.periodicity_defect(128, tol)?
        );
    }

    let constant = base.with_perturbation(Perturbation::constant(1.0), 0.0, orbit.tau0)?;
    println!("\nautonomous forcing gamma = 1, eps = 1e-3");
    for phi in [0.0, orbit.tau0 / 4.0, orbit.tau0 / 3.0] {
        let s = solve_perturbed(&constant, &orbit, &fd, 1e-3, phi, orbit.tau0, 0.0, tol)?;
        println!("  phi = {phi:.4}  tau = {:.12}  h = {:+.10e}", s.tau, s.h);
    }
    Ok(())
}
