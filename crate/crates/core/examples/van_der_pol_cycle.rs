//! Locate the Van der Pol limit cycle for several damping strengths.
//!
//!     cargo run --release --example van_der_pol_cycle

use lienard::cycle::{find_limit_cycle, orbit_geometry};
use lienard::{LienardSystem, Tolerances};

fn main() -> lienard::Result<()> {
    let tol = Tolerances::default();
    println!(
        "{:>5} {:>16} {:>16} {:>12} {:>8} {:>10}",
        "mu", "a", "tau0", "closure", "newton", "sigma@1.25R"
    );
    for mu in [0.1, 0.5, 1.0, 2.0, 4.0] {
        let sys = LienardSystem::van_der_pol(mu);
        let orbit = find_limit_cycle(&sys, 2.0, tol)?;
        let geo = orbit_geometry(&orbit, 1.25 * orbit.max_radius)?;
        println!(
            "{mu:>5} {:>16.12} {:>16.12} {:>12.2e} {:>8} {:>10.4}",
            orbit.a, orbit.tau0, orbit.closure_residual, orbit.newton_iterations, geo.sigma
        );
    }

    let orbit = find_limit_cycle(&LienardSystem::van_der_pol(1.0), 2.0, tol)?;
    println!("\nmu = 1, a quarter of the orbit:");
    for (t, [u, v]) in orbit.sample(512).into_iter().step_by(32).take(5) {
        println!("  t = {t:7.4}  u = {u:+.6}  u' = {v:+.6}");
    }
    Ok(())
}
