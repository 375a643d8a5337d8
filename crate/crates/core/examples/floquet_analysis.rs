//! Fundamental matrix, multipliers and Jacobi matrix of the Van der Pol cycle.
//!
//!     cargo run --release --example floquet_analysis [mu]

use lienard::cycle::find_limit_cycle;
use lienard::floquet::FloquetData;
use lienard::{LienardSystem, Tolerances};

fn main() -> lienard::Result<()> {
    let mu: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let tol = Tolerances::default();
    let sys = LienardSystem::van_der_pol(mu);
    let orbit = find_limit_cycle(&sys, 2.0, tol)?;
    let fd = FloquetData::compute(&sys, &orbit, tol)?;

    let y = fd.monodromy();
    println!("mu = {mu}, a = {:.10}, tau0 = {:.10}", orbit.a, orbit.tau0);
    println!(
        "Y(tau0) = [{:+.6e} {:+.6e}]\n          [{:+.6e} {:+.6e}]",
        y.0[0][0], y.0[0][1], y.0[1][0], y.0[1][1]
    );
    println!("damping integral = {:.10}", fd.fundamental.damping_integral);
    println!(
        "rho1 = {}, rho2 = {:.6e}, stable = {}",
        fd.multipliers.rho1,
        fd.rho2(),
        fd.multipliers.stable
    );
    println!("det J = {:.6e}, |J^-1| = {:.6}", fd.jacobi.det_j, fd.jacobi.j_inv_norm);
    println!("\n{}", serde_json::to_string_pretty(&fd.checks).expect("serialisable"));
    Ok(())
}
