//! Estimate constants and certify a range of forcing amplitudes.
//!
//!     cargo run --release --example existence_certificate

use lienard::certificate::{certify, compute_constants};
use lienard::cycle::find_limit_cycle;
use lienard::floquet::FloquetData;
use lienard::{LienardSystem, Perturbation, Tolerances};

fn main() -> lienard::Result<()> {
    let tol = Tolerances::default();
    let base = LienardSystem::van_der_pol(1.0);
    let orbit = find_limit_cycle(&base, 2.0, tol)?;
    let fd = FloquetData::compute(&base, &orbit, tol)?;
    let sys = base.with_perturbation(Perturbation::harmonic(1.0, 1.0, 0.0)?, 0.0, orbit.tau0)?;

    let c = compute_constants(&sys, &orbit, &fd, 3.0)?;
    println!(
        "sigma = {:.6}, g0 = {}, g1 = {}, K = {:.4}, K_inv = {:.4}",
        c.sigma, c.g0, c.g1, c.k, c.k_inv
    );
    println!("epsilon0 = {:.6e}\n", c.epsilon0());

    let mut table = None;
    for factor in [0.1, 0.5, 0.99, 1.01, 10.0] {
        let cert = certify(&c, factor * c.epsilon0(), 0.0, orbit.tau0, 0.0, fd.multipliers.stable);
        println!(
            "eps = {:.3e}: verdict {:<5} {:?}",
            cert.epsilon, cert.verdict, cert.reasons
        );
        table.get_or_insert_with(|| cert.to_csv());
    }
    let csv = table.expect("one row").to_bytes();
    print!("\n{}", String::from_utf8_lossy(&csv));
    Ok(())
}
