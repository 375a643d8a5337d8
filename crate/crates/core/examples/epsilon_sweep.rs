//! Continue the forced periodic orbit in epsilon until Newton gives up.
//!
//!     cargo run --release --example epsilon_sweep

use lienard::cycle::find_limit_cycle;
use lienard::floquet::FloquetData;
use lienard::perturbed::sweep_epsilon;
use lienard::{LienardSystem, Perturbation, Tolerances};

fn main() -> lienard::Result<()> {
    let tol = Tolerances::default();
    let base = LienardSystem::van_der_pol(1.0);
    let orbit = find_limit_cycle(&base, 2.0, tol)?;
    let fd = FloquetData::compute(&base, &orbit, tol)?;
    let sys = base.with_perturbation(Perturbation::harmonic(1.0, 1.0, 0.0)?, 0.0, orbit.tau0)?;

    let grid: Vec<f64> = (0..=100).map(|k| 0.05 * k as f64).collect();
    let table = sweep_epsilon(&sys, &orbit, &fd, &grid, 0.0, tol)?;
    for row in table.rows.iter().step_by(5).chain(table.rows.last()) {
        println!(
            "eps = {:5.2}  tau = {:10.6}  h = {:+10.6}  iterations = {:2}  {}",
            row.epsilon, row.tau, row.h, row.iterations, row.status
        );
    }
    match table.failure_index {
        Some(i) => println!("continuation stopped at eps = {}", grid[i]),
        None => println!("all {} grid points converged", grid.len()),
    }
    Ok(())
}
