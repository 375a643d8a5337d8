//! Moser's example: a forcing that only drains energy, so no periodic orbit
//! other than the origin survives.
//!
//!     cargo run --release --example moser_nonexistence [epsilon]

use lienard::moser::{nonexistence_scan, MoserSystem, ScanOptions};

fn main() -> lienard::Result<()> {
    let eps: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.2);
    let sys = MoserSystem::new(eps)?;

    let construction = sys.verify_construction(10_000, 1);
    for c in &construction.checks {
        println!("{:<40} failures: {}", c.name, c.failures);
    }

    let report = nonexistence_scan(
        &sys,
        &ScanOptions {
            seed: 1,
            ..ScanOptions::default()
        },
    )?;
    println!(
        "\n{} trajectories over t in [0, {}] from |x|, |x'| < {}",
        report.n_trajectories, report.t_final, report.box_size
    );
    println!("largest upward step of V: {:.2e}", report.max_upstep);
    println!("largest |dV/dt + 4 eps x' f|: {:.2e}", report.max_rate_gap);
    println!(
        "strictly decaying: {}, unresolved: {}",
        report.strictly_decaying, report.unresolved
    );
    for r in report.trajectories.iter().take(5) {
        println!(
            "  start {:+.4?}  V {:.6e} -> {:.6e}  quadrant time {:.2}",
            r.start, r.v_initial, r.v_final, r.quadrant_time
        );
    }
    Ok(())
}
