//! Bifurcation function of a harmonic forcing along the Van der Pol cycle
//! and the phases where forced periodic solutions persist.
//!
//!     cargo run --release --example loud_bifurcation

use lienard::cycle::find_limit_cycle;
use lienard::loud::{bifurcation_function, find_simple_zeros};
use lienard::{LienardSystem, ScalarFunction, Tolerances};

fn main() -> lienard::Result<()> {
    let orbit = find_limit_cycle(&LienardSystem::van_der_pol(1.0), 2.0, Tolerances::default())?;

    for (label, phase_fn) in [
        (
            "cos(2 pi t / tau0)",
            ScalarFunction::catalog("cos_phase", &[1.0, 1.0, 0.0])?,
        ),
        (
            "sin(6 pi t / tau0)",
            ScalarFunction::catalog("sin_phase", &[1.0, 3.0, 0.0])?,
        ),
        ("constant", ScalarFunction::constant(1.0)),
    ] {
        let e = phase_fn.rescaled(1.0 / orbit.tau0);
        let bf = bifurcation_function(&orbit, &e, 1024)?;
        let zeros = find_simple_zeros(&bf);
        println!(
            "e(t) = {label}: max |F| = {:.3e}, mean = {:.1e}",
            bf.max_abs(),
            bf.mean()
        );
        if zeros.identically_zero {
            println!("  F vanishes identically; first order says nothing");
        }
        for z in &zeros.simple {
            println!("  simple zero s0 = {:.8}  F'(s0) = {:+.6}", z.s0, z.fprime);
        }
    }
    Ok(())
}
