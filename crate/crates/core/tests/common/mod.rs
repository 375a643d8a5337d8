//! Shared fixtures and frozen reference values.
//!
//! The Van der Pol references come from `tests/oracles/vdp_shooting.py`,
//! an independent DOP853 shooting run whose digits agree between
//! rtol = 1e-11 and rtol = 1e-13.

#![allow(dead_code)]

use lienard::cycle::{find_limit_cycle, PeriodicOrbit};
use lienard::floquet::FloquetData;
use lienard::model::LienardSystem;
use lienard::ode::Tolerances;

pub struct VdpReference {
    pub mu: f64,
    pub a: f64,
    pub tau0: f64,
    pub damping_integral: f64,
    pub rho2: f64,
}

pub const VDP_MU_05: VdpReference = VdpReference {
    mu: 0.5,
    a: 2.002487930447,
    tau0: 6.380675801774,
    damping_integral: 3.239667474474,
    rho2: 3.917692025928e-2,
};

pub const VDP_MU_1: VdpReference = VdpReference {
    mu: 1.0,
    a: 2.008619860875,
    tau0: 6.663286859323,
    damping_integral: 7.058932808799,
    rho2: 8.596950636040e-4,
};

pub const VDP_MU_2: VdpReference = VdpReference {
    mu: 2.0,
    a: 2.019891384667,
    tau0: 7.629874479675,
    damping_integral: 18.178637479168,
    rho2: 1.273849304440e-8,
};

pub const VDP_REFERENCES: [VdpReference; 3] = [VDP_MU_05, VDP_MU_1, VDP_MU_2];

pub const VDP_MU_1_MAX_RADIUS: f64 = 2.8299660538;

pub fn tol() -> Tolerances {
    Tolerances::default()
}

pub fn vdp_cycle(mu: f64) -> (LienardSystem, PeriodicOrbit) {
    let sys = LienardSystem::van_der_pol(mu);
    let orbit = find_limit_cycle(&sys, 2.0, tol()).expect("cycle");
    (sys, orbit)
}

pub fn vdp_floquet(mu: f64) -> (LienardSystem, PeriodicOrbit, FloquetData) {
    let (sys, orbit) = vdp_cycle(mu);
    let fd = FloquetData::compute(&sys, &orbit, tol()).expect("floquet");
    (sys, orbit, fd)
}

/// Significant digits on which `x` and `reference` agree.
pub fn agreeing_digits(x: f64, reference: f64) -> f64 {
    -((x - reference).abs() / reference.abs()).log10()
}

pub fn scenario_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}
