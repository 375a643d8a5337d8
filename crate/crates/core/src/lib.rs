//! Limit cycles of Liénard oscillators and their periodic perturbations.
//!
//! The crate finds a limit cycle by shooting, computes its Floquet data and
//! Jacobi matrix, turns those into an existence certificate for periodic
//! solutions of the forced equation, solves for those solutions by Newton's
//! method, evaluates the first-order bifurcation function for time-periodic
//! forcing, and scans Moser's nonexistence example.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod cli;
pub mod cycle;
pub mod error;
pub mod floquet;
pub mod linalg;
pub mod loud;
pub mod model;
pub mod moser;
pub mod numerics;
pub mod ode;
pub mod perturbed;
pub mod report;

pub use certificate::{certify, compute_constants, EstimateConstants, ExistenceCertificate};
pub use cycle::{find_limit_cycle, PeriodicOrbit};
pub use error::{Error, Result};
pub use floquet::FloquetData;
pub use model::{LienardSystem, Perturbation, ScalarFunction, SystemSpec};
pub use ode::Tolerances;
pub use perturbed::{solve_perturbed, sweep_epsilon, PerturbedSolution};
