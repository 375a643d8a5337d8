//! Liénard systems: the functions `f`, `g`, perturbations, coordinate frames
//! and the standing-hypothesis checks.

pub mod function;
pub mod hypothesis;
pub mod perturbation;
pub mod system;

pub use function::{FunctionSpec, ScalarFunction};
pub use hypothesis::{hypothesis_check, HypothesisCheck, HypothesisReport};
pub use perturbation::{GammaPartials, Perturbation, PerturbationKind, PerturbationTerm};
pub use system::{Frame, LienardSystem, PhasePoint, SystemSpec};
