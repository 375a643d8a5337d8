//! Adaptive explicit integration of small systems with dense output.
//!
//! Everything here is built on a single Dormand-Prince 5(4) pair. States are
//! fixed-size arrays: 2 components for the oscillator, 6 when the 2x2
//! variational block rides along.

mod dopri;
mod event;
mod variational;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dopri::{AcceptedStep, Segment, Stepper, Trajectory, MAX_REJECTIONS};
pub use event::{integrate_to_section, Direction, Section, SectionEvent, ON_SECTION_TOL, REFINE_TOL};
pub use variational::{integrate_with_variational, integrate_with_variational_backward, monodromy_of};

/// Relative and absolute error tolerances for the embedded error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

impl Tolerances {
    pub const MIN: f64 = 1e-14;
    pub const MAX: f64 = 1e-2;

    pub fn new(rtol: f64, atol: f64) -> Result<Self> {
        let tol = Self { rtol, atol };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("rtol", self.rtol), ("atol", self.atol)] {
            if !(Self::MIN..=Self::MAX).contains(&v) {
                return Err(Error::InvalidInput(format!(
                    "{name} = {v} outside [{:e}, {:e}]",
                    Self::MIN,
                    Self::MAX
                )));
            }
        }
        Ok(())
    }
}

/// Integrate `y' = field(t, y)` from `(t0, y0)` to `t1 > t0`.
pub fn integrate<const N: usize, F>(field: F, y0: [f64; N], t0: f64, t1: f64, tol: Tolerances) -> Result<Trajectory<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    tol.validate()?;
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidInput(format!("need t1 > t0, got [{t0}, {t1}]")));
    }
    let mut stepper = Stepper::new(field, t0, y0, tol, t1 - t0)?;
    let mut traj = Trajectory::new(t0, y0);
    while stepper.t() < t1 {
        traj.push(stepper.step(t1)?);
    }
    Ok(traj)
}
