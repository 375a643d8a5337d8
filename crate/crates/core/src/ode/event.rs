use super::{Stepper, Tolerances, Trajectory};
use crate::error::{Error, Result};
use crate::numerics::bracketed_root;

/// A start with `|s(y0)|` below this counts as lying on the section.
pub const ON_SECTION_TOL: f64 = 1e-9;
/// Target for `|s|` at a refined crossing.
pub const REFINE_TOL: f64 = 1e-10;
const REFINE_MAX_ITER: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `s` goes from negative to non-negative.
    Increasing,
    /// `s` goes from positive to non-positive.
    Decreasing,
    Either,
}

/// The hyperplane `s(y) = normal . y - offset = 0`, crossed in a given
/// direction, optionally restricted to the half-space `guard . y > bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section<const N: usize> {
    pub normal: [f64; N],
    pub offset: f64,
    pub direction: Direction,
    pub guard: Option<([f64; N], f64)>,
}

impl<const N: usize> Section<N> {
    pub fn new(normal: [f64; N], offset: f64, direction: Direction) -> Self {
        Self {
            normal,
            offset,
            direction,
            guard: None,
        }
    }

    /// `y[index] = value`.
    pub fn coordinate(index: usize, value: f64, direction: Direction) -> Self {
        let mut normal = [0.0; N];
        normal[index] = 1.0;
        Self::new(normal, value, direction)
    }

    /// Only accept crossings with `y[index] > bound`.
    pub fn with_guard(mut self, index: usize, bound: f64) -> Self {
        let mut g = [0.0; N];
        g[index] = 1.0;
        self.guard = Some((g, bound));
        self
    }

    pub fn value(&self, y: &[f64; N]) -> f64 {
        dot(&self.normal, y) - self.offset
    }

    pub fn admits(&self, y: &[f64; N]) -> bool {
        self.guard.is_none_or(|(g, b)| dot(&g, y) > b)
    }

    fn crosses(&self, before: f64, after: f64) -> bool {
        match self.direction {
            Direction::Increasing => before < 0.0 && after >= 0.0,
            Direction::Decreasing => before > 0.0 && after <= 0.0,
            Direction::Either => (before < 0.0 && after >= 0.0) || (before > 0.0 && after <= 0.0),
        }
    }
}

fn dot<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionEvent<const N: usize> {
    pub t: f64,
    pub state: [f64; N],
    pub section: Section<N>,
    /// `s(state)` after refinement.
    pub residual: f64,
    /// `d s / dt` at the crossing.
    pub slope: f64,
}

/// Integrate from `(t0, y0)` until the first admissible crossing of
/// `section`, at most `max_time` past `t0`. The trajectory ends at the
/// crossing.
pub fn integrate_to_section<const N: usize, F>(
    field: F,
    y0: [f64; N],
    t0: f64,
    section: Section<N>,
    max_time: f64,
    tol: Tolerances,
) -> Result<(Trajectory<N>, SectionEvent<N>)>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    tol.validate()?;
    if !(max_time > 0.0 && max_time.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "max_time must be positive, got {max_time}"
        )));
    }
    let t_max = t0 + max_time;
    let mut stepper = Stepper::new(&field, t0, y0, tol, max_time)?;
    let mut traj = Trajectory::new(t0, y0);
    let mut s_prev = section.value(&y0);
    if s_prev.abs() < ON_SECTION_TOL {
        s_prev = 0.0;
    }
    while stepper.t() < t_max {
        let step = stepper.step(t_max)?;
        let s_new = section.value(&step.y_end);
        if section.crosses(s_prev, s_new) {
            let seg = step.segment.clone();
            let (t_star, residual, _) = bracketed_root(
                |t| section.value(&seg.eval(t)),
                step.t_start,
                step.t_end,
                s_prev,
                s_new,
                REFINE_TOL,
                REFINE_MAX_ITER,
            );
            let state = if t_star == step.t_end {
                step.y_end
            } else {
                seg.eval(t_star)
            };
            if section.admits(&state) {
                traj.push(step);
                traj.truncate(t_star, state);
                let slope = dot(&section.normal, &field(t_star, &state));
                return Ok((
                    traj,
                    SectionEvent {
                        t: t_star,
                        state,
                        section,
                        residual,
                        slope,
                    },
                ));
            }
        }
        s_prev = s_new;
        traj.push(step);
    }
    Err(Error::NoCrossing { max_time })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::TAU;

    fn harmonic(_t: f64, y: &[f64; 2]) -> [f64; 2] {
        [y[1], -y[0]]
    }

    #[test]
    fn harmonic_return() {
        let sec = Section::coordinate(1, 0.0, Direction::Decreasing).with_guard(0, 0.0);
        let (traj, ev) = integrate_to_section(harmonic, [1.0, 0.0], 0.0, sec, 20.0, Tolerances::default()).unwrap();
        assert_abs_diff_eq!(ev.t, TAU, epsilon = 1e-8);
        assert!(ev.residual.abs() < REFINE_TOL);
        assert!(ev.slope < 0.0);
        assert_eq!(traj.t_end(), ev.t);
        assert_eq!(traj.final_state(), ev.state);
    }

    #[test]
    fn constant_field_hits_plane() {
        let sec = Section::coordinate(0, 1.0, Direction::Increasing);
        let (_, ev) = integrate_to_section(
            |_t, _y: &[f64; 2]| [1.0, 0.0],
            [0.0, 0.0],
            0.0,
            sec,
            5.0,
            Tolerances::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(ev.t, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev.state[0], 1.0, epsilon = 1e-10);
        assert_eq!(ev.state[1], 0.0);
    }

    #[test]
    fn restart_finds_next_crossing() {
        let sec = Section::coordinate(1, 0.0, Direction::Decreasing).with_guard(0, 0.0);
        let tol = Tolerances::default();
        let (_, first) = integrate_to_section(harmonic, [1.0, 0.0], 0.0, sec, 20.0, tol).unwrap();
        let (_, second) = integrate_to_section(harmonic, first.state, first.t, sec, 20.0, tol).unwrap();
        assert_abs_diff_eq!(second.t - first.t, TAU, epsilon = 1e-8);
    }

    #[test]
    fn no_crossing() {
        let sec = Section::coordinate(0, 10.0, Direction::Increasing);
        let r = integrate_to_section(harmonic, [1.0, 0.0], 0.0, sec, 30.0, Tolerances::default());
        assert!(matches!(r, Err(Error::NoCrossing { .. })));
    }
}
