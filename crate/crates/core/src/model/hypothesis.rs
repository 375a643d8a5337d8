//! Sampled checks of the standing assumptions on `f` and `g`.
//!
//! The report is advisory; nothing downstream refuses to run when a check
//! fails.

use serde::Serialize;

use super::system::LienardSystem;
use crate::error::{Error, Result};
use crate::numerics::bracketed_root;

pub const SYMMETRY_SAMPLES: usize = 101;
pub const SYMMETRY_TOL: f64 = 1e-10;
const SIGN_SAMPLES: usize = 1001;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Counterexample abscissa on failure; for the zero count, the located zero.
    pub witness: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub probe_radius: f64,
    pub checks: Vec<HypothesisCheck>,
}

impl HypothesisReport {
    pub fn get(&self, name: &str) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.get(name).is_some_and(|c| c.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub const F_EVEN: &str = "f even";
pub const G_ODD: &str = "g odd";
pub const G_SIGN: &str = "x*g(x) > 0";
pub const F_GROWS: &str = "F grows at boundary";
pub const G_GROWS: &str = "G grows at boundary";
pub const F_UNIQUE_ZERO: &str = "F has one positive zero";
pub const SMOOTH: &str = "f, g twice differentiable";

fn finite(name: &str, x: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidFunction(format!("{name}({x}) is not finite")))
    }
}

pub fn hypothesis_check(sys: &LienardSystem, probe_radius: f64) -> Result<HypothesisReport> {
    if !(probe_radius > 0.0 && probe_radius.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "probe radius must be positive, got {probe_radius}"
        )));
    }
    let r = probe_radius;
    let f = |x: f64| finite("f", x, sys.f().eval(x));
    let g = |x: f64| finite("g", x, sys.g().eval(x));
    let big_f = |x: f64| finite("F", x, sys.big_f().eval(x));
    let big_g = |x: f64| finite("G", x, sys.big_g().eval(x));

    let sym: Vec<f64> = (0..SYMMETRY_SAMPLES)
        .map(|i| -r + 2.0 * r * i as f64 / (SYMMETRY_SAMPLES - 1) as f64)
        .collect();
    let mut checks = Vec::new();

    let mut worst: Option<(f64, f64)> = None;
    for &x in sym.iter().filter(|x| **x > 0.0) {
        let gap = (f(x)? - f(-x)?).abs();
        if gap > SYMMETRY_TOL * f(x)?.abs().max(1.0) && worst.is_none_or(|w| gap > w.1) {
            worst = Some((x, gap));
        }
    }
    checks.push(HypothesisCheck {
        name: F_EVEN,
        passed: worst.is_none(),
        witness: worst.map(|w| w.0),
        detail: match worst {
            Some((x, gap)) => format!("|f({x}) - f(-{x})| = {gap:e}"),
            None => format!("{SYMMETRY_SAMPLES} symmetric samples"),
        },
    });

    let mut worst: Option<(f64, f64)> = None;
    for &x in sym.iter().filter(|x| **x >= 0.0) {
        let gap = (g(x)? + g(-x)?).abs();
        if gap > SYMMETRY_TOL * g(x)?.abs().max(1.0) && worst.is_none_or(|w| gap > w.1) {
            worst = Some((x, gap));
        }
    }
    checks.push(HypothesisCheck {
        name: G_ODD,
        passed: worst.is_none(),
        witness: worst.map(|w| w.0),
        detail: match worst {
            Some((x, gap)) => format!("|g({x}) + g(-{x})| = {gap:e}"),
            None => format!("{SYMMETRY_SAMPLES} symmetric samples"),
        },
    });

    let mut witness = None;
    for i in 0..SIGN_SAMPLES {
        let x = -r + 2.0 * r * i as f64 / (SIGN_SAMPLES - 1) as f64;
        if x == 0.0 {
            continue;
        }
        let v = x * g(x)?;
        if v <= 0.0 && witness.is_none_or(|(_, w)| v < w) {
            witness = Some((x, v));
        }
    }
    checks.push(HypothesisCheck {
        name: G_SIGN,
        passed: witness.is_none(),
        witness: witness.map(|w| w.0),
        detail: match witness {
            Some((x, v)) => format!("x*g(x) = {v:e} at x = {x}"),
            None => format!("{SIGN_SAMPLES} samples on [-{r}, {r}]"),
        },
    });

    let (fr, fpr) = (big_f(r)?, f(r)?);
    checks.push(HypothesisCheck {
        name: F_GROWS,
        passed: fr > 0.0 && fpr > 0.0,
        witness: (!(fr > 0.0 && fpr > 0.0)).then_some(r),
        detail: format!("F({r}) = {fr}, F'({r}) = {fpr}"),
    });
    let (gr, gpr) = (big_g(r)?, g(r)?);
    checks.push(HypothesisCheck {
        name: G_GROWS,
        passed: gr > 0.0 && gpr > 0.0,
        witness: (!(gr > 0.0 && gpr > 0.0)).then_some(r),
        detail: format!("G({r}) = {gr}, G'({r}) = {gpr}"),
    });

    // sign changes of F on (0, r]
    let mut zeros = Vec::new();
    let mut prev = (r / SIGN_SAMPLES as f64, big_f(r / SIGN_SAMPLES as f64)?);
    for i in 2..=SIGN_SAMPLES {
        let x = r * i as f64 / SIGN_SAMPLES as f64;
        let v = big_f(x)?;
        if prev.1 == 0.0 {
            zeros.push(prev.0);
        } else if prev.1 * v < 0.0 {
            let (z, _, _) = bracketed_root(|s| sys.big_f().eval(s), prev.0, x, prev.1, v, 1e-14, 200);
            zeros.push(z);
        }
        prev = (x, v);
    }
    if prev.1 == 0.0 {
        zeros.push(prev.0);
    }
    checks.push(HypothesisCheck {
        name: F_UNIQUE_ZERO,
        passed: zeros.len() == 1,
        witness: zeros.first().copied(),
        detail: format!("{} sign change(s) of F on (0, {r}]: {zeros:?}", zeros.len()),
    });

    checks.push(HypothesisCheck {
        name: SMOOTH,
        passed: true,
        witness: None,
        detail: "polynomial/trigonometric representation is smooth".into(),
    });

    Ok(HypothesisReport {
        probe_radius: r,
        checks,
    })
}
