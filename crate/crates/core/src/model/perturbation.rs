//! Controllably periodic perturbations `gamma(theta, u, udot)`.
//!
//! A perturbation is a sum of separable terms
//! `phase(theta) * of_u(u) * of_udot(udot)` where `theta = t / tau` is taken
//! modulo 1. Each phase factor must be 1-periodic up to its second
//! derivative so that the composed forcing stays C².

use serde::{Deserialize, Serialize};

use super::function::ScalarFunction;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    /// Depends on the phase only.
    TimeOnly,
    /// Depends on the state only.
    Autonomous,
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationTerm {
    #[serde(default = "unit")]
    pub phase: ScalarFunction,
    #[serde(default = "unit")]
    pub u: ScalarFunction,
    #[serde(default = "unit")]
    pub udot: ScalarFunction,
}

fn unit() -> ScalarFunction {
    ScalarFunction::constant(1.0)
}

impl PerturbationTerm {
    pub fn new(phase: ScalarFunction, u: ScalarFunction, udot: ScalarFunction) -> Self {
        Self { phase, u, udot }
    }
}

/// Partial derivatives of gamma at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaPartials {
    pub value: f64,
    pub d_theta: f64,
    pub d_u: f64,
    pub d_udot: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPerturbation", into = "RawPerturbation")]
pub struct Perturbation {
    terms: Vec<PerturbationTerm>,
    kind: PerturbationKind,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPerturbation {
    terms: Vec<PerturbationTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<PerturbationKind>,
}

impl TryFrom<RawPerturbation> for Perturbation {
    type Error = Error;

    fn try_from(raw: RawPerturbation) -> Result<Self> {
        let p = Perturbation::new(raw.terms)?;
        if let Some(declared) = raw.kind {
            p.check_declared_kind(declared)?;
        }
        Ok(p)
    }
}

impl From<Perturbation> for RawPerturbation {
    fn from(p: Perturbation) -> Self {
        RawPerturbation {
            kind: Some(p.kind),
            terms: p.terms,
        }
    }
}

impl Perturbation {
    pub fn new(terms: Vec<PerturbationTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidPerturbation("no terms".into()));
        }
        for (i, term) in terms.iter().enumerate() {
            let c = &term.phase;
            let scale = [c.eval(0.0), c.deriv(0.0), c.deriv2(0.0)]
                .iter()
                .fold(1.0f64, |m, v| m.max(v.abs()));
            let gaps = [
                c.eval(1.0) - c.eval(0.0),
                c.deriv(1.0) - c.deriv(0.0),
                c.deriv2(1.0) - c.deriv2(0.0),
            ];
            if gaps.iter().any(|g| g.abs() > 1e-9 * scale) {
                return Err(Error::InvalidPerturbation(format!(
                    "phase factor of term {i} is not 1-periodic up to second derivative"
                )));
            }
        }
        let autonomous = terms.iter().all(|t| t.phase.is_constant());
        let time_only = terms.iter().all(|t| t.u.is_constant() && t.udot.is_constant());
        let kind = if autonomous {
            PerturbationKind::Autonomous
        } else if time_only {
            PerturbationKind::TimeOnly
        } else {
            PerturbationKind::General
        };
        Ok(Self { terms, kind })
    }

    /// `gamma = value`, independent of phase and state.
    pub fn constant(value: f64) -> Self {
        Self::new(vec![PerturbationTerm::new(
            ScalarFunction::constant(value),
            unit(),
            unit(),
        )])
        .expect("constant perturbation")
    }

    /// `gamma = amp * cos(2 pi k theta + shift)`.
    pub fn harmonic(amp: f64, k: f64, shift: f64) -> Result<Self> {
        Self::new(vec![PerturbationTerm::new(
            ScalarFunction::catalog("cos_phase", &[amp, k, shift])?,
            unit(),
            unit(),
        )])
    }

    pub fn kind(&self) -> PerturbationKind {
        self.kind
    }

    pub fn terms(&self) -> &[PerturbationTerm] {
        &self.terms
    }

    fn check_declared_kind(&self, declared: PerturbationKind) -> Result<()> {
        let ok = match declared {
            PerturbationKind::General => true,
            PerturbationKind::Autonomous => self.terms.iter().all(|t| t.phase.is_constant()),
            PerturbationKind::TimeOnly => self.terms.iter().all(|t| t.u.is_constant() && t.udot.is_constant()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidPerturbation(format!(
                "declared kind {declared:?} does not match the terms"
            )))
        }
    }

    /// gamma at phase `theta` (reduced modulo 1).
    pub fn eval(&self, theta: f64, u: f64, udot: f64) -> f64 {
        let theta = theta.rem_euclid(1.0);
        self.terms
            .iter()
            .map(|t| t.phase.eval(theta) * t.u.eval(u) * t.udot.eval(udot))
            .sum()
    }

    pub fn partials(&self, theta: f64, u: f64, udot: f64) -> GammaPartials {
        let theta = theta.rem_euclid(1.0);
        let mut out = GammaPartials {
            value: 0.0,
            d_theta: 0.0,
            d_u: 0.0,
            d_udot: 0.0,
        };
        for t in &self.terms {
            let (c, cu, cd) = (t.phase.eval(theta), t.u.eval(u), t.udot.eval(udot));
            out.value += c * cu * cd;
            out.d_theta += t.phase.deriv(theta) * cu * cd;
            out.d_u += c * t.u.deriv(u) * cd;
            out.d_udot += c * cu * t.udot.deriv(udot);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_in_phase() {
        let p = Perturbation::harmonic(1.0, 1.0, 0.3).unwrap();
        for &th in &[0.0, 0.1, 0.55, 0.9] {
            assert!((p.eval(th, 0.2, 0.1) - p.eval(th + 1.0, 0.2, 0.1)).abs() < 1e-14);
            assert!((p.eval(th, 0.2, 0.1) - p.eval(th - 3.0, 0.2, 0.1)).abs() < 1e-14);
        }
        assert_eq!(p.kind(), PerturbationKind::TimeOnly);
    }

    #[test]
    fn kinds_are_derived() {
        assert_eq!(Perturbation::constant(1.0).kind(), PerturbationKind::Autonomous);
        let general = Perturbation::new(vec![PerturbationTerm::new(
            ScalarFunction::catalog("sin_phase", &[1.0, 1.0, 0.0]).unwrap(),
            ScalarFunction::polynomial(vec![0.0, 1.0]).unwrap(),
            unit(),
        )])
        .unwrap();
        assert_eq!(general.kind(), PerturbationKind::General);
    }

    #[test]
    fn autonomous_ignores_phase_and_time_only_ignores_state() {
        let a = Perturbation::new(vec![PerturbationTerm::new(
            unit(),
            ScalarFunction::polynomial(vec![0.0, 0.0, 1.0]).unwrap(),
            ScalarFunction::polynomial(vec![1.0, 1.0]).unwrap(),
        )])
        .unwrap();
        let t = Perturbation::harmonic(0.5, 2.0, 0.0).unwrap();
        for i in 0..50 {
            let th = i as f64 / 50.0;
            assert_eq!(a.eval(th, 0.7, -0.2), a.eval(0.0, 0.7, -0.2));
            assert_eq!(t.eval(th, 0.7, -0.2), t.eval(th, -3.0, 5.0));
        }
    }

    #[test]
    fn rejects_non_periodic_phase() {
        let bad = Perturbation::new(vec![PerturbationTerm::new(
            ScalarFunction::polynomial(vec![0.0, 1.0]).unwrap(),
            unit(),
            unit(),
        )]);
        assert!(matches!(bad, Err(Error::InvalidPerturbation(_))));
    }

    #[test]
    fn json_round_trip_and_kind_check() {
        let json = r#"{"terms": [{"phase": {"catalog": "cos_phase", "params": [1, 1, 0]}}], "kind": "time_only"}"#;
        let p: Perturbation = serde_json::from_str(json).unwrap();
        assert_eq!(p.kind(), PerturbationKind::TimeOnly);
        let back: Perturbation = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        let wrong = r#"{"terms": [{"phase": {"catalog": "cos_phase", "params": [1, 1, 0]}}], "kind": "autonomous"}"#;
        assert!(serde_json::from_str::<Perturbation>(wrong).is_err());
    }
}
