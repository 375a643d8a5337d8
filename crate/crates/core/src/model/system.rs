use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::function::ScalarFunction;
use super::perturbation::Perturbation;
use crate::error::{Error, Result};

/// Coordinate frames for the planar form of `u'' + f(u) u' + g(u) = eps * gamma`.
///
/// * `Uv`: `(u, v)` with `v = u'`; `u' = v, v' = -g(u) - f(u) v`.
/// * `LienardPlane`: `(u, w)` with `w = u' + F(u)`; `u' = w - F(u), w' = -g(u)`.
/// * `Farkas`: `(x1, x2) = (-u' - F(u), u)`; `x' = h(x) = (g(x2), -x1 - F(x2))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Uv,
    LienardPlane,
    Farkas,
}

impl FromStr for Frame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uv" => Ok(Frame::Uv),
            "lienard_plane" => Ok(Frame::LienardPlane),
            "farkas" => Ok(Frame::Farkas),
            other => Err(Error::FrameError(other.to_string())),
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frame::Uv => "uv",
            Frame::LienardPlane => "lienard_plane",
            Frame::Farkas => "farkas",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub state: [f64; 2],
    pub frame: Frame,
}

impl PhasePoint {
    pub fn new(state: [f64; 2], frame: Frame) -> Self {
        Self { state, frame }
    }

    pub fn uv(u: f64, v: f64) -> Self {
        Self::new([u, v], Frame::Uv)
    }

    pub fn farkas(x1: f64, x2: f64) -> Self {
        Self::new([x1, x2], Frame::Farkas)
    }
}

/// `u'' + f(u) u' + g(u) = eps * gamma(t / tau, u, u')`.
#[derive(Debug, Clone, PartialEq)]
pub struct LienardSystem {
    f: ScalarFunction,
    g: ScalarFunction,
    big_f: ScalarFunction,
    big_g: ScalarFunction,
    perturbation: Option<Perturbation>,
    epsilon: f64,
    tau: f64,
}

impl LienardSystem {
    pub fn new(f: ScalarFunction, g: ScalarFunction) -> Self {
        let big_f = f.antiderivative();
        let big_g = g.antiderivative();
        Self {
            f,
            g,
            big_f,
            big_g,
            perturbation: None,
            epsilon: 0.0,
            tau: std::f64::consts::TAU,
        }
    }

    /// `u'' + mu (u^2 - 1) u' + u = 0`.
    pub fn van_der_pol(mu: f64) -> Self {
        Self::new(
            ScalarFunction::catalog("vdp_damping", &[mu]).expect("finite mu"),
            ScalarFunction::catalog("linear", &[1.0]).expect("linear"),
        )
    }

    /// Attach a perturbation with amplitude `epsilon` and period `tau`.
    pub fn with_perturbation(mut self, perturbation: Perturbation, epsilon: f64, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidInput(format!("period tau must be positive, got {tau}")));
        }
        if !epsilon.is_finite() {
            return Err(Error::InvalidInput("epsilon must be finite".into()));
        }
        self.perturbation = Some(perturbation);
        self.epsilon = epsilon;
        self.tau = tau;
        Ok(self)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        let mut s = self.clone();
        s.epsilon = if s.perturbation.is_some() { epsilon } else { 0.0 };
        s
    }

    pub fn with_tau(&self, tau: f64) -> Self {
        let mut s = self.clone();
        s.tau = tau;
        s
    }

    /// The same system without its perturbation.
    pub fn unperturbed(&self) -> Self {
        let mut s = self.clone();
        s.perturbation = None;
        s.epsilon = 0.0;
        s
    }

    pub fn f(&self) -> &ScalarFunction {
        &self.f
    }

    pub fn g(&self) -> &ScalarFunction {
        &self.g
    }

    /// `F(x) = int_0^x f`.
    pub fn big_f(&self) -> &ScalarFunction {
        &self.big_f
    }

    /// `G(x) = int_0^x g`.
    pub fn big_g(&self) -> &ScalarFunction {
        &self.big_g
    }

    pub fn perturbation(&self) -> Option<&Perturbation> {
        self.perturbation.as_ref()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn is_perturbed(&self) -> bool {
        self.perturbation.is_some() && self.epsilon != 0.0
    }

    fn forcing(&self, t: f64, u: f64, udot: f64) -> f64 {
        match &self.perturbation {
            Some(p) if self.epsilon != 0.0 => self.epsilon * p.eval(t / self.tau, u, udot),
            _ => 0.0,
        }
    }

    /// Convert `p` into `target` coordinates.
    pub fn to_frame(&self, p: PhasePoint, target: Frame) -> PhasePoint {
        if p.frame == target {
            return p;
        }
        let [u, v] = self.to_uv(p);
        let state = match target {
            Frame::Uv => [u, v],
            Frame::LienardPlane => [u, v + self.big_f.eval(u)],
            Frame::Farkas => [-v - self.big_f.eval(u), u],
        };
        PhasePoint::new(state, target)
    }

    /// `(u, u')` of a point in any frame.
    pub fn to_uv(&self, p: PhasePoint) -> [f64; 2] {
        let [a, b] = p.state;
        match p.frame {
            Frame::Uv => [a, b],
            Frame::LienardPlane => [a, b - self.big_f.eval(a)],
            Frame::Farkas => [b, -a - self.big_f.eval(b)],
        }
    }

    /// Time derivative of `p` in its own frame, including `eps * gamma`.
    pub fn vector_field(&self, p: PhasePoint, t: f64) -> [f64; 2] {
        let [a, b] = p.state;
        match p.frame {
            Frame::Uv => self.uv_field(t, &[a, b]),
            Frame::LienardPlane => {
                let big_f = self.big_f.eval(a);
                [b - big_f, -self.g.eval(a) + self.forcing(t, a, b - big_f)]
            }
            Frame::Farkas => self.farkas_field(t, &[a, b]),
        }
    }

    pub fn uv_field(&self, t: f64, y: &[f64; 2]) -> [f64; 2] {
        let [u, v] = *y;
        [v, -self.g.eval(u) - self.f.eval(u) * v + self.forcing(t, u, v)]
    }

    /// `h(x) + eps * q(t / tau, x)` with `q = (-gamma(t / tau, x2, -x1 - F(x2)), 0)`.
    pub fn farkas_field(&self, t: f64, x: &[f64; 2]) -> [f64; 2] {
        let [x1, x2] = *x;
        let udot = -x1 - self.big_f.eval(x2);
        [self.g.eval(x2) - self.forcing(t, x2, udot), udot]
    }

    /// Membership in the disk `u^2 + u'^2 < r^2`, tested in farkas coordinates.
    pub fn in_disk(&self, x: [f64; 2], r: f64) -> bool {
        let [x1, x2] = x;
        let w = -x1 - self.big_f.eval(x2);
        x2 * x2 + w * w < r * r
    }

    pub fn spec(&self) -> SystemSpec {
        SystemSpec {
            f: self.f.clone(),
            g: self.g.clone(),
            perturbation: self.perturbation.clone(),
            epsilon: self.epsilon,
            tau: Some(self.tau),
        }
    }
}

/// JSON form of a system definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub f: ScalarFunction,
    pub g: ScalarFunction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Perturbation>,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

impl SystemSpec {
    pub fn build(&self) -> Result<LienardSystem> {
        let sys = LienardSystem::new(self.f.clone(), self.g.clone());
        match &self.perturbation {
            Some(p) => {
                let tau = self.tau.unwrap_or(std::f64::consts::TAU);
                sys.with_perturbation(p.clone(), self.epsilon, tau)
            }
            None if self.epsilon != 0.0 => Err(Error::InvalidInput(
                "epsilon must be 0 when no perturbation is given".into(),
            )),
            None => {
                let tau = self.tau.unwrap_or(std::f64::consts::TAU);
                if !(tau > 0.0 && tau.is_finite()) {
                    return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
                }
                Ok(sys.with_tau(tau))
            }
        }
    }
}

impl LienardSystem {
    pub fn from_json(json: &str) -> Result<Self> {
        let spec: SystemSpec = serde_json::from_str(json).map_err(|e| Error::Config(e.to_string()))?;
        spec.build()
    }
}
