//! Univariate real functions with exact calculus.
//!
//! A [`ScalarFunction`] is a polynomial plus a finite sum of sinusoids
//! `amp * sin(omega * x + shift)`. The class is closed under differentiation
//! and integration, so every derivative and antiderivative is exact. Named
//! catalog entries (`vdp_damping`, `cubic_stiffness`, `sin`, ...) expand into
//! this form at construction time.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One sinusoidal term `amp * sin(omega * x + shift)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave {
    pub amp: f64,
    pub omega: f64,
    pub shift: f64,
}

impl Wave {
    fn eval(&self, x: f64) -> f64 {
        self.amp * (self.omega * x + self.shift).sin()
    }

    fn derivative(&self) -> Wave {
        Wave {
            amp: self.amp * self.omega,
            omega: self.omega,
            shift: self.shift + FRAC_PI_2,
        }
    }

    /// Antiderivative without the integration constant.
    fn antiderivative(&self) -> Wave {
        Wave {
            amp: self.amp / self.omega,
            omega: self.omega,
            shift: self.shift - FRAC_PI_2,
        }
    }
}

/// How a function was specified; kept so it can be written back out.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Poly(Vec<f64>),
    Catalog { name: String, params: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFunction {
    /// Polynomial coefficients, constant term first. Never empty.
    poly: Vec<f64>,
    waves: Vec<Wave>,
    spec: Option<FunctionSpec>,
}

/// Catalog entries and their parameter lists.
pub const CATALOG: &[(&str, &str)] = &[
    ("zero", "[]"),
    ("constant", "[c]"),
    ("linear", "[k]: k*x"),
    ("vdp_damping", "[mu]: mu*(x^2 - 1)"),
    ("cubic_stiffness", "[k1, k3]: k1*x + k3*x^3"),
    ("sin", "[amp, omega, shift]: amp*sin(omega*x + shift)"),
    ("cos", "[amp, omega, shift]: amp*cos(omega*x + shift)"),
    ("sin_phase", "[amp, k, shift]: amp*sin(2*pi*k*x + shift)"),
    ("cos_phase", "[amp, k, shift]: amp*cos(2*pi*k*x + shift)"),
];

impl ScalarFunction {
    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        let mut f = Self::from_parts(coefficients.clone(), Vec::new())?;
        f.spec = Some(FunctionSpec::Poly(coefficients));
        Ok(f)
    }

    pub fn constant(c: f64) -> Self {
        Self::polynomial(vec![c]).expect("finite constant")
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn catalog(name: &str, params: &[f64]) -> Result<Self> {
        let expect = |n: usize| -> Result<()> {
            if params.len() != n {
                return Err(Error::InvalidFunction(format!(
                    "catalog entry `{name}` takes {n} parameter(s), got {}",
                    params.len()
                )));
            }
            Ok(())
        };
        let wave = |amp: f64, omega: f64, shift: f64| -> Result<Self> {
            if omega == 0.0 {
                return Self::from_parts(vec![amp * shift.sin()], Vec::new());
            }
            Self::from_parts(vec![0.0], vec![Wave { amp, omega, shift }])
        };
        let mut f = match name {
            "zero" => {
                expect(0)?;
                Self::from_parts(vec![0.0], Vec::new())?
            }
            "constant" => {
                expect(1)?;
                Self::from_parts(vec![params[0]], Vec::new())?
            }
            "linear" => {
                expect(1)?;
                Self::from_parts(vec![0.0, params[0]], Vec::new())?
            }
            "vdp_damping" => {
                expect(1)?;
                let mu = params[0];
                Self::from_parts(vec![-mu, 0.0, mu], Vec::new())?
            }
            "cubic_stiffness" => {
                expect(2)?;
                Self::from_parts(vec![0.0, params[0], 0.0, params[1]], Vec::new())?
            }
            "sin" => {
                expect(3)?;
                wave(params[0], params[1], params[2])?
            }
            "cos" => {
                expect(3)?;
                wave(params[0], params[1], params[2] + FRAC_PI_2)?
            }
            "sin_phase" => {
                expect(3)?;
                wave(params[0], TAU * params[1], params[2])?
            }
            "cos_phase" => {
                expect(3)?;
                wave(params[0], TAU * params[1], params[2] + FRAC_PI_2)?
            }
            other => return Err(Error::InvalidFunction(format!("unknown catalog entry `{other}`"))),
        };
        f.spec = Some(FunctionSpec::Catalog {
            name: name.to_string(),
            params: params.to_vec(),
        });
        Ok(f)
    }

    pub fn from_spec(spec: &FunctionSpec) -> Result<Self> {
        match spec {
            FunctionSpec::Poly(c) => Self::polynomial(c.clone()),
            FunctionSpec::Catalog { name, params } => Self::catalog(name, params),
        }
    }

    fn from_parts(mut poly: Vec<f64>, waves: Vec<Wave>) -> Result<Self> {
        if poly.is_empty() {
            poly.push(0.0);
        }
        let finite = poly.iter().all(|c| c.is_finite())
            && waves
                .iter()
                .all(|w| w.amp.is_finite() && w.omega.is_finite() && w.shift.is_finite());
        if !finite {
            return Err(Error::InvalidFunction("non-finite coefficient".into()));
        }
        while poly.len() > 1 && *poly.last().unwrap() == 0.0 {
            poly.pop();
        }
        Ok(Self {
            poly,
            waves: waves.into_iter().filter(|w| w.amp != 0.0).collect(),
            spec: None,
        })
    }

    pub fn spec(&self) -> Option<&FunctionSpec> {
        self.spec.as_ref()
    }

    /// Polynomial coefficients (constant term first), trailing zeros trimmed.
    pub fn coefficients(&self) -> &[f64] {
        &self.poly
    }

    pub fn is_polynomial(&self) -> bool {
        self.waves.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.waves.is_empty() && self.poly.len() == 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        let p = self.poly.iter().rev().fold(0.0, |acc, c| acc * x + c);
        p + self.waves.iter().map(|w| w.eval(x)).sum::<f64>()
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (k, c) in self.poly.iter().enumerate().skip(1).rev() {
            acc = acc * x + k as f64 * c;
        }
        acc + self.waves.iter().map(|w| w.derivative().eval(x)).sum::<f64>()
    }

    pub fn deriv2(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (k, c) in self.poly.iter().enumerate().skip(2).rev() {
            acc = acc * x + (k * (k - 1)) as f64 * c;
        }
        acc + self
            .waves
            .iter()
            .map(|w| w.derivative().derivative().eval(x))
            .sum::<f64>()
    }

    pub fn derivative(&self) -> ScalarFunction {
        let poly = if self.poly.len() > 1 {
            self.poly
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect()
        } else {
            vec![0.0]
        };
        let waves = self.waves.iter().map(Wave::derivative).collect();
        Self::from_parts(poly, waves).expect("derivative of finite function is finite")
    }

    /// The antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> ScalarFunction {
        let mut poly = Vec::with_capacity(self.poly.len() + 1);
        poly.push(0.0);
        poly.extend(self.poly.iter().enumerate().map(|(k, c)| c / (k as f64 + 1.0)));
        let waves: Vec<Wave> = self.waves.iter().map(Wave::antiderivative).collect();
        poly[0] = -waves.iter().map(|w| w.eval(0.0)).sum::<f64>();
        Self::from_parts(poly, waves).expect("antiderivative of finite function is finite")
    }

    /// `x -> self(scale * x)`.
    pub fn rescaled(&self, scale: f64) -> ScalarFunction {
        let poly = self
            .poly
            .iter()
            .enumerate()
            .map(|(k, c)| c * scale.powi(k as i32))
            .collect();
        let waves = self
            .waves
            .iter()
            .map(|w| Wave {
                omega: w.omega * scale,
                ..*w
            })
            .collect();
        Self::from_parts(poly, waves).expect("finite scale")
    }

    /// `x -> self(x - delay)`.
    pub fn delayed(&self, delay: f64) -> ScalarFunction {
        let n = self.poly.len();
        let mut shifted = vec![0.0; n];
        for (k, &c) in self.poly.iter().enumerate() {
            // c * (x - d)^k = c * sum_j binom(k, j) x^j (-d)^(k-j)
            let mut binom = 1.0;
            for (j, slot) in shifted.iter_mut().enumerate().take(k + 1) {
                *slot += c * binom * (-delay).powi((k - j) as i32);
                binom = binom * (k - j) as f64 / (j + 1) as f64;
            }
        }
        let waves = self
            .waves
            .iter()
            .map(|w| Wave {
                shift: w.shift - w.omega * delay,
                ..*w
            })
            .collect();
        Self::from_parts(shifted, waves).expect("finite delay")
    }

    pub fn add(&self, other: &ScalarFunction) -> ScalarFunction {
        let n = self.poly.len().max(other.poly.len());
        let poly = (0..n)
            .map(|k| self.poly.get(k).unwrap_or(&0.0) + other.poly.get(k).unwrap_or(&0.0))
            .collect();
        let waves = self.waves.iter().chain(&other.waves).copied().collect();
        Self::from_parts(poly, waves).expect("sum of finite functions")
    }

    pub fn scaled(&self, factor: f64) -> ScalarFunction {
        let poly = self.poly.iter().map(|c| c * factor).collect();
        let waves = self
            .waves
            .iter()
            .map(|w| Wave {
                amp: w.amp * factor,
                ..*w
            })
            .collect();
        Self::from_parts(poly, waves).expect("finite factor")
    }
}

impl fmt::Display for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.spec {
            Some(FunctionSpec::Catalog { name, params }) => write!(f, "{name}{params:?}"),
            _ => {
                write!(f, "poly{:?}", self.poly)?;
                for w in &self.waves {
                    write!(f, " + {}*sin({}*x + {})", w.amp, w.omega, w.shift)?;
                }
                Ok(())
            }
        }
    }
}

/// Wire form: `{"poly": [...]}` or `{"catalog": name, "params": [...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    poly: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    catalog: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<Vec<f64>>,
}

impl Serialize for FunctionSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = match self {
            FunctionSpec::Poly(c) => RawSpec {
                poly: Some(c.clone()),
                catalog: None,
                params: None,
            },
            FunctionSpec::Catalog { name, params } => RawSpec {
                poly: None,
                catalog: Some(name.clone()),
                params: Some(params.clone()),
            },
        };
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FunctionSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSpec::deserialize(deserializer)?;
        match (raw.poly, raw.catalog, raw.params) {
            (Some(c), None, None) => Ok(FunctionSpec::Poly(c)),
            (None, Some(name), params) => Ok(FunctionSpec::Catalog {
                name,
                params: params.unwrap_or_default(),
            }),
            (Some(_), _, _) => Err(D::Error::custom(
                "function: `poly` cannot be combined with `catalog` or `params`",
            )),
            (None, None, _) => Err(D::Error::custom("function: expected `poly` or `catalog` key")),
        }
    }
}

impl Serialize for ScalarFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.spec {
            Some(spec) => spec.serialize(serializer),
            None if self.is_polynomial() => FunctionSpec::Poly(self.poly.clone()).serialize(serializer),
            None => Err(serde::ser::Error::custom(
                "derived trigonometric function has no wire form",
            )),
        }
    }
}

impl<'de> Deserialize<'de> for ScalarFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = FunctionSpec::deserialize(deserializer)?;
        ScalarFunction::from_spec(&spec).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_at_zero_is_constant_term() {
        let p = ScalarFunction::polynomial(vec![1.5, -2.0, 3.0]).unwrap();
        assert_eq!(p.eval(0.0), 1.5);
        assert_eq!(p.eval(2.0), 1.5 - 4.0 + 12.0);
    }

    #[test]
    fn polynomial_calculus_is_exact() {
        let p = ScalarFunction::polynomial(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(p.derivative().coefficients(), &[2.0, 6.0, 12.0]);
        assert_eq!(p.antiderivative().coefficients(), &[0.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(p.deriv(2.0), 2.0 + 12.0 + 48.0);
        assert_eq!(p.deriv2(2.0), 6.0 + 48.0);
        assert_eq!(p.antiderivative().derivative().coefficients(), p.coefficients());
    }

    #[test]
    fn vdp_damping_antiderivative() {
        let f = ScalarFunction::catalog("vdp_damping", &[1.0]).unwrap();
        let big_f = f.antiderivative();
        assert_relative_eq!(big_f.eval(2.0), 8.0 / 3.0 - 2.0, epsilon = 1e-15);
        assert_relative_eq!(big_f.eval(3f64.sqrt()), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn catalog_matches_finite_differences() {
        let h = 1e-5;
        let entries: Vec<(&str, Vec<f64>)> = vec![
            ("vdp_damping", vec![1.3]),
            ("cubic_stiffness", vec![1.0, 0.5]),
            ("sin", vec![0.7, 2.0, 0.3]),
            ("cos", vec![1.1, 1.5, -0.4]),
            ("sin_phase", vec![1.0, 2.0, 0.1]),
            ("cos_phase", vec![1.0, 1.0, 0.0]),
        ];
        for (name, params) in entries {
            let f = ScalarFunction::catalog(name, &params).unwrap();
            for &x in &[-1.7, -0.3, 0.2, 0.9, 2.4] {
                let fd1 = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
                let fd2 = (f.deriv(x + h) - f.deriv(x - h)) / (2.0 * h);
                let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
                assert!(rel(fd1, f.deriv(x)) < 1e-6, "{name} f' at {x}");
                assert!(rel(fd2, f.deriv2(x)) < 1e-6, "{name} f'' at {x}");
                let big = f.antiderivative();
                assert!(rel((big.eval(x + h) - big.eval(x - h)) / (2.0 * h), f.eval(x)) < 1e-6);
                assert!(big.eval(0.0).abs() < 1e-15, "{name} antiderivative at 0");
            }
        }
    }

    #[test]
    fn catalog_errors() {
        assert!(matches!(
            ScalarFunction::catalog("nope", &[]),
            Err(Error::InvalidFunction(_))
        ));
        assert!(matches!(
            ScalarFunction::catalog("vdp_damping", &[]),
            Err(Error::InvalidFunction(_))
        ));
        assert!(matches!(
            ScalarFunction::polynomial(vec![f64::NAN]),
            Err(Error::InvalidFunction(_))
        ));
    }

    #[test]
    fn rescale_and_delay() {
        let f = ScalarFunction::catalog("cos_phase", &[2.0, 1.0, 0.0]).unwrap();
        let g = f.rescaled(0.5);
        assert_relative_eq!(g.eval(1.0), 2.0 * (std::f64::consts::PI).cos(), epsilon = 1e-14);
        let p = ScalarFunction::polynomial(vec![1.0, 2.0, 3.0]).unwrap();
        let d = p.delayed(0.5);
        for &x in &[-1.0, 0.0, 0.7, 2.0] {
            assert_relative_eq!(d.eval(x), p.eval(x - 0.5), epsilon = 1e-13);
            assert_relative_eq!(f.delayed(0.3).eval(x), f.eval(x - 0.3), epsilon = 1e-13);
        }
    }

    #[test]
    fn wire_format() {
        let f: ScalarFunction = serde_json::from_str(r#"{"poly": [0, 1]}"#).unwrap();
        assert_eq!(f.eval(3.0), 3.0);
        let g: ScalarFunction = serde_json::from_str(r#"{"catalog": "vdp_damping", "params": [2]}"#).unwrap();
        assert_eq!(g.eval(0.0), -2.0);
        assert_eq!(
            serde_json::to_string(&g).unwrap(),
            r#"{"catalog":"vdp_damping","params":[2.0]}"#
        );
        let err = serde_json::from_str::<ScalarFunction>(r#"{"poly": [1], "extra": 2}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("extra"), "{err}");
        assert!(serde_json::from_str::<ScalarFunction>(r#"{"params": [1]}"#).is_err());
    }
}
