use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// Row-major 2x2 real matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat2(pub [[f64; 2]; 2]);

/// Eigenvalues of a real 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Eigenvalues {
    /// Sorted by decreasing absolute value.
    Real([f64; 2]),
    Complex {
        re: f64,
        im: f64,
    },
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2([[a11, a12], [a21, a22]])
    }

    pub fn diag(d1: f64, d2: f64) -> Self {
        Mat2::new(d1, 0.0, 0.0, d2)
    }

    /// From the flat row-major slice `[a11, a12, a21, a22]`.
    pub fn from_flat(v: &[f64]) -> Self {
        Mat2::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_flat(&self) -> [f64; 4] {
        let [[a, b], [c, d]] = self.0;
        [a, b, c, d]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn det(&self) -> f64 {
        let [[a, b], [c, d]] = self.0;
        a * d - b * c
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2::new(a, c, b, d)
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let [[a, b], [c, d]] = self.0;
        Some(Mat2::new(d / det, -b / det, -c / det, a / det))
    }

    pub fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        let [[a, b], [c, d]] = self.0;
        [a * v[0] + b * v[1], c * v[0] + d * v[1]]
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2::new(a * s, b * s, c * s, d * s)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.to_flat().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `2 * max |a_ij|`, the entrywise norm used for all certificate constants.
    pub fn max_norm(&self) -> f64 {
        2.0 * self.max_abs_entry()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        let ata = self.transpose() * *self;
        match ata.eigenvalues() {
            Eigenvalues::Real([l, _]) => l.abs().sqrt(),
            Eigenvalues::Complex { re, .. } => re.abs().sqrt(),
        }
    }

    /// `sigma_max / sigma_min`; infinite for singular matrices.
    pub fn condition_number(&self) -> f64 {
        match self.inverse() {
            Some(inv) => self.spectral_norm() * inv.spectral_norm(),
            None => f64::INFINITY,
        }
    }

    pub fn eigenvalues(&self) -> Eigenvalues {
        let half_tr = 0.5 * self.trace();
        let det = self.det();
        let [[a, b], [c, d]] = self.0;
        // discriminant in a cancellation-free form
        let half_diff = 0.5 * (a - d);
        let disc = half_diff * half_diff + b * c;
        if disc >= 0.0 {
            let root = disc.sqrt();
            let big = if half_tr >= 0.0 { half_tr + root } else { half_tr - root };
            let small = if big != 0.0 { det / big } else { half_tr - root };
            Eigenvalues::Real([big, small])
        } else {
            Eigenvalues::Complex {
                re: half_tr,
                im: (-disc).sqrt(),
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_flat().iter().all(|v| v.is_finite())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, o: Mat2) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        let [[e, f], [g, h]] = o.0;
        Mat2::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, o: Mat2) -> Mat2 {
        let [a, b, c, d] = self.to_flat();
        let [e, f, g, h] = o.to_flat();
        Mat2::new(a + e, b + f, c + g, d + h)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn triangular_eigenvalues() {
        let m = Mat2::new(1.0, 0.3, 0.0, 1e-8);
        match m.eigenvalues() {
            Eigenvalues::Real([a, b]) => {
                assert_eq!(a, 1.0);
                assert!((b - 1e-8).abs() < 1e-22);
            }
            _ => panic!("expected real"),
        }
    }

    #[test]
    fn rotation_is_complex() {
        let m = Mat2::new(0.0, 1.0, -1.0, 0.0);
        assert_eq!(m.eigenvalues(), Eigenvalues::Complex { re: 0.0, im: 1.0 });
        assert_abs_diff_eq!(m.spectral_norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn inverse_and_norms() {
        let m = Mat2::new(2.0, 0.4, 0.0, -0.5);
        assert_eq!(m.det(), -1.0);
        let p = m * m.inverse().unwrap();
        assert!((p - Mat2::IDENTITY).max_abs_entry() < 1e-15);
        assert_eq!(Mat2::IDENTITY.max_norm(), 2.0);
        assert!(Mat2::new(1.0, 1.0, 1.0, 1.0).inverse().is_none());
    }
}
