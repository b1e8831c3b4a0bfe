use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Tolerance allowed between the computed operator norm and the declared constant.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// An affine map `x -> A x + t` on `R^d` with a declared Lipschitz constant.
///
/// One-dimensional maps keep their coefficient in `linear[0][0]`; the second row
/// and column are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineContraction {
    dim: u8,
    linear: [[f64; 2]; 2],
    translation: [f64; 2],
    lambda: f64,
}

impl AffineContraction {
    pub fn new(
        dim: u8,
        linear: [[f64; 2]; 2],
        translation: [f64; 2],
        lambda: f64,
    ) -> Result<Self, GeometryError> {
        if dim != 1 && dim != 2 {
            return Err(GeometryError::InvalidDimension(dim));
        }
        let (linear, translation) = if dim == 1 {
            ([[linear[0][0], 0.0], [0.0, 0.0]], [translation[0], 0.0])
        } else {
            (linear, translation)
        };
        let finite = linear.iter().flatten().chain(translation.iter()).all(|v| v.is_finite());
        if !finite || !(0.0..1.0).contains(&lambda) {
            return Err(GeometryError::NotContraction { norm: f64::NAN, lambda });
        }
        let norm = operator_norm(&linear);
        if norm > lambda + NORM_TOLERANCE {
            return Err(GeometryError::NotContraction { norm, lambda });
        }
        Ok(Self { dim, linear, translation, lambda })
    }

    /// Builds a map whose declared constant is its operator norm.
    pub fn with_norm(
        dim: u8,
        linear: [[f64; 2]; 2],
        translation: [f64; 2],
    ) -> Result<Self, GeometryError> {
        let norm = operator_norm(&linear);
        Self::new(dim, linear, translation, norm)
    }

    /// `x -> s x + t` in one dimension.
    pub fn line(scale: f64, shift: f64) -> Result<Self, GeometryError> {
        Self::with_norm(1, [[scale, 0.0], [0.0, 0.0]], [shift, 0.0])
    }

    /// `x -> s x + t` in the plane.
    pub fn similarity(scale: f64, shift: [f64; 2]) -> Result<Self, GeometryError> {
        Self::with_norm(2, [[scale, 0.0], [0.0, scale]], shift)
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn linear(&self) -> [[f64; 2]; 2] {
        self.linear
    }

    pub fn translation(&self) -> [f64; 2] {
        self.translation
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn operator_norm(&self) -> f64 {
        operator_norm(&self.linear)
    }

    pub fn is_diagonal(&self) -> bool {
        self.linear[0][1] == 0.0 && self.linear[1][0] == 0.0
    }

    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        let a = &self.linear;
        [
            a[0][0] * p[0] + a[0][1] * p[1] + self.translation[0],
            a[1][0] * p[0] + a[1][1] * p[1] + self.translation[1],
        ]
    }

    /// Same linear part, translation shifted by `v`.
    pub fn translated(&self, v: [f64; 2]) -> Self {
        let mut out = self.clone();
        out.translation[0] += v[0];
        if self.dim == 2 {
            out.translation[1] += v[1];
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self, GeometryError> {
        let a = &self.linear;
        let b = &other.linear;
        let mut m = [[0.0; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        let t = self.apply(other.translation);
        let lambda = (self.lambda * other.lambda).max(operator_norm(&m));
        Self::new(self.dim.max(other.dim), m, t, lambda)
    }

    /// Image of the closed box `[lo, hi]` as a convex polygon (the corners' images).
    pub fn box_image(&self, lo: [f64; 2], hi: [f64; 2]) -> [[f64; 2]; 4] {
        [
            self.apply([lo[0], lo[1]]),
            self.apply([hi[0], lo[1]]),
            self.apply([hi[0], hi[1]]),
            self.apply([lo[0], hi[1]]),
        ]
    }
}

/// Spectral norm of a 2x2 matrix.
pub fn operator_norm(a: &[[f64; 2]; 2]) -> f64 {
    let p = a[0][0] * a[0][0] + a[1][0] * a[1][0];
    let q = a[0][0] * a[0][1] + a[1][0] * a[1][1];
    let r = a[0][1] * a[0][1] + a[1][1] * a[1][1];
    let mean = 0.5 * (p + r);
    let disc = (0.25 * (p - r) * (p - r) + q * q).sqrt();
    (mean + disc).max(0.0).sqrt()
}
