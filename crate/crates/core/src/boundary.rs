//! Star-shaped interface `r(xi) = 1 + eps * f(xi)` with a truncated Fourier
//! profile `f(xi) = sum_k a_k cos(k xi) + b_k sin(k xi)`, `k` starting at 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Vec2;

const POSITIVITY_SAMPLES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationProfile {
    pub epsilon: f64,
    pub fourier_cos: Vec<f64>,
    pub fourier_sin: Vec<f64>,
}

/// Local frame of the boundary curve at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryGeometry {
    pub point: Vec2,
    /// `d gamma / d xi`, not normalized.
    pub tangent: Vec2,
    pub unit_tangent: Vec2,
    pub outward_normal: Vec2,
    pub curvature: f64,
}

impl PerturbationProfile {
    pub fn circle() -> Self {
        Self { epsilon: 0.0, fourier_cos: Vec::new(), fourier_sin: Vec::new() }
    }

    pub fn new(epsilon: f64, fourier_cos: Vec<f64>, fourier_sin: Vec<f64>) -> Result<Self> {
        let p = Self { epsilon, fourier_cos, fourier_sin };
        p.validate()?;
        Ok(p)
    }

    /// Single harmonic `r = 1 + eps cos(k xi)`.
    pub fn cosine(epsilon: f64, k: usize) -> Result<Self> {
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        Self::new(epsilon, c, Vec::new())
    }

    /// Second-order radial expansion of an ellipse with semi-axes `1` (along
    /// `xi = 0`) and `sqrt(1 - e^2)`: `r = 1 - (e^2/2) sin^2 xi`.
    pub fn ellipse_like(eccentricity: f64) -> Result<Self> {
        Self::new(eccentricity * eccentricity, vec![-0.25, 0.0, 0.25], Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.epsilon.is_finite()
            && self.fourier_cos.iter().chain(&self.fourier_sin).all(|c| c.is_finite());
        if !finite {
            return Err(Error::Domain("profile coefficients must be finite".into()));
        }
        let bound: f64 = self.fourier_cos.iter().chain(&self.fourier_sin).map(|c| c.abs()).sum();
        if 1.0 - self.epsilon.abs() * bound > 0.0 {
            return Ok(());
        }
        let min = (0..POSITIVITY_SAMPLES)
            .map(|i| self.radius(std::f64::consts::TAU * i as f64 / POSITIVITY_SAMPLES as f64))
            .fold(f64::INFINITY, f64::min);
        if min > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain("boundary radius must stay positive".into()))
        }
    }

    pub fn is_circular(&self) -> bool {
        self.epsilon == 0.0 || self.fourier_cos.iter().chain(&self.fourier_sin).all(|c| *c == 0.0)
    }

    /// `(f, f', f'')` at `xi`.
    pub fn profile_derivatives(&self, xi: f64) -> (f64, f64, f64) {
        let (mut f, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for (k, a) in self.fourier_cos.iter().enumerate() {
            let kf = k as f64;
            let (s, c) = (kf * xi).sin_cos();
            f += a * c;
            d1 -= a * kf * s;
            d2 -= a * kf * kf * c;
        }
        for (k, b) in self.fourier_sin.iter().enumerate() {
            let kf = k as f64;
            let (s, c) = (kf * xi).sin_cos();
            f += b * s;
            d1 += b * kf * c;
            d2 -= b * kf * kf * s;
        }
        (f, d1, d2)
    }

    pub fn radius(&self, xi: f64) -> f64 {
        if self.epsilon == 0.0 {
            return 1.0;
        }
        1.0 + self.epsilon * self.profile_derivatives(xi).0
    }

    /// `(r, r', r'')` at `xi`.
    pub fn radius_derivatives(&self, xi: f64) -> (f64, f64, f64) {
        if self.epsilon == 0.0 {
            return (1.0, 0.0, 0.0);
        }
        let (f, d1, d2) = self.profile_derivatives(xi);
        (1.0 + self.epsilon * f, self.epsilon * d1, self.epsilon * d2)
    }

    pub fn point(&self, xi: f64) -> Vec2 {
        let (s, c) = xi.sin_cos();
        self.radius(xi) * Vec2::new(c, s)
    }

    pub fn geometry(&self, xi: f64) -> BoundaryGeometry {
        let (r, r1, r2) = self.radius_derivatives(xi);
        let (s, c) = xi.sin_cos();
        let er = Vec2::new(c, s);
        let et = Vec2::new(-s, c);
        let tangent = r1 * er + r * et;
        let speed = tangent.norm();
        let unit_tangent = tangent / speed;
        let outward_normal = Vec2::new(unit_tangent.y, -unit_tangent.x);
        let curvature = (r * r + 2.0 * r1 * r1 - r * r2) / speed.powi(3);
        BoundaryGeometry { point: r * er, tangent, unit_tangent, outward_normal, curvature }
    }

    /// Signed crossing function: negative inside the domain, zero on the boundary.
    pub fn level(&self, z: Vec2) -> f64 {
        let r2 = z.norm_squared();
        if self.epsilon == 0.0 {
            return r2 - 1.0;
        }
        let rb = self.radius(z.y.atan2(z.x));
        r2 - rb * rb
    }
}
