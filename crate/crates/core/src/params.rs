//! Physical parameters of the refractive billiard and the two potentials.
//!
//! Inside the domain the particle feels a Kepler attraction plus a constant
//! offset, `V_I = E + h + mu/|z|`; outside it feels a repulsive harmonic
//! term, `V_E = E - (om/2)|z|^2`. All motion is at zero total energy, so the
//! speed is always `sqrt(2V)`.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec2 = Vector2<f64>;

/// Which side of the interface a point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Inner,
    Outer,
}

/// The four physical constants `(E, h, mu, om)`.
///
/// Invariants enforced by [`PhysParams::new`]: `E + h > 0`, `mu > 0`,
/// `om > 0`, `E > om`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub energy: f64,
    pub offset_h: f64,
    pub mass_mu: f64,
    pub stiffness: f64,
}

impl PhysParams {
    pub fn new(energy: f64, offset_h: f64, mass_mu: f64, stiffness: f64) -> Result<Self> {
        validate_params(&Self { energy, offset_h, mass_mu, stiffness })
    }

    /// Critical action `I_c = sqrt(E - om/2)`; total reflection for `|I| >= I_c`.
    pub fn action_bound(&self) -> f64 {
        (self.energy - 0.5 * self.stiffness).sqrt()
    }

    /// Outer speed on the unit circle.
    pub fn outer_speed_unit(&self) -> f64 {
        (2.0 * self.energy - self.stiffness).sqrt()
    }

    /// Inner speed on the unit circle.
    pub fn inner_speed_unit(&self) -> f64 {
        (2.0 * (self.energy + self.offset_h + self.mass_mu)).sqrt()
    }

    /// Angular frequency of the outer harmonic motion.
    pub fn omega(&self) -> f64 {
        self.stiffness.sqrt()
    }

    /// Frequency of the regularized inner oscillator, `Omega^2 = 2(E+h)`.
    pub fn lc_frequency(&self) -> f64 {
        (2.0 * (self.energy + self.offset_h)).sqrt()
    }

    pub fn outer_potential_at(&self, r: f64) -> f64 {
        self.energy - 0.5 * self.stiffness * r * r
    }

    pub fn inner_potential_at(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Err(Error::Singularity);
        }
        Ok(self.energy + self.offset_h + self.mass_mu / r)
    }

    pub fn potential(&self, z: Vec2, region: Region) -> Result<f64> {
        let r = z.norm();
        match region {
            Region::Outer => Ok(self.outer_potential_at(r)),
            Region::Inner => self.inner_potential_at(r),
        }
    }
}

pub fn validate_params(p: &PhysParams) -> Result<PhysParams> {
    let finite = [p.energy, p.offset_h, p.mass_mu, p.stiffness]
        .iter()
        .all(|v| v.is_finite());
    if !finite {
        return Err(Error::Domain("parameters must be finite".into()));
    }
    if p.energy + p.offset_h <= 0.0 {
        return Err(Error::Domain("E + h must be positive".into()));
    }
    if p.mass_mu <= 0.0 {
        return Err(Error::Domain("mu must be positive".into()));
    }
    if p.stiffness <= 0.0 {
        return Err(Error::Domain("om must be positive".into()));
    }
    if p.energy <= p.stiffness {
        return Err(Error::Domain("E must exceed om".into()));
    }
    Ok(*p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_each_violated_inequality() {
        assert!(PhysParams::new(2.5, -3.0, 2.0, 1.0).is_err());
        assert!(PhysParams::new(2.5, 2.0, 0.0, 1.0).is_err());
        assert!(PhysParams::new(2.5, 2.0, 2.0, 0.0).is_err());
        assert!(PhysParams::new(1.0, 2.0, 2.0, 1.0).is_err());
        assert!(PhysParams::new(f64::NAN, 2.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn derived_quantities() {
        let p = PhysParams::new(2.5, 2.0, 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(p.action_bound(), 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.outer_speed_unit(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.inner_speed_unit(), 13f64.sqrt(), epsilon = 1e-15);
        let q = PhysParams::new(10.0, 3.0, 44.0, 1.0).unwrap();
        assert_abs_diff_eq!(q.action_bound(), 3.0822070, epsilon = 1e-7);
    }

    #[test]
    fn potentials_on_unit_circle() {
        let p = PhysParams::new(2.5, 2.0, 2.0, 1.0).unwrap();
        let z = Vec2::new(0.6, 0.8);
        assert_abs_diff_eq!(p.potential(z, Region::Outer).unwrap(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.potential(z, Region::Inner).unwrap(), 6.5, epsilon = 1e-14);
        assert_eq!(p.potential(Vec2::zeros(), Region::Inner), Err(Error::Singularity));
    }
}
