//! Refraction at the interface. The tangential velocity component is
//! continuous, which in angles reads `sqrt(V_E) sin(alpha) = sqrt(V_I) sin(beta)`.

use crate::boundary::BoundaryGeometry;
use crate::error::{Error, Result};
use crate::params::{PhysParams, Vec2};

/// Relative tolerance under which an exit counts as tangent, hence reflected.
pub const TANGENCY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefractionResult {
    Refracted { angle: f64 },
    TotalReflection { beta: f64 },
}

/// Largest inner angle that still exits at radius `r`.
pub fn critical_angle(r: f64, params: &PhysParams) -> Result<f64> {
    let ratio = params.outer_potential_at(r) / params.inner_potential_at(r)?;
    Ok(ratio.sqrt().asin())
}

/// Outer angle for an inner arc hitting radius `r` at angle `beta`.
pub fn refract_out(beta: f64, r: f64, params: &PhysParams) -> Result<RefractionResult> {
    let s = beta.sin() * (params.inner_potential_at(r)? / params.outer_potential_at(r)).sqrt();
    if s.abs() >= 1.0 - TANGENCY_TOL {
        return Ok(RefractionResult::TotalReflection { beta });
    }
    Ok(RefractionResult::Refracted { angle: s.asin() })
}

/// Inner angle for an outer arc reaching radius `r` at angle `alpha`; always refracts.
pub fn refract_in(alpha: f64, r: f64, params: &PhysParams) -> Result<f64> {
    let s = alpha.sin() * (params.outer_potential_at(r) / params.inner_potential_at(r)?).sqrt();
    Ok(s.asin())
}

/// Velocity just inside after crossing inward at `g` with outer velocity `u`.
pub fn refract_velocity_in(u: Vec2, g: &BoundaryGeometry, params: &PhysParams) -> Result<Vec2> {
    let vt = u.dot(&g.unit_tangent);
    let speed2 = 2.0 * params.inner_potential_at(g.point.norm())?;
    let vn = (speed2 - vt * vt).max(0.0).sqrt();
    Ok(vt * g.unit_tangent - vn * g.outward_normal)
}

/// Velocity just outside after crossing outward at `g` with inner velocity `y`.
pub fn refract_velocity_out(y: Vec2, g: &BoundaryGeometry, params: &PhysParams) -> Result<Vec2> {
    let vt = y.dot(&g.unit_tangent);
    let speed2 = 2.0 * params.outer_potential_at(g.point.norm());
    let vn2 = speed2 - vt * vt;
    if vn2 <= TANGENCY_TOL * speed2 {
        let beta = (vt / y.norm()).clamp(-1.0, 1.0).asin();
        return Err(Error::TotalReflection { beta });
    }
    Ok(vt * g.unit_tangent + vn2.sqrt() * g.outward_normal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::PerturbationProfile;
    use approx::assert_abs_diff_eq;

    fn fig() -> PhysParams {
        PhysParams::new(2.5, 2.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn critical_angle_on_unit_circle() {
        assert_abs_diff_eq!(critical_angle(1.0, &fig()).unwrap(), 0.5880026, epsilon = 1e-7);
        assert!(matches!(refract_out(0.60, 1.0, &fig()).unwrap(), RefractionResult::TotalReflection { .. }));
    }

    #[test]
    fn in_then_out_is_identity() {
        let p = fig();
        for i in -10..=10 {
            let alpha = 0.15 * i as f64;
            let beta = refract_in(alpha, 1.0, &p).unwrap();
            match refract_out(beta, 1.0, &p).unwrap() {
                RefractionResult::Refracted { angle } => assert_abs_diff_eq!(angle, alpha, epsilon = 1e-12),
                _ => panic!("unexpected reflection"),
            }
        }
    }

    #[test]
    fn velocity_form_preserves_tangential_component() {
        let p = fig();
        let b = PerturbationProfile::cosine(0.1, 3).unwrap();
        let g = b.geometry(0.9);
        let u = -1.7 * g.outward_normal + 0.6 * g.unit_tangent;
        let v = refract_velocity_in(u, &g, &p).unwrap();
        assert_abs_diff_eq!(v.dot(&g.unit_tangent), 0.6, epsilon = 1e-14);
        assert_abs_diff_eq!(v.norm_squared(), 2.0 * p.inner_potential_at(g.point.norm()).unwrap(), epsilon = 1e-12);
        let back = refract_velocity_out(-v + 2.0 * v.dot(&g.unit_tangent) * g.unit_tangent, &g, &p).unwrap();
        assert_abs_diff_eq!(back.dot(&g.unit_tangent), 0.6, epsilon = 1e-14);
    }
}
