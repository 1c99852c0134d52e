//! Harmonic arcs outside the domain.
//!
//! Outside, `z'' = -om z`, so every arc is a centered ellipse traversed with
//! frequency `sqrt(om)`. On the unit circle the polar shift of an arc leaving
//! at angle `alpha` from the outward normal has the closed form [`outer_shift`].

use std::f64::consts::{PI, TAU};

use crate::arc::{cross, ArcKind, ArcSegment};
use crate::boundary::PerturbationProfile;
use crate::error::{Error, Result};
use crate::numerics::{first_crossing, principal, solve_near};
use crate::params::{PhysParams, Vec2};

/// Samples per harmonic period used to locate the first boundary crossing.
pub const OUTER_SAMPLES_PER_PERIOD: f64 = 2048.0;

/// Closed-form flow of `z'' = -om z`.
pub fn outer_propagate(p0: Vec2, v0: Vec2, s: f64, params: &PhysParams) -> (Vec2, Vec2) {
    let w = params.omega();
    let (sn, cs) = (w * s).sin_cos();
    (p0 * cs + v0 * (sn / w), v0 * cs - p0 * (w * sn))
}

/// Polar shift of an outer arc on the unit circle; odd in `alpha`, values in `(-pi, pi)`.
pub fn outer_shift(alpha: f64, params: &PhysParams) -> f64 {
    let om = params.stiffness;
    let c = 2.0 * params.energy - om;
    let (s, co) = (2.0 * alpha).sin_cos();
    // arccot((om + c cos 2a) / (c sin 2a)) for a > 0
    alpha.signum() * (c * s.abs()).atan2(om + c * co) * f64::from(alpha != 0.0)
}

/// `d outer_shift / d alpha`, positive on `(-pi/2, pi/2)`.
pub fn outer_shift_derivative(alpha: f64, params: &PhysParams) -> f64 {
    let om = params.stiffness;
    let c = 2.0 * params.energy - om;
    let c2 = (2.0 * alpha).cos();
    2.0 * c * (c + om * c2) / (c * c + 2.0 * om * c * c2 + om * om)
}

/// Integrates from the boundary point `xi0` with outgoing velocity `v0` to the
/// first return to the boundary.
pub fn outer_arc_from(
    xi0: f64,
    v0: Vec2,
    boundary: &PerturbationProfile,
    params: &PhysParams,
) -> Result<ArcSegment> {
    let p0 = boundary.point(xi0);
    let period = TAU / params.omega();
    let step = period / OUTER_SAMPLES_PER_PERIOD;
    let s_hit = first_crossing(
        |s| boundary.level(outer_propagate(p0, v0, s, params).0),
        step,
        period,
    )?;
    let (z1, v1) = outer_propagate(p0, v0, s_hit, params);
    let l = cross(p0, v0);
    let mut sweep = principal(z1.y.atan2(z1.x) - xi0);
    if l > 0.0 && sweep < 0.0 {
        sweep += TAU;
    } else if l < 0.0 && sweep > 0.0 {
        sweep -= TAU;
    }
    Ok(ArcSegment {
        kind: ArcKind::Outer,
        start: p0,
        start_velocity: v0,
        end: boundary.point(xi0 + sweep),
        end_velocity: v1,
        duration: s_hit,
        sweep,
        winding: 0,
    })
}

/// Outgoing velocity at `xi` making angle `alpha` with the outward normal.
pub fn launch_velocity(xi: f64, alpha: f64, boundary: &PerturbationProfile, params: &PhysParams) -> Vec2 {
    let g = boundary.geometry(xi);
    let speed = (2.0 * params.outer_potential_at(g.point.norm())).sqrt();
    let (s, c) = alpha.sin_cos();
    speed * (c * g.outward_normal + s * g.unit_tangent)
}

/// Inverse of [`outer_shift`] by bisection; `shift` must lie in `(-pi, pi)`.
pub fn outer_shift_inverse(shift: f64, params: &PhysParams) -> f64 {
    let (mut lo, mut hi) = (-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if outer_shift(m, params) < shift {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// Outer arc joining `gamma(xi0)` to `gamma(xi1)` with lifted sweep `xi1 - xi0`.
pub fn outer_arc_fixed_ends(
    xi0: f64,
    xi1: f64,
    boundary: &PerturbationProfile,
    params: &PhysParams,
) -> Result<ArcSegment> {
    let delta = xi1 - xi0;
    if delta.abs() >= PI {
        return Err(Error::AntipodalEndpoints(delta));
    }
    let seed = outer_shift_inverse(delta, params);
    let residual = |alpha: f64| -> f64 {
        match outer_arc_from(xi0, launch_velocity(xi0, alpha, boundary, params), boundary, params) {
            Ok(arc) => arc.sweep - delta,
            Err(_) => f64::NAN,
        }
    };
    let alpha = if boundary.is_circular() {
        seed
    } else {
        let lim = std::f64::consts::FRAC_PI_2 - 1e-9;
        solve_near(
            residual,
            seed,
            1e-4,
            -lim,
            lim,
            1e-15,
        )?
    };
    let arc = outer_arc_from(xi0, launch_velocity(xi0, alpha, boundary, params), boundary, params)?;
    let err = (arc.sweep - delta).abs();
    if err > 1e-9 {
        return Err(Error::ShootingDiverged { residual: err });
    }
    Ok(arc)
}

/// Centered ellipse traced by an outer arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterConic {
    pub a2: f64,
    pub b2: f64,
    /// Polar angle of the major axis on the side of the first apocenter.
    pub tilt: f64,
}

impl OuterConic {
    /// Implicit equation, zero on the ellipse.
    pub fn level(&self, z: Vec2) -> f64 {
        let (s, c) = self.tilt.sin_cos();
        let x = z.x * c + z.y * s;
        let y = z.y * c - z.x * s;
        x * x / self.a2 + y * y / self.b2 - 1.0
    }

    pub fn apocenter_radius(&self) -> f64 {
        self.a2.sqrt()
    }
}

pub fn outer_conic_of(p0: Vec2, v0: Vec2, params: &PhysParams) -> Result<OuterConic> {
    let e = params.energy;
    let om = params.stiffness;
    let r2 = p0.norm_squared();
    let pv = p0.dot(&v0);
    let l = cross(p0, v0);
    if l.abs() <= 1e-14 * (1.0 + r2.sqrt() * v0.norm()) {
        return Err(Error::DegenerateConic);
    }
    let disc = ((e - om * r2).powi(2) + om * pv * pv).sqrt();
    let a2 = (e + disc) / om;
    let b2 = l * l / (om * a2);
    let focal = (a2 - b2).sqrt();
    let sign = if pv >= 0.0 { l.signum() } else { -l.signum() };
    let sin_b = sign * (b2.sqrt() / focal) * (a2 / r2 - 1.0).max(0.0).sqrt();
    let cos_b = (a2.sqrt() / focal) * (1.0 - b2 / r2).max(0.0).sqrt();
    let tilt = p0.y.atan2(p0.x) + sin_b.atan2(cos_b);
    Ok(OuterConic { a2, b2, tilt })
}
