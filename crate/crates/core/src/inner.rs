//! Keplerian arcs inside the domain, regularized in the Levi-Civita chart.
//!
//! With `z = w^2` and `d tau / ds = 1/(2|z|)` the inner motion at zero energy
//! becomes the linear oscillator `w'' = Omega^2 w`, `Omega^2 = 2(E+h)`, with
//! conserved `|w'|^2/2 - Omega^2 |w|^2/2 = mu`. Arcs are therefore available in
//! closed form, including those passing through the center: an
//! ejection-collision arc leaves and returns along the same ray.
//!
//! Lift convention for the polar shift: an arc with angular momentum `k > 0`
//! sweeps an angle in `(0, 2pi)`; its shift is that angle minus `2pi`, and the
//! mirror image for `k < 0`. In the chart this reads
//! `sweep = 2 * principal(arg w1 - arg w0 - pi)`, which is continuous through
//! collision.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::arc::{cross, ArcKind, ArcSegment};
use crate::boundary::PerturbationProfile;
use crate::error::{Error, Result};
use crate::numerics::{first_crossing, principal, solve_near};
use crate::params::{PhysParams, Vec2};

/// Samples per estimated arc duration used for event location.
pub const INNER_SAMPLES_PER_ARC: f64 = 2048.0;
/// Pericenter radius below which [`inner_samples`] switches to the chart.
pub const LC_SWITCH_RADIUS: f64 = 1e-3;

/// Point of the regularized phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LCState {
    pub w: Complex64,
    pub dw: Complex64,
    pub tau: f64,
}

impl LCState {
    pub fn energy_residual(&self, params: &PhysParams) -> f64 {
        let om2 = 2.0 * (params.energy + params.offset_h);
        0.5 * self.dw.norm_sqr() - 0.5 * om2 * self.w.norm_sqr() - params.mass_mu
    }

    pub fn position(&self) -> Vec2 {
        let z = self.w * self.w;
        Vec2::new(z.re, z.im)
    }
}

fn c64(v: Vec2) -> Complex64 {
    Complex64::new(v.x, v.y)
}

/// `(w, dw/dtau)` for a Cartesian state, principal square-root branch.
pub fn lc_from_cartesian(z: Vec2, v: Vec2) -> (Complex64, Complex64) {
    let w = c64(z).sqrt();
    (w, c64(v) * w.conj())
}

/// Cartesian `(z, dz/ds)`; undefined at collision.
pub fn lc_to_cartesian(w: Complex64, dw: Complex64) -> (Vec2, Vec2) {
    let z = w * w;
    let v = dw / w.conj();
    (Vec2::new(z.re, z.im), Vec2::new(v.re, v.im))
}

pub fn lc_flow(w0: Complex64, dw0: Complex64, tau: f64, big_omega: f64) -> (Complex64, Complex64) {
    let (sh, ch) = ((big_omega * tau).sinh(), (big_omega * tau).cosh());
    (w0 * ch + dw0 * (sh / big_omega), w0 * (big_omega * sh) + dw0 * ch)
}

/// Physical time elapsed after regularized time `tau`, `s = int 2|w|^2 dtau`.
pub fn lc_physical_time(w0: Complex64, dw0: Complex64, tau: f64, big_omega: f64) -> f64 {
    let b = dw0 / big_omega;
    let x = 2.0 * big_omega * tau;
    let (a2, b2, ab) = (w0.norm_sqr(), b.norm_sqr(), (w0.conj() * b).re);
    let sh2 = x.sinh() / (4.0 * big_omega);
    2.0 * (a2 * (0.5 * tau + sh2) + b2 * (-0.5 * tau + sh2) + ab * (x.cosh() - 1.0) / (2.0 * big_omega))
}

/// Flows a Cartesian inner state for regularized time `tau`.
pub fn levi_civita_propagate(z0: Vec2, v0: Vec2, tau: f64, params: &PhysParams) -> Result<LCState> {
    if z0.norm() == 0.0 {
        return Err(Error::Singularity);
    }
    let (w0, dw0) = lc_from_cartesian(z0, v0);
    let start = LCState { w: w0, dw: dw0, tau: 0.0 };
    let res = start.energy_residual(params);
    if res.abs() > 1e-10 * (1.0 + params.mass_mu + dw0.norm_sqr()) {
        return Err(Error::EnergyMismatch(res));
    }
    let (w, dw) = lc_flow(w0, dw0, tau, params.lc_frequency());
    Ok(LCState { w, dw, tau })
}

/// Samples `n + 1` Cartesian points along an inner arc. Arcs with pericenter
/// below [`LC_SWITCH_RADIUS`] are sampled in the chart; the others along the
/// polar form of the conic.
pub fn inner_samples(arc: &ArcSegment, n: usize, params: &PhysParams) -> Vec<Vec2> {
    let conic = inner_conic_of(arc.start, arc.start_velocity, params);
    match conic {
        Ok(c) if c.pericenter_radius() >= LC_SWITCH_RADIUS => {
            let f0 = principal(arc.start.y.atan2(arc.start.x) - c.pericenter_angle);
            let k = arc.angular_momentum();
            let total = arc.sweep + TAU * k.signum();
            (0..=n)
                .map(|i| {
                    let f = f0 + total * i as f64 / n as f64;
                    let r = c.p / (1.0 + c.e * f.cos());
                    let th = c.pericenter_angle + f;
                    Vec2::new(r * th.cos(), r * th.sin())
                })
                .collect()
        }
        _ => arc.sample(n, params),
    }
}

/// Polar shift of an inner arc on the unit circle entering at angle `beta0`
/// from the inward normal.
pub fn inner_shift(beta0: f64, params: &PhysParams) -> f64 {
    let eh = params.energy + params.offset_h;
    let mu = params.mass_mu;
    let (sb, cb) = beta0.sin_cos();
    // acos(q) written as atan2 with 1 - q^2 = 4(eh+mu)^2 sin^2 cos^2 / D^2
    let half = (2.0 * (eh + mu) * (sb * cb).abs()).atan2(2.0 * (eh + mu) * sb * sb - mu);
    beta0.signum() * (2.0 * half - TAU) * f64::from(beta0 != 0.0)
}

/// Inward velocity at `xi` making angle `beta` with the inward normal.
pub fn inward_velocity(xi: f64, beta: f64, boundary: &PerturbationProfile, params: &PhysParams) -> Result<Vec2> {
    let g = boundary.geometry(xi);
    let speed = (2.0 * params.inner_potential_at(g.point.norm())?).sqrt();
    let (s, c) = beta.sin_cos();
    Ok(speed * (s * g.unit_tangent - c * g.outward_normal))
}

fn lc_duration_scale(w0: Complex64, dw0: Complex64, big_omega: f64) -> f64 {
    let a = w0.norm();
    let b = dw0.norm() / big_omega;
    let t = (2.0 * a * b / (a * a + b * b)).min(1.0 - 1e-15);
    t.atanh() / big_omega
}

/// Expected winding of the inner arc with lifted sweep `delta`.
pub fn expected_winding(delta: f64) -> i32 {
    if delta == 0.0 || delta.abs() >= PI {
        0
    } else {
        -(delta.signum() as i32)
    }
}

/// Flows from the boundary point `xi0` with inward velocity `v0` to the first
/// return to the boundary.
pub fn inner_arc_from(
    xi0: f64,
    v0: Vec2,
    boundary: &PerturbationProfile,
    params: &PhysParams,
) -> Result<ArcSegment> {
    let p0 = boundary.point(xi0);
    let big_omega = params.lc_frequency();
    let (w0, dw0) = lc_from_cartesian(p0, v0);
    let scale = lc_duration_scale(w0, dw0, big_omega);
    let step = scale / INNER_SAMPLES_PER_ARC;
    let horizon = 3.0 * scale + 1.0 / big_omega;
    let level = |tau: f64| {
        let (w, _) = lc_flow(w0, dw0, tau, big_omega);
        let z = w * w;
        -boundary.level(Vec2::new(z.re, z.im))
    };
    let tau_hit = first_crossing(level, step, horizon)?;
    let (w1, dw1) = lc_flow(w0, dw0, tau_hit, big_omega);
    let dtheta = w1.arg() - w0.arg();
    let sweep = 2.0 * principal(dtheta - PI);
    let k = cross(p0, v0);
    let collision = k.abs() <= 1e-13 * p0.norm() * v0.norm();
    let (_, v1) = lc_to_cartesian(w1, dw1);
    let actual = 2.0 * principal(dtheta);
    let winding = if collision {
        0
    } else {
        ((actual - principal(actual)) / TAU).round() as i32
    };
    Ok(ArcSegment {
        kind: if collision { ArcKind::EjectionCollision } else { ArcKind::Inner },
        start: p0,
        start_velocity: v0,
        end: boundary.point(xi0 + sweep),
        end_velocity: v1,
        duration: tau_hit,
        sweep,
        winding,
    })
}

/// Eccentricity of the unit-circle inner arc with lifted sweep `delta`,
/// `e = (-x0 + sqrt(x0^2 + 4a(1+a))) / (2a)` with `x0 = cos(delta/2)` and
/// `a = mu / (2(E+h))`.
pub fn fixed_end_eccentricity(delta: f64, params: &PhysParams) -> f64 {
    let a = params.mass_mu / (2.0 * (params.energy + params.offset_h));
    let x0 = (0.5 * delta).cos();
    (-x0 + (x0 * x0 + 4.0 * a * (1.0 + a)).sqrt()) / (2.0 * a)
}

/// Angular momentum of the unit-circle inner arc with lifted sweep `delta`.
pub fn fixed_end_angular_momentum(delta: f64, params: &PhysParams) -> f64 {
    let a = params.mass_mu / (2.0 * (params.energy + params.offset_h));
    let e = fixed_end_eccentricity(delta, params);
    -delta.signum() * (params.mass_mu * a * (e * e - 1.0)).max(0.0).sqrt()
}

/// Inner arc from `gamma(xi0)` to `gamma(xi1)` whose lifted sweep is exactly
/// `xi1 - xi0`. For `|xi1 - xi0| < pi` this is the arc of winding `-sign(xi1 - xi0)`;
/// `xi1 == xi0` gives the ejection-collision arc.
pub fn inner_arc_fixed_ends(
    xi0: f64,
    xi1: f64,
    boundary: &PerturbationProfile,
    params: &PhysParams,
) -> Result<ArcSegment> {
    let delta = xi1 - xi0;
    if delta.abs() >= TAU {
        return Err(Error::SweepOutOfRange(delta));
    }
    let g = boundary.geometry(xi0);
    let speed = (2.0 * params.inner_potential_at(g.point.norm())?).sqrt();
    let velocity = |kt: f64| -> Vec2 {
        let vt = kt.clamp(-speed, speed);
        vt * g.unit_tangent - (speed * speed - vt * vt).max(0.0).sqrt() * g.outward_normal
    };
    let k0 = fixed_end_angular_momentum(delta, params);
    let vt = if boundary.is_circular() || delta == 0.0 && is_symmetric_ray(xi0, boundary) {
        k0
    } else {
        let lim = speed * (1.0 - 1e-12);
        solve_near(
            |vt| match inner_arc_from(xi0, velocity(vt), boundary, params) {
                Ok(arc) => arc.sweep - delta,
                Err(_) => f64::NAN,
            },
            k0,
            1e-4 * speed,
            -lim,
            lim,
            1e-15,
        )?
    };
    let arc = inner_arc_from(xi0, velocity(vt), boundary, params)?;
    let err = (arc.sweep - delta).abs();
    if err > 1e-9 {
        return Err(Error::ShootingDiverged { residual: err });
    }
    if arc.kind == ArcKind::Inner && arc.winding != expected_winding(delta) {
        return Err(Error::WindingChanged { expected: expected_winding(delta), found: arc.winding });
    }
    Ok(arc)
}

fn is_symmetric_ray(xi: f64, boundary: &PerturbationProfile) -> bool {
    boundary.radius_derivatives(xi).1 == 0.0
}

/// Cosine of the angle between the endpoint and the velocity of the
/// fixed-end arc, as a function of `x0 = cos(delta/2)` on `[0, 1]`.
pub fn transversality_bound(x0: f64, params: &PhysParams) -> f64 {
    let a = params.mass_mu / (2.0 * (params.energy + params.offset_h));
    let root = (4.0 * a * a + 4.0 * a + x0 * x0).sqrt();
    let e0 = (-x0 + root) / (2.0 * a);
    e0 * ((2.0 * a + x0 * (x0 + root)) / (2.0 + 4.0 * a)).sqrt()
}

/// Keplerian conic of an inner arc, focus at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerConic {
    /// Semi-latus rectum `k^2 / mu`.
    pub p: f64,
    pub e: f64,
    pub pericenter_angle: f64,
}

impl InnerConic {
    pub fn pericenter_radius(&self) -> f64 {
        self.p / (1.0 + self.e)
    }

    /// `(e^2-1)X^2 - Y^2 - 2peX + p^2` in the pericenter frame; the relevant
    /// branch is `X <= p/(1+e)`.
    pub fn level(&self, z: Vec2) -> f64 {
        let (s, c) = self.pericenter_angle.sin_cos();
        let x = z.x * c + z.y * s;
        let y = z.y * c - z.x * s;
        (self.e * self.e - 1.0) * x * x - y * y - 2.0 * self.p * self.e * x + self.p * self.p
    }
}

pub fn inner_conic_of(p0: Vec2, v0: Vec2, params: &PhysParams) -> Result<InnerConic> {
    let k = cross(p0, v0);
    let mu = params.mass_mu;
    let r0 = p0.norm();
    if k.abs() <= 1e-14 * (1.0 + r0 * v0.norm()) {
        return Err(Error::DegenerateConic);
    }
    let p = k * k / mu;
    let e = (1.0 + 2.0 * (params.energy + params.offset_h) * k * k / (mu * mu)).sqrt();
    let inward = p0.dot(&v0) < 0.0;
    let sign = if inward { k.signum() } else { -k.signum() };
    let delta = sign * ((p - r0) / (e * r0)).clamp(-1.0, 1.0).acos();
    Ok(InnerConic { p, e, pericenter_angle: p0.y.atan2(p0.x) + delta })
}
