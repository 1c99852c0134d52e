//! Caustics: envelopes of the conics traced along an invariant curve.
//!
//! On the unit circle an orbit of action `I0` keeps touching two circles,
//! the locus of outer apocenters and the locus of inner pericenters. On a
//! perturbed domain the conics `G(z; zeta) = 0` carried by the states
//! `(zeta, I(zeta))` of an invariant curve have an envelope, found from
//! `G = 0`, `d G / d zeta = 0` by Newton continuation in `zeta`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::arc::{ArcKind, ArcSegment};
use crate::boundary::PerturbationProfile;
use crate::error::{Error, Result};
use crate::inner::{inner_conic_of, lc_flow, lc_from_cartesian, InnerConic};
use crate::orbit::{OrbitTrace, TrigSeries};
use crate::outer::{outer_arc_from, outer_conic_of, outer_propagate, OuterConic};
use crate::params::{PhysParams, Vec2};
use crate::refraction::refract_velocity_in;
use crate::return_map::BoundaryState;

/// Envelope samples over `[0, 2pi]`, endpoints included.
pub const CAUSTIC_SAMPLES: usize = 512;
/// Newton iterations above which a midpoint sample is inserted.
pub const REFINE_ITERATIONS: usize = 5;
pub const NEWTON_TOL: f64 = 1e-12;
/// Step of the five-point differences in `zeta`.
pub const ZETA_STEP: f64 = 1e-3;
/// Smallest accepted `|grad G x grad dG|`.
/// Harmonics of a fitted curve below this count as zero on the circle.
pub const FLAT_TOL: f64 = 1e-9;
pub const NONDEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausticKind {
    Inner,
    Outer,
}

/// `(R_E, R_I)` for an orbit of action `i0` on the unit circle.
pub fn circular_caustic_radii(i0: f64, params: &PhysParams) -> Result<(f64, f64)> {
    if !(i0 != 0.0 && i0.abs() < params.action_bound()) {
        return Err(Error::OutOfActionRange(i0));
    }
    let (e, om, mu) = (params.energy, params.stiffness, params.mass_mu);
    let r_e = ((e + (e * e - 2.0 * i0 * i0 * om).sqrt()) / om).sqrt();
    let p = 2.0 * i0 * i0 / mu;
    let ecc = (1.0 + 4.0 * i0 * i0 * (params.energy + params.offset_h) / (mu * mu)).sqrt();
    Ok((r_e, p / (1.0 + ecc)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CausticSample {
    pub zeta: f64,
    pub x: f64,
    pub y: f64,
    pub newton_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausticCurve {
    pub kind: CausticKind,
    /// Ordered by `zeta`; the first and last samples are `zeta = 0` and `2pi`.
    pub samples: Vec<CausticSample>,
    pub circular_radius: Option<f64>,
    /// Largest `max(|G|, |dG/dzeta|)` over the samples.
    pub max_envelope_residual: f64,
}

impl CausticCurve {
    /// Radius of the caustic in the direction `theta`, by linear
    /// interpolation in polar angle.
    pub fn radius_at(&self, theta: f64) -> f64 {
        if let Some(r) = self.circular_radius {
            return r;
        }
        let mut pts: Vec<(f64, f64)> =
            self.samples.iter().map(|s| (s.y.atan2(s.x).rem_euclid(TAU), s.x.hypot(s.y))).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let t = theta.rem_euclid(TAU);
        let n = pts.len();
        let k = pts.partition_point(|p| p.0 < t);
        let (a, b) = (pts[(k + n - 1) % n], pts[k % n]);
        let a0 = if k == 0 { a.0 - TAU } else { a.0 };
        let b0 = if k == n { b.0 + TAU } else { b.0 };
        if b0 <= a0 {
            return a.1;
        }
        a.1 + (b.1 - a.1) * (t - a0) / (b0 - a0)
    }
}

/// Conic carried by one state of the invariant curve.
#[derive(Debug, Clone, Copy)]
enum Conic {
    Outer(OuterConic),
    Inner(InnerConic),
}

impl Conic {
    fn level(&self, z: Vec2) -> f64 {
        match self {
            Conic::Outer(c) => c.level(z),
            Conic::Inner(c) => c.level(z),
        }
    }

    fn gradient(&self, z: Vec2) -> Vec2 {
        match self {
            Conic::Outer(c) => {
                let (s, co) = c.tilt.sin_cos();
                let x = z.x * co + z.y * s;
                let y = z.y * co - z.x * s;
                2.0 * x / c.a2 * Vec2::new(co, s) + 2.0 * y / c.b2 * Vec2::new(-s, co)
            }
            Conic::Inner(c) => {
                let (s, co) = c.pericenter_angle.sin_cos();
                let x = z.x * co + z.y * s;
                let y = z.y * co - z.x * s;
                (2.0 * (c.e * c.e - 1.0) * x - 2.0 * c.p * c.e) * Vec2::new(co, s) - 2.0 * y * Vec2::new(-s, co)
            }
        }
    }

    fn vertex(&self) -> Vec2 {
        match self {
            Conic::Outer(c) => c.apocenter_radius() * Vec2::new(c.tilt.cos(), c.tilt.sin()),
            Conic::Inner(c) => c.pericenter_radius() * Vec2::new(c.pericenter_angle.cos(), c.pericenter_angle.sin()),
        }
    }
}

fn conic_at(
    zeta: f64,
    curve: &TrigSeries,
    kind: CausticKind,
    boundary: &PerturbationProfile,
    params: &PhysParams,
) -> Result<Conic> {
    let state = BoundaryState::new(zeta, curve.eval(zeta.rem_euclid(TAU)));
    let v0 = state.velocity(boundary, params)?;
    let p0 = boundary.point(zeta);
    match kind {
        CausticKind::Outer => Ok(Conic::Outer(outer_conic_of(p0, v0, params)?)),
        CausticKind::Inner => {
            let outer = outer_arc_from(zeta, v0, boundary, params)?;
            let xi_mid = zeta + outer.sweep;
            let y0 = refract_velocity_in(outer.end_velocity, &boundary.geometry(xi_mid), params)?;
            Ok(Conic::Inner(inner_conic_of(boundary.point(xi_mid), y0, params)?))
        }
    }
}

/// `G(.; zeta)` with the neighbours of a five-point difference.
struct Stencil {
    mid: Conic,
    /// Conics at `zeta + k h` for `k = -2, -1, 1, 2`.
    side: [Conic; 4],
}

const WEIGHTS: [f64; 4] = [1.0, -8.0, 8.0, -1.0];

impl Stencil {
    fn new(zeta: f64, curve: &TrigSeries, kind: CausticKind, b: &PerturbationProfile, p: &PhysParams) -> Result<Self> {
        let at = |k: f64| conic_at(zeta + k * ZETA_STEP, curve, kind, b, p);
        Ok(Self { mid: at(0.0)?, side: [at(-2.0)?, at(-1.0)?, at(1.0)?, at(2.0)?] })
    }

    fn system(&self, z: Vec2) -> Vec2 {
        let d: f64 = self.side.iter().zip(WEIGHTS).map(|(c, w)| w * c.level(z)).sum();
        Vec2::new(self.mid.level(z), d / (12.0 * ZETA_STEP))
    }

    /// Rows `grad G` and `grad dG/dzeta`.
    fn jacobian(&self, z: Vec2) -> [Vec2; 2] {
        let d: Vec2 = self.side.iter().zip(WEIGHTS).map(|(c, w)| w * c.gradient(z)).sum();
        [self.mid.gradient(z), d / (12.0 * ZETA_STEP)]
    }
}

fn newton(stencil: &Stencil, seed: Vec2, zeta: f64) -> Result<(Vec2, usize, f64)> {
    let mut z = seed;
    for it in 1..=50 {
        let f = stencil.system(z);
        let [g0, g1] = stencil.jacobian(z);
        let det = g0.x * g1.y - g0.y * g1.x;
        if det.abs() <= NONDEGENERACY_TOL {
            return Err(Error::DegenerateEnvelope { zeta });
        }
        let dz = Vec2::new(g1.y * f.x - g0.y * f.y, -g1.x * f.x + g0.x * f.y) / det;
        z -= dz;
        if !z.x.is_finite() || !z.y.is_finite() {
            break;
        }
        if dz.norm() <= NEWTON_TOL * (1.0 + z.norm()) {
            let r = stencil.system(z);
            return Ok((z, it, r.x.abs().max(r.y.abs())));
        }
    }
    Err(Error::NewtonDiverged { zeta })
}

/// Envelope of the `kind` conics carried by the invariant curve `I(zeta)`.
pub fn perturbed_caustic(
    curve: &TrigSeries,
    kind: CausticKind,
    boundary: &PerturbationProfile,
    params: &PhysParams,
) -> Result<CausticCurve> {
    if boundary.is_circular() && curve.cos.iter().chain(&curve.sin).all(|c| c.abs() <= FLAT_TOL) {
        let (r_e, r_i) = circular_caustic_radii(curve.a0, params)?;
        let r = if kind == CausticKind::Outer { r_e } else { r_i };
        let samples = (0..=CAUSTIC_SAMPLES)
            .map(|k| {
                let zeta = TAU * k as f64 / CAUSTIC_SAMPLES as f64;
                let v = conic_at(zeta, curve, kind, boundary, params)?.vertex();
                Ok(CausticSample { zeta, x: r * v.x / v.norm(), y: r * v.y / v.norm(), newton_iterations: 0 })
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(CausticCurve { kind, samples, circular_radius: Some(r), max_envelope_residual: 0.0 });
    }
    let mut samples = Vec::with_capacity(CAUSTIC_SAMPLES + 1);
    let mut max_res: f64 = 0.0;
    let first = Stencil::new(0.0, curve, kind, boundary, params)?;
    let mut seed = first.mid.vertex();
    let mut prev_zeta = 0.0;
    for k in 0..=CAUSTIC_SAMPLES {
        let zeta = TAU * k as f64 / CAUSTIC_SAMPLES as f64;
        let stencil = Stencil::new(zeta, curve, kind, boundary, params)?;
        let (z, its, res) = newton(&stencil, seed, zeta)?;
        if its > REFINE_ITERATIONS && k > 0 {
            let mid = 0.5 * (prev_zeta + zeta);
            let s = Stencil::new(mid, curve, kind, boundary, params)?;
            let (zm, im, rm) = newton(&s, 0.5 * (seed + z), mid)?;
            max_res = max_res.max(rm);
            samples.push(CausticSample { zeta: mid, x: zm.x, y: zm.y, newton_iterations: im });
        }
        max_res = max_res.max(res);
        samples.push(CausticSample { zeta, x: z.x, y: z.y, newton_iterations: its });
        seed = z;
        prev_zeta = zeta;
    }
    Ok(CausticCurve { kind, samples, circular_radius: None, max_envelope_residual: max_res })
}

/// Largest distance between an arc's extremal radius and the caustic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangencyReport {
    /// Over outer arcs, `|max |z| - R_E(theta_apo)|`.
    pub outer: f64,
    /// Over inner arcs, `|min |z| - R_I(theta_peri)|`.
    pub inner: f64,
    /// Ejection-collision arcs have no caustic and are skipped.
    pub skipped: usize,
}

impl TangencyReport {
    pub fn max(&self) -> f64 {
        self.outer.max(self.inner)
    }
}

/// Extremum of `|z|^2` along an arc: coarse scan then golden section.
pub fn arc_extremal_point(arc: &ArcSegment, params: &PhysParams, maximize: bool) -> Vec2 {
    let r2 = |t: f64| -> (f64, Vec2) {
        let z = match arc.kind {
            ArcKind::Outer => outer_propagate(arc.start, arc.start_velocity, t, params).0,
            _ => {
                let (w0, dw0) = lc_from_cartesian(arc.start, arc.start_velocity);
                let w = lc_flow(w0, dw0, t, params.lc_frequency()).0;
                let z = w * w;
                Vec2::new(z.re, z.im)
            }
        };
        (if maximize { -z.norm_squared() } else { z.norm_squared() }, z)
    };
    let n = 64;
    let h = arc.duration / n as f64;
    let best = (0..=n).min_by(|a, b| r2(h * *a as f64).0.total_cmp(&r2(h * *b as f64).0)).unwrap_or(0);
    let (mut a, mut b) = ((best as f64 - 1.0).max(0.0) * h, ((best + 1) as f64).min(n as f64) * h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        if b - a <= 1e-15 * (1.0 + b.abs()) {
            break;
        }
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if r2(c).0 < r2(d).0 {
            b = d;
        } else {
            a = c;
        }
    }
    r2(0.5 * (a + b)).1
}

/// Compares every recorded arc of `trace` with the matching caustic.
pub fn tangency_check(trace: &OrbitTrace, outer: &CausticCurve, inner: &CausticCurve, params: &PhysParams) -> TangencyReport {
    let mut rep = TangencyReport { outer: 0.0, inner: 0.0, skipped: 0 };
    for arc in &trace.arcs {
        match arc.kind {
            ArcKind::Outer => {
                let z = arc_extremal_point(arc, params, true);
                rep.outer = rep.outer.max((z.norm() - outer.radius_at(z.y.atan2(z.x))).abs());
            }
            ArcKind::Inner => {
                let z = arc_extremal_point(arc, params, false);
                rep.inner = rep.inner.max((z.norm() - inner.radius_at(z.y.atan2(z.x))).abs());
            }
            ArcKind::EjectionCollision => rep.skipped += 1,
        }
    }
    rep
}
