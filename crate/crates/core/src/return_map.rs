//! The boundary return map `F(xi, I) -> (xi', I')`.
//!
//! A state is a boundary point `gamma(xi)` with an outgoing velocity; its
//! action is `I = (v . gamma'(xi)) / sqrt(2)`, which is conjugate to `xi` and
//! equals `sqrt(V_E) sin(alpha)` on the unit circle. One step is an outer arc,
//! an inward refraction, an inner arc and an outward refraction.
//!
//! On the unit circle `I` is conserved and `xi' = xi + f(I) + g(I)`, where `f`
//! and `g` are the outer and inner shifts written in the action.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::arc::ArcSegment;
use crate::boundary::PerturbationProfile;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::inner::inner_arc_from;
use crate::numerics::{brent, sign_change_roots, Poly};
use crate::outer::outer_arc_from;
use crate::params::{PhysParams, Vec2};
use crate::refraction::{refract_velocity_in, refract_velocity_out};

const SQRT2: f64 = std::f64::consts::SQRT_2;
/// Subintervals of `[0, I_c^2]` scanned for critical actions.
pub const CRITICAL_SCAN: usize = 1 << 12;
pub const CRITICAL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryState {
    /// Lifted polar angle of the boundary point.
    pub xi: f64,
    pub action: f64,
}

impl BoundaryState {
    pub fn new(xi: f64, action: f64) -> Self {
        Self { xi, action }
    }

    /// Largest admissible `|I|` at this boundary point.
    pub fn action_limit(xi: f64, boundary: &PerturbationProfile, params: &PhysParams) -> f64 {
        let g = boundary.geometry(xi);
        g.tangent.norm() * params.outer_potential_at(g.point.norm()).sqrt()
    }

    /// Angle between the outgoing velocity and the outward normal.
    pub fn alpha(&self, boundary: &PerturbationProfile, params: &PhysParams) -> Result<f64> {
        let lim = Self::action_limit(self.xi, boundary, params);
        if self.action.abs() >= lim {
            return Err(Error::OutOfActionRange(self.action));
        }
        Ok((self.action / lim).asin())
    }

    /// Outgoing velocity at `gamma(xi)`.
    pub fn velocity(&self, boundary: &PerturbationProfile, params: &PhysParams) -> Result<Vec2> {
        let g = boundary.geometry(self.xi);
        let speed2 = 2.0 * params.outer_potential_at(g.point.norm());
        let vt = SQRT2 * self.action / g.tangent.norm();
        let vn2 = speed2 - vt * vt;
        if vn2 <= 0.0 {
            return Err(Error::OutOfActionRange(self.action));
        }
        Ok(vt * g.unit_tangent + vn2.sqrt() * g.outward_normal)
    }

    pub fn from_velocity(xi: f64, v: Vec2, boundary: &PerturbationProfile) -> Self {
        Self { xi, action: action_of(xi, v, boundary) }
    }
}

/// `(v . gamma'(xi)) / sqrt(2)`.
pub fn action_of(xi: f64, v: Vec2, boundary: &PerturbationProfile) -> f64 {
    v.dot(&boundary.geometry(xi).tangent) / SQRT2
}

/// Outer shift `f(I)` on the unit circle.
pub fn outer_shift_of_action(i: f64, params: &PhysParams) -> f64 {
    let e = params.energy;
    let root = (4.0 * e - 2.0 * (2.0 * i * i + params.stiffness)).max(0.0).sqrt();
    i.signum() * (i.abs() * root).atan2(e - 2.0 * i * i) * f64::from(i != 0.0)
}

/// Inner shift `g(I)` on the unit circle.
pub fn inner_shift_of_action(i: f64, params: &PhysParams) -> f64 {
    let eh = params.energy + params.offset_h;
    let mu = params.mass_mu;
    let half = (2.0 * i.abs() * (eh + mu - i * i).max(0.0).sqrt()).atan2(2.0 * i * i - mu);
    i.signum() * (2.0 * half - TAU) * f64::from(i != 0.0)
}

pub fn outer_shift_derivative_of_action(i: f64, params: &PhysParams) -> f64 {
    let (e, om) = (params.energy, params.stiffness);
    let x = i * i;
    let a = SQRT2 * (2.0 * e * e - (e + 2.0 * x) * om);
    let b = (2.0 * e - om - 2.0 * x).sqrt() * (e * e - 2.0 * om * x);
    a / b
}

pub fn inner_shift_derivative_of_action(i: f64, params: &PhysParams) -> f64 {
    let eh = params.energy + params.offset_h;
    let mu = params.mass_mu;
    let x = i * i;
    let c = 8.0 * eh * x + 4.0 * eh * mu + 4.0 * mu * mu;
    let d = (eh + mu - x).sqrt() * (4.0 * eh * x + mu * mu);
    -c / d
}

/// Shift components at one action on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftProfile {
    pub action: f64,
    pub outer: f64,
    pub inner: f64,
    pub total: f64,
    pub outer_derivative: f64,
    pub inner_derivative: f64,
}

impl ShiftProfile {
    pub fn twist(&self) -> f64 {
        self.outer_derivative + self.inner_derivative
    }
}

pub fn circular_shift(i: f64, params: &PhysParams) -> Result<ShiftProfile> {
    if !(i.abs() < params.action_bound()) {
        return Err(Error::OutOfActionRange(i));
    }
    let outer = outer_shift_of_action(i, params);
    let inner = inner_shift_of_action(i, params);
    Ok(ShiftProfile {
        action: i,
        outer,
        inner,
        total: outer + inner,
        outer_derivative: outer_shift_derivative_of_action(i, params),
        inner_derivative: inner_shift_derivative_of_action(i, params),
    })
}

/// Total shift `f(I) + g(I)`; the caller guarantees `|I| < I_c`.
pub fn total_shift(i: f64, params: &PhysParams) -> f64 {
    outer_shift_of_action(i, params) + inner_shift_of_action(i, params)
}

pub fn twist_at_zero(params: &PhysParams) -> f64 {
    let (e, om, mu) = (params.energy, params.stiffness, params.mass_mu);
    2.0 * (e - 0.5 * om).sqrt() / e - 4.0 * (e + params.offset_h + mu).sqrt() / mu
}

/// Limit of `-g(I)` as `I -> I_c^-`.
pub fn limit_inner_shift(params: &PhysParams) -> f64 {
    let eh = params.energy + params.offset_h;
    let c = 2.0 * params.energy - params.stiffness;
    let mu = params.mass_mu;
    TAU - 2.0 * ((c - mu) / (2.0 * eh * c + mu * mu).sqrt()).acos()
}

/// Degree-five polynomial in `x = I^2` whose roots in `[0, I_c^2)` are the
/// critical actions of the total shift.
pub fn critical_polynomial(params: &PhysParams) -> Poly {
    let (e, om, mu) = (params.energy, params.stiffness, params.mass_mu);
    let eh = e + params.offset_h;
    let a = Poly(vec![SQRT2 * (2.0 * e * e - e * om), -2.0 * SQRT2 * om]);
    let d_lin = Poly(vec![eh + mu, -1.0]);
    let d_quad = Poly(vec![mu * mu, 4.0 * eh]);
    let b_lin = Poly(vec![2.0 * e - om, -2.0]);
    let b_quad = Poly(vec![e * e, -2.0 * om]);
    let c = Poly(vec![4.0 * eh * mu + 4.0 * mu * mu, 8.0 * eh]);
    let lhs = a.mul(&a).mul(&d_lin).mul(&d_quad).mul(&d_quad);
    let rhs = b_lin.mul(&b_quad).mul(&b_quad).mul(&c).mul(&c);
    lhs.sub(&rhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalAction {
    pub action: f64,
    /// Double root: the twist touches zero without changing sign.
    pub tangential: bool,
}

/// Critical actions of the total shift in `(-I_c, I_c)`, ascending.
pub fn twist_critical_set(params: &PhysParams) -> Vec<CriticalAction> {
    let poly = critical_polynomial(params);
    let xmax = params.action_bound().powi(2);
    let eval = |x: f64| poly.eval(x);
    let mut roots: Vec<(f64, bool)> = sign_change_roots(eval, 0.0, xmax, CRITICAL_SCAN, CRITICAL_TOL)
        .into_iter()
        .filter(|x| *x < xmax)
        .map(|x| (x, false))
        .collect();

    let scale = (0..=64)
        .map(|i| poly.eval(xmax * i as f64 / 64.0).abs())
        .fold(0.0, f64::max);
    let h = xmax / CRITICAL_SCAN as f64;
    let vals: Vec<f64> = (0..=CRITICAL_SCAN).map(|i| poly.eval(h * i as f64)).collect();
    for i in 1..CRITICAL_SCAN {
        let (l, m, r) = (vals[i - 1], vals[i], vals[i + 1]);
        let touches = l.signum() == m.signum() && m.signum() == r.signum() && m.abs() <= l.abs() && m.abs() <= r.abs();
        if !touches {
            continue;
        }
        let dp = poly.derivative();
        if let Ok(x) = brent(|x| dp.eval(x), h * (i - 1) as f64, h * (i + 1) as f64, CRITICAL_TOL, 200) {
            if poly.eval(x).abs() <= 1e-12 * scale && !roots.iter().any(|(y, _)| (y - x).abs() < 2.0 * h) {
                roots.push((x, true));
            }
        }
    }

    let mut out = Vec::new();
    for (x, tangential) in roots {
        let i = x.max(0.0).sqrt();
        if i == 0.0 {
            out.push(CriticalAction { action: 0.0, tangential });
        } else {
            out.push(CriticalAction { action: -i, tangential });
            out.push(CriticalAction { action: i, tangential });
        }
    }
    out.sort_by(|a, b| a.action.total_cmp(&b.action));
    out
}

/// Maximal open intervals of `(-I_c, I_c)` on which the total shift is strictly monotone.
pub fn monotone_intervals(params: &PhysParams) -> Vec<(f64, f64)> {
    let ic = params.action_bound();
    let mut cuts = vec![-ic];
    cuts.extend(twist_critical_set(params).iter().filter(|c| !c.tangential).map(|c| c.action));
    cuts.push(ic);
    cuts.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| b > a).collect()
}

/// All actions with `f(I) + g(I) = target`, one bisection per monotone interval.
pub fn actions_with_shift(target: f64, params: &PhysParams) -> Vec<f64> {
    let ic = params.action_bound();
    let mut out = Vec::new();
    for (a, b) in monotone_intervals(params) {
        let shrink = |x: f64| if x.abs() >= ic { x * (1.0 - 1e-14) } else { x };
        let (a, b) = (shrink(a), shrink(b));
        let (fa, fb) = (total_shift(a, params) - target, total_shift(b, params) - target);
        if fa == 0.0 {
            out.push(a);
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        if let Ok(x) = brent(|x| total_shift(x, params) - target, a, b, 1e-16, 300) {
            if !out.iter().any(|y: &f64| (y - x).abs() < 1e-12) {
                out.push(x);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointThresholds {
    pub mu_bar: f64,
    /// Offset threshold evaluated at the given `mu`.
    pub h_bar: f64,
}

pub fn fixed_point_thresholds(params: &PhysParams) -> FixedPointThresholds {
    let (e, om, mu) = (params.energy, params.stiffness, params.mass_mu);
    let mu_bar = (4.0 * e * e + (8.0 * e.powi(3) * (4.0 * e - om)).sqrt()) / (2.0 * e - om);
    let h_bar = (2.0 * e - om) * mu * mu / (8.0 * e * e) - (e + mu);
    FixedPointThresholds { mu_bar, h_bar }
}

/// Sufficient condition for a fixed point off the homothetic line.
pub fn fixed_point_hypotheses_hold(params: &PhysParams) -> bool {
    let t = fixed_point_thresholds(params);
    let (mu, h) = (params.mass_mu, params.offset_h);
    let c = 2.0 * params.energy - params.stiffness;
    (mu > t.mu_bar && h > t.h_bar) || (c < mu && mu <= t.mu_bar && h > 0.0)
}

/// Smallest positive action with zero total shift.
pub fn find_nonhomothetic_fixed_point(params: &PhysParams) -> Result<f64> {
    let ic = params.action_bound();
    let n = CRITICAL_SCAN;
    let grid = |k: usize| ic * k as f64 / n as f64;
    let mut prev = (grid(1), total_shift(grid(1), params));
    for k in 2..n {
        let x = grid(k);
        let v = total_shift(x, params);
        if v.signum() != prev.1.signum() {
            return brent(|x| total_shift(x, params), prev.0, x, 1e-16, 300);
        }
        prev = (x, v);
    }
    let last = ic * (1.0 - 1e-12);
    if total_shift(last, params).signum() != prev.1.signum() {
        return brent(|x| total_shift(x, params), prev.0, last, 1e-16, 300);
    }
    Err(Error::NoFixedPoint)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MapMethod {
    /// Closed form on the unit circle, geometric propagation otherwise.
    #[default]
    Auto,
    ClosedForm,
    Numeric,
}

/// One numerically propagated step with its two arcs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub next: BoundaryState,
    pub xi_mid: f64,
    pub outer: ArcSegment,
    pub inner: ArcSegment,
}

pub fn return_map_closed(state: BoundaryState, params: &PhysParams) -> Result<BoundaryState> {
    if !(state.action.abs() < params.action_bound()) {
        return Err(Error::OutOfActionRange(state.action));
    }
    Ok(BoundaryState::new(state.xi + total_shift(state.action, params), state.action))
}

pub fn return_map_numeric(
    state: BoundaryState,
    boundary: &PerturbationProfile,
    params: &PhysParams,
) -> Result<StepRecord> {
    let v0 = state.velocity(boundary, params)?;
    let outer = outer_arc_from(state.xi, v0, boundary, params)?;
    let xi_mid = state.xi + outer.sweep;
    let g_mid = boundary.geometry(xi_mid);
    let y0 = refract_velocity_in(outer.end_velocity, &g_mid, params)?;
    let inner = inner_arc_from(xi_mid, y0, boundary, params)?;
    let xi1 = xi_mid + inner.sweep;
    let g1 = boundary.geometry(xi1);
    let v1 = refract_velocity_out(inner.end_velocity, &g1, params)?;
    Ok(StepRecord {
        next: BoundaryState::new(xi1, v1.dot(&g1.tangent) / SQRT2),
        xi_mid,
        outer,
        inner,
    })
}

pub fn return_map(
    state: BoundaryState,
    boundary: &PerturbationProfile,
    params: &PhysParams,
    method: MapMethod,
) -> Result<BoundaryState> {
    match method {
        MapMethod::ClosedForm => return_map_closed(state, params),
        MapMethod::Auto if boundary.is_circular() => return_map_closed(state, params),
        _ => return_map_numeric(state, boundary, params).map(|r| r.next),
    }
}

/// Central-difference Jacobian of the map.
pub fn map_jacobian(
    state: BoundaryState,
    boundary: &PerturbationProfile,
    params: &PhysParams,
    method: MapMethod,
    h: f64,
) -> Result<[[f64; 2]; 2]> {
    let f = |xi: f64, i: f64| return_map(BoundaryState::new(xi, i), boundary, params, method);
    let xp = f(state.xi + h, state.action)?;
    let xm = f(state.xi - h, state.action)?;
    let ip = f(state.xi, state.action + h)?;
    let im = f(state.xi, state.action - h)?;
    Ok([
        [(xp.xi - xm.xi) / (2.0 * h), (ip.xi - im.xi) / (2.0 * h)],
        [(xp.action - xm.action) / (2.0 * h), (ip.action - im.action) / (2.0 * h)],
    ])
}

/// `det DT - 1` at each state, `None` where the map or a neighbour is undefined.
pub fn jacobian_grid(
    states: &[BoundaryState],
    boundary: &PerturbationProfile,
    params: &PhysParams,
    method: MapMethod,
    h: f64,
    exec: Execution,
) -> Vec<Option<f64>> {
    exec.map(states, |s| {
        map_jacobian(*s, boundary, params, method, h)
            .ok()
            .map(|j| j[0][0] * j[1][1] - j[0][1] * j[1][0] - 1.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use approx::assert_abs_diff_eq;

    fn fig() -> PhysParams {
        PhysParams::new(2.5, 2.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn shifts_at_unit_action() {
        let s = circular_shift(1.0, &fig()).unwrap();
        assert_abs_diff_eq!(s.outer, 4f64.atan(), epsilon = 1e-12);
        assert_abs_diff_eq!(s.inner, -PI, epsilon = 1e-12);
        assert_abs_diff_eq!(s.total, -1.8157750, epsilon = 1e-7);
    }

    #[test]
    fn inner_shift_limit() {
        let p = fig();
        let ic = p.action_bound();
        assert_abs_diff_eq!(inner_shift_of_action(ic * (1.0 - 1e-13), &p), -limit_inner_shift(&p), epsilon = 1e-6);
        assert_abs_diff_eq!(limit_inner_shift(&p), 3.7850935, epsilon = 1e-6);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = fig();
        let h = 1e-6;
        for k in -13..=13 {
            let i = 0.1 * k as f64 + 0.013;
            let s = circular_shift(i, &p).unwrap();
            let fd_f = (outer_shift_of_action(i + h, &p) - outer_shift_of_action(i - h, &p)) / (2.0 * h);
            let fd_g = (inner_shift_of_action(i + h, &p) - inner_shift_of_action(i - h, &p)) / (2.0 * h);
            assert_abs_diff_eq!(s.outer_derivative, fd_f, epsilon = 1e-6);
            assert_abs_diff_eq!(s.inner_derivative, fd_g, epsilon = 1e-6);
        }
    }

    #[test]
    fn twist_at_zero_values() {
        let p = |mu| PhysParams::new(10.0, 3.0, mu, 1.0).unwrap();
        assert_abs_diff_eq!(twist_at_zero(&p(44.0)), -0.0699068, epsilon = 1e-4);
        assert_abs_diff_eq!(twist_at_zero(&p(55.0)), 0.0167172, epsilon = 1e-4);
        let s = circular_shift(0.0, &fig()).unwrap();
        assert_abs_diff_eq!(s.twist(), twist_at_zero(&fig()), epsilon = 1e-12);
    }

    #[test]
    fn mu_bar_value() {
        let p = PhysParams::new(7.0, 2.0, 15.0, 3.0).unwrap();
        assert_abs_diff_eq!(fixed_point_thresholds(&p).mu_bar, 41.6287, epsilon = 5e-4);
        assert!(fixed_point_hypotheses_hold(&p));
        let i = find_nonhomothetic_fixed_point(&p).unwrap();
        assert!(total_shift(i, &p).abs() < 1e-10);
    }

    #[test]
    fn h_bar_vanishes_at_mu_bar() {
        let p = PhysParams::new(7.0, 2.0, 15.0, 3.0).unwrap();
        let mb = fixed_point_thresholds(&p).mu_bar;
        let q = PhysParams::new(7.0, 2.0, mb, 3.0).unwrap();
        assert_abs_diff_eq!(fixed_point_thresholds(&q).h_bar, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn critical_set_of_reference_case() {
        let c = twist_critical_set(&fig());
        assert_eq!(c.len(), 2);
        assert_abs_diff_eq!(c[1].action, 0.95113, epsilon = 1e-4);
        assert_abs_diff_eq!(c[0].action, -c[1].action);
    }

    #[test]
    fn numeric_step_matches_closed_form_on_circle() {
        let p = fig();
        let b = PerturbationProfile::circle();
        for i in [-1.3, -0.7, -0.01, 0.0, 0.2, 1.0, 1.35] {
            let s = BoundaryState::new(0.4, i);
            let a = return_map_closed(s, &p).unwrap();
            let n = return_map_numeric(s, &b, &p).unwrap().next;
            assert_abs_diff_eq!(a.xi, n.xi, epsilon = 1e-9);
            assert_abs_diff_eq!(a.action, n.action, epsilon = 1e-11);
        }
    }

    #[test]
    fn rejects_actions_beyond_bound() {
        let p = fig();
        assert!(return_map_closed(BoundaryState::new(0.0, 1.5), &p).is_err());
        assert!(circular_shift(-1.5, &p).is_err());
    }

    #[test]
    fn jacobian_grid_strategies_agree() {
        let b = PerturbationProfile::cosine(0.02, 2).unwrap();
        let states: Vec<_> = (0..6).map(|k| BoundaryState::new(k as f64, 0.3 - 0.1 * k as f64)).collect();
        let seq = jacobian_grid(&states, &b, &fig(), MapMethod::Numeric, 1e-5, Execution::Sequential);
        let par = jacobian_grid(&states, &b, &fig(), MapMethod::Numeric, 1e-5, Execution::Parallel);
        assert_eq!(seq, par);
        assert!(seq.iter().all(|d| d.unwrap().abs() < 1e-7));
    }
}
