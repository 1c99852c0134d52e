//! Jacobi lengths, the generating function and the discrete action.
//!
//! Both free motions are geodesics of a Jacobi metric `sqrt(V) |dz|`, so the
//! length of an arc is `sqrt(2) int V ds` in physical time. A map step from
//! `gamma(xi0)` to `gamma(xi1)` breaks through an intermediate point
//! `gamma(xi_mid)` where the two lengths are stationary, which is Snell's
//! law; the sum of lengths is the generating function `S(xi0, xi1)` with
//! `dS/dxi0 = -I0` and `dS/dxi1 = I1`.

use std::f64::consts::{PI, SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use crate::arc::{ArcKind, ArcSegment};
use crate::boundary::PerturbationProfile;
use crate::error::{Error, Result};
use crate::inner::{inner_arc_fixed_ends, lc_flow, lc_from_cartesian};
use crate::numerics::{integrate, solve_near};
use crate::outer::{outer_arc_fixed_ends, outer_propagate};
use crate::params::PhysParams;
use crate::return_map::{action_of, actions_with_shift, outer_shift_of_action, return_map_numeric, BoundaryState};

/// Absolute tolerance of every length quadrature.
pub const LENGTH_TOL: f64 = 1e-11;
/// Step of the finite differences behind the nondegeneracy quantities.
pub const FD_STEP: f64 = 1e-5;

/// `sqrt(2) int V ds` along the arc.
pub fn jacobi_length(arc: &ArcSegment, params: &PhysParams) -> Result<f64> {
    match arc.kind {
        ArcKind::Outer => {
            let f = |s: f64| {
                let z = outer_propagate(arc.start, arc.start_velocity, s, params).0;
                params.outer_potential_at(z.norm())
            };
            Ok(SQRT_2 * integrate(f, 0.0, arc.duration, LENGTH_TOL)?)
        }
        ArcKind::Inner | ArcKind::EjectionCollision => {
            // V ds = (Omega^2 |w|^2 + 2 mu) dtau, regular through collision.
            let (w0, dw0) = lc_from_cartesian(arc.start, arc.start_velocity);
            let big = params.lc_frequency();
            let f = |tau: f64| big * big * lc_flow(w0, dw0, tau, big).0.norm_sqr() + 2.0 * params.mass_mu;
            Ok(SQRT_2 * integrate(f, 0.0, arc.duration, LENGTH_TOL)?)
        }
    }
}

/// Maupertuis functional `1/2 int |dz/dt|^2 V dt` with `t` the geodesic time
/// in which the arc takes unit time. Uses the propagated velocity, so
/// `L^2 = 2 M` holds only along a true solution.
pub fn maupertuis(arc: &ArcSegment, params: &PhysParams) -> Result<f64> {
    let l = jacobi_length(arc, params)?;
    // dt/ds = sqrt(2) V / L, so |dz/dt|^2 V dt = |z'|^2 L / (sqrt(2)) ds.
    let speed2_integral = match arc.kind {
        ArcKind::Outer => integrate(
            |s| outer_propagate(arc.start, arc.start_velocity, s, params).1.norm_squared(),
            0.0,
            arc.duration,
            LENGTH_TOL,
        )?,
        ArcKind::Inner | ArcKind::EjectionCollision => {
            // |z'|^2 ds = |w'|^2/|w|^2 * 2|w|^2 dtau.
            let (w0, dw0) = lc_from_cartesian(arc.start, arc.start_velocity);
            let big = params.lc_frequency();
            2.0 * integrate(|tau| lc_flow(w0, dw0, tau, big).1.norm_sqr(), 0.0, arc.duration, LENGTH_TOL)?
        }
    };
    Ok(0.5 * l * speed2_integral / SQRT_2)
}

/// One evaluation of the generating function with its broken geodesic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratingEval {
    pub value: f64,
    pub xi0: f64,
    pub xi_mid: f64,
    pub xi1: f64,
    /// Action leaving `gamma(xi0)`.
    pub action_start: f64,
    /// Action arriving at `gamma(xi1)`.
    pub action_end: f64,
    /// `d/dxi_mid` of the stationarity residual; nonzero means the
    /// intermediate point is a nondegenerate critical point.
    pub nondeg_s: f64,
    /// `d2 S/dxi0 dxi1`; nonzero is the twist condition of the step.
    pub nondeg_twist: f64,
    pub outer: ArcSegment,
    pub inner: ArcSegment,
}

/// Serializable summary of [`GeneratingEval`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratingSummary {
    pub value: f64,
    pub xi_mid: f64,
    pub action_start: f64,
    pub action_end: f64,
    pub nondeg_s: f64,
    pub nondeg_twist: f64,
}

impl From<&GeneratingEval> for GeneratingSummary {
    fn from(g: &GeneratingEval) -> Self {
        Self {
            value: g.value,
            xi_mid: g.xi_mid,
            action_start: g.action_start,
            action_end: g.action_end,
            nondeg_s: g.nondeg_s,
            nondeg_twist: g.nondeg_twist,
        }
    }
}

struct Broken {
    outer: ArcSegment,
    inner: ArcSegment,
}

fn broken(xi0: f64, xi_mid: f64, xi1: f64, boundary: &PerturbationProfile, params: &PhysParams) -> Result<Broken> {
    Ok(Broken {
        outer: outer_arc_fixed_ends(xi0, xi_mid, boundary, params)?,
        inner: inner_arc_fixed_ends(xi_mid, xi1, boundary, params)?,
    })
}

/// Snell residual at the intermediate point: outer action in minus inner action out.
fn stationarity(xi0: f64, xi_mid: f64, xi1: f64, boundary: &PerturbationProfile, params: &PhysParams) -> Result<f64> {
    let b = broken(xi0, xi_mid, xi1, boundary, params)?;
    Ok(action_of(xi_mid, b.outer.end_velocity, boundary) - action_of(xi_mid, b.inner.start_velocity, boundary))
}

/// Seed for the intermediate point: the circle's outer shift at the action
/// whose total circular shift is `xi1 - xi0`.
fn mid_seed(xi0: f64, xi1: f64, seed_action: Option<f64>, params: &PhysParams) -> Result<f64> {
    let i = match seed_action {
        Some(i) => i,
        None => *actions_with_shift(xi1 - xi0, params).first().ok_or(Error::NoIntermediatePoint)?,
    };
    Ok(xi0 + outer_shift_of_action(i, params))
}

/// `S(xi0, xi1)` on the branch selected by `seed_action` (the action of the
/// nearby circular orbit; `None` takes the first circular solution).
pub fn generating_function(
    xi0: f64,
    xi1: f64,
    seed_action: Option<f64>,
    boundary: &PerturbationProfile,
    params: &PhysParams,
) -> Result<GeneratingEval> {
    let seed = mid_seed(xi0, xi1, seed_action, params)?;
    let residual = |m: f64| stationarity(xi0, m, xi1, boundary, params).unwrap_or(f64::NAN);
    let lo = (xi0 - PI).max(xi1 - TAU) + 1e-9;
    let hi = (xi0 + PI).min(xi1 + TAU) - 1e-9;
    if lo >= hi {
        return Err(Error::NoIntermediatePoint);
    }
    let xi_mid = solve_near(residual, seed.clamp(lo, hi), 1e-4, lo, hi, 1e-14)
        .map_err(|_| Error::NoIntermediatePoint)?;
    evaluate_broken(xi0, xi_mid, xi1, boundary, params)
}

fn evaluate_broken(
    xi0: f64,
    xi_mid: f64,
    xi1: f64,
    boundary: &PerturbationProfile,
    params: &PhysParams,
) -> Result<GeneratingEval> {
    let b = broken(xi0, xi_mid, xi1, boundary, params)?;
    let value = jacobi_length(&b.outer, params)? + jacobi_length(&b.inner, params)?;
    let h = FD_STEP;
    let nondeg_s = (stationarity(xi0, xi_mid + h, xi1, boundary, params)?
        - stationarity(xi0, xi_mid - h, xi1, boundary, params)?)
        / (2.0 * h);
    let outer_end = |a: f64| -> Result<f64> {
        let arc = outer_arc_fixed_ends(a, xi_mid, boundary, params)?;
        Ok(action_of(xi_mid, arc.end_velocity, boundary))
    };
    let inner_start = |b: f64| -> Result<f64> {
        let arc = inner_arc_fixed_ends(xi_mid, b, boundary, params)?;
        Ok(action_of(xi_mid, arc.start_velocity, boundary))
    };
    let se_ab = (outer_end(xi0 + h)? - outer_end(xi0 - h)?) / (2.0 * h);
    let si_ab = -(inner_start(xi1 + h)? - inner_start(xi1 - h)?) / (2.0 * h);
    if nondeg_s == 0.0 {
        return Err(Error::DegenerateStationarity);
    }
    Ok(GeneratingEval {
        value,
        xi0,
        xi_mid,
        xi1,
        action_start: action_of(xi0, b.outer.start_velocity, boundary),
        action_end: action_of(xi1, b.inner.end_velocity, boundary),
        nondeg_s,
        nondeg_twist: se_ab * si_ab / nondeg_s,
        outer: b.outer,
        inner: b.inner,
    })
}

/// Solves the link `xi0 -> xi1` by shooting the map in the initial action;
/// an independent route to the same broken geodesic.
pub fn shoot_link(
    xi0: f64,
    xi1: f64,
    seed_action: f64,
    boundary: &PerturbationProfile,
    params: &PhysParams,
) -> Result<GeneratingEval> {
    let lim = BoundaryState::action_limit(xi0, boundary, params) * (1.0 - 1e-9);
    let residual = |i: f64| {
        return_map_numeric(BoundaryState::new(xi0, i), boundary, params)
            .map(|r| r.next.xi - xi1)
            .unwrap_or(f64::NAN)
    };
    let i0 = solve_near(residual, seed_action, 1e-4, -lim, lim, 1e-15)?;
    let step = return_map_numeric(BoundaryState::new(xi0, i0), boundary, params)?;
    evaluate_broken(xi0, step.xi_mid, xi1, boundary, params)
}

/// Discrete action `W = sum S(xi_k, xi_{k+1})` of a closed `(m, n)` chain
/// `xi_n = xi_0 + 2 pi m`, with its gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteAction {
    pub value: f64,
    /// `dW/dxi_k = I_end(link k-1) - I_start(link k)`; zero at orbits.
    pub gradient: Vec<f64>,
    pub links: Vec<GeneratingEval>,
}

/// Evaluates the discrete action; `seed_actions` selects the branch of every
/// link (one entry per link, or a single shared entry).
pub fn discrete_action(
    cycle: &[f64],
    m: i64,
    seed_actions: &[f64],
    boundary: &PerturbationProfile,
    params: &PhysParams,
) -> Result<DiscreteAction> {
    let n = cycle.len();
    if n == 0 {
        return Err(Error::InsufficientLength(0));
    }
    let seed = |k: usize| seed_actions.get(k).or_else(|| seed_actions.first()).copied();
    let mut links = Vec::with_capacity(n);
    for k in 0..n {
        let a = cycle[k];
        let b = if k + 1 == n { cycle[0] + TAU * m as f64 } else { cycle[k + 1] };
        links.push(generating_function(a, b, seed(k), boundary, params)?);
    }
    let value = links.iter().map(|l| l.value).sum();
    let gradient = (0..n)
        .map(|k| links[(k + n - 1) % n].action_end - links[k].action_start)
        .collect();
    Ok(DiscreteAction { value, gradient, links })
}
