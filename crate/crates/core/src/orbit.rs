//! Orbits of the return map: iteration, rotation numbers, periodic orbits,
//! invariant-curve probes and linear stability.
//!
//! Periodic `(m, n)`-orbits of a perturbed domain are found on the radial
//! curve: for every base point `xi0` the action `I0(xi0)` with
//! `xi_n = xi0 + 2 pi m` is unique near a twisting circular orbit, and orbits
//! are the zeros of `G(xi0) = I_n - I0`. Each zero is a critical point of the
//! discrete action, which is checked through its gradient.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::arc::ArcSegment;
use crate::boundary::PerturbationProfile;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::numerics::{brent, solve_near};
use crate::params::PhysParams;
use crate::return_map::{
    actions_with_shift, circular_shift, monotone_intervals, return_map, return_map_numeric, total_shift,
    BoundaryState, MapMethod,
};
use crate::variational::discrete_action;

/// Periodicity residual accepted for a returned orbit.
pub const PERIODIC_TOL: f64 = 1e-8;
/// Distance below which two orbits are the same point set.
pub const SAME_ORBIT_TOL: f64 = 1e-6;
/// `|trace| - 2` inside this band is classified as parabolic.
pub const PARABOLIC_BAND: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TraceStatus {
    Running,
    TotalReflection { step: usize },
    Failed { step: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationEstimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace {
    pub states: Vec<BoundaryState>,
    /// Outer and inner arcs alternating; empty unless recorded.
    pub arcs: Vec<ArcSegment>,
    pub status: TraceStatus,
    pub rotation_estimate: Option<RotationEstimate>,
}

/// Up to `n` map steps; a failure ends the trace and is reported in `status`.
/// Arcs are only available from the geometric map, so `record_arcs` forces it.
pub fn iterate(
    initial: BoundaryState,
    n: usize,
    boundary: &PerturbationProfile,
    params: &PhysParams,
    method: MapMethod,
    record_arcs: bool,
) -> OrbitTrace {
    let mut states = Vec::with_capacity(n + 1);
    let mut arcs = Vec::new();
    let mut status = TraceStatus::Running;
    states.push(initial);
    let mut cur = initial;
    for step in 0..n {
        let next = if record_arcs {
            return_map_numeric(cur, boundary, params).map(|r| {
                arcs.push(r.outer);
                arcs.push(r.inner);
                r.next
            })
        } else {
            return_map(cur, boundary, params, method)
        };
        match next {
            Ok(s) => {
                states.push(s);
                cur = s;
            }
            Err(Error::TotalReflection { .. }) => {
                status = TraceStatus::TotalReflection { step };
                break;
            }
            Err(e) => {
                status = TraceStatus::Failed { step, reason: e.to_string() };
                break;
            }
        }
    }
    let rotation_estimate = rotation_of_states(&states).ok();
    OrbitTrace { states, arcs, status, rotation_estimate }
}

/// One trace of `n` steps per initial state, in input order.
pub fn section(
    starts: &[BoundaryState],
    n: usize,
    boundary: &PerturbationProfile,
    params: &PhysParams,
    method: MapMethod,
    exec: Execution,
) -> Vec<OrbitTrace> {
    exec.map(starts, |s| iterate(*s, n, boundary, params, method, false))
}

/// Mean of `(xi_{k+K} - xi_k)/K` over all windows with `K = len/2`; the error
/// bar is half the spread of the windows in the last quarter.
pub fn rotation_number(trace: &OrbitTrace) -> Result<RotationEstimate> {
    rotation_of_states(&trace.states)
}

fn rotation_of_states(states: &[BoundaryState]) -> Result<RotationEstimate> {
    let len = states.len();
    if len < 2 {
        return Err(Error::InsufficientLength(len));
    }
    let k = (len / 2).max(1);
    let windows: Vec<f64> = (0..len - k).map(|i| (states[i + k].xi - states[i].xi) / k as f64).collect();
    let value = windows.iter().sum::<f64>() / windows.len() as f64;
    let tail = &windows[windows.len() * 3 / 4..];
    let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), w| (a.min(*w), b.max(*w)));
    Ok(RotationEstimate { value, error: 0.5 * (hi - lo) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitRole {
    /// Member of a circle of periodic points on the unit circle.
    CircularFamily,
    /// Smaller discrete action of a perturbed pair on one branch.
    LowerAction,
    /// Larger discrete action of a perturbed pair on one branch.
    HigherAction,
    /// Further critical points on the same branch.
    Critical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub m: i64,
    pub n: usize,
    /// `n + 1` states, the last one the lifted return of the first.
    pub states: Vec<BoundaryState>,
    pub residual: f64,
    pub role: OrbitRole,
    /// Action of the circular orbit the search was seeded from.
    pub branch_action: f64,
    pub discrete_action: Option<f64>,
    /// Infinity norm of the discrete-action gradient.
    pub gradient_norm: Option<f64>,
}

impl PeriodicOrbit {
    /// Orbit through a known periodic point, e.g. a symmetry line.
    pub fn from_start(
        start: BoundaryState,
        m: i64,
        n: usize,
        boundary: &PerturbationProfile,
        params: &PhysParams,
    ) -> Result<Self> {
        let states = orbit_states(start, n, boundary, params)?;
        let residual = periodicity_residual_of(&states, m);
        if residual > PERIODIC_TOL {
            return Err(Error::ResidualTooLarge(residual));
        }
        Ok(Self {
            m,
            n,
            states,
            residual,
            role: OrbitRole::Critical,
            branch_action: start.action,
            discrete_action: None,
            gradient_norm: None,
        })
    }

    pub fn start(&self) -> BoundaryState {
        self.states[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicSearch {
    /// Base points of the radial-curve scan over `[0, 2pi)`.
    pub scan: usize,
    pub exec: Execution,
    /// Evaluate the discrete action and its gradient for every orbit.
    pub variational_check: bool,
}

impl Default for PeriodicSearch {
    fn default() -> Self {
        Self { scan: 48, exec: Execution::default(), variational_check: true }
    }
}

fn orbit_states(start: BoundaryState, n: usize, boundary: &PerturbationProfile, params: &PhysParams) -> Result<Vec<BoundaryState>> {
    let mut out = vec![start];
    let mut cur = start;
    for _ in 0..n {
        cur = return_map(cur, boundary, params, MapMethod::Auto)?;
        out.push(cur);
    }
    Ok(out)
}

fn periodicity_residual_of(states: &[BoundaryState], m: i64) -> f64 {
    let (a, b) = (states[0], states[states.len() - 1]);
    (b.xi - a.xi - TAU * m as f64).abs().max((b.action - a.action).abs())
}

/// `max(|xi_n - xi_0 - 2 pi m|, |I_n - I_0|)` recomputed from the start point.
pub fn periodicity_residual(orbit: &PeriodicOrbit, boundary: &PerturbationProfile, params: &PhysParams) -> Result<f64> {
    let states = orbit_states(orbit.start(), orbit.n, boundary, params)?;
    Ok(periodicity_residual_of(&states, orbit.m))
}

/// All `(m, n)`-orbits reachable from the twisting circular ones.
pub fn find_periodic(
    m: i64,
    n: usize,
    boundary: &PerturbationProfile,
    params: &PhysParams,
    search: &PeriodicSearch,
) -> Result<Vec<PeriodicOrbit>> {
    if n == 0 {
        return Err(Error::Domain("period must be positive".into()));
    }
    let target = TAU * m as f64 / n as f64;
    let branches = actions_with_shift(target, params);
    if branches.is_empty() {
        return Err(Error::RangeEmpty(target));
    }
    if boundary.is_circular() {
        return branches
            .into_iter()
            .map(|i| {
                let states = orbit_states(BoundaryState::new(0.0, i), n, boundary, params)?;
                Ok(PeriodicOrbit {
                    m,
                    n,
                    residual: periodicity_residual_of(&states, m),
                    states,
                    role: OrbitRole::CircularFamily,
                    branch_action: i,
                    discrete_action: None,
                    gradient_norm: None,
                })
            })
            .collect();
    }
    let intervals = monotone_intervals(params);
    let mut out: Vec<PeriodicOrbit> = Vec::new();
    for i_star in branches {
        let Some(&(a, b)) = intervals.iter().find(|(a, b)| *a < i_star && i_star < *b) else {
            continue;
        };
        let found = radial_curve_orbits(m, n, i_star, (a, b), boundary, params, search)?;
        let mut branch: Vec<PeriodicOrbit> = Vec::new();
        for o in found {
            if !out.iter().chain(branch.iter()).any(|p| same_orbit(p, &o)) {
                branch.push(o);
            }
        }
        if search.variational_check {
            for o in branch.iter_mut() {
                let cycle: Vec<f64> = o.states[..n].iter().map(|s| s.xi).collect();
                let seeds: Vec<f64> = o.states[..n].iter().map(|s| s.action).collect();
                if let Ok(w) = discrete_action(&cycle, m, &seeds, boundary, params) {
                    o.discrete_action = Some(w.value);
                    o.gradient_norm = Some(w.gradient.iter().fold(0.0, |acc: f64, g| acc.max(g.abs())));
                }
            }
            let ws: Vec<f64> = branch.iter().filter_map(|o| o.discrete_action).collect();
            let lo = ws.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = ws.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let tol = 1e-9 * (1.0 + lo.abs());
            if hi - lo > tol {
                for o in branch.iter_mut() {
                    match o.discrete_action {
                        Some(w) if w - lo <= tol => o.role = OrbitRole::LowerAction,
                        Some(w) if hi - w <= tol => o.role = OrbitRole::HigherAction,
                        _ => {}
                    }
                }
            }
        }
        out.extend(branch);
    }
    if out.is_empty() {
        return Err(Error::DescentStalled("no zero of the radial-curve residual".into()));
    }
    Ok(out)
}

/// `I0(xi0)` on the radial curve, staying inside the monotone branch.
fn radial_action(
    xi0: f64,
    m: i64,
    n: usize,
    seed: f64,
    (a, b): (f64, f64),
    boundary: &PerturbationProfile,
    params: &PhysParams,
) -> Result<f64> {
    let shrink = 1e-9 * (b - a);
    let residual = |i: f64| {
        orbit_states(BoundaryState::new(xi0, i), n, boundary, params)
            .map(|s| s[n].xi - xi0 - TAU * m as f64)
            .unwrap_or(f64::NAN)
    };
    solve_near(residual, seed, 1e-3 * (b - a), a + shrink, b - shrink, 1e-15)
}

fn radial_curve_orbits(
    m: i64,
    n: usize,
    i_star: f64,
    interval: (f64, f64),
    boundary: &PerturbationProfile,
    params: &PhysParams,
    search: &PeriodicSearch,
) -> Result<Vec<PeriodicOrbit>> {
    let g = |xi0: f64| -> Result<f64> {
        let i0 = radial_action(xi0, m, n, i_star, interval, boundary, params)?;
        let s = orbit_states(BoundaryState::new(xi0, i0), n, boundary, params)?;
        Ok(s[n].action - i0)
    };
    let scan = search.scan.max(4);
    let grid: Vec<f64> = (0..scan).map(|k| TAU * k as f64 / scan as f64).collect();
    let values = search.exec.map(&grid, |x| g(*x));
    let brackets: Vec<(f64, f64)> = (0..scan)
        .filter_map(|k| {
            let (x0, x1) = (grid[k], if k + 1 == scan { TAU } else { grid[k + 1] });
            match (&values[k], &values[(k + 1) % scan]) {
                (Ok(g0), Ok(g1)) if g0.signum() != g1.signum() || *g0 == 0.0 => Some((x0, x1)),
                _ => None,
            }
        })
        .collect();
    let refined = search.exec.map(&brackets, |&(x0, x1)| -> Result<Option<PeriodicOrbit>> {
        let root = brent(|x| g(x).unwrap_or(f64::NAN), x0, x1, 1e-14, 200)?;
        let i0 = radial_action(root, m, n, i_star, interval, boundary, params)?;
        let states = orbit_states(BoundaryState::new(root, i0), n, boundary, params)?;
        let residual = periodicity_residual_of(&states, m);
        Ok((residual < PERIODIC_TOL).then_some(PeriodicOrbit {
            m,
            n,
            states,
            residual,
            role: OrbitRole::Critical,
            branch_action: i_star,
            discrete_action: None,
            gradient_norm: None,
        }))
    });
    let mut orbits = Vec::new();
    for r in refined {
        if let Some(o) = r? {
            orbits.push(o);
        }
    }
    Ok(orbits)
}

fn same_orbit(a: &PeriodicOrbit, b: &PeriodicOrbit) -> bool {
    let b0 = b.states[0];
    a.states[..a.n].iter().any(|s| {
        let d = (s.xi - b0.xi).rem_euclid(TAU);
        d.min(TAU - d) < SAME_ORBIT_TOL && (s.action - b0.action).abs() < SAME_ORBIT_TOL
    })
}

/// Smallest distance between the point sets of two orbits, angles mod `2pi`.
pub fn orbit_separation(a: &PeriodicOrbit, b: &PeriodicOrbit) -> f64 {
    let mut best = f64::INFINITY;
    for s in &a.states[..a.n] {
        for t in &b.states[..b.n] {
            let d = (s.xi - t.xi).rem_euclid(TAU);
            best = best.min(d.min(TAU - d).hypot(s.action - t.action));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabilityKind {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub monodromy: [[f64; 2]; 2],
    pub trace: f64,
    pub determinant: f64,
    pub kind: StabilityKind,
}

/// Central-difference monodromy of the `n`-fold map at the orbit's start.
pub fn linear_stability(
    orbit: &PeriodicOrbit,
    boundary: &PerturbationProfile,
    params: &PhysParams,
    h: f64,
) -> Result<StabilityReport> {
    let residual = periodicity_residual(orbit, boundary, params)?;
    if residual > PERIODIC_TOL {
        return Err(Error::ResidualTooLarge(residual));
    }
    let s0 = orbit.start();
    let f = |xi: f64, i: f64| -> Result<BoundaryState> {
        Ok(orbit_states(BoundaryState::new(xi, i), orbit.n, boundary, params)?[orbit.n])
    };
    let (xp, xm) = (f(s0.xi + h, s0.action)?, f(s0.xi - h, s0.action)?);
    let (ip, im) = (f(s0.xi, s0.action + h)?, f(s0.xi, s0.action - h)?);
    let j = [
        [(xp.xi - xm.xi) / (2.0 * h), (ip.xi - im.xi) / (2.0 * h)],
        [(xp.action - xm.action) / (2.0 * h), (ip.action - im.action) / (2.0 * h)],
    ];
    let trace = j[0][0] + j[1][1];
    let kind = if (trace.abs() - 2.0).abs() <= PARABOLIC_BAND {
        StabilityKind::Parabolic
    } else if trace.abs() < 2.0 {
        StabilityKind::Elliptic
    } else {
        StabilityKind::Hyperbolic
    };
    Ok(StabilityReport { monodromy: j, trace, determinant: j[0][0] * j[1][1] - j[0][1] * j[1][0], kind })
}

/// Real trigonometric polynomial `a0 + sum a_k cos(k x) + b_k sin(k x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigSeries {
    pub a0: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigSeries {
    pub fn eval(&self, x: f64) -> f64 {
        let mut v = self.a0;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let (s, c) = ((k + 1) as f64 * x).sin_cos();
            v += a * c + b * s;
        }
        v
    }

    /// Least-squares fit with `harmonics` harmonics (SVD solve).
    pub fn fit(xs: &[f64], ys: &[f64], harmonics: usize) -> Result<Self> {
        let cols = 2 * harmonics + 1;
        if xs.len() < cols || xs.len() != ys.len() {
            return Err(Error::InsufficientLength(xs.len()));
        }
        let a = DMatrix::from_fn(xs.len(), cols, |r, c| {
            if c == 0 {
                1.0
            } else {
                let k = c.div_ceil(2) as f64;
                if c % 2 == 1 {
                    (k * xs[r]).cos()
                } else {
                    (k * xs[r]).sin()
                }
            }
        });
        let b = DVector::from_column_slice(ys);
        let coef = a
            .svd(true, true)
            .solve(&b, 1e-12)
            .map_err(|e| Error::Domain(e.to_string()))?;
        Ok(Self {
            a0: coef[0],
            cos: (0..harmonics).map(|k| coef[2 * k + 1]).collect(),
            sin: (0..harmonics).map(|k| coef[2 * k + 2]).collect(),
        })
    }
}

/// `lo + (hi - lo)/phi^2`.
pub fn golden_target(lo: f64, hi: f64) -> f64 {
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    lo + (hi - lo) / (phi * phi)
}

/// `rho / 2pi` farther than `gap` from every rational with denominator at most `qmax`.
pub fn is_diophantine_surrogate(rho: f64, qmax: u32, gap: f64) -> bool {
    let x = rho / TAU;
    (1..=qmax).all(|q| {
        let p = (x * q as f64).round();
        (x - p / q as f64).abs() > gap
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    pub iterations: usize,
    pub harmonics: usize,
    /// Iterations per secant step when matching the target rotation number.
    pub tuning_iterations: usize,
    pub xi0: f64,
    /// Prefer the circular seed closest to this action.
    pub branch_hint: Option<f64>,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self { iterations: 5000, harmonics: 32, tuning_iterations: 1000, xi0: 0.0, branch_hint: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantCurveProbe {
    pub target: f64,
    pub seed_action: f64,
    pub initial: BoundaryState,
    pub measured: RotationEstimate,
    pub curve: TrigSeries,
    pub max_residual: f64,
    pub states: Vec<BoundaryState>,
}

/// Seeds `I` from the circular inverse of the total shift, tunes it by a
/// secant on the measured rotation number and fits the orbit as a graph
/// `I(xi)`.
pub fn invariant_curve_probe(
    target: f64,
    boundary: &PerturbationProfile,
    params: &PhysParams,
    opts: &ProbeOptions,
) -> Result<InvariantCurveProbe> {
    let mut seeds: Vec<f64> = actions_with_shift(target, params)
        .into_iter()
        .filter(|i| circular_shift(*i, params).map(|s| s.twist().abs() > 1e-8).unwrap_or(false))
        .collect();
    if let Some(h) = opts.branch_hint {
        seeds.sort_by(|a, b| (a - h).abs().total_cmp(&(b - h).abs()));
    }
    let seed_action = *seeds.first().ok_or(Error::RangeEmpty(target))?;
    let run = |i: f64, n: usize| -> Result<OrbitTrace> {
        let t = iterate(BoundaryState::new(opts.xi0, i), n, boundary, params, MapMethod::Auto, false);
        match &t.status {
            TraceStatus::Running => Ok(t),
            TraceStatus::TotalReflection { step } => {
                Err(Error::OrbitTerminated { step: *step, reason: "total reflection".into() })
            }
            TraceStatus::Failed { step, reason } => Err(Error::OrbitTerminated { step: *step, reason: reason.clone() }),
        }
    };
    let mut i0 = seed_action;
    if !boundary.is_circular() {
        let rho = |i: f64| -> Result<f64> { Ok(rotation_number(&run(i, opts.tuning_iterations)?)?.value - target) };
        let twist = circular_shift(seed_action, params)?.twist();
        let (mut xa, mut fa) = (i0, rho(i0)?);
        let mut xb = i0 - fa / twist;
        for _ in 0..20 {
            let fb = rho(xb)?;
            if fb.abs() < 1e-12 || fb == fa {
                break;
            }
            let next = xb - fb * (xb - xa) / (fb - fa);
            (xa, fa, xb) = (xb, fb, next);
            if (xb - xa).abs() < 1e-13 {
                break;
            }
        }
        i0 = xb;
    }
    let trace = run(i0, opts.iterations)?;
    let measured = rotation_number(&trace)?;
    let xs: Vec<f64> = trace.states.iter().map(|s| s.xi.rem_euclid(TAU)).collect();
    let ys: Vec<f64> = trace.states.iter().map(|s| s.action).collect();
    let curve = TrigSeries::fit(&xs, &ys, opts.harmonics)?;
    let max_residual = xs.iter().zip(&ys).map(|(x, y)| (curve.eval(*x) - y).abs()).fold(0.0, f64::max);
    Ok(InvariantCurveProbe {
        target,
        seed_action,
        initial: BoundaryState::new(opts.xi0, i0),
        measured,
        curve,
        max_residual,
        states: trace.states,
    })
}

/// Shift range `(lo, hi)` of the monotone branch containing `i`.
pub fn branch_shift_range(i: f64, params: &PhysParams) -> Option<(f64, f64)> {
    let (a, b) = *monotone_intervals(params).iter().find(|(a, b)| *a <= i && i < *b)?;
    let ic = params.action_bound();
    let clip = |x: f64| if x.abs() >= ic { x * (1.0 - 1e-14) } else { x };
    let (fa, fb) = (total_shift(clip(a), params), total_shift(clip(b), params));
    Some((fa.min(fb), fa.max(fb)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fig() -> PhysParams {
        PhysParams::new(2.5, 2.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn circular_rotation_number() {
        let p = fig();
        let b = PerturbationProfile::circle();
        let t = iterate(BoundaryState::new(0.0, 1.0), 1000, &b, &p, MapMethod::Auto, false);
        let r = rotation_number(&t).unwrap();
        assert_abs_diff_eq!(r.value, -1.8157750, epsilon = 1e-6);
        assert!(r.error < 1e-9);
        let t = iterate(BoundaryState::new(0.0, -1.0), 1000, &b, &p, MapMethod::Auto, false);
        assert_abs_diff_eq!(rotation_number(&t).unwrap().value, 1.8157750, epsilon = 1e-6);
    }

    #[test]
    fn homothetic_trace_is_fixed() {
        let p = fig();
        let b = PerturbationProfile::circle();
        let t = iterate(BoundaryState::new(0.4, 0.0), 10, &b, &p, MapMethod::Numeric, true);
        assert_eq!(t.status, TraceStatus::Running);
        assert_eq!(t.arcs.len(), 20);
        for s in &t.states {
            assert_abs_diff_eq!(s.xi, 0.4, epsilon = 1e-12);
            assert_abs_diff_eq!(s.action, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn short_trace_is_rejected() {
        let t = OrbitTrace { states: vec![BoundaryState::new(0.0, 0.0)], arcs: vec![], status: TraceStatus::Running, rotation_estimate: None };
        assert_eq!(rotation_number(&t), Err(Error::InsufficientLength(1)));
    }

    #[test]
    fn circular_period_three() {
        // (E, om, h, mu) = (2.5, 1, 2, 1) reaches -2pi/3 on two branches.
        let p = PhysParams::new(2.5, 2.0, 1.0, 1.0).unwrap();
        let b = PerturbationProfile::circle();
        let orbits = find_periodic(-1, 3, &b, &p, &PeriodicSearch::default()).unwrap();
        assert_eq!(orbits.len(), 2);
        for o in &orbits {
            assert!(o.residual < 1e-10);
            assert_abs_diff_eq!(total_shift(o.branch_action, &p), -TAU / 3.0, epsilon = 1e-12);
        }
        assert!(find_periodic(-1, 3, &b, &fig(), &PeriodicSearch::default()).is_err());
    }

    #[test]
    fn shear_at_homothetic_line() {
        let p = fig();
        let b = PerturbationProfile::circle();
        let o = &find_periodic(0, 1, &b, &p, &PeriodicSearch::default()).unwrap()
            .into_iter()
            .find(|o| o.branch_action == 0.0)
            .unwrap();
        let s = linear_stability(o, &b, &p, 1e-6).unwrap();
        assert_eq!(s.kind, StabilityKind::Parabolic);
        assert_abs_diff_eq!(s.monodromy[0][1], crate::return_map::twist_at_zero(&p), epsilon = 1e-6);
    }

    #[test]
    fn trig_fit_recovers_coefficients() {
        let xs: Vec<f64> = (0..400).map(|k| (k as f64 * 0.618034 * TAU).rem_euclid(TAU)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.3 + 0.1 * (2.0 * x).cos() - 0.05 * (5.0 * x).sin()).collect();
        let s = TrigSeries::fit(&xs, &ys, 8).unwrap();
        assert_abs_diff_eq!(s.a0, 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(s.cos[1], 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(s.sin[4], -0.05, epsilon = 1e-12);
    }

    #[test]
    fn diophantine_surrogate() {
        assert!(!is_diophantine_surrogate(TAU / 3.0, 20, 1e-3));
        assert!(is_diophantine_surrogate(TAU * golden_target(0.0, 1.0), 20, 1e-3));
    }

    #[test]
    fn probe_on_circle_is_flat() {
        let p = fig();
        let b = PerturbationProfile::circle();
        let r = invariant_curve_probe(-1.0, &b, &p, &ProbeOptions::default()).unwrap();
        assert!(r.max_residual < 1e-10, "{}", r.max_residual);
        assert_abs_diff_eq!(r.measured.value, -1.0, epsilon = 1e-12);
    }
}
