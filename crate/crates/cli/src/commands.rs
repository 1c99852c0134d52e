//! One function per command. Each writes its tables and plots into the
//! output directory and returns summary lines for stdout.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fs;
use std::path::Path;

use anyhow::{Context as _, Result};
use refraction_billiard::caustics::{circular_caustic_radii, perturbed_caustic, tangency_check, CausticCurve, CausticKind};
use refraction_billiard::orbit::{
    find_periodic, invariant_curve_probe, iterate, linear_stability, section, PeriodicSearch, ProbeOptions, TraceStatus,
    TrigSeries,
};
use refraction_billiard::return_map::{
    circular_shift, find_nonhomothetic_fixed_point, fixed_point_thresholds, limit_inner_shift, return_map, total_shift,
    twist_at_zero, twist_critical_set,
};
use refraction_billiard::{BoundaryState, Execution, MapMethod, PerturbationProfile, PhysParams};
use serde::Serialize;

use crate::config::{Command, RunConfig};
use crate::svg::{Plot, Series};

/// Samples per arc in physical-plane pictures.
const ARC_SAMPLES: usize = 64;
/// Boundary samples in physical-plane pictures.
const BOUNDARY_SAMPLES: usize = 720;
/// Finite-difference step for monodromy matrices.
const STABILITY_STEP: f64 = 1e-6;
/// Iterations drawn and checked against the caustics.
const CAUSTIC_ITERATIONS: usize = 200;

pub struct RunContext<'a> {
    pub config: &'a RunConfig,
    pub out: &'a Path,
    pub exec: Execution,
    pub verbose: bool,
}

impl RunContext<'_> {
    fn p(&self) -> &PhysParams {
        &self.config.params
    }

    fn b(&self) -> &PerturbationProfile {
        &self.config.profile
    }

    fn note(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("rbill: {}", msg.as_ref());
        }
    }

    fn csv<T: Serialize>(&self, name: &str, rows: &[T]) -> Result<()> {
        let path = self.out.join(name);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        self.note(format!("wrote {} ({} rows)", path.display(), rows.len()));
        Ok(())
    }

    fn svg(&self, name: &str, plot: &Plot) -> Result<()> {
        let path = self.out.join(name);
        fs::write(&path, plot.render()).with_context(|| format!("writing {}", path.display()))?;
        self.note(format!("wrote {}", path.display()));
        Ok(())
    }

    /// Configured seeds, or `count` seeds on `xi = 0` spread over `|I| <= 0.9 I_c`.
    fn seeds_or_default(&self, count: usize) -> Vec<BoundaryState> {
        if !self.config.seeds.is_empty() {
            return self.config.seeds.clone();
        }
        let lim = 0.9 * BoundaryState::action_limit(0.0, self.b(), self.p());
        (0..count)
            .map(|k| BoundaryState::new(0.0, -lim + 2.0 * lim * k as f64 / (count - 1).max(1) as f64))
            .collect()
    }

    fn boundary_polyline(&self) -> Vec<(f64, f64)> {
        (0..=BOUNDARY_SAMPLES)
            .map(|k| {
                let z = self.b().point(TAU * k as f64 / BOUNDARY_SAMPLES as f64);
                (z.x, z.y)
            })
            .collect()
    }
}

pub fn run(cmd: Command, ctx: &RunContext) -> Result<Vec<String>> {
    match cmd {
        Command::ParamsReport => params_report(ctx),
        Command::ShiftProfile => shift_profile(ctx),
        Command::Section => section_cmd(ctx),
        Command::Orbit => orbit(ctx),
        Command::Periodic => periodic(ctx),
        Command::Twist => twist(ctx),
        Command::Caustics => caustics(ctx),
        Command::OracleCheck => oracle_check(ctx),
    }
}

#[derive(Serialize)]
struct Quantity {
    quantity: String,
    value: f64,
}

fn params_report(ctx: &RunContext) -> Result<Vec<String>> {
    let p = ctx.p();
    let th = fixed_point_thresholds(p);
    let mut rows = vec![
        ("energy_E", p.energy),
        ("offset_h", p.offset_h),
        ("mass_mu", p.mass_mu),
        ("stiffness_om", p.stiffness),
        ("epsilon", ctx.b().epsilon),
        ("action_bound_Ic", p.action_bound()),
        ("lc_frequency", p.lc_frequency()),
        ("twist_at_zero", twist_at_zero(p)),
        ("limit_inner_shift", limit_inner_shift(p)),
        ("mu_bar", th.mu_bar),
        ("h_bar", th.h_bar),
    ]
    .into_iter()
    .map(|(q, v)| Quantity { quantity: q.into(), value: v })
    .collect::<Vec<_>>();
    for (k, c) in twist_critical_set(p).iter().enumerate() {
        rows.push(Quantity { quantity: format!("twist_critical_{k}"), value: c.action });
    }
    if let Ok(i) = find_nonhomothetic_fixed_point(p) {
        rows.push(Quantity { quantity: "nonhomothetic_fixed_action".into(), value: i });
    }
    ctx.csv("params_report.csv", &rows)?;
    Ok(rows.iter().map(|r| format!("{:<28} {}", r.quantity, r.value)).collect())
}

#[derive(Serialize)]
struct ShiftRow {
    #[serde(rename = "action_I")]
    action: f64,
    f: f64,
    g: f64,
    theta_bar: f64,
    df: f64,
    dg: f64,
    dtheta_bar: f64,
}

fn shift_profile(ctx: &RunContext) -> Result<Vec<String>> {
    let p = ctx.p();
    let ic = p.action_bound();
    let n = ctx.config.grid;
    let mut actions: Vec<f64> = (1..n).map(|k| ic * (-1.0 + 2.0 * k as f64 / n as f64)).collect();
    actions.push(ctx.config.action);
    actions.sort_by(f64::total_cmp);
    actions.dedup();
    let rows = actions
        .iter()
        .map(|&i| {
            let s = circular_shift(i, p)?;
            Ok(ShiftRow {
                action: i,
                f: s.outer,
                g: s.inner,
                theta_bar: s.total,
                df: s.outer_derivative,
                dg: s.inner_derivative,
                dtheta_bar: s.twist(),
            })
        })
        .collect::<refraction_billiard::Result<Vec<_>>>()?;
    ctx.csv("shift_profile.csv", &rows)?;
    let mut plot = Plot::new("circular shifts", "I", "angle");
    plot.series.push(Series::line(rows.iter().map(|r| (r.action, r.f)).collect()));
    plot.series.push(Series::line(rows.iter().map(|r| (r.action, r.g)).collect()));
    plot.series.push(Series::line(rows.iter().map(|r| (r.action, r.theta_bar)).collect()));
    ctx.svg("shift_profile.svg", &plot)?;
    let at = rows.iter().find(|r| r.action == ctx.config.action).expect("configured action is on the grid");
    Ok(vec![format!(
        "I = {}: f = {:.10}, g = {:.10}, theta_bar = {:.10}, twist = {:.10}",
        at.action, at.f, at.g, at.theta_bar, at.dtheta_bar
    )])
}

#[derive(Serialize)]
struct SectionRow {
    seed_id: usize,
    k: usize,
    xi: f64,
    #[serde(rename = "action_I")]
    action: f64,
    status: &'static str,
}

fn status_name(s: &TraceStatus) -> &'static str {
    match s {
        TraceStatus::Running => "ok",
        TraceStatus::TotalReflection { .. } => "total_reflection",
        TraceStatus::Failed { .. } => "failed",
    }
}

fn section_cmd(ctx: &RunContext) -> Result<Vec<String>> {
    let seeds = ctx.seeds_or_default(16);
    ctx.note(format!("iterating {} seeds for {} steps", seeds.len(), ctx.config.iterations));
    let traces = section(&seeds, ctx.config.iterations, ctx.b(), ctx.p(), ctx.config.method, ctx.exec);
    let mut rows = Vec::new();
    let mut plot = Plot::new("first-return section", "xi mod 2pi", "I");
    let mut lines = Vec::new();
    for (id, t) in traces.iter().enumerate() {
        let last = t.states.len() - 1;
        for (k, s) in t.states.iter().enumerate() {
            let status = if k == last { status_name(&t.status) } else { "ok" };
            rows.push(SectionRow { seed_id: id, k, xi: s.xi.rem_euclid(TAU), action: s.action, status });
        }
        plot.series.push(Series::dots(t.states.iter().map(|s| (s.xi.rem_euclid(TAU), s.action)).collect()));
        let rho = t.rotation_estimate.map_or("n/a".to_string(), |r| format!("{:.8} +- {:.1e}", r.value, r.error));
        lines.push(format!("seed {id}: {} states, {}, rotation {rho}", t.states.len(), status_name(&t.status)));
    }
    ctx.csv("section.csv", &rows)?;
    ctx.svg("section.svg", &plot)?;
    Ok(lines)
}

#[derive(Serialize)]
struct StateRow {
    k: usize,
    xi: f64,
    #[serde(rename = "action_I")]
    action: f64,
}

fn orbit(ctx: &RunContext) -> Result<Vec<String>> {
    let start = ctx.config.seeds.first().copied().unwrap_or(BoundaryState::new(0.0, ctx.config.action));
    let t = iterate(start, ctx.config.iterations, ctx.b(), ctx.p(), MapMethod::Numeric, true);
    let rows: Vec<_> =
        t.states.iter().enumerate().map(|(k, s)| StateRow { k, xi: s.xi, action: s.action }).collect();
    ctx.csv("orbit.csv", &rows)?;
    let mut plot = Plot::new("trajectory", "x", "y");
    plot.equal_aspect = true;
    plot.series.push(Series::line(ctx.boundary_polyline()).color("black"));
    let path: Vec<_> = t
        .arcs
        .iter()
        .flat_map(|a| a.sample(ARC_SAMPLES, ctx.p()))
        .map(|z| (z.x, z.y))
        .collect();
    plot.series.push(Series::line(path));
    ctx.svg("orbit.svg", &plot)?;
    let rho = t.rotation_estimate.map_or("n/a".to_string(), |r| format!("{:.10} +- {:.1e}", r.value, r.error));
    Ok(vec![
        format!("start (xi, I) = ({}, {})", start.xi, start.action),
        format!("{} steps, status {:?}", t.states.len() - 1, t.status),
        format!("rotation number {rho}"),
    ])
}

#[derive(Serialize)]
struct PeriodicRow {
    orbit_id: usize,
    role: String,
    stability: String,
    k: usize,
    xi: f64,
    #[serde(rename = "action_I")]
    action: f64,
    residual: f64,
    discrete_action: Option<f64>,
    gradient_norm: Option<f64>,
}

fn periodic(ctx: &RunContext) -> Result<Vec<String>> {
    let c = ctx.config;
    let search = PeriodicSearch { scan: c.grid, exec: ctx.exec, variational_check: true };
    let orbits = find_periodic(c.m, c.n, ctx.b(), ctx.p(), &search)
        .with_context(|| format!("searching ({}, {})-orbits", c.m, c.n))?;
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut plot = Plot::new(&format!("({}, {}) periodic orbits", c.m, c.n), "xi mod 2pi", "I");
    for (id, o) in orbits.iter().enumerate() {
        let stability = linear_stability(o, ctx.b(), ctx.p(), STABILITY_STEP)
            .map_or_else(|e| format!("error: {e}"), |s| format!("{:?}", s.kind));
        for (k, s) in o.states.iter().enumerate() {
            rows.push(PeriodicRow {
                orbit_id: id,
                role: format!("{:?}", o.role),
                stability: stability.clone(),
                k,
                xi: s.xi,
                action: s.action,
                residual: o.residual,
                discrete_action: o.discrete_action,
                gradient_norm: o.gradient_norm,
            });
        }
        plot.series.push(Series::dots(o.states.iter().map(|s| (s.xi.rem_euclid(TAU), s.action)).collect()));
        lines.push(format!(
            "orbit {id}: {:?}, {stability}, start ({:.10}, {:.10}), residual {:.1e}",
            o.role,
            o.start().xi,
            o.start().action,
            o.residual
        ));
    }
    ctx.csv("periodic.csv", &rows)?;
    ctx.svg("periodic.svg", &plot)?;
    lines.insert(0, format!("{} orbits", orbits.len()));
    Ok(lines)
}

#[derive(Serialize)]
struct CriticalRow {
    #[serde(rename = "action_I")]
    action: f64,
    tangential: bool,
}

#[derive(Serialize)]
struct TwistRow {
    #[serde(rename = "action_I")]
    action: f64,
    twist: f64,
    sign: i8,
}

fn twist(ctx: &RunContext) -> Result<Vec<String>> {
    let p = ctx.p();
    let crit = twist_critical_set(p);
    let rows: Vec<_> = crit.iter().map(|c| CriticalRow { action: c.action, tangential: c.tangential }).collect();
    ctx.csv("twist_critical.csv", &rows)?;
    let ic = p.action_bound();
    let n = ctx.config.grid;
    let chart = (1..n)
        .map(|k| {
            let i = ic * (-1.0 + 2.0 * k as f64 / n as f64);
            let t = circular_shift(i, p)?.twist();
            Ok(TwistRow { action: i, twist: t, sign: if t > 0.0 { 1 } else if t < 0.0 { -1 } else { 0 } })
        })
        .collect::<refraction_billiard::Result<Vec<_>>>()?;
    ctx.csv("twist.csv", &chart)?;
    let mut plot = Plot::new("twist of the circular map", "I", "d theta_bar / dI");
    plot.series.push(Series::line(chart.iter().map(|r| (r.action, r.twist)).collect()));
    plot.series.push(Series::line(vec![(-ic, 0.0), (ic, 0.0)]).color("gray"));
    ctx.svg("twist.svg", &plot)?;
    let mut lines = vec![format!("{} critical actions", crit.len())];
    lines.extend(crit.iter().map(|c| format!("I = {:.10}{}", c.action, if c.tangential { " (tangential)" } else { "" })));
    Ok(lines)
}

#[derive(Serialize)]
struct CausticRow {
    zeta: f64,
    x: f64,
    y: f64,
}

fn caustic_rows(c: &CausticCurve) -> Vec<CausticRow> {
    c.samples.iter().map(|s| CausticRow { zeta: s.zeta, x: s.x, y: s.y }).collect()
}

fn caustics(ctx: &RunContext) -> Result<Vec<String>> {
    let (p, b) = (ctx.p(), ctx.b());
    let i0 = ctx.config.action;
    let (re, ri) = circular_caustic_radii(i0, p)?;
    let (curve, initial) = if b.is_circular() {
        (TrigSeries { a0: i0, cos: Vec::new(), sin: Vec::new() }, BoundaryState::new(0.0, i0))
    } else {
        let opts = ProbeOptions { iterations: ctx.config.iterations, branch_hint: Some(i0), ..Default::default() };
        ctx.note("probing the invariant curve");
        let probe = invariant_curve_probe(total_shift(i0, p), b, p, &opts).context("invariant-curve probe")?;
        (probe.curve, probe.initial)
    };
    let outer = perturbed_caustic(&curve, CausticKind::Outer, b, p).context("outer caustic")?;
    let inner = perturbed_caustic(&curve, CausticKind::Inner, b, p).context("inner caustic")?;
    ctx.csv("caustic_outer.csv", &caustic_rows(&outer))?;
    ctx.csv("caustic_inner.csv", &caustic_rows(&inner))?;
    let trace = iterate(initial, CAUSTIC_ITERATIONS, b, p, MapMethod::Numeric, true);
    let tangency = tangency_check(&trace, &outer, &inner, p);
    let mut plot = Plot::new("caustics", "x", "y");
    plot.equal_aspect = true;
    let path: Vec<_> = trace.arcs.iter().take(60).flat_map(|a| a.sample(ARC_SAMPLES, p)).map(|z| (z.x, z.y)).collect();
    plot.series.push(Series::line(path).color("#bbbbbb"));
    plot.series.push(Series::line(ctx.boundary_polyline()).color("black"));
    plot.series.push(Series::line(outer.samples.iter().map(|s| (s.x, s.y)).collect()).color("#d62728"));
    plot.series.push(Series::line(inner.samples.iter().map(|s| (s.x, s.y)).collect()).color("#1f77b4"));
    ctx.svg("caustics.svg", &plot)?;
    Ok(vec![
        format!("circular radii at I = {i0}: R_E = {re:.10}, R_I = {ri:.10}"),
        format!("envelope residual: outer {:.1e}, inner {:.1e}", outer.max_envelope_residual, inner.max_envelope_residual),
        format!(
            "tangency over {} steps: outer {:.1e}, inner {:.1e}, skipped {}",
            trace.states.len() - 1,
            tangency.outer,
            tangency.inner,
            tangency.skipped
        ),
    ])
}

#[derive(Serialize)]
struct OracleRow {
    alpha0: f64,
    #[serde(rename = "action_I")]
    action: f64,
    xi1_closed: f64,
    xi1_numeric: f64,
    dxi: f64,
    d_action: f64,
}

fn oracle_check(ctx: &RunContext) -> Result<Vec<String>> {
    // The closed form exists on the unit circle only.
    let p = ctx.p();
    let circle = PerturbationProfile::circle();
    let n = ctx.config.grid;
    let (lo, hi) = (-FRAC_PI_2 + 0.05, FRAC_PI_2 - 0.05);
    let alphas: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
    let scale = BoundaryState::action_limit(0.0, &circle, p);
    let rows = ctx
        .exec
        .map(&alphas, |&a| -> Result<OracleRow> {
            let s = BoundaryState::new(0.0, scale * a.sin());
            let closed = return_map(s, &circle, p, MapMethod::ClosedForm)?;
            let numeric = return_map(s, &circle, p, MapMethod::Numeric).with_context(|| format!("numeric step at alpha {a}"))?;
            Ok(OracleRow {
                alpha0: a,
                action: s.action,
                xi1_closed: closed.xi,
                xi1_numeric: numeric.xi,
                dxi: numeric.xi - closed.xi,
                d_action: numeric.action - s.action,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    ctx.csv("oracle_check.csv", &rows)?;
    let dxi = rows.iter().map(|r| r.dxi.abs()).fold(0.0, f64::max);
    let di = rows.iter().map(|r| r.d_action.abs()).fold(0.0, f64::max);
    let verdict = if dxi.max(di) <= ctx.config.tol { "PASS" } else { "FAIL" };
    if !ctx.config.profile.is_circular() {
        ctx.note("oracle-check runs on the unit circle; the configured profile is ignored");
    }
    let line = format!("{verdict}: max |dxi| = {dxi:.2e}, max |dI| = {di:.2e} over {n} angles (tol {:.1e})", ctx.config.tol);
    if verdict == "FAIL" {
        anyhow::bail!(line);
    }
    Ok(vec![line])
}
