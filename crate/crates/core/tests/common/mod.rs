//! Independent RK4 oracle for one map step.
//!
//! Outer arcs integrate `z'' = -om z` in Cartesian form; inner arcs integrate
//! the regularized `w'' = Omega^2 w` in `tau`. Boundary crossings are found by
//! stepping and bisecting on re-integrated substeps, Snell's law is applied
//! by hand, and the polar angle is tracked continuously.

#![allow(dead_code)]

use std::f64::consts::TAU;

use refraction_billiard::{PerturbationProfile, PhysParams};

type S4 = [f64; 4];

fn rk4(f: &dyn Fn(&S4) -> S4, y: &S4, h: f64) -> S4 {
    let add = |a: &S4, b: &S4, s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]];
    let k1 = f(y);
    let k2 = f(&add(y, &k1, 0.5 * h));
    let k3 = f(&add(y, &k2, 0.5 * h));
    let k4 = f(&add(y, &k3, h));
    let mut out = *y;
    for i in 0..4 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrates until `level` turns non-positive; returns the state on the
/// crossing and the continuously tracked change of `arg`.
fn flow_to_crossing(
    f: &dyn Fn(&S4) -> S4,
    y0: S4,
    h: f64,
    level: &dyn Fn(&S4) -> f64,
    arg: &dyn Fn(&S4) -> f64,
) -> (S4, f64) {
    let mut y = y0;
    let mut turned = 0.0;
    let wrap = |d: f64| (d + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI;
    for step in 0..10_000_000 {
        let next = rk4(f, &y, h);
        if step > 0 && level(&next) <= 0.0 {
            let (mut lo, mut hi) = (0.0, h);
            for _ in 0..60 {
                let m = 0.5 * (lo + hi);
                if level(&rk4(f, &y, m)) > 0.0 {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            let end = rk4(f, &y, 0.5 * (lo + hi));
            turned += wrap(arg(&end) - arg(&y));
            return (end, turned);
        }
        turned += wrap(arg(&next) - arg(&y));
        y = next;
    }
    panic!("no crossing");
}

fn geometry(b: &PerturbationProfile, xi: f64) -> ([f64; 2], [f64; 2], [f64; 2]) {
    // Point, unit tangent and outward normal from finite differences of the
    // polar graph, independent of the library's analytic derivatives.
    let pt = |x: f64| {
        let r = b.radius(x);
        [r * x.cos(), r * x.sin()]
    };
    let d = 1e-6;
    let (a, c) = (pt(xi + d), pt(xi - d));
    let t = [(a[0] - c[0]) / (2.0 * d), (a[1] - c[1]) / (2.0 * d)];
    let n = t[0].hypot(t[1]);
    let u = [t[0] / n, t[1] / n];
    (pt(xi), u, [u[1], -u[0]])
}

/// One return-map step from the boundary angle `xi` and unit-tangent launch
/// angle `alpha` from the outward normal; returns `(xi1, alpha1)` on the lift.
pub fn oracle_step(xi: f64, alpha: f64, b: &PerturbationProfile, p: &PhysParams) -> (f64, f64) {
    let (e, om, mu, eh) = (p.energy, p.stiffness, p.mass_mu, p.energy + p.offset_h);
    let (z0, u0, n0) = geometry(b, xi);
    let r0 = z0[0].hypot(z0[1]);
    let speed = (2.0 * (e - 0.5 * om * r0 * r0)).sqrt();
    let (sa, ca) = alpha.sin_cos();
    let v0 = [speed * (ca * n0[0] + sa * u0[0]), speed * (ca * n0[1] + sa * u0[1])];

    let outer_f = move |y: &S4| [y[2], y[3], -om * y[0], -om * y[1]];
    let level_out = |y: &S4| y[0].hypot(y[1]) - b.radius(y[1].atan2(y[0]));
    let arg_z = |y: &S4| y[1].atan2(y[0]);
    let period = TAU / om.sqrt();
    let (y1, turn_out) =
        flow_to_crossing(&outer_f, [z0[0], z0[1], v0[0], v0[1]], period / 20_000.0, &level_out, &arg_z);
    let xi_mid = xi + turn_out;

    // Refraction inward: keep the tangential component, rescale the normal one.
    let (zm, um, nm) = geometry(b, xi_mid);
    let rm = zm[0].hypot(zm[1]);
    let vt = y1[2] * um[0] + y1[3] * um[1];
    let inner_speed2 = 2.0 * (eh + mu / rm);
    let vn = (inner_speed2 - vt * vt).sqrt();
    let yin = [vt * um[0] - vn * nm[0], vt * um[1] - vn * nm[1]];

    // Inner arc in the chart: w = sqrt(z), w' = y conj(w).
    let ang = zm[1].atan2(zm[0]);
    let (wr, wi) = (rm.sqrt() * (0.5 * ang).cos(), rm.sqrt() * (0.5 * ang).sin());
    let dw = [yin[0] * wr + yin[1] * wi, yin[1] * wr - yin[0] * wi];
    let big2 = 2.0 * eh;
    let inner_f = move |y: &S4| [y[2], y[3], big2 * y[0], big2 * y[1]];
    let level_in = |y: &S4| {
        let (zr, zi) = (y[0] * y[0] - y[1] * y[1], 2.0 * y[0] * y[1]);
        b.radius(zi.atan2(zr)) - zr.hypot(zi)
    };
    let arg_w = |y: &S4| y[1].atan2(y[0]);
    let tau_scale = 1.0 / big2.sqrt();
    let (y2, turn_w) = flow_to_crossing(&inner_f, [wr, wi, dw[0], dw[1]], tau_scale / 40_000.0, &level_in, &arg_w);
    let k = zm[0] * yin[1] - zm[1] * yin[0];
    // Shift convention: swept angle minus a full turn in the sense of motion.
    let xi1 = xi_mid + 2.0 * turn_w - TAU * k.signum();

    let (w, dwf) = ([y2[0], y2[1]], [y2[2], y2[3]]);
    let wn = w[0] * w[0] + w[1] * w[1];
    // z' = w' / conj(w) = w' w / |w|^2.
    let v = [(dwf[0] * w[0] - dwf[1] * w[1]) / wn, (dwf[0] * w[1] + dwf[1] * w[0]) / wn];
    let (z1, u1, n1) = geometry(b, xi1);
    let r1 = z1[0].hypot(z1[1]);
    let vt1 = v[0] * u1[0] + v[1] * u1[1];
    let out_speed = (2.0 * (e - 0.5 * om * r1 * r1)).sqrt();
    let alpha1 = (vt1 / out_speed).asin();
    let _ = n1;
    (xi1, alpha1)
}
