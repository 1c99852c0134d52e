//! Scalar root finding, event location, quadrature and small polynomials.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};

/// Angle reduced to `(-pi, pi]`.
pub fn principal(x: f64) -> f64 {
    let r = (x + PI).rem_euclid(TAU) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

/// Inverse cotangent with values in `(0, pi)`.
pub fn arccot(x: f64) -> f64 {
    FRAC_PI_2 - x.atan()
}

/// Bisection on a bracket with `f(a) > 0 >= f(b)` (or the reverse) down to
/// machine resolution.
pub fn bisect_to_resolution<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    let positive_left = fa > 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        if (f(m) > 0.0) == positive_left {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// First `t` in `(0, horizon]` where `c` drops from positive to non-positive.
/// Sampling at `step` then bisection to machine resolution.
pub fn first_crossing<F: FnMut(f64) -> f64>(mut c: F, step: f64, horizon: f64) -> Result<f64> {
    let first = c(step);
    if first <= 0.0 {
        // Leaves along the interface or starts on the wrong side.
        return Err(Error::TangentialCrossing);
    }
    let mut prev = step;
    let mut t = step;
    while t < horizon {
        t = (t + step).min(horizon);
        if c(t) <= 0.0 {
            return Ok(bisect_to_resolution(&mut c, prev, t));
        }
        prev = t;
    }
    Err(Error::EventDetectionFailed)
}

/// Brent's method on a sign-changing bracket.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::ShootingDiverged { residual: fa.abs().min(fb.abs()) });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::ShootingDiverged { residual: fb.abs() })
}

/// Expands geometrically from `x0` inside `[lo, hi]` until `f` changes sign,
/// then polishes with Brent. Non-finite trial values are skipped.
pub fn solve_near<F: FnMut(f64) -> f64>(mut f: F, x0: f64, dx: f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let x0 = x0.clamp(lo, hi);
    let f0 = f(x0);
    if f0 == 0.0 {
        return Ok(x0);
    }
    let mut step = dx.abs().max(1e-14);
    let mut best = f0.abs();
    for _ in 0..80 {
        for dir in [1.0, -1.0] {
            let x = (x0 + dir * step).clamp(lo, hi);
            let fx = f(x);
            if !fx.is_finite() {
                continue;
            }
            best = best.min(fx.abs());
            if fx.signum() != f0.signum() {
                let (a, b) = if dir > 0.0 { (x0, x) } else { (x, x0) };
                return brent(&mut f, a, b, tol, 200);
            }
        }
        if x0 - step <= lo && x0 + step >= hi {
            break;
        }
        step *= 1.6;
    }
    Err(Error::ShootingDiverged { residual: best })
}

/// All sign changes of `f` on `[a, b]` found with `n` equal subintervals and
/// bisection to `tol`.
pub fn sign_change_roots<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize, tol: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    let h = (b - a) / n as f64;
    let mut x_prev = a;
    let mut f_prev = f(a);
    for i in 1..=n {
        let x = if i == n { b } else { a + h * i as f64 };
        let fx = f(x);
        if f_prev == 0.0 {
            roots.push(x_prev);
        } else if fx != 0.0 && fx.signum() != f_prev.signum() {
            let (mut lo, mut hi, mut flo) = (x_prev, x, f_prev);
            while hi - lo > tol {
                let m = 0.5 * (lo + hi);
                let fm = f(m);
                if fm.signum() == flo.signum() {
                    lo = m;
                    flo = fm;
                } else {
                    hi = m;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        if i == n && fx == 0.0 {
            roots.push(x);
        }
        x_prev = x;
        f_prev = fx;
    }
    roots
}

/// Tanh-sinh quadrature with a hard check on the reported error.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let out = quadrature::double_exponential::integrate(&f, a, b, tol * 1e-2);
    if !out.integral.is_finite() || out.error_estimate > tol {
        return Err(Error::QuadratureTolUnmet(out.error_estimate));
    }
    Ok(out.integral)
}

/// Dense polynomial, coefficient `i` multiplies `x^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|c| *c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n)
            .map(|i| self.0.get(i).copied().unwrap_or(0.0) - other.0.get(i).copied().unwrap_or(0.0))
            .collect())
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn principal_range() {
        assert_abs_diff_eq!(principal(3.0 * PI), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(principal(-PI), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(principal(7.0), 7.0 - TAU, epsilon = 1e-15);
    }

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 3.0, 1e-15, 100).unwrap();
        assert_abs_diff_eq!(r, 2f64.cbrt(), epsilon = 1e-14);
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).is_err());
    }

    #[test]
    fn crossing_of_cosine() {
        assert_eq!(first_crossing(|t: f64| -t, 1e-3, 3.0), Err(Error::TangentialCrossing));
        let t = first_crossing(|t: f64| (t + 0.1).cos(), 1e-3, 3.0).unwrap();
        assert_abs_diff_eq!(t, FRAC_PI_2 - 0.1, epsilon = 1e-14);
        assert_eq!(first_crossing(|_| 1.0, 0.1, 1.0), Err(Error::EventDetectionFailed));
    }

    #[test]
    fn roots_of_sine() {
        let r = sign_change_roots(f64::sin, 0.5, 10.0, 1000, 1e-13);
        assert_eq!(r.len(), 3);
        for (k, x) in r.iter().enumerate() {
            assert_abs_diff_eq!(*x, PI * (k + 1) as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn quadrature_against_closed_form() {
        let v = integrate(|x| (x * x + 1.0).sqrt(), 0.0, 1.0, 1e-12).unwrap();
        let exact = 0.5 * (2f64.sqrt() + (1.0 + 2f64.sqrt()).ln());
        assert_abs_diff_eq!(v, exact, epsilon = 1e-13);
    }

    #[test]
    fn poly_algebra() {
        let p = Poly(vec![1.0, 1.0]).mul(&Poly(vec![-1.0, 1.0]));
        assert_eq!(p, Poly(vec![-1.0, 0.0, 1.0]));
        assert_eq!(p.degree(), 2);
        assert_abs_diff_eq!(p.eval(3.0), 8.0);
        assert_abs_diff_eq!(p.derivative().eval(3.0), 6.0);
    }
}
