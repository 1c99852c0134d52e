//! Minimal SVG plots built from polylines. Points may be drawn as markers on
//! an unstroked polyline, so scatter plots stay polylines too.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Dots,
}

pub struct Series {
    pub points: Vec<(f64, f64)>,
    pub style: Style,
    pub color: Option<&'static str>,
}

impl Series {
    pub fn line(points: Vec<(f64, f64)>) -> Self {
        Self { points, style: Style::Line, color: None }
    }

    pub fn dots(points: Vec<(f64, f64)>) -> Self {
        Self { points, style: Style::Dots, color: None }
    }

    pub fn color(mut self, c: &'static str) -> Self {
        self.color = Some(c);
        self
    }
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Same scale on both axes, for physical-plane pictures.
    pub equal_aspect: bool,
    pub series: Vec<Series>,
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self { title: title.into(), x_label: x_label.into(), y_label: y_label.into(), equal_aspect: false, series: Vec::new() }
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let pts = self.series.iter().flat_map(|s| s.points.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            return (0.0, 1.0, 0.0, 1.0);
        }
        let pad = |a: f64, b: f64| if b - a > 0.0 { 0.03 * (b - a) } else { 0.5 };
        let (px, py) = (pad(x0, x1), pad(y0, y1));
        let (mut x0, mut x1, mut y0, mut y1) = (x0 - px, x1 + px, y0 - py, y1 + py);
        if self.equal_aspect {
            let sx = (x1 - x0) / (WIDTH - 2.0 * MARGIN);
            let sy = (y1 - y0) / (HEIGHT - 2.0 * MARGIN);
            let s = sx.max(sy);
            let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
            x0 = cx - 0.5 * s * (WIDTH - 2.0 * MARGIN);
            x1 = cx + 0.5 * s * (WIDTH - 2.0 * MARGIN);
            y0 = cy - 0.5 * s * (HEIGHT - 2.0 * MARGIN);
            y1 = cy + 0.5 * s * (HEIGHT - 2.0 * MARGIN);
        }
        (x0, x1, y0, y1)
    }

    pub fn render(&self) -> String {
        let (x0, x1, y0, y1) = self.bounds();
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        for (k, c) in PALETTE.iter().enumerate() {
            let _ = writeln!(
                out,
                r#"<defs><marker id="dot{k}" viewBox="0 0 2 2" refX="1" refY="1" markerWidth="2" markerHeight="2"><circle cx="1" cy="1" r="1" fill="{c}"/></marker></defs>"#
            );
        }
        let frame = [(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)];
        let _ = writeln!(out, r#"<polyline fill="none" stroke="black" stroke-width="1" points="{}"/>"#, points(&frame, &sx, &sy));
        for k in 0..=4 {
            let t = k as f64 / 4.0;
            let (x, y) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
            let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, sx(x), HEIGHT - MARGIN + 16.0, tick(x));
            let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, MARGIN - 6.0, sy(y) + 4.0, tick(y));
        }
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 12.0, esc(&self.x_label));
        let _ = writeln!(
            out,
            r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            esc(&self.y_label)
        );
        let _ = writeln!(out, r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, esc(&self.title));
        for (k, s) in self.series.iter().enumerate() {
            let slot = k % PALETTE.len();
            let color = s.color.unwrap_or(PALETTE[slot]);
            let pts: Vec<_> = s.points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
            match s.style {
                Style::Line => {
                    let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#, points(&pts, &sx, &sy));
                }
                Style::Dots => {
                    let m = format!("url(#dot{slot})");
                    let _ = writeln!(
                        out,
                        r#"<polyline fill="none" stroke="none" marker-start="{m}" marker-mid="{m}" marker-end="{m}" points="{}"/>"#,
                        points(&pts, &sx, &sy)
                    );
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

fn points(pts: &[(f64, f64)], sx: &dyn Fn(f64) -> f64, sy: &dyn Fn(f64) -> f64) -> String {
    let mut s = String::with_capacity(pts.len() * 16);
    for (k, &(x, y)) in pts.iter().enumerate() {
        if k > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.2},{:.2}", sx(x), sy(y));
    }
    s
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" { "0.000".into() } else { s }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_polylines_only() {
        let mut p = Plot::new("t", "x", "y & z");
        p.series.push(Series::line(vec![(0.0, 0.0), (1.0, 2.0)]));
        p.series.push(Series::dots(vec![(0.5, 1.0), (f64::NAN, 1.0)]));
        let s = p.render();
        assert!(s.starts_with("<svg"));
        assert_eq!(s.matches("<polyline").count(), 3);
        assert!(s.contains("y &amp; z"));
        assert!(!s.contains("NaN"));
    }

    #[test]
    fn equal_aspect_keeps_circles_round() {
        let mut p = Plot::new("", "", "");
        p.equal_aspect = true;
        p.series.push(Series::line(vec![(-1.0, -1.0), (1.0, 1.0)]));
        let (x0, x1, y0, y1) = p.bounds();
        let rx = (x1 - x0) / (WIDTH - 2.0 * MARGIN);
        let ry = (y1 - y0) / (HEIGHT - 2.0 * MARGIN);
        assert!((rx - ry).abs() < 1e-12);
    }
}
