use serde::{Deserialize, Serialize};

use crate::inner::{lc_flow, lc_from_cartesian};
use crate::outer::outer_propagate;
use crate::params::{PhysParams, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArcKind {
    Outer,
    Inner,
    EjectionCollision,
}

/// One free-flight arc between two boundary points.
///
/// `duration` is physical time for outer arcs and regularized time `tau`
/// for inner ones. `sweep` is the lifted polar-angle shift on the return-map
/// convention; `winding` is the index of the arc closed by the shortest
/// boundary arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcSegment {
    pub kind: ArcKind,
    pub start: Vec2,
    pub start_velocity: Vec2,
    pub end: Vec2,
    pub end_velocity: Vec2,
    pub duration: f64,
    pub sweep: f64,
    pub winding: i32,
}

impl ArcSegment {
    pub fn is_outer(&self) -> bool {
        self.kind == ArcKind::Outer
    }

    /// Position at native time `t` in `[0, duration]`.
    pub fn position(&self, t: f64, params: &PhysParams) -> Vec2 {
        match self.kind {
            ArcKind::Outer => outer_propagate(self.start, self.start_velocity, t, params).0,
            ArcKind::Inner | ArcKind::EjectionCollision => {
                let (w0, dw0) = lc_from_cartesian(self.start, self.start_velocity);
                let (w, _) = lc_flow(w0, dw0, t, params.lc_frequency());
                let z = w * w;
                Vec2::new(z.re, z.im)
            }
        }
    }

    /// `n + 1` equally spaced samples in native time, endpoints included.
    pub fn sample(&self, n: usize, params: &PhysParams) -> Vec<Vec2> {
        let n = n.max(1);
        (0..=n)
            .map(|i| self.position(self.duration * i as f64 / n as f64, params))
            .collect()
    }

    /// Angular momentum `z x z'`, conserved along both kinds of arc.
    pub fn angular_momentum(&self) -> f64 {
        cross(self.start, self.start_velocity)
    }
}

pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}
