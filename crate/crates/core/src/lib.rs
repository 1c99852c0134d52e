//! Refractive Kepler-harmonic billiards.
//!
//! A particle moves at zero energy in the plane under a Kepler potential
//! inside a near-circular domain and a repulsive harmonic potential outside
//! it, refracting at the interface. The crate provides the closed-form
//! return map on the circle, a geometric return map for perturbed domains,
//! the generating function, periodic-orbit search, invariant-curve probes
//! and caustic envelopes.

pub mod arc;
pub mod boundary;
pub mod caustics;
pub mod error;
pub mod exec;
pub mod inner;
pub mod numerics;
pub mod orbit;
pub mod outer;
pub mod params;
pub mod refraction;
pub mod return_map;
pub mod variational;

pub use arc::{ArcKind, ArcSegment};
pub use boundary::{BoundaryGeometry, PerturbationProfile};
pub use error::{Error, Result};
pub use exec::Execution;
pub use params::{PhysParams, Region, Vec2};
pub use return_map::{BoundaryState, MapMethod, ShiftProfile};
