use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    Domain(String),
    #[error("evaluation at the Kepler center")]
    Singularity,
    #[error("energy identity violated by {0:e}")]
    EnergyMismatch(f64),
    #[error("outer endpoints antipodal or sweep {0} outside (-pi, pi)")]
    AntipodalEndpoints(f64),
    #[error("inner sweep {0} outside (-2pi, 2pi)")]
    SweepOutOfRange(f64),
    #[error("shooting diverged, residual {residual:e}")]
    ShootingDiverged { residual: f64 },
    #[error("degenerate conic: zero angular momentum")]
    DegenerateConic,
    #[error("winding number changed from {expected} to {found}")]
    WindingChanged { expected: i32, found: i32 },
    #[error("action {0} outside the admissible range")]
    OutOfActionRange(f64),
    #[error("no boundary crossing within the search horizon")]
    EventDetectionFailed,
    #[error("tangential boundary crossing")]
    TangentialCrossing,
    #[error("total reflection, inner angle {beta}")]
    TotalReflection { beta: f64 },
    #[error("no non-homothetic fixed point")]
    NoFixedPoint,
    #[error("quadrature error estimate {0:e} above tolerance")]
    QuadratureTolUnmet(f64),
    #[error("degenerate stationarity equation")]
    DegenerateStationarity,
    #[error("no intermediate refraction point")]
    NoIntermediatePoint,
    #[error("orbit too short: {0} states")]
    InsufficientLength(usize),
    #[error("rotation number {0} not attained")]
    RangeEmpty(f64),
    #[error("periodic orbit search stalled: {0}")]
    DescentStalled(String),
    #[error("orbit terminated at step {step}: {reason}")]
    OrbitTerminated { step: usize, reason: String },
    #[error("residual {0:e} above tolerance")]
    ResidualTooLarge(f64),
    #[error("envelope Newton diverged at zeta = {zeta}")]
    NewtonDiverged { zeta: f64 },
    #[error("degenerate envelope at zeta = {zeta}")]
    DegenerateEnvelope { zeta: f64 },
}
