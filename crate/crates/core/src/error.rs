use thiserror::Error;

/// Broad failure class, used to map errors onto process exit codes and FFI
/// status values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or out-of-domain input data.
    Input,
    /// A mathematical precondition of the operation does not hold.
    Precondition,
    /// A numerical procedure failed to reach its accuracy target.
    Numerical,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate polygon: vertices {index} and {next} coincide")]
    DegeneratePolygon { index: usize, next: usize },

    #[error("operation requires odd n, got n = {n}")]
    EvenOrder { n: usize },

    #[error("operation requires even n, got n = {n}")]
    OddOrder { n: usize },

    #[error("unsupported n = {n}: {reason}")]
    UnsupportedN { n: usize, reason: &'static str },

    #[error("polygon admits no framing (obstruction {obstruction:.3e})")]
    NoFraming { obstruction: f64 },

    #[error("framing condition violated (residual {residual:.3e})")]
    FramingViolated { residual: f64 },

    #[error("framing vector parallel to the chord: circle degenerates to a line")]
    DegenerateCircle,

    #[error("circles {index} and {next} have equal signed radii")]
    EqualSignedRadii { index: usize, next: usize },

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("signed perimeter {signed_perimeter:.3e} does not vanish")]
    InconsistentClosure { signed_perimeter: f64 },

    #[error("chain is not generic")]
    NonGenericChain,

    #[error("framed polygon is not generic")]
    NonGenericFramedPolygon,

    #[error("sign assignment does not close around the cycle (residual {residual:.3e})")]
    OrientationObstruction { residual: f64 },

    #[error("sin(theta) at vertex {index} is {value:.3e}, below tolerance")]
    VanishingSine { index: usize, value: f64 },

    #[error("flow composition left the constraint set (residual {residual:.3e})")]
    StepTooLarge { residual: f64 },

    #[error("framing angle alpha = {alpha} is too close to a multiple of pi/2")]
    SingularAngle { alpha: f64 },

    #[error("path is not horizontal (relative form residual {residual:.3e})")]
    NotHorizontal { residual: f64 },

    #[error("tangent lengths are not geometric at step {step}")]
    NonGeometric { step: usize },

    #[error("polygon lost convexity at step {step}")]
    InvariantLost { step: usize },

    #[error("no return to the shifted polygon within t = {max_t}")]
    NoReturn { max_t: f64 },

    #[error("point lies inside the inner circle; no tangent exists")]
    NoTangent,

    #[error("point lies inside the curve")]
    PointInside,

    #[error("circles are concentric")]
    ConcentricCircles,

    #[error("infeasible radii: {0}")]
    InfeasibleRadii(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            InvalidInput(_) | DegeneratePolygon { .. } | InvalidChain(_) => ErrorKind::Input,
            StepTooLarge { .. } | NoReturn { .. } | Numerical(_) => ErrorKind::Numerical,
            _ => ErrorKind::Precondition,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
