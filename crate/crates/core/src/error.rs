//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong while building or evaluating the
/// constructions. Variants that end a whole run (as opposed to tagging a
/// single point) carry enough context to be reported verbatim.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// State value outside the flux model's declared working interval.
    OutsideWorkingInterval { u: f64, lo: f64, hi: f64 },
    /// Unsupported derivative order requested from a flux model.
    InvalidOrder(u8),
    /// ‖f″(u)‖ fell below the nondegeneracy floor somewhere it matters.
    DegenerateFlux { min_norm: f64 },
    /// Surface parameter outside the declared (or natural) domain.
    ParamOutsideDomain,
    /// Implicit gradient norm below the degeneracy floor at a surface point.
    DegenerateGradient { norm: f64 },
    /// The two boundary surfaces come closer than the separation floor.
    SurfacesIntersect { min_distance: f64 },
    /// A bundle trajectory ray never reaches the target surface.
    RayMiss { s: alloc::vec::Vec<f64> },
    /// Direction-of-motion violation: the recovered K(s) is not positive.
    NonPositiveK { k: f64 },
    /// τ outside [0, τ₀(s)] where the profile is defined.
    TauOutsideRange { tau: f64, tau0: f64 },
    /// Point (or a finite-difference neighbor) is not inside the bundle band.
    OutsideBundle,
    /// The characteristic solution is only defined before the first
    /// breaking time.
    BeyondBreaking { t: f64, t_break: f64 },
    /// Finite-difference neighbors straddle a region seam.
    SeamStraddle,
    /// Newton/bisection failed to converge.
    NonConvergence { what: &'static str, residual: f64 },
    /// Root target outside the attainable range (e.g. −Kx+b outside f′ range).
    TargetOutOfRange { target: f64, lo: f64, hi: f64 },
    /// Both implicit sign tests claim the same point.
    AmbiguousRegion,
    /// Neither inversion nor the implicit signs can place the point.
    UnresolvedRegion,
    /// The field shows no jump at the classification point.
    NotAJump { spread: f64 },
    /// Fan construction hypotheses fail (jump not absolutely nonstable,
    /// or a field vector tangent to the initial front).
    HypothesesFailed(&'static str),
    /// Non-finite values appeared in a finite-volume state.
    Instability { time: f64, step: usize },
    /// No admissible front crossing in a finite-volume state.
    NoFrontFound,
    /// Degenerate front polyline.
    DegenerateFront,
    /// Anything rejected at construction time with a specific message.
    InvalidInput(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OutsideWorkingInterval { u, lo, hi } => {
                write!(f, "state u = {u} outside working interval [{lo}, {hi}]")
            }
            Error::InvalidOrder(k) => write!(f, "derivative order {k} not in {{0, 1, 2}}"),
            Error::DegenerateFlux { min_norm } => {
                write!(f, "degenerate flux: min ‖f''(u)‖ = {min_norm}")
            }
            Error::ParamOutsideDomain => write!(f, "surface parameter outside domain"),
            Error::DegenerateGradient { norm } => {
                write!(f, "implicit gradient degenerate (norm = {norm})")
            }
            Error::SurfacesIntersect { min_distance } => {
                write!(f, "boundary surfaces not separated (min distance {min_distance})")
            }
            Error::RayMiss { s } => {
                write!(f, "ray misses the target surface at s = {s:?}; the profile problem has no solution there")
            }
            Error::NonPositiveK { k } => {
                write!(f, "recovered K = {k} is not positive (motion must run from the start surface to the end surface)")
            }
            Error::TauOutsideRange { tau, tau0 } => {
                write!(f, "tau = {tau} outside [0, {tau0}]")
            }
            Error::OutsideBundle => write!(f, "point outside the bundle band"),
            Error::BeyondBreaking { t, t_break } => {
                write!(f, "t = {t} is at or past the first breaking time {t_break}")
            }
            Error::SeamStraddle => write!(f, "finite-difference stencil straddles a region seam"),
            Error::NonConvergence { what, residual } => {
                write!(f, "{what} did not converge (residual {residual})")
            }
            Error::TargetOutOfRange { target, lo, hi } => {
                write!(f, "target {target} outside attainable range [{lo}, {hi}]")
            }
            Error::AmbiguousRegion => write!(f, "both implicit sign tests claim the point"),
            Error::UnresolvedRegion => write!(f, "point not classifiable by inversion or implicit signs"),
            Error::NotAJump { spread } => {
                write!(f, "no jump at the classification point (spread {spread})")
            }
            Error::HypothesesFailed(which) => write!(f, "construction hypotheses fail: {which}"),
            Error::Instability { time, step } => {
                write!(f, "non-finite finite-volume values at t = {time} (step {step})")
            }
            Error::NoFrontFound => write!(f, "no admissible front crossing found"),
            Error::DegenerateFront => write!(f, "front polyline has too few distinct points"),
            Error::InvalidInput(msg) => write!(f, "{msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
