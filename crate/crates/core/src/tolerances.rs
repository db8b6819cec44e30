//! Numerical tolerances used across the crate.
//!
//! Every threshold that decides a pass/fail outcome lives here so that the
//! reports and the tests refer to one value.

/// Absolute tolerance for accepting a float-valued point as singular.
pub const SINGULAR_POINT: f64 = 1e-10;

/// Event functions are polished until their magnitude drops below this.
pub const EVENT_POLISH: f64 = 1e-12;

/// Smallest step the integrator will take before giving up.
pub const MIN_STEP: f64 = 1e-14;

/// Admissible range of the integrator's relative tolerance.
pub const REL_TOL_RANGE: (f64, f64) = (1e-13, 1e-3);

/// Default relative tolerance for map and exponent computations.
pub const DEFAULT_REL_TOL: f64 = 1e-12;

/// Default bounding box half-width; orbits leaving `[-B, B]²` are reported.
pub const BOUNDING_BOX: f64 = 10.0;

/// Default maximal integration time.
pub const MAX_TIME: f64 = 1e4;

/// Maximal relative variation of an IIF ratio along probe orbits.
pub const IIF_RATIO: f64 = 1e-6;

/// Newton residual required when inverting the curvilinear chart.
pub const CHART_INVERSION: f64 = 1e-10;

/// |S| below this means the chart has left the regular regime.
pub const S_VANISHED: f64 = 1e-12;

/// Tube radius as a fraction of the minimal radius of curvature.
pub const TUBE_FRACTION: f64 = 0.3;

/// Geometric window and size of the log-log multiplicity fit.
pub const MULTIPLICITY_WINDOW: (f64, f64) = (1e-4, 1e-2);
pub const MULTIPLICITY_POINTS: usize = 12;

/// Largest admissible distance between a fitted slope and its rounding.
pub const SLOPE_ROUNDING: f64 = 0.05;

/// Values of |V| below this are treated as numerically zero.
pub const NOISE_FLOOR: f64 = 1e-280;

/// Floor in the denominator of relative residuals.
pub const RESIDUAL_FLOOR: f64 = 1e-300;

/// Numerical resonance detection: |r - q/p| below this with p, q ≤ 100.
pub const RESONANCE: f64 = 1e-9;
pub const RESONANCE_MAX_DENOMINATOR: u64 = 100;

/// Float divergence at a saddle below this counts as zero.
pub const WEAK_SADDLE: f64 = 1e-10;

/// Default number of saddle quantities and the configured maximum.
pub const DEFAULT_SADDLE_QUANTITIES: usize = 8;

/// Soft limit on polynomial degree.
pub const MAX_DEGREE: u32 = 64;

/// A return map with |Π(σ) - σ| below this on a probe grid is the identity.
pub const IDENTITY_PROBE: f64 = 1e-7;

/// A characteristic exponent certifies hyperbolicity when it exceeds both
/// this multiple of its spread between two integration tolerances and the
/// absolute floor.
pub const EXPONENT_MARGIN: f64 = 100.0;
pub const EXPONENT_FLOOR: f64 = 1e-10;

/// Residual of the implicit closed form of the ellipse family's return map.
pub const IMPLICIT_MAP: f64 = 1e-5;

/// Relative error allowed between a computed Π′(0) and e^{β₁}.
pub const RETURN_DERIVATIVE: f64 = 1e-4;
