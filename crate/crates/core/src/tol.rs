//! Central tolerances and thresholds.
//!
//! Every comparison threshold used by the library and its verification
//! suite is defined here, so that no test carries an undocumented magic
//! number.

/// Default absolute tolerance for equality of coordinates and weights.
pub const EQ_TOL: f64 = 1e-9;

/// Character evaluations must stay on the unit circle to this accuracy.
pub const UNIT_CIRCLE_TOL: f64 = 1e-12;

/// Homomorphism identities for characters are checked to this accuracy.
pub const CHAR_HOM_TOL: f64 = 1e-10;

/// Default threshold above which a minimal gap counts as uniform
/// discreteness. Scale-free inputs should be pre-normalized.
pub const UNIFORM_DISCRETE_GAP: f64 = 1e-6;

/// Slack granted to exact set-inclusion rechecks performed in floats.
pub const INCLUSION_SLACK: f64 = 1e-9;

/// Dedup radius when collecting Minkowski sums and difference sets.
pub const DEDUP_TOL: f64 = 1e-9;

/// Annihilator pairing `exp(2 pi i <l, z>)` must equal 1 to this accuracy.
pub const PAIRING_TOL: f64 = 1e-9;

/// Slack for the norm-domination identity `sup <= K-norm`.
pub const NORM_DOMINATION_SLACK: f64 = 1e-12;

/// Base slack for the Krein inequality before estimation error is added.
pub const KREIN_SLACK: f64 = 1e-6;
