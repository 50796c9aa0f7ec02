//! JSON run configuration shared by every subcommand.
//!
//! One file drives a run; unknown fields are rejected so typos surface as
//! config errors with line numbers. Every tolerance has a default that
//! matches the library's.

use serde::{Deserialize, Serialize};

use quasicomb::geom::{BoxRegion, Matrix};
use quasicomb::groups::{InternalElement, InternalGroupSpec, InternalWindow};
use quasicomb::scheme::{gallery, parse_gallery, SchemeSpec, WindowFunction};
use quasicomb::{Error, Result};

/// A scheme is either a gallery name (`"quadratic(sqrt2)"`, `"cyclic(4)"`,
/// `"padic(2,8)"`, `"trivial_Z"`) or an explicit spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SchemeCfg {
    Gallery(String),
    Explicit {
        phys_map: Vec<Vec<f64>>,
        internal: InternalGroupSpec,
        star_map: Vec<InternalElement<f64>>,
        calibration: f64,
    },
}

impl SchemeCfg {
    pub fn build(&self) -> Result<SchemeSpec<f64>> {
        match self {
            SchemeCfg::Gallery(name) => gallery(&parse_gallery(name)?),
            SchemeCfg::Explicit { phys_map, internal, star_map, calibration } => SchemeSpec::new(
                Matrix::from_rows(phys_map.clone())?,
                internal.clone(),
                star_map.clone(),
                *calibration,
            ),
        }
    }
}

/// `[lo, hi]` for one dimension or explicit `{ "lo": [...], "hi": [...] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegionCfg {
    Interval([f64; 2]),
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl RegionCfg {
    pub fn build(&self) -> Result<BoxRegion<f64>> {
        match self {
            RegionCfg::Interval([lo, hi]) => BoxRegion::new(vec![*lo], vec![*hi]),
            RegionCfg::Box { lo, hi } => BoxRegion::new(lo.clone(), hi.clone()),
        }
    }
}

/// Patch input: generated from the scheme, or a named builtin.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatchSource {
    /// Model set of the configured scheme and window on the region.
    Scheme,
    /// The locally-finite-but-not-Meyer set `{ n + k/(n+1) }`, truncated.
    Accumulating { n_max: i64 },
    /// The integers on the region.
    Integers,
    /// `step Z + offsets` on the region.
    Crystal { step: i64, offsets: Vec<i64> },
}

impl Default for PatchSource {
    fn default() -> Self {
        PatchSource::Scheme
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute equality tolerance for coordinates and weights.
    pub eq_tol: f64,
    /// Weights at or below this are dropped from generated combs.
    pub zero_tol: f64,
    /// Minimal-gap threshold for uniform discreteness verdicts.
    pub gap_threshold: f64,
    /// Spread at or below this counts as uniform density.
    pub density_tol: f64,
    /// Sup-norm tolerance for period detection.
    pub period_tol: f64,
    /// Extra slack granted to the Krein check for finite-box error.
    pub krein_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eq_tol: quasicomb::tol::EQ_TOL,
            zero_tol: 1e-12,
            gap_threshold: 0.01,
            density_tol: 0.01,
            period_tol: quasicomb::tol::EQ_TOL,
            krein_slack: 0.02,
        }
    }
}

/// Candidate frequencies for `diffract`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CandidateCfg {
    /// Use dual-scheme projections within the frequency region.
    pub dual: bool,
    /// Internal-part cutoff for dual projections.
    pub internal_cutoff: f64,
    /// Extra control frequencies.
    pub extra: Vec<Vec<f64>>,
}

impl Default for CandidateCfg {
    fn default() -> Self {
        Self { dual: true, internal_cutoff: 3.0, extra: vec![] }
    }
}

/// The single-file run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scheme: Option<SchemeCfg>,
    pub region: Option<RegionCfg>,
    pub window: Option<InternalWindow<f64>>,
    pub function: Option<WindowFunction<f64>>,
    pub patch_source: PatchSource,
    /// ε for single-ε commands.
    pub eps: Option<f64>,
    /// Decreasing ε grid for `reconstruct`.
    pub eps_grid: Vec<f64>,
    /// ε list for multi-ε reports.
    pub eps_list: Vec<f64>,
    pub freq_region: Option<RegionCfg>,
    pub pitch: f64,
    pub refine: bool,
    pub search_region: Option<RegionCfg>,
    /// Test box for difference-set scans.
    pub k_box: Option<RegionCfg>,
    /// Sliding-window box for the K-norm.
    pub norm_box: Option<RegionCfg>,
    /// `sup` or `k_norm`.
    pub norm_kind: String,
    /// Averaging boxes: centered cubes `base * 2^j`, `j < count`.
    pub box_base: f64,
    pub box_count: usize,
    pub translations: usize,
    pub seed: u64,
    pub threads: usize,
    /// Sieve half-width for `visible-points`.
    pub visible_n: i64,
    /// Block-scan bound for `visible-points`.
    pub scan_bound: i64,
    /// Emit per-point CSVs from `visible-points` only up to this n.
    pub visible_csv_limit: i64,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scheme: None,
            region: None,
            window: None,
            function: None,
            patch_source: PatchSource::Scheme,
            eps: None,
            eps_grid: vec![],
            eps_list: vec![],
            freq_region: None,
            pitch: 1e-4,
            refine: false,
            search_region: None,
            k_box: None,
            norm_box: None,
            norm_kind: "sup".into(),
            box_base: 64.0,
            box_count: 4,
            translations: 50,
            seed: 0,
            threads: 0,
            visible_n: 2000,
            scan_bound: 1000,
            visible_csv_limit: 500,
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn require_scheme(&self) -> Result<SchemeSpec<f64>> {
        self.scheme
            .as_ref()
            .ok_or_else(|| Error::Argument("config field `scheme` is required".into()))?
            .build()
    }

    pub fn require_region(&self) -> Result<BoxRegion<f64>> {
        self.region
            .as_ref()
            .ok_or_else(|| Error::Argument("config field `region` is required".into()))?
            .build()
    }

    pub fn require_window(&self) -> Result<InternalWindow<f64>> {
        self.window
            .clone()
            .ok_or_else(|| Error::Argument("config field `window` is required".into()))
    }

    pub fn require_eps(&self) -> Result<f64> {
        self.eps.ok_or_else(|| Error::Argument("config field `eps` is required".into()))
    }

    pub fn require_freq_region(&self) -> Result<BoxRegion<f64>> {
        self.freq_region
            .as_ref()
            .ok_or_else(|| Error::Argument("config field `freq_region` is required".into()))?
            .build()
    }

    pub fn search_region_or(&self, fallback: &BoxRegion<f64>) -> Result<BoxRegion<f64>> {
        match &self.search_region {
            Some(r) => r.build(),
            None => Ok(fallback.clone()),
        }
    }
}
