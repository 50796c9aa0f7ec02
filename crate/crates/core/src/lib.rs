//! Cut-and-project machinery at desk scale.
//!
//! This crate builds concrete cut-and-project schemes over a catalog of
//! internal groups (Euclidean, cyclic, truncated p-adic and finite products
//! of these), generates model sets and weighted Dirac combs from them, and
//! provides the decision procedures that surround such point sets:
//!
//! - Delone / Meyer test batteries on finite point patches ([`pointset`]),
//! - sup- and sliding-window norms of weighted combs together with their
//!   almost-period sets ([`combs`]),
//! - reconstruction of internal-space coordinates from a family of
//!   almost-period sets, with the axiom checks that make the construction
//!   legitimate ([`completion`]),
//! - ε-dual character sets of a patch and their inclusion lemmas
//!   ([`epsdual`]),
//! - autocorrelation, Fourier–Bohr coefficients, Bragg-peak sets, means and
//!   densities ([`diffraction`]).
//!
//! All point and weight arithmetic is generic over the scalar type through
//! the [`Real`] trait (`f64` by default, `f32` available); abstract lattice
//! coordinates are exact `i64` end to end, so window membership never
//! depends on accumulated float error in the coordinates themselves.
//!
//! Every operation is a pure function over immutable values and is safe to
//! call concurrently.

pub mod combs;
pub mod completion;
pub mod diffraction;
pub mod epsdual;
mod error;
pub mod geom;
pub mod groups;
pub mod io;
pub mod pointset;
mod scalar;
pub mod scheme;
pub mod tol;

pub use error::{Error, Result};
pub use scalar::Real;

/// Concrete aliases for the common double-precision instantiation.
pub mod f64_types {
    pub type BoxRegion = crate::geom::BoxRegion<f64>;
    pub type PointPatch = crate::geom::PointPatch<f64>;
    pub type InternalWindow = crate::groups::InternalWindow<f64>;
    pub type InternalElement = crate::groups::InternalElement<f64>;
    pub type InternalCharacter = crate::groups::InternalCharacter<f64>;
    pub type SchemeSpec = crate::scheme::SchemeSpec<f64>;
    pub type WeightedComb = crate::scheme::WeightedComb<f64>;
    pub type WindowFunction = crate::scheme::WindowFunction<f64>;
    pub type AlmostPeriodSet = crate::combs::AlmostPeriodSet<f64>;
    pub type PeriodFamily = crate::completion::PeriodFamily<f64>;
    pub type CharacterSet = crate::epsdual::CharacterSet<f64>;
    pub type DiffractionTable = crate::diffraction::DiffractionTable<f64>;
    pub type BoxSequence = crate::diffraction::BoxSequence<f64>;
}

/// Single-precision aliases; mainly exercised by the generic test suite.
pub mod f32_types {
    pub type BoxRegion = crate::geom::BoxRegion<f32>;
    pub type PointPatch = crate::geom::PointPatch<f32>;
    pub type InternalWindow = crate::groups::InternalWindow<f32>;
    pub type SchemeSpec = crate::scheme::SchemeSpec<f32>;
    pub type WeightedComb = crate::scheme::WeightedComb<f32>;
}
