//! Invariants of tiling spaces at desk scale.
//!
//! The crate covers the pipeline from a point set (or a substitution rule)
//! to the dynamical invariants of the associated tiling space:
//!
//! - [`geometry`]: Delone sets, patch classification, the matching metric,
//!   and Voronoi tilings.
//! - [`substitution`]: symbolic (1D) and geometric (2D) substitution rules,
//!   their control-point sets, Anderson–Putnam style branched complexes,
//!   and collaring.
//! - [`complex`]: branched cell complexes, boundary operators, switching
//!   rules, and the positive homology cone (exact rational arithmetic).
//! - [`tower`]: tower systems, transition matrices, the measure cone as a
//!   nested intersection, Hilbert-metric contraction, and ergodicity
//!   verdicts.
//! - [`rectify`]: rectangular box decompositions, commensurable rescaling,
//!   torus fibrations, and the lattice-Delone construction.
//!
//! Geometric computations are generic over the floating scalar via
//! [`scalar::Real`]; all homological linear algebra is exact over the
//! rationals ([`linalg`]).

pub mod complex;
pub mod geometry;
pub mod linalg;
pub mod rectify;
pub mod scalar;
pub mod substitution;
pub mod tower;
pub mod words;

/// Default floating scalar used by the CLI and the concrete aliases.
pub type Scalar = f64;

/// Point in the default scalar.
pub type Point = geometry::Point<f64>;
/// Delone set in the default scalar.
pub type DeloneSet = geometry::DeloneSet<f64>;
/// Patch in the default scalar.
pub type Patch = geometry::Patch<f64>;
/// Voronoi diagram in the default scalar.
pub type VoronoiDiagram = geometry::VoronoiDiagram<f64>;
