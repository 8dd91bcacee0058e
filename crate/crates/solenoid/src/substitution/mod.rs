//! Substitution rules: symbolic (1D) and geometric (2D) generators for
//! Delone sets, Anderson–Putnam style branched complexes, collaring, and
//! stationary self-submersions.

mod one_d;
mod registry;
mod two_d;

pub use one_d::{anderson_putnam, ApComplex1D, Substitution1D};
pub use registry::{builtin, builtin_names, Builtin};
pub use two_d::{
    ApComplex2D, GeometricSubstitution2D, LatticeCell, LatticeKind, PlacedTile, Prototile,
};

use thiserror::Error;

/// Hard cap on generated tiles/letters.
pub const MAX_TILES: usize = 10_000_000;

/// Iteration cap for language-factor stabilization.
pub const FACTOR_ITERATION_CAP: usize = 30;

#[derive(Debug, Error)]
pub enum SubstitutionError {
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("bad substitution rule: {0}")]
    EmptyRule(String),
    #[error("iteration would exceed {0} tiles")]
    TooLarge(usize),
    #[error("language factors did not stabilize within {0} iterations; a larger cap is required")]
    FactorsUndecided(usize),
    #[error("builtin {0} is not {1}-dimensional")]
    WrongDimension(String, usize),
    #[error("substitution is not primitive")]
    NotPrimitive,
    #[error("no builtin substitution named {0}")]
    UnknownBuiltin(String),
    #[error("substitution rule images do not tile the inflated prototile: {0}")]
    BadGeometricRule(String),
    #[error("inconsistent edge orientation while gluing the complex")]
    OrientationConflict,
    #[error("rotation set must be finite multiples of 90 or 60 degrees")]
    UnsupportedRotations,
}
