//! Floating scalar abstraction for the geometric layer.

use num_traits::Float;

/// Floating scalar: `f32` or `f64`.
///
/// All geometric computations (Delone checks, Voronoi cells, the matching
/// metric, Hilbert distances) are generic over this trait; combinatorial
/// and homological data stay exact regardless of the choice.
pub trait Real: Float + num_traits::FromPrimitive + num_traits::NumCast + std::fmt::Debug + std::fmt::Display + 'static {
    /// Default absolute tolerance for geometric equality.
    fn geom_tol() -> Self {
        Self::from_f64(1e-9).unwrap()
    }
}

impl Real for f32 {
    fn geom_tol() -> Self {
        1e-5
    }
}
impl Real for f64 {}
