//! Exact generators for substitution-tiling vertex sets and two-dimensional
//! Ulam sets, together with the direction, gap and pair-correlation
//! statistics computed on them.
//!
//! All coordinates live in ℚ(γ) with γ = √φ (see [`numeric::GoldenValue`]);
//! deduplication and norm comparisons are exact, floats appear only when a
//! statistic is binned or exported.

pub mod error;
pub mod geometry;
pub mod numeric;
pub mod pc_recursion;
pub mod stats;
pub mod tilings;
pub mod ulam;

pub use error::{Error, Result};
pub use geometry::{AffineMap, Point, PointSet, SubstitutionRule};
pub use numeric::{GoldenValue, Rational};
