//! Desk-scale verification primitives for discrete Brunn-Minkowski,
//! Prékopa-Leindler, and Borell-Brascamp-Lieb type inequalities over the
//! integer lattice.
//!
//! The crate provides:
//!
//! - [`means`]: weighted two-point power means `M_{p,λ}` with every
//!   degenerate branch and the derivative bound on mean curves;
//! - [`functions`]: finitely supported rational-valued functions on `Z^d`,
//!   exact layer-cake decompositions, and monotone transport maps between
//!   level scales;
//! - [`supconv`]: minimal admissible sup-convolutions, the unconditional
//!   functional lower bound, a convexity bound for probability sequences,
//!   and the hyperplane-gated main verifier;
//! - [`geometry`]: point sets, Minkowski sums, deficit measurements,
//!   hyperplane mass coverage, and the atom-plus-box tightness family;
//! - [`lifting`]: set-valued midpoint domains (lattice addition, cube
//!   midpoints, rounded convex combinations) and the engine recovering
//!   functional inequalities from set-level ones;
//! - [`sampling`]: deterministic random instance generators for campaigns.
//!
//! All masses and thresholds are exact rationals; irrational intermediate
//! values are computed in `f64` under a 1e-12 relative contract and stored
//! as exact dyadics where they enter rational containers.

pub mod functions;
pub mod geometry;
pub mod lifting;
pub mod means;
pub mod rational;
pub mod sampling;
pub mod supconv;

pub use functions::{LevelDecomposition, Point, SparseFunction, TransportMap};
pub use geometry::{HyperplaneFamily, NonDegeneracy, PointSet};
pub use lifting::LiftingDomain;
pub use means::MeanSpec;
pub use rational::Rational;
pub use supconv::{Verdict, VerificationReport};
