//! Structure of subset sums `FS(X)` for finite point sets `X ⊆ ℕᵏ`.
//!
//! * [`lattice`] and [`bitint`]: exact points, generator sets, certificates,
//!   and sparse big integers.
//! * [`oracle`]: brute-force subset-sum reachability, the ground truth that
//!   every constructive routine is checked against.
//! * [`cone`]: thin complete generator sets for simplicial lattice cones.
//! * [`dyadic`]: the grid `{2^m} × {2^k}`, its exceptional set, empty and
//!   dense squares.
//! * [`gap`]: generalized arithmetic progressions and dense rectangles in
//!   `FS(A × B)`.
//! * [`selftest`]: the acceptance checks, shared by the CLI and test suite.

pub mod bitint;
pub mod cone;
pub mod config;
pub mod dyadic;
pub mod error;
pub mod gap;
pub mod lattice;
pub mod oracle;
pub mod pgm;
pub mod selftest;

pub use bitint::BitInt;
pub use config::RunConfig;
pub use error::{Error, Result};
pub use lattice::{GeneratorSet, Point, Region, Representation};
