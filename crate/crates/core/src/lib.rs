//! Numerical toolkit for rotational linear Weingarten surfaces.
//!
//! The crate builds the one-parameter family of periodic surfaces of
//! revolution satisfying `2aH + bK = 1` (and their cmc `b = 0` analogues),
//! computes flux integrals and end masses, runs the moving-plane reflection
//! machinery on triangle meshes, and evaluates the balance inequalities and
//! loop-parity checks for end configurations.
//!
//! Module map:
//! - [`relation`]: curvature relations `H = f(H² − K)`, ellipticity, and the
//!   pointwise solve of one principal curvature from the other.
//! - [`profile`]: the generating-curve ODE, neck/bulge detection, the
//!   W-Delaunay family and the sphere profile.
//! - [`mesh`]: indexed triangle meshes, surfaces of revolution, OBJ I/O.
//! - [`flux`]: flux at parallels (closed form and quadrature), end masses,
//!   and the balancing identity on capped cycles.
//! - [`alexandrov`]: Alexandrov functions α₁/α, moving-plane scans and
//!   symmetry detection.
//! - [`bounds`]: winding numbers, loop parity, balance verdicts and the
//!   minimum positive end count.

pub mod alexandrov;
pub mod bounds;
pub mod bvh;
pub mod error;
pub mod flux;
pub mod interp;
pub mod mesh;
pub mod ode;
pub mod profile;
pub mod relation;
pub mod report;
pub mod vec3;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
