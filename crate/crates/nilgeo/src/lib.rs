//! Nilpotent spaces with ray geometries: exact group calculus, nil-affine
//! transformations, parabolic gradings of semisimple matrix algebras, and
//! the cocycle dynamics attached to rank-one ray structures.
//!
//! The crate is organized after the objects it computes with:
//!
//! - [`lie`]: graded nilpotent Lie algebras, the Baker-Campbell-Hausdorff
//!   group law (closed form for nilpotency order <= 3), layer-by-layer
//!   product decompositions.
//! - [`nilaffine`]: transformations `x -> c + f(x)` with `f` an algebra
//!   automorphism, ray geometries `(N x KA, N)`, nil-affine subspaces.
//! - [`parabolic`]: matrix realizations of real semisimple algebras,
//!   restricted roots, parabolic gradings for a subset of simple roots,
//!   and the two ray geometries living in every Levi subgeometry.
//! - [`dynamics`]: cocycles of nil-affine maps, omega-degree splittings,
//!   fixed points, invisible subalgebras, the radial flow and its volume
//!   expansion, and a non-properness probe.
//!
//! Everything is a pure function of immutable values; sharing across
//! threads requires no synchronization.

pub mod dynamics;
mod error;
pub mod lie;
pub mod linalg;
pub mod nilaffine;
pub mod parabolic;
pub mod report;
pub mod sampling;
pub mod suites;
pub mod scalar;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
