//! Exact classification of first-order deformations of freely generated
//! vertex algebras.
//!
//! The library computes the second cohomology dimension that counts
//! inequivalent first-order deformations: it builds the finite registry of
//! deformation unknowns on generator pairs, imposes skew-symmetry and the
//! commutator condition as an exact homogeneous linear system, quotients by
//! the coboundary image of weight-preserving D-commuting maps, and verifies
//! every emitted representative against the deformed commutator identities.
//! All arithmetic is exact: arbitrary-precision rationals, or univariate
//! rational functions in one symbolic parameter (a central charge or level).

pub mod algebra;
pub mod coboundary;
pub mod cocycle;
pub mod cohomology;
pub mod deform;
pub mod library;
pub mod linalg;
pub mod oracle;
pub mod pbw;
pub mod scalar;
pub mod textio;

pub use algebra::{AlgebraSpec, Engine, FieldDesc, Gen, OpeTable};
pub use pbw::{GeneratorId, PbwMonomial, State};
pub use scalar::{BaseScalar, LinearForm, UnknownId};
