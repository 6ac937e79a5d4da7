//! Exact John-type structure theorems for generalized arithmetic
//! progressions, coset progressions and iterated sumsets in groups
//! `Z^r + Z/m_1 + ... + Z/m_k`.
//!
//! Geometry (polytopes, lattices, ellipsoids) is generic over the scalar
//! type; the progressions themselves use exact big rationals. Every
//! construction can emit a [`certificate::Certificate`] whose claims the
//! independent [`oracle`] re-checks.

pub mod certificate;
pub mod certify;
pub mod cli;
pub mod coalescence;
pub mod convex;
pub mod covering;
pub mod error;
pub mod group;
pub mod john;
pub mod lattice;
pub mod linalg;
pub mod oracle;
pub mod progression;
pub mod random;
pub mod scalar;
pub mod structure;

pub use error::{Error, Result};
pub use group::{AmbientGroup, FiniteSet, FiniteSubgroup, GroupElement};
pub use progression::{CosetProgression, Gap, Representation};
pub use scalar::{Int, Rational, Scalar};

/// Symmetric polytope with exact rational data.
pub type Polytope = convex::SymmetricPolytope<Rational>;
/// Floating-point polytope, used for quick estimates only.
pub type PolytopeF64 = convex::SymmetricPolytope<f64>;
/// Full-rank lattice with an exact rational basis.
pub type RationalLattice = lattice::Lattice<Rational>;
pub type RationalMatrix = linalg::Matrix<Rational>;
pub type IntMatrix = linalg::Matrix<Int>;
