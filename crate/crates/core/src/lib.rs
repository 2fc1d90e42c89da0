//! Systems of subspaces of a finite-dimensional complex Hilbert space whose
//! pairwise relations follow a star graph `K_{1,N}`: the Gram-operator
//! correspondence, the operator `B(Q₁, …, Q_m)`, irreducibility checks and
//! the classification of irreducible systems by the angle parameters.

pub mod classification;
pub mod error;
pub mod g_construction;
pub mod irreducibility;
pub mod json;
pub mod numerics;
pub mod sampling;
pub mod star_b;
pub mod subspace_system;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, ComplexVector, Tolerance, C64};
