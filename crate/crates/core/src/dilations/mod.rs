//! Dilations built as explicit constructions.
//!
//! * [`PsdSemigroupMap::sznagy_dilate`]: a positive semidefinite map on a
//!   *-semigroup factors as `phi(a* b) = V(a)* V(b)` with a *-representation
//!   `pi`, and as `phi(a) = W* pi(a) W` when there is a unit.
//! * [`LinearMap::stinespring_dilate`]: the same for a linear map on a finite
//!   *-algebra, built on `A ⊗ H` directly.
//! * [`amplification`]: `phi_n([a_ij]) = [phi(a_ij)]`.
//! * [`module_dilate`]: linearisations over a VE-module `H`, certified to
//!   carry the induced module structure.

mod algebra;
mod module;
mod semigroup;

pub use algebra::{
    amplification, verify_algebra_parts, AlgebraDilation, AlgebraDilationReport,
    AmplificationTest, FinStarAlgebra, LinearMap,
};
pub use module::{certify_module, module_dilate, ModuleCertificate, ModuleDilation};
pub use semigroup::{PsdSemigroupMap, SzNagyDilation};
