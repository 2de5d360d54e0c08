//! Finite-dimensional dilation theory for operator-valued kernels.
//!
//! The crate works with VE-spaces: complex vector spaces carrying a gramian
//! with values in an ordered *-space `Z` (scalars, matrix algebras, finite
//! products, scalar kernels). On top of that it builds
//!
//! * adjointable operators, Loynes norms and matrix amplifications,
//! * operator-valued kernels on finite sets, their positivity tests and the
//!   consequences of 2-positivity,
//! * finite *-semigroups acting on finite sets and invariance of kernels,
//! * the minimal invariant linearisation `(K; pi; V)` of a positive
//!   semidefinite invariant kernel, its reproducing-kernel realisation, and
//!   unitary equivalence witnesses between realisations,
//! * Sz.-Nagy, Stinespring (GNS) and VE-module dilations.
//!
//! Every numeric type is generic over the real scalar `T: Real` (`f32` or
//! `f64`); complex entries are `Complex<T>`. The aliases at the bottom of this
//! file fix `T = f64`, which is what the JSON layer and the CLI use.

pub mod dilations;
pub mod error;
pub mod io;
pub mod kernels;
pub mod linearise;
pub mod linalg;
pub mod operators;
pub mod ordered_space;
pub mod repkernel;
pub mod sample;
pub mod star_semigroup;
pub mod ve_space;

use std::fmt::{Debug, Display, LowerExp};

pub use nalgebra::Complex;
use nalgebra::{DMatrix, DVector, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

pub use error::{Error, Result};

/// Real scalar underlying every computation: `f32` or `f64`.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: RealField
        + Copy
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}

pub type C<T> = Complex<T>;
pub type CMat<T> = DMatrix<Complex<T>>;
pub type CVec<T> = DVector<Complex<T>>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in the scalar type")
}

/// Lossy conversion used for reporting residuals.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Positive floor for divisions, representable in `f32` and `f64`.
#[inline]
pub fn tiny<T: Real>() -> T {
    lit(1e-30)
}

/// Default cone/residual tolerance for `f64` computations.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative eigenvalue threshold below which a generator direction is
/// treated as null when forming a quotient.
pub const NULL_THRESHOLD: f64 = 1e-8;

/// `NULL_THRESHOLD`, raised to `1000 eps` for scalar types too coarse to
/// resolve it.
#[inline]
pub fn null_threshold<T: Real>() -> T {
    let floor = T::default_epsilon() * lit(1e3);
    let t = lit(NULL_THRESHOLD);
    if floor > t { floor } else { t }
}

pub use dilations::{
    amplification, AlgebraDilation, FinStarAlgebra, LinearMap, ModuleDilation, PsdSemigroupMap,
    SzNagyDilation,
};
pub use kernels::{FinSuppFunction, OperatorKernel};
pub use linearise::{InvariantLinearisation, Quotient, UnitaryWitness};
pub use operators::{AdjointableOp, OpNormCertificate};
pub use ordered_space::{Descriptor, ZElement};
pub use repkernel::RkSpace;
pub use star_semigroup::{SemigroupAction, StarSemigroup};
pub use ve_space::{CheckMode, RightAction, VeSpace};
