//! Determinants and characteristic polynomials of twisted Laplacians of
//! quiver representations, computed through trace and cycle expansions and
//! cross-checked against dense linear algebra.
//!
//! The crate is organised by layer:
//!
//! - [`ring`]: scalar types (complex floats, exact rationals, polynomials).
//! - [`linalg`]: dense matrices and the reference determinant.
//! - [`quiver`]: quivers, representations, weights, JSON I/O, generators.
//! - [`walks`]: cyclic walks, cycles on a quiver, multisets, prime cycles.
//! - [`blockdet`], [`taudet`]: identities for abstract block matrices.
//! - [`laplacian`], [`vectorfields`], [`euler`]: identities for the twisted
//!   Laplacian.

pub mod blockdet;
pub mod error;
pub mod euler;
pub mod laplacian;
pub mod linalg;
pub mod perm;
pub mod quiver;
pub mod ring;
pub mod taudet;
pub mod vectorfields;
pub mod walks;

pub use error::{Error, Result};
pub use linalg::{det_oracle, BlockMatrix, Matrix};
pub use quiver::{EdgeWeights, Instance, Quiver, QuiverRep, Representation};
pub use ring::{BigRational, Field, GaussianRational, IndeterminateSet, MultiPoly, Scalar};
pub use walks::{CycleMultiset, CyclicWalk, GCycle};

pub use num_complex::Complex64;

/// Default budget on elementary terms for enumeration-heavy methods.
pub const DEFAULT_BUDGET: u128 = 10_000_000;
