//! Exact algebra for quasi-transitive morphisms of affine spaces.
//!
//! The crate computes the cotangent subvariety cut out by pairings of the
//! kernel vector fields of a polynomial morphism, decides the fiber-dimension
//! inequality that defines quasi-transitivity at a chosen fiber, builds the
//! functorial stratification of a map to the affine line, and models smooth
//! p-adic measures at a finite level so that pushforwards, convolutions and
//! Fourier transforms can be computed exactly.
//!
//! Everything here is `no_std` + `alloc`. The `parallel` feature pulls in
//! `std` and rayon for the brute-force point counter.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod arith;
pub mod error;
pub mod fq_oracle;
pub mod groebner;
pub mod morphism;
pub mod padic;
pub mod poly;
pub mod stratify;

pub use arith::{CyclotomicNumber, ExtendedValuation, Integer, Rational};
pub use error::{Error, Result};
pub use groebner::{GroebnerBasis, Ideal, Limits, SyzygyBasis};
pub use morphism::{BPhiIdeal, KernelFields, PolynomialMorphism, QtReport, Verdict};
pub use padic::{IntegerPolyMap, LevelMeasure, QuotientWindow};
pub use poly::{MonomialOrder, PolyMatrix, PolyRing, Polynomial};
