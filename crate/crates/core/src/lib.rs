//! Exact machinery for floor-sign patterns of bounded-degree polynomials
//! and executable torus models for multiplicative ±1 functions: exact
//! pattern enumeration with a randomized oracle, closed-form counting
//! bounds, Monte Carlo estimators over the models, and a bitset search for
//! twists excluding a prescribed pattern.

pub mod bounds;
pub mod enumerate;
pub mod error;
pub mod exclusion;
pub mod lattice;
pub mod matrix;
pub mod multiplicative;
pub mod pattern;
pub mod poly;
pub mod props;
pub mod rho;
pub mod sample;
pub mod torus;

pub use error::{Error, Result};

use num_rational::BigRational;

/// The exact-rational instantiations the pipeline runs on.
pub type RationalPoly = poly::Polynomial<BigRational>;
pub type RationalCoords = poly::BinomialCoords<BigRational>;

pub use enumerate::{enumerate_patterns, EnumOptions, EnumOutcome, VertexCandidate};
pub use exclusion::{
    build_bad_set, determined_rho, find_good_rho, verify_exclusion, BadSet, ExclusionCertificate,
};
pub use multiplicative::MultiplicativeFn;
pub use pattern::{PatternSet, SignPattern};
pub use rho::Rho;
pub use sample::sample_patterns;
pub use torus::{Congruence, Model, ModelConfig, ModelPoint};
