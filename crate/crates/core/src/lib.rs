//! Non-asymptotic upper bounds on quantum communication rates derived from
//! the resource theory of unextendibility.
//!
//! The crate is organized bottom-up:
//! - [`numerics`]: log-domain probability arithmetic and binary classical divergences
//! - [`statefam`]: k-extendibility thresholds and closed-form divergences for
//!   isotropic and Werner state families
//! - [`hyptest`]: exact classical ε-hypothesis-testing divergence (Neyman–Pearson)
//!   with a type-class fast path for product Bernoulli distributions
//! - [`lp`]: small dense simplex solver used by the erasure bound and as an
//!   independent oracle for `hyptest`
//! - [`bounds`]: the rate bounds for depolarizing and erasure channels, the
//!   adaptive-protocol bound, pretty strong converse, and supporting quantities

pub mod bounds;
pub mod error;
pub mod hyptest;
pub mod lp;
pub mod numerics;
pub mod par;
pub mod statefam;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
