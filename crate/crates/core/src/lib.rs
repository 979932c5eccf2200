//! Exact-arithmetic toolkit for Bell local polytopes.
//!
//! The crate enumerates local deterministic vertices, converts between full
//! and Collins–Gisin coordinates, enumerates facets by double description,
//! projects linear systems by Fourier–Motzkin elimination, certifies facets,
//! and classifies inequalities up to relabelings of parties, settings and
//! outcomes. No floating point is used anywhere in the core.

pub mod arith;
pub mod error;
pub mod families;
pub mod inequality;
pub mod polytope;
pub mod scenario;

pub use error::{Error, Result};
