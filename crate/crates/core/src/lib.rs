//! Exact, desk-scale verification of shadowing for ultrametric and
//! zero-dimensional dynamical systems.
//!
//! Modules:
//! - [`metric`]: pseudo-orbits, shadowing predicates, brute-force search.
//! - [`symbolic`]: shift spaces, languages, finite-order detection.
//! - [`padic`]: fixed-precision p-adic numbers, maps and ball partitions.
//! - [`partitions`]: defining sequences, itineraries, PO/O tables.
//! - [`invlim`]: finite inverse systems and the Mittag-Leffler check.
//! - [`counterexamples`]: two explicit real-line systems.

pub mod counterexamples;
pub mod error;
pub mod invlim;
pub mod metric;
pub mod padic;
pub mod partitions;
pub mod scalar;
pub mod symbolic;

pub use error::{Error, Result};
pub use scalar::Exact;
