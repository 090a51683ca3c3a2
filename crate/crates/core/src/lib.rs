//! Cluster-expansion toolkit for classical pair potentials.
//!
//! The crate evaluates Ursell functions (the integrands of Mayer-series
//! coefficients) three ways — a direct sum over connected graphs, a tree sum
//! via the Penrose identity with a minimum-spanning-tree partition scheme,
//! and tree-graph upper bounds — and computes lower bounds on the convergence
//! radii of the Mayer and virial series from one-dimensional radial
//! quadrature.
//!
//! Modules:
//! - [`potentials`]: radial pair potentials with extended-real values,
//!   stability metadata, and a registry of built-in families.
//! - [`graphs`]: bit-vector edge sets, connected-graph and labeled-tree
//!   enumeration on small vertex sets.
//! - [`scheme`]: tomonoid edge weights, the unique minimum spanning tree,
//!   the interval-top map, and exhaustive partition verification.
//! - [`ursell`]: the three Ursell evaluations and their consistency checks.
//! - [`bounds`]: quadrature for C(β) and Ĉ(β), radius formulas, the g(u)
//!   optimization, and Monte-Carlo sanity checks for small coefficients.

#![forbid(unsafe_code)]

pub mod bounds;
mod exec;
pub mod graphs;
pub mod potentials;
mod quad;
pub mod scheme;
mod sum;
pub mod ursell;

pub use exec::set_max_threads;
pub use potentials::{Configuration, Energy, PairPotential, PotentialSpec};

/// Library version, stamped into CLI reports for provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
