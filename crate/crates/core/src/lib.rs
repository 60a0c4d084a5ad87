//! Spectra of infinite graphs: finite graphs with infinite tails, ladders,
//! and chains of cycles.
//!
//! Two independent computational routes are provided and cross-validated:
//!
//! * the canonical reduction of a tailed graph's adjacency operator to
//!   finite component + Jacobi component, with the discrete spectrum read
//!   off the Jost polynomial ([`reduction`], [`jacobi`], [`periodic`]);
//! * the Schur-complement route through characteristic polynomials and the
//!   tail Green's function ([`schur`]).
//!
//! A brute-force finite-section oracle ([`asymptotics`]) backs both.

pub mod asymptotics;
pub mod catalog;
pub mod eigen;
pub mod error;
pub mod exact;
pub mod families;
pub mod graph;
pub mod jacobi;
pub mod periodic;
pub mod poly;
pub mod quad;
pub mod reduction;
pub mod schur;
pub mod spectrum;

pub use eigen::SymMatrix;
pub use error::{Result, SpectraError};
pub use graph::{InfiniteGraphSpec, TailSpec, WeightedGraph};
pub use jacobi::{FiniteRankJacobi, SpectralMeasure};
pub use periodic::{BandStructure, PeriodicJacobi};
pub use poly::{Interval, RealPolynomial};
pub use spectrum::{EigenClass, Multiplicity, Spectrum};
