//! Stabilizer simulation of sparse nonlocal Clifford circuits.
//!
//! Two-qubit gates act between sites at power-of-two distances with a
//! probability set by an interaction exponent `s`. The crate provides the
//! sign-free tableau, the circuit schedule, linear and treelike geometry,
//! entropy-based diagnostics, the teleportation probe and ensemble runners.

pub mod bitmatrix;
pub mod circuit;
pub mod diagnostics;
pub mod ensemble;
mod error;
pub mod experiments;
pub mod geometry;
pub mod region;
pub mod symplectic;
pub mod tableau;
pub mod teleport;

pub use bitmatrix::BitMatrix;
pub use circuit::{Circuit, CircuitConfig, HalfSystemLayer, LayerOrder, Parity};
pub use ensemble::Ensemble;
pub use error::{Error, Result};
pub use geometry::GeometryKind;
pub use region::{Region, RegionTag};
pub use symplectic::TwoQubitSymplectic;
pub use tableau::{MeasurementKind, Tableau};
