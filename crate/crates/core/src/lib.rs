//! Exact combinatorial stability theory for compactified Jacobians over
//! marked nodal curves.
//!
//! A marked nodal curve is modelled by its [`MarkedDualGraph`]. Rank-1
//! torsion-free simple sheaves become [`SheafType`]s (non-free nodes plus a
//! multidegree on the partial normalization), and polarizations are compiled
//! to per-vertex rational weights ([`QProfile`]). The [`stability`] module
//! decides and enumerates (semi/quasi)stable sheaf types, [`maps`] implements
//! clutching, point forgetting, Abel–Jacobi sections and parameter
//! translation, and [`lattice`] provides integer Laplacian oracles.
//!
//! All arithmetic is exact: rationals are [`num_rational::BigRational`] and
//! lattice computations use arbitrary-precision integers.

pub mod corpus;
pub mod error;
pub mod graph;
pub mod io;
pub mod label;
pub mod lattice;
pub mod maps;
pub mod polarization;
pub mod rational;
pub mod sheaf;
pub mod stability;

pub use error::{Error, Result};
pub use graph::{
    EdgeId, GraphSpec, MarkedDualGraph, NodeTypeLabel, SeparatingNode, Subcurve,
    SubcurveInvariants, VertexSet,
};
pub use label::Label;
pub use polarization::{CanonicalPolarization, ExplicitPolarization, Polarization, QProfile};
pub use rational::Q;
pub use sheaf::SheafType;
pub use stability::{Mode, StabilityStatus, StabilityVerdict};
