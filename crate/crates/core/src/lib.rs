//! Edit-based Markov chains on subgraphs of a fixed host graph.
//!
//! A state is a subset of host edges. Each step samples an *edit* (a partial
//! assignment of "present"/"absent" to host edges) and applies it. Edits form a
//! left regular band under composition, which gives the chains a closed-form
//! spectral theory: eigenvalues are indexed by flats of the support lattice,
//! multiplicities come from Möbius inversion, and for single-edge edits the
//! eigenvectors, stationary law and commute times are explicit.
//!
//! The crate is split along those lines:
//!
//! - [`hostgraph`]: host graphs and edge sets (bitmask semantics).
//! - [`edits`]: the edit semigroup in reduced form.
//! - [`lattice`]: support lattices, Möbius function, multiplicities.
//! - [`process`]: driving distributions and seeded simulation.
//! - [`spectral`]: the exact desk-scale engine (transition matrices,
//!   stationary laws, eigen-systems, mixing, hitting and commute times).
//! - [`export`] and [`verify`]: artifact emitters and the oracle suite.
//!
//! Every numeric routine is generic over [`Scalar`], so the same code runs in
//! double precision or with exact rationals.

pub mod edits;
pub mod error;
pub mod export;
pub mod hostgraph;
pub mod lattice;
pub mod linalg;
pub mod process;
pub mod scalar;
pub mod spectral;
pub mod verify;

pub use edits::{Edit, MaskEdit, Sign};
pub use error::{Error, Result};
pub use hostgraph::{EdgeSet, HostGraph, HostSpec, MAX_ENUM_EDGES};
pub use lattice::{SpectrumEntry, SpectrumReport, SupportLattice};
pub use process::{Trajectory, WeightedEdits};
pub use scalar::{Rational, Scalar};
pub use spectral::{Restrict, TransitionMatrix};
